//! File formats: complex binaries with JSON sidecars, packed masks, PGM
//! images, CSV tables and a content-hashed run manifest.
//!
//! A complex array `<base>.bin` holds little-endian `f32` pairs `(re, im)` in
//! row-major order; `<base>.json` describes its shape and geometry. Echo masks
//! go to `<base>.mask`, one bit per sample, least significant bit first.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{check_len, Error, Result};
use crate::radar::EchoData;
use crate::scene::{SceneGeometry, SceneGrid};
use crate::C64;

pub fn with_suffix(base: &Path, suffix: &str) -> PathBuf {
    let mut s = base.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Format {
        path: path.into(),
        reason: e.to_string(),
    })?;
    text.push('\n');
    write_bytes(path, text.as_bytes())
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let bytes = read_bytes(path)?;
    serde_json::from_slice(&bytes).map_err(|e| Error::Format {
        path: path.into(),
        reason: e.to_string(),
    })
}

pub fn encode_complex(data: &[C64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(data.len() * 8);
    for z in data {
        out.extend_from_slice(&(z.re as f32).to_le_bytes());
        out.extend_from_slice(&(z.im as f32).to_le_bytes());
    }
    out
}

pub fn decode_complex(path: &Path, bytes: &[u8], expected: usize) -> Result<Vec<C64>> {
    if bytes.len() != expected * 8 {
        return Err(Error::Format {
            path: path.into(),
            reason: format!("expected {} bytes, found {}", expected * 8, bytes.len()),
        });
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| {
            let re = f32::from_le_bytes([c[0], c[1], c[2], c[3]]);
            let im = f32::from_le_bytes([c[4], c[5], c[6], c[7]]);
            C64::new(re as f64, im as f64)
        })
        .collect())
}

pub fn pack_mask(mask: &[bool]) -> Vec<u8> {
    let mut out = vec![0u8; mask.len().div_ceil(8)];
    for (i, &b) in mask.iter().enumerate() {
        if b {
            out[i / 8] |= 1 << (i % 8);
        }
    }
    out
}

pub fn unpack_mask(bytes: &[u8], len: usize) -> Vec<bool> {
    (0..len).map(|i| bytes.get(i / 8).is_some_and(|b| b >> (i % 8) & 1 == 1)).collect()
}

pub fn save_scene(base: &Path, scene: &SceneGrid) -> Result<Vec<PathBuf>> {
    let bin = with_suffix(base, ".bin");
    let json = with_suffix(base, ".json");
    write_json(&json, &scene.geometry)?;
    write_bytes(&bin, &encode_complex(&scene.reflectivity))?;
    Ok(vec![json, bin])
}

pub fn load_scene(base: &Path) -> Result<SceneGrid> {
    let json = with_suffix(base, ".json");
    let bin = with_suffix(base, ".bin");
    let geometry: SceneGeometry = read_json(&json)?;
    geometry.validate()?;
    let data = decode_complex(&bin, &read_bytes(&bin)?, geometry.len())?;
    SceneGrid::from_vec(geometry, data)
}

pub fn save_echo(base: &Path, echo: &EchoData) -> Result<Vec<PathBuf>> {
    let bin = with_suffix(base, ".bin");
    let json = with_suffix(base, ".json");
    let mask = with_suffix(base, ".mask");
    write_json(&json, echo)?;
    write_bytes(&bin, &encode_complex(&echo.data))?;
    write_bytes(&mask, &pack_mask(&echo.mask))?;
    Ok(vec![json, bin, mask])
}

pub fn load_echo(base: &Path) -> Result<EchoData> {
    let json = with_suffix(base, ".json");
    let bin = with_suffix(base, ".bin");
    let mask_path = with_suffix(base, ".mask");
    let mut echo: EchoData = read_json(&json)?;
    check_len("echo azimuth times", echo.rows, echo.azimuth_times.len())?;
    check_len("echo range times", echo.cols, echo.range_times.len())?;
    let n = echo.rows * echo.cols;
    echo.data = decode_complex(&bin, &read_bytes(&bin)?, n)?;
    let packed = read_bytes(&mask_path)?;
    if packed.len() != n.div_ceil(8) {
        return Err(Error::Format {
            path: mask_path,
            reason: format!("expected {} mask bytes, found {}", n.div_ceil(8), packed.len()),
        });
    }
    echo.mask = unpack_mask(&packed, n);
    echo.validate()?;
    Ok(echo)
}

/// 8-bit binary PGM of `|image|` in dB relative to its peak, clipped to
/// `dynamic_range_db`.
pub fn encode_pgm(image: &[C64], rows: usize, cols: usize, dynamic_range_db: f64) -> Result<Vec<u8>> {
    check_len("image", rows * cols, image.len())?;
    if !(dynamic_range_db > 0.0) {
        return Err(Error::invalid("dynamic_range_db", "must be positive"));
    }
    let peak = image.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let header = format!(
        "P5\n# v = round(255 * (clamp(20*log10(|z|/peak), -{dr}, 0) + {dr}) / {dr}), peak = {peak:e}, zero -> 0\n{cols} {rows}\n255\n",
        dr = dynamic_range_db
    );
    let mut out = header.into_bytes();
    for z in image {
        let a = z.norm();
        let v = if peak > 0.0 && a > 0.0 {
            let db = (20.0 * (a / peak).log10()).clamp(-dynamic_range_db, 0.0);
            (255.0 * (db + dynamic_range_db) / dynamic_range_db).round() as u8
        } else {
            0
        };
        out.push(v);
    }
    Ok(out)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

/// Hash every listed file (relative to `dir`) into `dir/manifest.json`.
pub fn write_manifest(dir: &Path, files: &[PathBuf]) -> Result<PathBuf> {
    let mut entries = Vec::new();
    let mut sorted: Vec<&PathBuf> = files.iter().collect();
    sorted.sort();
    sorted.dedup();
    for f in sorted {
        let bytes = read_bytes(f)?;
        let rel = f.strip_prefix(dir).unwrap_or(f);
        entries.push(ManifestEntry {
            path: rel.to_string_lossy().replace('\\', "/"),
            bytes: bytes.len() as u64,
            sha256: sha256_hex(&bytes),
        });
    }
    let path = dir.join("manifest.json");
    write_json(&path, &serde_json::json!({ "files": entries }))?;
    Ok(path)
}

pub fn write_json_file<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_json(path, value)
}

pub fn read_json_file<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    read_json(path)
}
