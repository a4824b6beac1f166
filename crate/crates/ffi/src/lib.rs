//! C interface to the sparse SAR toolkit.
//!
//! Every fallible function returns an `int32_t` status (`SSAR_OK` or a
//! negative code) and writes results through out-pointers. Objects are opaque
//! handles owned by the caller and released with the matching `*_free`.
//! Complex buffers are interleaved `(re, im)` pairs of `double`, azimuth-major.
//! The message of the last failure on the calling thread is available from
//! `ssar_last_error_message`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use sparse_sar::eval::mse;
use sparse_sar::experiment::{reconstruct, LambdaRule, OperatorKind, SolverSpec};
use sparse_sar::radar::{preset, simulate_echo, EchoData, RadarConfig};
use sparse_sar::recon::ReconResult;
use sparse_sar::sampling::jittered_plan;
use sparse_sar::scene::{random_sparse_scene, SceneGeometry, SceneGrid};
use sparse_sar::{Error, C64};

pub const SSAR_OK: i32 = 0;
pub const SSAR_ERR_NULL: i32 = -1;
pub const SSAR_ERR_INVALID: i32 = -2;
pub const SSAR_ERR_SHAPE: i32 = -3;
pub const SSAR_ERR_BUDGET: i32 = -4;
pub const SSAR_ERR_DIVERGED: i32 = -5;
pub const SSAR_ERR_IO: i32 = -6;
pub const SSAR_ERR_PANIC: i32 = -7;
pub const SSAR_ERR_UTF8: i32 = -8;

/// Radar configuration with its matched scene grid.
pub struct SsarRadar {
    config: RadarConfig,
    geometry: SceneGeometry,
}

pub struct SsarScene(SceneGrid);

pub struct SsarEcho(EchoData);

pub struct SsarResult(ReconResult);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ShapeMismatch { .. } => SSAR_ERR_SHAPE,
            Error::BudgetExceeded { .. } => SSAR_ERR_BUDGET,
            Error::Diverged { .. } => SSAR_ERR_DIVERGED,
            Error::Io { .. } | Error::Format { .. } => SSAR_ERR_IO,
            _ => SSAR_ERR_INVALID,
        };
        Failure::new(code, e.to_string())
    }
}

fn set_last_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

/// Run `body`, turning errors and panics into status codes.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> i32 {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => SSAR_OK,
        Ok(Err(f)) => {
            set_last_error(&f.message);
            f.code
        }
        Err(panic) => {
            let what = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("internal panic: {what}"));
            SSAR_ERR_PANIC
        }
    }
}

fn null(what: &str) -> Failure {
    Failure::new(SSAR_ERR_NULL, format!("`{what}` is NULL"))
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_boxed<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    put(out, Box::into_raw(Box::new(value)), "out")
}

unsafe fn read_complex<'a>(data: *const f64, len: usize) -> Result<&'a [f64], Failure> {
    if data.is_null() {
        return Err(null("data"));
    }
    Ok(std::slice::from_raw_parts(data, 2 * len))
}

unsafe fn write_complex(src: &[C64], out: *mut f64, len: usize) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    if len != src.len() {
        return Err(Failure::new(SSAR_ERR_SHAPE, format!("buffer holds {len} values, {} needed", src.len())));
    }
    let dst = std::slice::from_raw_parts_mut(out, 2 * len);
    for (pair, z) in dst.chunks_exact_mut(2).zip(src) {
        pair[0] = z.re;
        pair[1] = z.im;
    }
    Ok(())
}

/// Message of the last failure on this thread, or an empty string. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ssar_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ssar_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Look up a named preset ("desk-small", "desk", "tianjin-c-band").
///
/// # Safety
/// `name` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ssar_radar_preset(name: *const c_char, out: *mut *mut SsarRadar) -> i32 {
    guard(|| {
        if name.is_null() {
            return Err(null("name"));
        }
        let name = CStr::from_ptr(name)
            .to_str()
            .map_err(|e| Failure::new(SSAR_ERR_UTF8, format!("preset name: {e}")))?;
        let p = preset(name)?;
        let geometry = p.geometry()?;
        put_boxed(out, SsarRadar { config: p.radar, geometry })
    })
}

/// Scene grid shape of `radar`.
///
/// # Safety
/// `radar` must be a live handle; `rows` and `cols` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ssar_radar_scene_shape(radar: *const SsarRadar, rows: *mut usize, cols: *mut usize) -> i32 {
    guard(|| {
        let r = get(radar, "radar")?;
        put(rows, r.geometry.rows, "rows")?;
        put(cols, r.geometry.cols, "cols")
    })
}

/// Full-rate echo shape (pulses, range bins) of `radar`.
///
/// # Safety
/// `radar` must be a live handle; `pulses` and `bins` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ssar_radar_echo_shape(radar: *const SsarRadar, pulses: *mut usize, bins: *mut usize) -> i32 {
    guard(|| {
        let r = get(radar, "radar")?;
        put(pulses, r.config.pulses, "pulses")?;
        put(bins, r.config.range_samples, "bins")
    })
}

/// # Safety
/// `radar` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ssar_radar_free(radar: *mut SsarRadar) {
    if !radar.is_null() {
        drop(Box::from_raw(radar));
    }
}

/// Scene with `strong_cells` random cells of magnitude in
/// `[amplitude_min, amplitude_max]` and uniform phase.
///
/// # Safety
/// `radar` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ssar_scene_random(
    radar: *const SsarRadar,
    strong_cells: usize,
    amplitude_min: f64,
    amplitude_max: f64,
    seed: u64,
    out: *mut *mut SsarScene,
) -> i32 {
    guard(|| {
        let r = get(radar, "radar")?;
        let scene = random_sparse_scene(r.geometry, strong_cells, (amplitude_min, amplitude_max), seed)?;
        put_boxed(out, SsarScene(scene))
    })
}

/// Scene on the grid of `radar` from `len` interleaved complex values.
///
/// # Safety
/// `data` must hold `2 * len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ssar_scene_from_buffer(
    radar: *const SsarRadar,
    data: *const f64,
    len: usize,
    out: *mut *mut SsarScene,
) -> i32 {
    guard(|| {
        let r = get(radar, "radar")?;
        let values = read_complex(data, len)?;
        let reflectivity = values.chunks_exact(2).map(|p| C64::new(p[0], p[1])).collect();
        put_boxed(out, SsarScene(SceneGrid::from_vec(r.geometry, reflectivity)?))
    })
}

/// Number of cells of `scene`.
///
/// # Safety
/// `scene` must be a live handle; `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ssar_scene_len(scene: *const SsarScene, len: *mut usize) -> i32 {
    guard(|| put(len, get(scene, "scene")?.0.geometry.len(), "len"))
}

/// Copy the reflectivity into `out`, which must hold exactly `len` values.
///
/// # Safety
/// `scene` must be a live handle; `out` must hold `2 * len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ssar_scene_copy(scene: *const SsarScene, out: *mut f64, len: usize) -> i32 {
    guard(|| write_complex(&get(scene, "scene")?.0.reflectivity, out, len))
}

/// # Safety
/// `scene` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ssar_scene_free(scene: *mut SsarScene) {
    if !scene.is_null() {
        drop(Box::from_raw(scene));
    }
}

/// Simulate a jittered under-sampled acquisition. `alpha` is the azimuth
/// rate factor, `jitter_fraction` the jitter width as a fraction of its
/// ordering bound `1 / (2 alpha prf)`, `range_ratio` the fraction of range
/// bins kept. An infinite `snr_db` gives noiseless data.
///
/// # Safety
/// `radar` and `scene` must be live handles; `out` must be writable.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn ssar_simulate_jittered(
    radar: *const SsarRadar,
    scene: *const SsarScene,
    alpha: f64,
    jitter_fraction: f64,
    range_ratio: f64,
    snr_db: f64,
    seed: u64,
    out: *mut *mut SsarEcho,
) -> i32 {
    guard(|| {
        let r = get(radar, "radar")?;
        let s = get(scene, "scene")?;
        if s.0.geometry != r.geometry {
            return Err(Failure::new(SSAR_ERR_SHAPE, "scene grid does not match the radar"));
        }
        if !(0.0..1.0).contains(&jitter_fraction) {
            return Err(Failure::new(SSAR_ERR_INVALID, format!("jitter_fraction {jitter_fraction} is outside [0, 1)")));
        }
        let jw = jitter_fraction / (2.0 * alpha * r.config.prf);
        let plan = jittered_plan(&r.config, alpha, jw, range_ratio, seed)?;
        let echo = simulate_echo(&r.config, &s.0, &plan, Some(snr_db), seed.wrapping_add(1))?;
        put_boxed(out, SsarEcho(echo))
    })
}

/// Number of acquired samples in `echo`.
///
/// # Safety
/// `echo` must be a live handle; `count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ssar_echo_acquired(echo: *const SsarEcho, count: *mut usize) -> i32 {
    guard(|| put(count, get(echo, "echo")?.0.acquired(), "count"))
}

/// # Safety
/// `echo` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ssar_echo_free(echo: *mut SsarEcho) {
    if !echo.is_null() {
        drop(Box::from_raw(echo));
    }
}

/// Reconstruct the scene from `echo` with `l_q` shrinkage. The
/// regularization weight is `lambda_fraction * max |Phi^H y|`. `fast`
/// selects the FFT-based operator instead of the exact matrix.
///
/// # Safety
/// `radar` and `echo` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ssar_reconstruct(
    radar: *const SsarRadar,
    echo: *const SsarEcho,
    q: f64,
    lambda_fraction: f64,
    max_iters: usize,
    fast: bool,
    out: *mut *mut SsarResult,
) -> i32 {
    guard(|| {
        let r = get(radar, "radar")?;
        let e = get(echo, "echo")?;
        let solver = SolverSpec {
            q,
            lambda: LambdaRule::FractionOfMax(lambda_fraction),
            max_iters,
            operator: if fast { OperatorKind::Fast } else { OperatorKind::Dense },
            ..SolverSpec::default()
        };
        let result = reconstruct(&r.config, &r.geometry, &e.0, &solver)?;
        put_boxed(out, SsarResult(result))
    })
}

/// Copy the estimate into `out`, which must hold exactly `len` values.
///
/// # Safety
/// `result` must be a live handle; `out` must hold `2 * len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ssar_result_estimate(result: *const SsarResult, out: *mut f64, len: usize) -> i32 {
    guard(|| write_complex(&get(result, "result")?.0.estimate, out, len))
}

/// # Safety
/// `result` must be a live handle; `iterations` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ssar_result_iterations(result: *const SsarResult, iterations: *mut usize) -> i32 {
    guard(|| put(iterations, get(result, "result")?.0.iterations, "iterations"))
}

/// Final data residual `||y - Phi x||`.
///
/// # Safety
/// `result` must be a live handle; `residual` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ssar_result_residual(result: *const SsarResult, residual: *mut f64) -> i32 {
    guard(|| put(residual, get(result, "result")?.0.residual, "residual"))
}

/// Mean squared error of the estimate against `truth`, after removing a
/// common phase.
///
/// # Safety
/// `result` and `truth` must be live handles; `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ssar_result_mse(result: *const SsarResult, truth: *const SsarScene, value: *mut f64) -> i32 {
    guard(|| {
        let r = get(result, "result")?;
        let t = get(truth, "truth")?;
        put(value, mse(&r.0.estimate, &t.0.reflectivity)?, "value")
    })
}

/// # Safety
/// `result` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ssar_result_free(result: *mut SsarResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}
