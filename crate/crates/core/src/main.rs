fn main() {
    std::process::exit(sparse_sar::cli::main());
}
