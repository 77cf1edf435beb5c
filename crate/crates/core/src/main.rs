fn main() {
    let code = cubeproc::cli::main_with(std::env::args().collect());
    std::process::exit(code);
}
