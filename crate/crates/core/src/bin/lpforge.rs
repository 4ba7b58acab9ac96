fn main() {
    std::process::exit(lpforge::cli::run_from(std::env::args_os()));
}
