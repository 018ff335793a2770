fn main() {
    std::process::exit(phmm_core::cli::run_cli(std::env::args_os()));
}
