fn main() {
    std::process::exit(shapeval::cli::run_cli(std::env::args_os()));
}
