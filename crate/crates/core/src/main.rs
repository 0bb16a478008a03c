fn main() {
    std::process::exit(tschottky::cli::run_cli(std::env::args_os()));
}
