fn main() {
    std::process::exit(startle_surprise::cli::run_from_args(std::env::args_os()))
}
