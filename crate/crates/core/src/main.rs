fn main() {
    std::process::exit(bellport::cli::run_main(std::env::args_os()));
}
