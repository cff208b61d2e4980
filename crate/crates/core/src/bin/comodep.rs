fn main() {
    std::process::exit(comodep::cli::run_from_env());
}
