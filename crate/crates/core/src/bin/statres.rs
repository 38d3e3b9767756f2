fn main() {
    std::process::exit(statres::cli::run_from(std::env::args_os()));
}
