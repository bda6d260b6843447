fn main() {
    std::process::exit(sglab::cli::run_from(std::env::args_os()));
}
