fn main() {
    std::process::exit(reffree::cli::run_from(std::env::args_os()));
}
