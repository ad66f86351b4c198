fn main() {
    std::process::exit(twomat::cli::run(std::env::args_os()));
}
