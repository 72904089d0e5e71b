fn main() {
    std::process::exit(cayley_core::cli::run(std::env::args_os()));
}
