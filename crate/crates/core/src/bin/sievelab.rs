fn main() {
    std::process::exit(sievelab::cli::run(std::env::args_os()));
}
