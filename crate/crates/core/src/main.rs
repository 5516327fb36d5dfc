fn main() {
    std::process::exit(hmes::cli::run(std::env::args_os()));
}
