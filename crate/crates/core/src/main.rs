fn main() {
    std::process::exit(magnilab::cli::run(std::env::args_os()));
}
