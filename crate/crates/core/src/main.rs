fn main() {
    std::process::exit(frobsig::cli::run(std::env::args_os()));
}
