fn main() {
    std::process::exit(infomarket::cli::run(std::env::args_os()));
}
