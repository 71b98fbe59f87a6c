fn main() {
    std::process::exit(tomodist::cli::run(std::env::args_os()));
}
