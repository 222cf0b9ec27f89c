fn main() {
    std::process::exit(trajeval::cli::run(std::env::args_os()));
}
