fn main() {
    std::process::exit(sciprofile::cli::run(std::env::args_os()));
}
