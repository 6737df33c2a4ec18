fn main() {
    std::process::exit(ngr::cli::run(std::env::args_os()));
}
