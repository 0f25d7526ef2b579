fn main() {
    std::process::exit(csdm::cli::run(std::env::args_os()));
}
