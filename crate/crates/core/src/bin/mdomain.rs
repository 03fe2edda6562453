fn main() {
    std::process::exit(mdomain::cli::run(std::env::args_os()));
}
