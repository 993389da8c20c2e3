fn main() {
    std::process::exit(svineq::cli::run(std::env::args_os()));
}
