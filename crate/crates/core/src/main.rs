fn main() {
    std::process::exit(umgh::cli::run(std::env::args_os()));
}
