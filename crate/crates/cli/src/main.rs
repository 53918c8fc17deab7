fn main() {
    std::process::exit(lrsum_cli::run(std::env::args_os()));
}
