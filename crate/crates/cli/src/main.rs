fn main() {
    std::process::exit(ecd_cli::run(std::env::args_os()));
}
