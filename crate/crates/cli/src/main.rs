fn main() {
    std::process::exit(hbspace_cli::run(std::env::args_os()));
}
