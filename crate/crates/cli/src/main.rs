fn main() {
    std::process::exit(schottky_cli::run(std::env::args_os()));
}
