fn main() {
    std::process::exit(sandpile_cli::run(std::env::args_os()));
}
