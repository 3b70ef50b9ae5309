fn main() {
    std::process::exit(texrestore_cli::run(std::env::args_os()));
}
