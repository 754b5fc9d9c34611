fn main() {
    std::process::exit(ncrealize_cli::run(std::env::args_os()));
}
