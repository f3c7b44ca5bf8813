fn main() {
    std::process::exit(zsk_cli::run(std::env::args_os()));
}
