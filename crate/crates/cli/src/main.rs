fn main() {
    std::process::exit(projbound_cli::run(std::env::args_os()));
}
