fn main() {
    std::process::exit(fracmom_cli::run(std::env::args_os()));
}
