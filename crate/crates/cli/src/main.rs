fn main() {
    std::process::exit(cocycle_lab_cli::run(std::env::args_os()));
}
