fn main() {
    std::process::exit(prwave_cli::main_with(std::env::args_os()));
}
