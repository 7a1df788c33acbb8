fn main() {
    std::process::exit(entropik::cli::main_with_args(std::env::args_os()));
}
