fn main() {
    std::process::exit(sef::cli::main_from_args(std::env::args_os()));
}
