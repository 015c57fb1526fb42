fn main() {
    std::process::exit(mclex::cli::main_with(std::env::args_os()));
}
