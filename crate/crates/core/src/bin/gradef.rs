fn main() {
    std::process::exit(gradef::cli::main_with(std::env::args_os()));
}
