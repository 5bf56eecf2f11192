fn main() {
    std::process::exit(invy::cli::main_with(std::env::args_os()));
}
