fn main() {
    std::process::exit(repmatch::cli::main_with_args(std::env::args_os()));
}
