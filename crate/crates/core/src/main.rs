fn main() {
    std::process::exit(ballspace::cli::main_with_args(std::env::args_os()));
}
