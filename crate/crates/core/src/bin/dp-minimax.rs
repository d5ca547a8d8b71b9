fn main() {
    std::process::exit(dp_minimax::cli::main_with_args(std::env::args_os()));
}
