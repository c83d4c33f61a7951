fn main() {
    std::process::exit(hypdeform::cli::main_with_args(std::env::args_os()));
}
