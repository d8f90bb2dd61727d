fn main() {
    std::process::exit(simplexwalk::cli::main_with_args(std::env::args_os().skip(1)));
}
