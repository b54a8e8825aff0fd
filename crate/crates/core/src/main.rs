fn main() {
    std::process::exit(dppkit::cli::main_with_args(std::env::args_os()));
}
