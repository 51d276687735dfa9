fn main() {
    std::process::exit(deformkit::cli::main_with(std::env::args_os()));
}
