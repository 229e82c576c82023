fn main() {
    std::process::exit(plantbench::cli::main_with_args(std::env::args_os()));
}
