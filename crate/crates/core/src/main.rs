fn main() {
    std::process::exit(cctree::cli::main_with_args(std::env::args_os()));
}
