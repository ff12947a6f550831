fn main() {
    std::process::exit(point_source::cli::main_with_args(std::env::args_os()));
}
