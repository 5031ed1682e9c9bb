fn main() {
    std::process::exit(rdlyap::app::main_with_args(std::env::args_os()));
}
