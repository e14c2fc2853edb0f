fn main() {
    std::process::exit(pension_toolkit::run(std::env::args_os()));
}
