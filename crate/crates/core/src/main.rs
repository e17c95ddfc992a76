fn main() {
    std::process::exit(salem::cli::run(std::env::args_os()));
}
