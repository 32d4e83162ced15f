fn main() {
    std::process::exit(mapbound::cli::run(std::env::args_os()));
}
