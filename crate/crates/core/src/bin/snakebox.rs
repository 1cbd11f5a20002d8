fn main() {
    std::process::exit(snakebox::cli::run(std::env::args_os()));
}
