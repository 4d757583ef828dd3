fn main() {
    std::process::exit(alaam::cli::main(std::env::args_os()));
}
