fn main() {
    std::process::exit(deckgen::bench::cli::cli(std::env::args_os()));
}
