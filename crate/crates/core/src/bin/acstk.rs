fn main() {
    std::process::exit(acstk::cli::execute(std::env::args()));
}
