fn main() {
    std::process::exit(ait::cli::run(std::env::args()));
}
