fn main() {
    std::process::exit(qcs::cli::run(std::env::args()));
}
