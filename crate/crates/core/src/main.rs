fn main() {
    std::process::exit(genlimit::cli::run());
}
