fn main() {
    std::process::exit(flatcollapse::cli::run());
}
