fn main() {
    std::process::exit(epme_core::cli::main());
}
