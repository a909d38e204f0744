fn main() {
    std::process::exit(entroshrink::cli::main());
}
