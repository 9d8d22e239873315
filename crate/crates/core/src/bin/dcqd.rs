fn main() {
    std::process::exit(dcqd::cli::main());
}
