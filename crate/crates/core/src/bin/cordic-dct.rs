fn main() {
    std::process::exit(cordic_dct::cli::main());
}
