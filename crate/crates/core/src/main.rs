fn main() {
    std::process::exit(ucie_mem::cli::main_entry());
}
