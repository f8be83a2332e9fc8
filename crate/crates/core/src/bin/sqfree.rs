fn main() {
    std::process::exit(sqfree::cli::main_with_std());
}
