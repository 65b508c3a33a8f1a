fn main() {
    std::process::exit(densest::cli::main_with_std());
}
