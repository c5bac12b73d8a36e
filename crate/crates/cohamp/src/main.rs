fn main() {
    std::process::exit(cohamp::cli::main_entry());
}
