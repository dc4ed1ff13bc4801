fn main() {
    std::process::exit(alm::cli::main_from_env());
}
