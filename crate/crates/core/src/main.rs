fn main() {
    std::process::exit(contention::cli::main_exit_code());
}
