fn main() {
    std::process::exit(threshold_queue::cli::run());
}
