fn main() {
    std::process::exit(segrekit_cli::runner::real_main());
}
