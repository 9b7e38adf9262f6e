fn main() {
    std::process::exit(mvg_cli::commands::run());
}
