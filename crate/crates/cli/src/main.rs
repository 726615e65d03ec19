fn main() {
    std::process::exit(switchmax_cli::app::run(std::env::args()));
}
