fn main() {
    std::process::exit(tfkit_cli::run(std::env::args_os()));
}
