fn main() {
    std::process::exit(ybe_forge::cli_reporting::run(std::env::args_os()));
}
