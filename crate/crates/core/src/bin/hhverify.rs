fn main() {
    std::process::exit(hhverify::cli::run(std::env::args_os()));
}
