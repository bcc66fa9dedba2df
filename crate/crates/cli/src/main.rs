fn main() {
    std::process::exit(recur_cli::run(std::env::args_os()));
}
