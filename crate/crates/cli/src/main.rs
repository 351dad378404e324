fn main() {
    std::process::exit(reclab_cli::run_cli(std::env::args_os()));
}
