fn main() {
    std::process::exit(mlmask_cli::run(std::env::args_os()));
}
