fn main() {
    std::process::exit(volscale::cli::run(std::env::args_os()));
}
