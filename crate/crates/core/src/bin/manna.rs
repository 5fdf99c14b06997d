fn main() {
    std::process::exit(manna::cli::run(std::env::args_os()));
}
