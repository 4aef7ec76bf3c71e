fn main() {
    std::process::exit(acount::cli::run(std::env::args_os()));
}
