fn main() {
    std::process::exit(lbekf::cli::run(std::env::args_os()));
}
