fn main() {
    std::process::exit(snip::cli::run(std::env::args_os()));
}
