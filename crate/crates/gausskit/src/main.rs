fn main() {
    std::process::exit(gausskit::run(std::env::args_os()));
}
