fn main() {
    std::process::exit(bubblefield::run(std::env::args_os()));
}
