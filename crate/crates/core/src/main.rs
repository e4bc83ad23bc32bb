fn main() {
    std::process::exit(ballcalc::verify::cli::run(std::env::args_os()));
}
