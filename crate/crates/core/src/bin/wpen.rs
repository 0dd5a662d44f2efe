fn main() {
    std::process::exit(weibull_penultimate::cli::run());
}
