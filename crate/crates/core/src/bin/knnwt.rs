fn main() {
    std::process::exit(knnwt::cli::run(std::env::args_os()));
}
