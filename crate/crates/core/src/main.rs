fn main() {
    std::process::exit(multinarp::io::cli::run(std::env::args_os()));
}
