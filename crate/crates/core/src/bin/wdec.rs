fn main() {
    std::process::exit(wdec::cli::run(std::env::args_os()));
}
