fn main() {
    std::process::exit(fontaine::cli::run(std::env::args_os()));
}
