fn main() {
    std::process::exit(assouad_forge::cli::run(std::env::args_os()));
}
