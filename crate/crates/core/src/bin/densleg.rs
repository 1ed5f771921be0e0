fn main() {
    std::process::exit(densleg::io::cli::cli_main(std::env::args_os()));
}
