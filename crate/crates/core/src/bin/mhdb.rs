fn main() {
    std::process::exit(mhdb::cli::cli_main(std::env::args_os()));
}
