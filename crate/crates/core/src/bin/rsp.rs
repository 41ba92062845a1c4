fn main() {
    std::process::exit(rsp::runner::cli_main(std::env::args_os()));
}
