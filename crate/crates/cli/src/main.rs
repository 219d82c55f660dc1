fn main() {
    std::process::exit(leafgrow_cli::main_impl(std::env::args_os()));
}
