fn main() {
    std::process::exit(twr_outage::cli::main_with_args(std::env::args_os()));
}
