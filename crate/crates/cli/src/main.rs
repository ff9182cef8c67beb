fn main() {
    std::process::exit(dscluster_cli::main_with_args(std::env::args_os()));
}
