fn main() {
    env_logger::init();
    std::process::exit(qdock::bench::main_with_args(std::env::args_os()));
}
