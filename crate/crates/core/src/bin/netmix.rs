fn main() {
    std::process::exit(netmix::cli::run(std::env::args_os()));
}
