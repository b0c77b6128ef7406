fn main() {
    std::process::exit(qlr::run(std::env::args_os()));
}
