fn main() {
    std::process::exit(i32::from(lhz_cd::cli::run(std::env::args_os())));
}
