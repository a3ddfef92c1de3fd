fn main() {
    std::process::exit(dmkdv::cli::dispatch(std::env::args_os()));
}
