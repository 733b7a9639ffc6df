fn main() {
    std::process::exit(crn_siphons::cli::run(std::env::args_os()));
}
