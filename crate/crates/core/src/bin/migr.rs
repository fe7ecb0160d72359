fn main() {
    std::process::exit(migr_scatter::cli::run_command(std::env::args_os()));
}
