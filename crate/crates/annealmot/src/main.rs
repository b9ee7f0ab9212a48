fn main() {
    std::process::exit(annealmot::cli::cli_main(std::env::args()));
}
