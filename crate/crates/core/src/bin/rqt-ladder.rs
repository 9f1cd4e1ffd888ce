fn main() {
    std::process::exit(rqt_ladder::cli::run());
}
