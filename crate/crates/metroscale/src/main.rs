use std::process::exit;

fn main() {
    exit(metroscale::harness::cli::run());
}
