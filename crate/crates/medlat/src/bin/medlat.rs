use clap::Parser;
use medlat::cli::{execute, Args};

fn main() {
    let args = Args::parse();
    if let Err(e) = execute(&args) {
        eprintln!("medlat: {e}");
        std::process::exit(1);
    }
}
