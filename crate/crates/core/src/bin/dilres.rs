use clap::Parser;

fn main() {
    std::process::exit(dilres::cli::run(dilres::cli::Cli::parse()));
}
