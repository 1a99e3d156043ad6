use clap::Parser;

fn main() {
    let cli = fraclap::cli::Cli::parse();
    std::process::exit(fraclap::cli::run(cli));
}
