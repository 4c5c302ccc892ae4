use clap::Parser;

fn main() {
    let cli = ayev::Cli::parse();
    std::process::exit(ayev::run(&cli));
}
