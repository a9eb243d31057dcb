use clap::Parser;

fn main() -> std::process::ExitCode {
    guesscert_cli::run(guesscert_cli::Cli::parse())
}
