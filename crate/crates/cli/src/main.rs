use clap::Parser;

fn main() -> anyhow::Result<()> {
    let cli = lglda_cli::Cli::parse();
    lglda_cli::run(cli.command)
}
