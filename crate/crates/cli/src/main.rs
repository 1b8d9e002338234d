use clap::Parser;
use foliation_cli::{run, RunConfig};

fn main() -> anyhow::Result<()> {
    let cfg = RunConfig::parse();
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = run(&cfg, &mut stdout) {
        eprintln!("foliate: {e}");
        std::process::exit(e.exit_code());
    }
    Ok(())
}
