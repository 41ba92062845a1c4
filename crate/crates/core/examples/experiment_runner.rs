// Running experiments programmatically and writing their tables.

use rsp::runner::{run, Command, ExperimentConfig, Format};

pub fn run_example() -> rsp::Result<()> {
    let dir = std::env::temp_dir().join(format!("rsp-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;

    let mut cfg = ExperimentConfig::new(Command::Figure1, 1);
    cfg.params.grid = Some(12);
    cfg.out = Some(dir.join("figure1.csv"));
    let report = run(&cfg)?;
    println!("figure1: {} rows written to {}", report.table.len(), dir.join("figure1.csv").display());

    let mut cfg = ExperimentConfig::new(Command::Teleport, 1);
    cfg.params.samples = Some(100);
    cfg.params.d = Some(3);
    cfg.format = Format::JsonLines;
    let report = run(&cfg)?;
    print!("{}", String::from_utf8_lossy(&report.rendered));

    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> rsp::Result<()> {
    run_example()
}
