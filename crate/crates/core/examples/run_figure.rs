//! Runs a bundled preset and writes its CSV and SVG.
//!
//! `cargo run --release --example run_figure -- fig5_c9 out/`

use std::path::PathBuf;

use neural_cliques::harness::presets::preset_specs;
use neural_cliques::harness::{run_experiment, write_outputs, RunOptions};

fn main() -> neural_cliques::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "fig4".into());
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "out".into()));
    for spec in preset_specs(&name)? {
        let points = run_experiment(&spec, RunOptions::default(), |p| {
            eprintln!(
                "{} x={} it={} trials={}",
                spec.label, p.x, p.iterations, p.trials
            );
        })?;
        for path in write_outputs(&spec, &points, &dir, true)? {
            println!("{}", path.display());
        }
    }
    Ok(())
}
