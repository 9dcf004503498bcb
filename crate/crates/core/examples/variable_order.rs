//! Messages of mixed orders with a fixed fraction erased.

use neural_cliques::harness::{run_experiment, Erasure, ExperimentSpec, RunOptions, Task};
use neural_cliques::{OrderProfile, Topology};

fn main() -> neural_cliques::Result<()> {
    let topology = Topology::new(100, 64)?;
    for profile in [OrderProfile::range(6, 18), OrderProfile::range(12, 24)] {
        let mut spec = ExperimentSpec::new(Task::Recover, topology, profile);
        spec.erasure = Erasure::Fraction(0.25);
        spec.sweep = vec![40_000.0, 80_000.0, 120_000.0];
        spec.trials = 3000;
        spec.max_trials = 3000;
        println!("orders {profile}");
        run_experiment(&spec, RunOptions::default(), |p| {
            println!(
                "  M={:>6} simulated {:.4} predicted {:.4}",
                p.x,
                p.sim_rate.unwrap(),
                p.theory.unwrap()
            );
        })?;
    }
    Ok(())
}
