//! Error rates of blind and guided recovery against the closed forms.

use neural_cliques::harness::{
    run_experiment, Erasure, ExperimentSpec, RecoveryMode, RunOptions, Task,
};
use neural_cliques::theory;
use neural_cliques::{OrderProfile, Topology};

fn main() -> neural_cliques::Result<()> {
    let topology = Topology::new(100, 64)?;
    for mode in [RecoveryMode::Blind, RecoveryMode::Guided] {
        let mut spec = ExperimentSpec::new(Task::Recover, topology, OrderProfile::constant(12));
        spec.mode = mode;
        spec.erasure = Erasure::Count(3);
        spec.iterations = vec![1, 4];
        spec.sweep = vec![80_000.0, 120_000.0, 160_000.0];
        spec.trials = 4000;
        spec.max_trials = 4000;
        println!("{mode:?}");
        run_experiment(&spec, RunOptions::default(), |p| {
            let loaded = theory::p_error_loaded(
                100,
                64,
                12,
                3,
                match mode {
                    RecoveryMode::Blind => theory::blind_competitors(100, 64, 12, 3),
                    RecoveryMode::Guided => 3.0 * 63.0,
                },
                p.x,
            );
            println!(
                "  M={:>6} iterations={} simulated {:.4}  closed form {:.4}  load-aware {:.4}",
                p.x,
                p.iterations,
                p.sim_rate.unwrap(),
                p.theory.unwrap(),
                loaded
            );
        })?;
    }
    Ok(())
}
