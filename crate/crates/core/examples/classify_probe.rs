//! Go/no-go decisions: stored messages pass, random probes rarely do.

use neural_cliques::classify::accept;
use neural_cliques::message::random_message;
use neural_cliques::theory;
use neural_cliques::{CliqueNetwork, Placement, Topology};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> neural_cliques::Result<()> {
    let t = Topology::new(100, 64)?;
    let c = 6;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut net = CliqueNetwork::new(t);
    let stored: Vec<_> = (0..1_200_000)
        .map(|_| random_message(&t, c, Placement::UniformClusters, &mut rng))
        .collect::<Result<_, _>>()?;
    net.learn_all(&stored)?;
    let d = net.density();

    let rejected = stored
        .iter()
        .take(10_000)
        .filter(|m| !accept(&net, m).unwrap())
        .count();
    println!("density {d:.4}; stored messages rejected: {rejected} of 10000");

    let probes = 200_000;
    let mut false_accepts = 0;
    for _ in 0..probes {
        let p = random_message(&t, c, Placement::UniformClusters, &mut rng)?;
        false_accepts += accept(&net, &p)? as usize;
    }
    println!(
        "random probes accepted: {false_accepts} of {probes} (expected about {:.1})",
        theory::p_type2(c, d) * probes as f64
    );
    Ok(())
}
