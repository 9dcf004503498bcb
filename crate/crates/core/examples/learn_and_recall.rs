//! Store random messages, then recover one from a partial cue.

use neural_cliques::message::random_message;
use neural_cliques::retrieval::{blind_recover, is_success};
use neural_cliques::{CliqueNetwork, Placement, Topology};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> neural_cliques::Result<()> {
    let topology = Topology::new(100, 64)?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut net = CliqueNetwork::new(topology);
    let stored: Vec<_> = (0..60_000)
        .map(|_| random_message(&topology, 12, Placement::UniformClusters, &mut rng))
        .collect::<Result<_, _>>()?;
    net.learn_all(&stored)?;
    println!("{} messages, density {:.4}", stored.len(), net.density());

    let truth = &stored[123];
    let erased: Vec<usize> = truth.clusters().take(3).collect();
    let cue = truth.without_clusters(&erased);
    println!("stored {truth}");
    println!("cue    {cue}");
    let out = blind_recover(&net, &cue, 4)?;
    println!(
        "found  {} after {} iterations, exact: {}",
        out.message()
            .map_or("(ambiguous)".to_string(), |m| m.to_string()),
        out.iterations_run,
        is_success(&out, truth)
    );
    Ok(())
}
