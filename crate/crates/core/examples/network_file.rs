//! Save a network, load it back, and show that corruption is caught.

use neural_cliques::format;
use neural_cliques::message::random_message;
use neural_cliques::{CliqueNetwork, Placement, Topology};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> neural_cliques::Result<()> {
    let t = Topology::new(20, 16)?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut net = CliqueNetwork::new(t);
    for _ in 0..300 {
        net.learn(&random_message(
            &t,
            5,
            Placement::UniformClusters,
            &mut rng,
        )?)?;
    }
    let bytes = format::to_bytes(&net);
    println!("{} edges in {} bytes", net.edge_count(), bytes.len());

    let back = format::from_bytes(&bytes)?;
    println!("round trip equal: {}", back == net);

    let mut bad = bytes.clone();
    bad[format::HEADER_LEN + 5] ^= 0x10;
    match format::from_bytes(&bad) {
        Ok(_) => println!("corruption not detected"),
        Err(e) => println!("corrupted copy: {e}"),
    }
    Ok(())
}
