//! Words with swapped letters and anagrams, decoded back to the stored word.

use neural_cliques::blurred::{decode_distorted, permute_pairwise, scramble, DistortionKind};
use neural_cliques::message::random_message;
use neural_cliques::retrieval::is_success;
use neural_cliques::{CliqueNetwork, Placement, SparseMessage, Topology};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn word(w: &str, start: usize) -> SparseMessage {
    let pairs: Vec<_> = w
        .bytes()
        .enumerate()
        .map(|(i, b)| (start + i, (b - b'a') as usize))
        .collect();
    SparseMessage::from_pairs(&pairs).unwrap()
}

fn spell(m: &SparseMessage) -> String {
    m.entries()
        .iter()
        .map(|e| (b'a' + e.index as u8) as char)
        .collect()
}

fn main() -> neural_cliques::Result<()> {
    let t = Topology::new(100, 64)?;
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut net = CliqueNetwork::new(t);
    let words = [
        "intelligence",
        "architecture",
        "neighbouring",
        "sparsenesses",
    ];
    for (i, w) in words.iter().enumerate() {
        net.learn(&word(w, 10 + 20 * i))?;
    }
    // background clutter on contiguous clusters
    for _ in 0..20_000 {
        net.learn(&random_message(&t, 12, Placement::Contiguous, &mut rng)?)?;
    }
    println!("density {:.4}", net.density());
    for (i, w) in words.iter().enumerate() {
        let truth = word(w, 10 + 20 * i);
        let swapped = permute_pairwise(&truth)?;
        let out = decode_distorted(&net, &swapped, DistortionKind::PairwisePermuted, 6)?;
        let shown = out.message().map_or("?".into(), |m| spell(&m));
        println!(
            "{} -> {shown} ({})",
            spell(&swapped),
            is_success(&out, &truth)
        );
        let shuffled = scramble(&truth, &mut rng)?;
        let out = decode_distorted(&net, &shuffled, DistortionKind::Anagram, 6)?;
        let shown = out.message().map_or("?".into(), |m| spell(&m));
        println!(
            "{} -> {shown} ({})",
            spell(&shuffled),
            is_success(&out, &truth)
        );
    }
    Ok(())
}
