//! A spurious shorter clique traps the decoder in a two-step cycle.

use neural_cliques::retrieval::{propagate, retrieve, select, ActivationState, RetrievalConfig};
use neural_cliques::{CliqueNetwork, Fanal, SparseMessage, Topology};

fn main() -> neural_cliques::Result<()> {
    let t = Topology::new(8, 4)?;
    let names = ["A", "B", "C", "D", "E", "F", "X"];
    let node: Vec<Fanal> = (0..7).map(|i| Fanal::new(i, i % 4)).collect();
    let clique = |ix: &[usize]| SparseMessage::new(ix.iter().map(|&i| node[i]).collect());

    let mut net = CliqueNetwork::new(t);
    net.learn(&clique(&[0, 1, 2, 3, 4, 5])?)?;
    for i in 0..4 {
        net.learn(&clique(&[i, 6])?)?;
    }
    let cue = clique(&[0, 1, 2, 3])?;
    let cfg = RetrievalConfig::blind(t.chi(), 6);

    let mut state = ActivationState::from_cue(t, &cue)?;
    for step in 1..=3 {
        propagate(&net, &mut state, 1);
        let scores: Vec<String> = names
            .iter()
            .zip(&node)
            .map(|(n, &f)| format!("{n}={}", state.score(f)))
            .collect();
        select(&mut state, &cfg);
        let on: Vec<&str> = names
            .iter()
            .zip(&node)
            .filter(|(_, &f)| state.active.get(t.global(f.cluster, f.index)))
            .map(|(n, _)| *n)
            .collect();
        println!(
            "iteration {step}: {}  -> active {}",
            scores.join(" "),
            on.join("")
        );
    }
    let out = retrieve(&net, &cue, &cfg)?;
    println!("converged={} cycle={}", out.converged, out.cycle_detected);
    Ok(())
}
