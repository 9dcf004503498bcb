//! Go/no-go recognition of a presented message.

use crate::error::{Error, Result};
use crate::message::SparseMessage;
use crate::network::CliqueNetwork;
use crate::retrieval::{self, ActivationState, RetrievalConfig, Threshold};

/// Decides whether `probe` was learned by running one decoding round with
/// the probe's clusters at threshold `c` and every other cluster disabled.
/// Accepts when the activation comes back unchanged.
pub fn accept(network: &CliqueNetwork, probe: &SparseMessage) -> Result<bool> {
    let c = probe.order();
    if c < 2 {
        return Err(Error::Message(format!("probe order {c} < 2")));
    }
    let chi = network.topology().chi();
    let support: Vec<usize> = probe.clusters().collect();
    let mut cfg = RetrievalConfig::guided(chi, &support, 1)?;
    for &cl in &support {
        cfg.thresholds[cl] = Threshold::Level(c as u32);
    }
    let mut state = ActivationState::from_cue(*network.topology(), probe)?;
    let out = retrieval::run(network, &mut state, &cfg);
    Ok(out.final_active == probe.entries())
}

/// Independent check: every pair of the probe's fanals is connected.
pub fn accept_oracle(network: &CliqueNetwork, probe: &SparseMessage) -> bool {
    network.contains_clique(probe)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::message::{random_message, Placement};
    use crate::topology::Topology;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn learned_messages_are_accepted() {
        let t = Topology::new(20, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut net = CliqueNetwork::new(t);
        let ms: Vec<_> = (0..500)
            .map(|_| random_message(&t, 5, Placement::UniformClusters, &mut rng).unwrap())
            .collect();
        net.learn_all(&ms).unwrap();
        for m in &ms {
            assert!(accept(&net, m).unwrap());
            assert!(accept_oracle(&net, m));
        }
    }

    #[test]
    fn empty_network_rejects() {
        let net = CliqueNetwork::new(Topology::new(8, 4).unwrap());
        let p = SparseMessage::from_pairs(&[(0, 1), (3, 2), (5, 0)]).unwrap();
        assert!(!accept(&net, &p).unwrap());
        assert!(!accept_oracle(&net, &p));
    }

    #[test]
    fn coincidental_clique_is_accepted() {
        // the three edges of the probe come from three different messages
        let t = Topology::new(8, 4).unwrap();
        let mut net = CliqueNetwork::new(t);
        for pair in [[(0, 1), (3, 2)], [(3, 2), (5, 0)], [(0, 1), (5, 0)]] {
            net.learn(&SparseMessage::from_pairs(&pair).unwrap())
                .unwrap();
        }
        let p = SparseMessage::from_pairs(&[(0, 1), (3, 2), (5, 0)]).unwrap();
        assert!(accept(&net, &p).unwrap());
    }

    #[test]
    fn missing_edge_rejects() {
        let t = Topology::new(8, 4).unwrap();
        let mut net = CliqueNetwork::new(t);
        for pair in [[(0, 1), (3, 2)], [(3, 2), (5, 0)]] {
            net.learn(&SparseMessage::from_pairs(&pair).unwrap())
                .unwrap();
        }
        let p = SparseMessage::from_pairs(&[(0, 1), (3, 2), (5, 0)]).unwrap();
        assert!(!accept(&net, &p).unwrap());
        assert!(!accept_oracle(&net, &p));
    }

    #[test]
    fn order_one_probe_is_rejected() {
        let net = CliqueNetwork::new(Topology::new(8, 4).unwrap());
        let p = SparseMessage::from_pairs(&[(0, 1)]).unwrap();
        assert!(accept(&net, &p).is_err());
    }
}
