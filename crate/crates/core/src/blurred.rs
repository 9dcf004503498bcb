//! Decoding of distorted messages learned on contiguous clusters: cyclic
//! pairwise character swaps and full anagrams.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::message::{Fanal, SparseMessage};
use crate::network::CliqueNetwork;
use crate::retrieval::{self, ActivationState, RetrievalConfig, RetrievalOutcome};
use crate::topology::Topology;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistortionKind {
    /// Characters at positions (0,1), (2,3), ... swapped.
    PairwisePermuted,
    /// Characters in arbitrary order over the same clusters.
    Anagram,
}

fn require_contiguous(message: &SparseMessage) -> Result<()> {
    if message.is_empty() || !message.is_contiguous() {
        return Err(Error::Message(format!(
            "distorted decoding needs a contiguous support, got {message}"
        )));
    }
    Ok(())
}

fn with_values(message: &SparseMessage, values: &[usize]) -> SparseMessage {
    let entries = message
        .entries()
        .iter()
        .zip(values)
        .map(|(e, &v)| Fanal::new(e.cluster, v))
        .collect();
    SparseMessage::new(entries).expect("support unchanged")
}

/// Swaps the characters of consecutive position pairs. With an odd order
/// the last character stays in place.
pub fn permute_pairwise(message: &SparseMessage) -> Result<SparseMessage> {
    require_contiguous(message)?;
    let mut values: Vec<usize> = message.entries().iter().map(|e| e.index).collect();
    for pair in values.chunks_exact_mut(2) {
        pair.swap(0, 1);
    }
    Ok(with_values(message, &values))
}

/// Random rearrangement of the characters over the same clusters.
pub fn scramble<R: Rng + ?Sized>(message: &SparseMessage, rng: &mut R) -> Result<SparseMessage> {
    require_contiguous(message)?;
    let mut values: Vec<usize> = message.entries().iter().map(|e| e.index).collect();
    values.shuffle(rng);
    Ok(with_values(message, &values))
}

/// Initial activation for a distorted cue.
///
/// Pairwise: each character is also lit in the two neighbouring clusters of
/// the span, neighbours taken cyclically within the span. Anagram: every
/// span cluster lights all characters of the cue.
pub fn init_distorted_state(
    topology: Topology,
    distorted: &SparseMessage,
    kind: DistortionKind,
) -> Result<ActivationState> {
    require_contiguous(distorted)?;
    distorted.check_bounds(&topology)?;
    let entries = distorted.entries();
    let c = entries.len();
    let first = entries[0].cluster;
    let mut state = ActivationState::new(topology);
    match kind {
        DistortionKind::PairwisePermuted => {
            for (p, e) in entries.iter().enumerate() {
                for q in [(p + c - 1) % c, p, (p + 1) % c] {
                    state.activate(Fanal::new(first + q, e.index));
                }
            }
        }
        DistortionKind::Anagram => {
            for q in 0..c {
                for e in entries {
                    state.activate(Fanal::new(first + q, e.index));
                }
            }
        }
    }
    Ok(state)
}

/// Decodes a distorted cue with global winner-take-all, `gamma = 1` and
/// all thresholds at zero.
pub fn decode_distorted(
    network: &CliqueNetwork,
    distorted: &SparseMessage,
    kind: DistortionKind,
    iterations: usize,
) -> Result<RetrievalOutcome> {
    let cfg = RetrievalConfig::blind(network.topology().chi(), iterations);
    decode_distorted_with(network, distorted, kind, &cfg)
}

/// Same initialization, caller-chosen dynamics.
pub fn decode_distorted_with(
    network: &CliqueNetwork,
    distorted: &SparseMessage,
    kind: DistortionKind,
    config: &RetrievalConfig,
) -> Result<RetrievalOutcome> {
    let mut state = init_distorted_state(*network.topology(), distorted, kind)?;
    Ok(retrieval::run(network, &mut state, config))
}
