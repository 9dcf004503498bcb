//! Iterative retrieval: synchronous message passing followed by
//! winner-take-all selection, repeated until a fixed point, a detected
//! 2-cycle, or the iteration budget.
//!
//! One iteration is one [`propagate`] plus one [`select`].

use crate::bits::{BitVec, Ones};
use crate::error::{Error, Result};
use crate::message::{Fanal, SparseMessage};
use crate::network::CliqueNetwork;
use crate::topology::Topology;

/// Per-cluster activation threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Threshold {
    Level(u32),
    /// Unreachable: the cluster never activates and is left out of the
    /// global maximum.
    Disabled,
}

impl Threshold {
    #[inline]
    pub fn is_enabled(&self) -> bool {
        matches!(self, Threshold::Level(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Selection {
    /// One maximum over all enabled clusters (sparse decoding).
    GlobalMax,
    /// Each enabled cluster keeps its own maximal fanals.
    PerClusterMax,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RetrievalConfig {
    pub gamma: u32,
    pub thresholds: Vec<Threshold>,
    pub selection: Selection,
    pub max_iterations: usize,
}

impl RetrievalConfig {
    /// All clusters enabled with `sigma = 0`, global winner-take-all, `gamma = 1`.
    pub fn blind(chi: usize, max_iterations: usize) -> Self {
        RetrievalConfig {
            gamma: 1,
            thresholds: vec![Threshold::Level(0); chi],
            selection: Selection::GlobalMax,
            max_iterations: max_iterations.max(1),
        }
    }

    /// Like [`blind`](Self::blind) but only `known` clusters are enabled.
    pub fn guided(chi: usize, known: &[usize], max_iterations: usize) -> Result<Self> {
        let mut cfg = Self::blind(chi, max_iterations);
        cfg.thresholds.fill(Threshold::Disabled);
        for &c in known {
            if c >= chi {
                return Err(Error::Message(format!("cluster {c} out of range")));
            }
            cfg.thresholds[c] = Threshold::Level(0);
        }
        Ok(cfg)
    }

    pub fn with_gamma(mut self, gamma: u32) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_selection(mut self, selection: Selection) -> Self {
        self.selection = selection;
        self
    }

    pub fn with_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations.max(1);
        self
    }

    fn enabled_mask(&self, topology: &Topology) -> Option<BitVec> {
        if self.thresholds.iter().all(Threshold::is_enabled) {
            return None;
        }
        let mut mask = BitVec::zeros(topology.n());
        for (c, t) in self.thresholds.iter().enumerate() {
            if t.is_enabled() {
                for g in topology.global(c, 0)..topology.global(c + 1, 0) {
                    mask.set(g);
                }
            }
        }
        Some(mask)
    }
}

/// Scores and binary activations of every fanal during decoding.
#[derive(Clone, Debug)]
pub struct ActivationState {
    topology: Topology,
    pub scores: Vec<u32>,
    pub active: BitVec,
    pub per_cluster_max: Vec<u32>,
    pub global_max: u32,
    scratch: Vec<u64>,
}

impl ActivationState {
    pub fn new(topology: Topology) -> Self {
        let n = topology.n();
        ActivationState {
            topology,
            scores: vec![0; n],
            active: BitVec::zeros(n),
            per_cluster_max: vec![0; topology.chi()],
            global_max: 0,
            scratch: vec![0; n.div_ceil(64)],
        }
    }

    /// State with exactly the cue's fanals active.
    pub fn from_cue(topology: Topology, cue: &SparseMessage) -> Result<Self> {
        cue.check_bounds(&topology)?;
        let mut s = Self::new(topology);
        for g in cue.globals(&topology) {
            s.active.set(g);
        }
        Ok(s)
    }

    pub fn activate(&mut self, f: Fanal) {
        let g = self.topology.global(f.cluster, f.index);
        self.active.set(g);
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn active_fanals(&self) -> Vec<Fanal> {
        self.active
            .iter_ones()
            .map(|g| {
                let (c, f) = self.topology.split(g);
                Fanal::new(c, f)
            })
            .collect()
    }

    pub fn score(&self, f: Fanal) -> u32 {
        self.scores[self.topology.global(f.cluster, f.index)]
    }
}

/// Recomputes every fanal's score from the current activation snapshot.
///
/// A fanal scores one point per cluster holding at least one active
/// neighbour, plus `gamma` if it is itself active.
pub fn propagate(network: &CliqueNetwork, state: &mut ActivationState, gamma: u32) {
    propagate_masked(network, state, gamma, None);
}

fn propagate_masked(
    network: &CliqueNetwork,
    state: &mut ActivationState,
    gamma: u32,
    targets: Option<&BitVec>,
) {
    let l = network.topology().l();
    let ActivationState {
        scores,
        active,
        scratch,
        ..
    } = state;
    scores.fill(0);

    let flush = |scratch: &mut Vec<u64>, scores: &mut Vec<u32>| {
        if let Some(t) = targets {
            for (w, m) in scratch.iter_mut().zip(t.words()) {
                *w &= m;
            }
        }
        for g in Ones::new(scratch) {
            scores[g] += 1;
        }
        scratch.fill(0);
    };

    // OR together the rows of the active fanals of each source cluster;
    // each neighbour of that union gains exactly one point.
    let mut current: Option<usize> = None;
    for g in active.iter_ones() {
        let cluster = g / l;
        if current.is_some_and(|c| c != cluster) {
            flush(scratch, scores);
        }
        current = Some(cluster);
        for (w, r) in scratch.iter_mut().zip(network.row(g)) {
            *w |= r;
        }
    }
    if current.is_some() {
        flush(scratch, scores);
    }

    if gamma > 0 {
        for g in active.iter_ones() {
            scores[g] += gamma;
        }
    }
}

/// Winner-take-all on freshly propagated scores. Ties keep every maximal
/// fanal.
pub fn select(state: &mut ActivationState, config: &RetrievalConfig) {
    let l = state.topology.l();
    let chi = state.topology.chi();
    debug_assert_eq!(config.thresholds.len(), chi);

    let mut global = 0;
    for c in 0..chi {
        let m = state.scores[c * l..(c + 1) * l]
            .iter()
            .copied()
            .max()
            .unwrap_or(0);
        state.per_cluster_max[c] = m;
        if config.thresholds[c].is_enabled() {
            global = global.max(m);
        }
    }
    state.global_max = global;

    state.active.clear_all();
    for (c, t) in config.thresholds.iter().enumerate() {
        let Threshold::Level(sigma) = *t else {
            continue;
        };
        let target = match config.selection {
            Selection::GlobalMax => global,
            Selection::PerClusterMax => state.per_cluster_max[c],
        };
        if target < sigma {
            continue;
        }
        for j in 0..l {
            let g = c * l + j;
            if state.scores[g] == target {
                state.active.set(g);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RetrievalOutcome {
    /// Active fanals after the last iteration, sorted.
    pub final_active: Vec<Fanal>,
    pub iterations_run: usize,
    /// The activation set stopped changing before the budget ran out.
    pub converged: bool,
    /// The activation set returned to the one two iterations back.
    pub cycle_detected: bool,
    /// Some cluster holds more than one active fanal.
    pub ambiguous: bool,
}

impl RetrievalOutcome {
    /// The decoded message when every active cluster holds exactly one fanal.
    pub fn message(&self) -> Option<SparseMessage> {
        if self.ambiguous {
            return None;
        }
        SparseMessage::new(self.final_active.clone()).ok()
    }
}

/// Runs the dynamics from an arbitrary initial activation.
pub fn run(
    network: &CliqueNetwork,
    state: &mut ActivationState,
    config: &RetrievalConfig,
) -> RetrievalOutcome {
    let targets = config.enabled_mask(network.topology());
    let mut previous: Option<BitVec> = None;
    let mut current = state.active.clone();
    let (mut converged, mut cycle) = (false, false);
    let mut iterations = 0;

    while iterations < config.max_iterations {
        propagate_masked(network, state, config.gamma, targets.as_ref());
        select(state, config);
        iterations += 1;
        if state.active == current {
            converged = true;
            break;
        }
        if previous.as_ref() == Some(&state.active) {
            cycle = true;
            break;
        }
        previous = Some(std::mem::replace(&mut current, state.active.clone()));
    }

    let final_active = state.active_fanals();
    let ambiguous = final_active
        .windows(2)
        .any(|w| w[0].cluster == w[1].cluster);
    RetrievalOutcome {
        final_active,
        iterations_run: iterations,
        converged,
        cycle_detected: cycle,
        ambiguous,
    }
}

/// Initializes the activation to the cue and iterates.
pub fn retrieve(
    network: &CliqueNetwork,
    cue: &SparseMessage,
    config: &RetrievalConfig,
) -> Result<RetrievalOutcome> {
    let mut state = ActivationState::from_cue(*network.topology(), cue)?;
    Ok(run(network, &mut state, config))
}

/// Recovery when the erased clusters are unknown.
pub fn blind_recover(
    network: &CliqueNetwork,
    partial: &SparseMessage,
    max_iterations: usize,
) -> Result<RetrievalOutcome> {
    let cfg = RetrievalConfig::blind(network.topology().chi(), max_iterations);
    retrieve(network, partial, &cfg)
}

/// Recovery when the full support of the message is known: every cluster
/// outside `known_clusters` is disabled.
pub fn guided_recover(
    network: &CliqueNetwork,
    partial: &SparseMessage,
    known_clusters: &[usize],
    max_iterations: usize,
) -> Result<RetrievalOutcome> {
    if let Some(c) = partial.clusters().find(|c| !known_clusters.contains(c)) {
        return Err(Error::Message(format!(
            "cue uses cluster {c} outside the known support"
        )));
    }
    let cfg = RetrievalConfig::guided(network.topology().chi(), known_clusters, max_iterations)?;
    retrieve(network, partial, &cfg)
}

/// Exact recovery: the final activation is the truth and nothing else.
pub fn is_success(outcome: &RetrievalOutcome, truth: &SparseMessage) -> bool {
    outcome.final_active == truth.entries()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::message::{random_message, Placement};
    use rand::seq::index;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn msg(p: &[(usize, usize)]) -> SparseMessage {
        SparseMessage::from_pairs(p).unwrap()
    }

    /// A stored clique ABCDEF with only ABCD known, plus a shorter clique
    /// ABCDX left behind by other messages.
    #[test]
    fn shorter_spurious_clique_traps_the_decoder() {
        let t = Topology::new(8, 4).unwrap();
        let node: Vec<Fanal> = (0..7).map(|i| Fanal::new(i, i % 4)).collect();
        let clique =
            |ix: &[usize]| SparseMessage::new(ix.iter().map(|&i| node[i]).collect()).unwrap();
        let mut net = CliqueNetwork::new(t);
        net.learn(&clique(&[0, 1, 2, 3, 4, 5])).unwrap();
        for i in 0..4 {
            net.learn(&clique(&[i, 6])).unwrap();
        }
        let cue = clique(&[0, 1, 2, 3]);
        let cfg = RetrievalConfig::blind(8, 10);
        let mut s = ActivationState::from_cue(t, &cue).unwrap();
        propagate(&net, &mut s, 1);
        assert!(node.iter().all(|&f| s.score(f) == 4));
        select(&mut s, &cfg);
        assert_eq!(s.active.count_ones(), 7);
        propagate(&net, &mut s, 1);
        let scores: Vec<u32> = node.iter().map(|&f| s.score(f)).collect();
        assert_eq!(scores, [7, 7, 7, 7, 6, 6, 5]);
        select(&mut s, &cfg);
        assert_eq!(s.active_fanals(), cue.entries());

        let out = retrieve(&net, &cue, &cfg).unwrap();
        assert!(out.cycle_detected && !out.converged);
        assert_eq!(out.iterations_run, 2);
        assert_eq!(out.final_active, cue.entries());
    }

    #[test]
    fn empty_network_scores_only_memory() {
        let t = Topology::new(5, 4).unwrap();
        let net = CliqueNetwork::new(t);
        let cue = msg(&[(0, 1), (3, 2)]);
        let mut s = ActivationState::from_cue(t, &cue).unwrap();
        propagate(&net, &mut s, 1);
        for g in 0..t.n() {
            assert_eq!(s.scores[g], u32::from(s.active.get(g)));
        }
        let out = blind_recover(&net, &cue, 5).unwrap();
        assert!(out.converged);
        assert_eq!(out.iterations_run, 1);
        assert!(is_success(&out, &cue));
    }

    #[test]
    fn learned_clique_scores_its_order() {
        let t = Topology::new(20, 8).unwrap();
        let mut net = CliqueNetwork::new(t);
        let m = msg(&[(1, 0), (4, 7), (9, 3), (15, 2), (19, 5)]);
        net.learn(&m).unwrap();
        let mut s = ActivationState::from_cue(t, &m).unwrap();
        propagate(&net, &mut s, 1);
        for e in m.entries() {
            assert_eq!(s.score(*e), 5);
        }
    }

    #[test]
    fn global_max_keeps_only_top_scores() {
        let t = Topology::new(3, 4).unwrap();
        let mut s = ActivationState::new(t);
        s.scores = vec![7, 0, 0, 0, 6, 7, 0, 0, 5, 0, 0, 0];
        select(&mut s, &RetrievalConfig::blind(3, 1));
        assert_eq!(s.active_fanals(), vec![Fanal::new(0, 0), Fanal::new(1, 1)]);
        assert_eq!(s.global_max, 7);
        assert_eq!(s.per_cluster_max, vec![7, 7, 5]);
    }

    #[test]
    fn all_zero_scores_activate_everything() {
        let t = Topology::new(3, 4).unwrap();
        let mut s = ActivationState::new(t);
        select(&mut s, &RetrievalConfig::blind(3, 1));
        assert_eq!(s.active.count_ones(), 12);
    }

    #[test]
    fn per_cluster_ties_are_kept() {
        let t = Topology::new(2, 4).unwrap();
        let mut s = ActivationState::new(t);
        s.scores = vec![5, 5, 3, 0, 1, 2, 0, 0];
        let cfg = RetrievalConfig::blind(2, 1).with_selection(Selection::PerClusterMax);
        select(&mut s, &cfg);
        assert_eq!(
            s.active_fanals(),
            vec![Fanal::new(0, 0), Fanal::new(0, 1), Fanal::new(1, 1)]
        );
    }

    #[test]
    fn disabled_clusters_do_not_set_the_maximum() {
        let t = Topology::new(3, 2).unwrap();
        let mut s = ActivationState::new(t);
        s.scores = vec![9, 0, 4, 1, 4, 0];
        let cfg = RetrievalConfig::guided(3, &[1, 2], 1).unwrap();
        select(&mut s, &cfg);
        assert_eq!(s.global_max, 4);
        assert_eq!(s.active_fanals(), vec![Fanal::new(1, 0), Fanal::new(2, 0)]);
    }

    #[test]
    fn thresholds_gate_activation() {
        let t = Topology::new(2, 2).unwrap();
        let mut s = ActivationState::new(t);
        s.scores = vec![3, 0, 3, 1];
        let mut cfg = RetrievalConfig::blind(2, 1);
        cfg.thresholds[1] = Threshold::Level(4);
        select(&mut s, &cfg);
        assert_eq!(s.active_fanals(), vec![Fanal::new(0, 0)]);
    }

    #[test]
    fn success_requires_exact_set() {
        let truth = msg(&[(0, 1), (2, 3)]);
        let mut out = RetrievalOutcome {
            final_active: truth.entries().to_vec(),
            iterations_run: 1,
            converged: true,
            cycle_detected: false,
            ambiguous: false,
        };
        assert!(is_success(&out, &truth));
        out.final_active.push(Fanal::new(5, 0));
        assert!(!is_success(&out, &truth));
        out.final_active = vec![Fanal::new(0, 1), Fanal::new(2, 0), Fanal::new(2, 3)];
        out.ambiguous = true;
        assert!(!is_success(&out, &truth));
    }

    #[test]
    fn empty_cue_is_an_ambiguous_failure() {
        let t = Topology::new(10, 4).unwrap();
        let mut net = CliqueNetwork::new(t);
        let m = msg(&[(0, 1), (1, 2), (2, 3)]);
        net.learn(&m).unwrap();
        let out = blind_recover(&net, &SparseMessage::default(), 1).unwrap();
        assert!(out.ambiguous);
        assert_eq!(out.final_active.len(), t.n());
        assert!(!is_success(&out, &m));
    }

    #[test]
    fn guided_rejects_cue_outside_support() {
        let net = CliqueNetwork::new(Topology::new(6, 4).unwrap());
        let cue = msg(&[(0, 1), (4, 2)]);
        assert!(guided_recover(&net, &cue, &[0, 1, 2], 1).is_err());
    }

    #[test]
    fn guided_without_erasure_always_succeeds() {
        let t = Topology::new(30, 16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut net = CliqueNetwork::new(t);
        let ms: Vec<_> = (0..3000)
            .map(|_| random_message(&t, 6, Placement::UniformClusters, &mut rng).unwrap())
            .collect();
        net.learn_all(&ms).unwrap();
        for m in ms.iter().take(200) {
            let known: Vec<usize> = m.clusters().collect();
            let out = guided_recover(&net, m, &known, 1).unwrap();
            assert!(is_success(&out, m));
        }
    }

    /// Single learned message, all erasure patterns with c_e < c - 1,
    /// enumerated exhaustively on a small network.
    #[test]
    fn lone_message_recovers_from_any_erasure() {
        let t = Topology::new(10, 4).unwrap();
        let mut net = CliqueNetwork::new(t);
        let m = msg(&[(0, 3), (2, 1), (3, 0), (6, 2), (9, 3)]);
        net.learn(&m).unwrap();
        let clusters: Vec<usize> = m.clusters().collect();
        for mask in 0u32..(1 << clusters.len()) {
            let erased: Vec<usize> = clusters
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &c)| c)
                .collect();
            if erased.len() + 1 >= m.order() {
                continue;
            }
            let cue = m.without_clusters(&erased);
            let out = blind_recover(&net, &cue, 1).unwrap();
            assert!(is_success(&out, &m), "erased {erased:?}");
        }
    }

    #[test]
    fn scores_are_bounded() {
        let t = Topology::new(16, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut net = CliqueNetwork::new(t);
        for _ in 0..400 {
            net.learn(&random_message(&t, 5, Placement::UniformClusters, &mut rng).unwrap())
                .unwrap();
        }
        let mut s = ActivationState::new(t);
        for g in index::sample(&mut rng, t.n(), 40) {
            s.active.set(g);
        }
        propagate(&net, &mut s, 1);
        assert!(s.scores.iter().all(|&v| v <= 16 + 1));
    }
}
