//! The learned memory: a symmetric, bit-packed adjacency over fanals.

use crate::bits::{words_for, Ones};
use crate::error::{Error, Result};
use crate::message::SparseMessage;
use crate::topology::Topology;

/// Binary clustered network storing messages as cliques.
///
/// The full symmetric matrix is kept in memory, one row of `n` bits per
/// fanal, so that a row scan yields a fanal's neighbours with word-level
/// operations. Edges are never created inside a cluster and never removed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueNetwork {
    topology: Topology,
    stride: usize,
    rows: Vec<u64>,
    edge_count: u64,
}

impl CliqueNetwork {
    pub fn new(topology: Topology) -> Self {
        let n = topology.n();
        let stride = words_for(n);
        CliqueNetwork {
            topology,
            stride,
            rows: vec![0; n * stride],
            edge_count: 0,
        }
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    /// Number of distinct inter-cluster edges.
    pub fn edge_count(&self) -> u64 {
        self.edge_count
    }

    /// Fraction of the binary resource in use.
    pub fn density(&self) -> f64 {
        self.edge_count as f64 / self.topology.q_bits() as f64
    }

    /// Density restricted to cluster pairs less than `reach` apart, the
    /// pairs a contiguous message of order `reach` can connect.
    pub fn span_density(&self, reach: usize) -> f64 {
        let (chi, l) = (self.topology.chi(), self.topology.l());
        let mut edges = 0u64;
        let mut pairs = 0u64;
        for a in 0..chi {
            for b in a + 1..chi.min(a + reach) {
                pairs += 1;
                for f in 0..l {
                    let row = self.row(a * l + f);
                    edges += count_range(row, b * l, (b + 1) * l);
                }
            }
        }
        if pairs == 0 {
            return 0.0;
        }
        edges as f64 / (pairs * (l * l) as u64) as f64
    }

    /// Adjacency row of global fanal `g` as packed words.
    #[inline]
    pub fn row(&self, g: usize) -> &[u64] {
        &self.rows[g * self.stride..(g + 1) * self.stride]
    }

    pub fn neighbors(&self, g: usize) -> Ones<'_> {
        Ones::new(self.row(g))
    }

    #[inline]
    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.rows[a * self.stride + (b >> 6)] >> (b & 63) & 1 == 1
    }

    /// Sets edge `a`-`b`. Returns true when the edge is new.
    pub(crate) fn set_edge(&mut self, a: usize, b: usize) -> bool {
        debug_assert_ne!(a / self.topology.l(), b / self.topology.l());
        let wa = a * self.stride + (b >> 6);
        let mask = 1u64 << (b & 63);
        if self.rows[wa] & mask != 0 {
            return false;
        }
        self.rows[wa] |= mask;
        self.rows[b * self.stride + (a >> 6)] |= 1 << (a & 63);
        self.edge_count += 1;
        true
    }

    /// Stores `message` as a clique and reports how many edges were created.
    pub fn learn(&mut self, message: &SparseMessage) -> Result<usize> {
        if message.order() < 2 {
            return Err(Error::Message(format!(
                "order {} creates no edge; need at least 2",
                message.order()
            )));
        }
        message.check_bounds(&self.topology)?;
        let globals: Vec<usize> = message.globals(&self.topology).collect();
        let mut created = 0;
        for (i, &a) in globals.iter().enumerate() {
            for &b in &globals[i + 1..] {
                created += usize::from(self.set_edge(a, b));
            }
        }
        Ok(created)
    }

    /// Learns every message in turn; returns the total of new edges.
    pub fn learn_all<'a, I>(&mut self, messages: I) -> Result<usize>
    where
        I: IntoIterator<Item = &'a SparseMessage>,
    {
        messages
            .into_iter()
            .try_fold(0, |acc, m| Ok(acc + self.learn(m)?))
    }

    /// True when every pair of the message's fanals is connected.
    pub fn contains_clique(&self, message: &SparseMessage) -> bool {
        let globals: Vec<usize> = message.globals(&self.topology).collect();
        globals
            .iter()
            .enumerate()
            .all(|(i, &a)| globals[i + 1..].iter().all(|&b| self.has_edge(a, b)))
    }

    /// Recounts edges from the adjacency and checks structural invariants.
    /// Used by tests and after deserialization.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let l = self.topology.l();
        let n = self.topology.n();
        let mut upper = 0u64;
        for g in 0..n {
            for h in self.neighbors(g) {
                if h / l == g / l {
                    return Err(format!("intra-cluster edge {g}-{h}"));
                }
                if !self.has_edge(h, g) {
                    return Err(format!("asymmetric edge {g}-{h}"));
                }
                if h > g {
                    upper += 1;
                }
            }
        }
        if upper != self.edge_count {
            return Err(format!("edge_count {} but {} set", self.edge_count, upper));
        }
        Ok(())
    }
}

fn count_range(words: &[u64], lo: usize, hi: usize) -> u64 {
    let mut n = 0u64;
    let mut i = lo;
    while i < hi {
        let w = i / 64;
        let off = i % 64;
        let take = (64 - off).min(hi - i);
        let mask = if take == 64 {
            u64::MAX
        } else {
            ((1u64 << take) - 1) << off
        };
        n += (words[w] & mask).count_ones() as u64;
        i += take;
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::message::{random_message, Placement};
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn msg(p: &[(usize, usize)]) -> SparseMessage {
        SparseMessage::from_pairs(p).unwrap()
    }

    #[test]
    fn empty_network() {
        let net = CliqueNetwork::new(Topology::new(9, 16).unwrap());
        assert_eq!(net.edge_count(), 0);
        assert_eq!(net.density(), 0.0);
    }

    #[test]
    fn first_clique_of_order_four() {
        let mut net = CliqueNetwork::new(Topology::new(9, 16).unwrap());
        let m = msg(&[(0, 3), (2, 15), (5, 0), (8, 7)]);
        assert_eq!(net.learn(&m).unwrap(), 6);
        assert_eq!(net.learn(&m).unwrap(), 0);
        assert!(net.contains_clique(&m));
        net.check_invariants().unwrap();
    }

    #[test]
    fn shared_pair_union() {
        let mut net = CliqueNetwork::new(Topology::new(6, 4).unwrap());
        net.learn(&msg(&[(0, 1), (1, 2), (2, 3)])).unwrap();
        net.learn(&msg(&[(0, 1), (1, 2), (4, 0)])).unwrap();
        assert_eq!(net.edge_count(), 5);
    }

    #[test]
    fn single_possible_edge() {
        let mut net = CliqueNetwork::new(Topology::new(2, 1).unwrap());
        net.learn(&msg(&[(0, 0), (1, 0)])).unwrap();
        assert_eq!(net.density(), 1.0);
    }

    #[test]
    fn rejects_bad_messages() {
        let mut net = CliqueNetwork::new(Topology::new(4, 4).unwrap());
        assert!(net.learn(&msg(&[(0, 1), (4, 0)])).is_err());
        assert!(net.learn(&msg(&[(0, 1), (1, 4)])).is_err());
        assert!(net.learn(&msg(&[(0, 1)])).is_err());
        assert_eq!(net.edge_count(), 0);
    }

    #[test]
    fn learning_order_does_not_matter() {
        let t = Topology::new(12, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut ms: Vec<_> = (0..300)
            .map(|_| random_message(&t, 4, Placement::UniformClusters, &mut rng).unwrap())
            .collect();
        let mut a = CliqueNetwork::new(t);
        a.learn_all(&ms).unwrap();
        ms.shuffle(&mut rng);
        let mut b = CliqueNetwork::new(t);
        b.learn_all(&ms).unwrap();
        assert_eq!(a, b);
        a.check_invariants().unwrap();
    }

    #[test]
    fn density_is_monotone() {
        let t = Topology::new(10, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let mut net = CliqueNetwork::new(t);
        let mut last = 0.0;
        for _ in 0..500 {
            net.learn(&random_message(&t, 3, Placement::UniformClusters, &mut rng).unwrap())
                .unwrap();
            assert!(net.density() >= last);
            last = net.density();
        }
        net.check_invariants().unwrap();
    }
}
