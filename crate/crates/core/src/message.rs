//! Sparse messages, order profiles and random message generation.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};
use crate::topology::Topology;

/// One expressed character: fanal `index` of cluster `cluster` (both 0-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fanal {
    pub cluster: usize,
    pub index: usize,
}

impl Fanal {
    pub fn new(cluster: usize, index: usize) -> Self {
        Fanal { cluster, index }
    }
}

/// A set of (cluster, fanal) pairs with pairwise distinct clusters, kept
/// sorted by cluster.
///
/// The type itself accepts any size so that partial cues (erased messages)
/// share the representation; operations that store a message require
/// order >= 2.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SparseMessage {
    entries: Vec<Fanal>,
}

impl SparseMessage {
    pub fn new(mut entries: Vec<Fanal>) -> Result<Self> {
        entries.sort_unstable();
        if let Some(w) = entries.windows(2).find(|w| w[0].cluster == w[1].cluster) {
            return Err(Error::Message(format!(
                "cluster {} appears more than once",
                w[0].cluster
            )));
        }
        Ok(SparseMessage { entries })
    }

    pub fn from_pairs(pairs: &[(usize, usize)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(c, f)| Fanal::new(c, f)).collect())
    }

    pub fn entries(&self) -> &[Fanal] {
        &self.entries
    }

    /// Number of expressed characters.
    pub fn order(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn clusters(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|e| e.cluster)
    }

    pub fn fanal_in(&self, cluster: usize) -> Option<usize> {
        self.entries
            .binary_search_by_key(&cluster, |e| e.cluster)
            .ok()
            .map(|i| self.entries[i].index)
    }

    pub fn check_bounds(&self, topology: &Topology) -> Result<()> {
        for e in &self.entries {
            if e.cluster >= topology.chi() || e.index >= topology.l() {
                return Err(Error::Message(format!(
                    "{}:{} is outside a {}x{} network",
                    e.cluster,
                    e.index,
                    topology.chi(),
                    topology.l()
                )));
            }
        }
        Ok(())
    }

    /// Global fanal indices, ascending.
    pub fn globals<'a>(&'a self, topology: &'a Topology) -> impl Iterator<Item = usize> + 'a {
        self.entries
            .iter()
            .map(move |e| topology.global(e.cluster, e.index))
    }

    /// Copy of the message with the given clusters removed.
    pub fn without_clusters(&self, erased: &[usize]) -> SparseMessage {
        SparseMessage {
            entries: self
                .entries
                .iter()
                .filter(|e| !erased.contains(&e.cluster))
                .copied()
                .collect(),
        }
    }

    /// True when the support is a run of consecutive cluster indices.
    pub fn is_contiguous(&self) -> bool {
        self.entries
            .windows(2)
            .all(|w| w[1].cluster == w[0].cluster + 1)
    }
}

impl fmt::Display for SparseMessage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}:{}", e.cluster, e.index)?;
        }
        Ok(())
    }
}

impl FromStr for SparseMessage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(SparseMessage::default());
        }
        let mut entries = Vec::new();
        for tok in s.split(',') {
            let tok = tok.trim();
            let (c, f) = tok
                .split_once(':')
                .ok_or_else(|| Error::Message(format!("expected cluster:fanal, got {tok:?}")))?;
            let parse = |v: &str| {
                v.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Message(format!("bad index {v:?} in {tok:?}")))
            };
            entries.push(Fanal::new(parse(c)?, parse(f)?));
        }
        SparseMessage::new(entries)
    }
}

/// Parses the line-oriented message text format. `#` lines and blank lines
/// are skipped.
pub fn parse_messages(text: &str) -> Result<Vec<SparseMessage>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let msg = line.parse::<SparseMessage>().map_err(|e| Error::Parse {
            line: i + 1,
            msg: e.to_string(),
        })?;
        out.push(msg);
    }
    Ok(out)
}

pub fn format_messages(messages: &[SparseMessage]) -> String {
    let mut s = String::new();
    for m in messages {
        s.push_str(&m.to_string());
        s.push('\n');
    }
    s
}

/// How a random message picks its clusters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Placement {
    /// `order` distinct clusters uniformly without replacement.
    UniformClusters,
    /// A run of `order` consecutive clusters with a uniform start.
    Contiguous,
}

/// Draws a random message. Fanal values are i.i.d. uniform over `[0, l)`.
pub fn random_message<R: Rng + ?Sized>(
    topology: &Topology,
    order: usize,
    placement: Placement,
    rng: &mut R,
) -> Result<SparseMessage> {
    let chi = topology.chi();
    if order < 2 || order > chi {
        return Err(Error::Message(format!("order {order} outside [2, {chi}]")));
    }
    let mut entries: Vec<Fanal> = match placement {
        Placement::UniformClusters => index::sample(rng, chi, order)
            .into_iter()
            .map(|c| Fanal::new(c, 0))
            .collect(),
        Placement::Contiguous => {
            let start = rng.gen_range(0..=chi - order);
            (start..start + order).map(|c| Fanal::new(c, 0)).collect()
        }
    };
    for e in &mut entries {
        e.index = rng.gen_range(0..topology.l());
    }
    entries.sort_unstable();
    Ok(SparseMessage { entries })
}

/// Distribution of message orders.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderProfile {
    Constant(usize),
    UniformRange { min: usize, max: usize },
}

impl OrderProfile {
    pub fn constant(c: usize) -> Self {
        OrderProfile::Constant(c)
    }

    pub fn range(min: usize, max: usize) -> Self {
        OrderProfile::UniformRange { min, max }
    }

    /// Checks the profile against a cluster count.
    pub fn validate(&self, chi: usize) -> Result<()> {
        match *self {
            OrderProfile::Constant(c) if c < 2 || c > chi => Err(Error::Profile(format!(
                "constant order {c} outside [2, {chi}]"
            ))),
            OrderProfile::UniformRange { min, max } if !(1 < min && min <= max && max < chi) => {
                Err(Error::Profile(format!(
                    "range {min}..{max} violates 1 < c_min <= c_max < {chi}"
                )))
            }
            _ => Ok(()),
        }
    }

    pub fn min(&self) -> usize {
        match *self {
            OrderProfile::Constant(c) => c,
            OrderProfile::UniformRange { min, .. } => min,
        }
    }

    pub fn max(&self) -> usize {
        match *self {
            OrderProfile::Constant(c) => c,
            OrderProfile::UniformRange { max, .. } => max,
        }
    }

    /// Number of distinct orders, `c_max - c_min + 1`.
    pub fn lambda(&self) -> usize {
        self.max() - self.min() + 1
    }

    pub fn orders(&self) -> std::ops::RangeInclusive<usize> {
        self.min()..=self.max()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        match *self {
            OrderProfile::Constant(c) => c,
            OrderProfile::UniformRange { min, max } => rng.gen_range(min..=max),
        }
    }
}

impl fmt::Display for OrderProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            OrderProfile::Constant(c) => write!(f, "{c}"),
            OrderProfile::UniformRange { min, max } => write!(f, "{min}..{max}"),
        }
    }
}

impl FromStr for OrderProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Profile(format!("cannot parse order {s:?}"));
        match s.split_once("..") {
            Some((a, b)) => Ok(OrderProfile::range(
                a.trim().parse().map_err(|_| bad())?,
                b.trim().parse().map_err(|_| bad())?,
            )),
            None => Ok(OrderProfile::Constant(s.trim().parse().map_err(|_| bad())?)),
        }
    }
}
