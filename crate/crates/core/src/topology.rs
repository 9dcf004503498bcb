use crate::error::{Error, Result};

/// Shape of a clustered network: `chi` clusters of `l` fanals each.
///
/// `l` must be a power of two so that each cluster encodes exactly
/// `kappa = log2(l)` bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Topology {
    chi: usize,
    l: usize,
}

impl Topology {
    pub fn new(chi: usize, l: usize) -> Result<Self> {
        if chi < 2 {
            return Err(Error::Topology(format!(
                "need at least 2 clusters, got chi = {chi}"
            )));
        }
        if l == 0 || !l.is_power_of_two() {
            return Err(Error::Topology(format!(
                "fanals per cluster must be a power of two, got l = {l}"
            )));
        }
        // keeps n·(n-1)/2 and global indices comfortably inside u64/usize
        if chi.checked_mul(l).is_none_or(|n| n > u32::MAX as usize) {
            return Err(Error::Topology(format!("network too large: {chi} x {l}")));
        }
        Ok(Topology { chi, l })
    }

    /// Number of clusters.
    #[inline]
    pub fn chi(&self) -> usize {
        self.chi
    }

    /// Fanals per cluster.
    #[inline]
    pub fn l(&self) -> usize {
        self.l
    }

    /// Bits per character.
    pub fn kappa(&self) -> u32 {
        self.l.trailing_zeros()
    }

    /// Total fanal count.
    #[inline]
    pub fn n(&self) -> usize {
        self.chi * self.l
    }

    /// Binary resource: the number of potential inter-cluster edges.
    pub fn q_bits(&self) -> u64 {
        let (chi, l) = (self.chi as u64, self.l as u64);
        chi * (chi - 1) * l * l / 2
    }

    #[inline]
    pub fn global(&self, cluster: usize, fanal: usize) -> usize {
        cluster * self.l + fanal
    }

    #[inline]
    pub fn split(&self, g: usize) -> (usize, usize) {
        (g / self.l, g % self.l)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_one_network() {
        let t = Topology::new(9, 16).unwrap();
        assert_eq!(t.n(), 144);
        assert_eq!(t.kappa(), 4);
    }

    #[test]
    fn smallest_network() {
        let t = Topology::new(2, 1).unwrap();
        assert_eq!(t.n(), 2);
        assert_eq!(t.q_bits(), 1);
        assert_eq!(t.kappa(), 0);
    }

    #[test]
    fn resource_of_reference_network() {
        let t = Topology::new(100, 64).unwrap();
        assert_eq!(t.q_bits(), 20_275_200);
        assert_eq!(t.n(), 6400);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(Topology::new(1, 64).is_err());
        assert!(Topology::new(10, 48).is_err());
        assert!(Topology::new(10, 0).is_err());
    }

    #[test]
    fn global_index_round_trip() {
        let t = Topology::new(7, 8).unwrap();
        for g in 0..t.n() {
            let (c, f) = t.split(g);
            assert_eq!(t.global(c, f), g);
        }
    }
}
