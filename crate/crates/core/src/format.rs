//! Binary network file format.
//!
//! ```text
//! offset  size  field
//! 0       4     magic "CLQN"
//! 4       2     version (u16 LE) = 1
//! 6       4     chi (u32 LE)
//! 10      4     l (u32 LE)
//! 14      4     reserved (u32 LE) = 0
//! 18      P     strict upper triangle, row-major, LSB-first, zero padded
//! 18+P    8     popcount of the payload (u64 LE)
//! ```
//!
//! Pair `(g, h)` with `g < h` lives at bit `g*n - g*(g+1)/2 + (h-g-1)`.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, FormatError, Result};
use crate::network::CliqueNetwork;
use crate::topology::Topology;

pub const MAGIC: [u8; 4] = *b"CLQN";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 18;

fn triangle_bits(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}

#[inline]
fn row_base(g: u64, n: u64) -> u64 {
    g * n - g * (g + 1) / 2
}

/// Linear payload position of pair `(g, h)`, `g < h`.
pub fn pair_position(g: usize, h: usize, n: usize) -> u64 {
    debug_assert!(g < h && h < n);
    row_base(g as u64, n as u64) + (h - g - 1) as u64
}

/// Size in bytes of a serialized network of the given shape.
pub fn encoded_len(topology: &Topology) -> usize {
    HEADER_LEN + triangle_bits(topology.n()).div_ceil(8) as usize + 8
}

pub fn to_bytes(net: &CliqueNetwork) -> Vec<u8> {
    let t = net.topology();
    let n = t.n();
    let mut payload = vec![0u8; triangle_bits(n).div_ceil(8) as usize];
    for g in 0..n {
        for h in net.neighbors(g).filter(|&h| h > g) {
            let pos = pair_position(g, h, n);
            payload[(pos >> 3) as usize] |= 1 << (pos & 7);
        }
    }
    let checksum: u64 = payload.iter().map(|b| b.count_ones() as u64).sum();

    let mut out = Vec::with_capacity(HEADER_LEN + payload.len() + 8);
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(t.chi() as u32).to_le_bytes());
    out.extend_from_slice(&(t.l() as u32).to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes());
    out.extend_from_slice(&payload);
    out.extend_from_slice(&checksum.to_le_bytes());
    out
}

fn take(buf: &[u8], at: usize, len: usize) -> std::result::Result<&[u8], FormatError> {
    buf.get(at..at + len).ok_or(FormatError::Truncated {
        needed: at + len,
        got: buf.len(),
    })
}

fn u32_at(buf: &[u8], at: usize) -> std::result::Result<u32, FormatError> {
    Ok(u32::from_le_bytes(take(buf, at, 4)?.try_into().unwrap()))
}

pub fn from_bytes(buf: &[u8]) -> Result<CliqueNetwork> {
    let magic: [u8; 4] = take(buf, 0, 4)?.try_into().unwrap();
    if magic != MAGIC {
        return Err(FormatError::BadMagic(magic).into());
    }
    let version = u16::from_le_bytes(take(buf, 4, 2)?.try_into().unwrap());
    if version != VERSION {
        return Err(FormatError::UnsupportedVersion(version).into());
    }
    let chi = u32_at(buf, 6)? as usize;
    let l = u32_at(buf, 10)? as usize;
    let reserved = u32_at(buf, 14)?;
    if reserved != 0 {
        return Err(FormatError::Reserved(reserved).into());
    }
    let topology = Topology::new(chi, l)?;
    let n = topology.n();
    let bits = triangle_bits(n);
    let plen = bits.div_ceil(8) as usize;
    let payload = take(buf, HEADER_LEN, plen)?;
    let stored = u64::from_le_bytes(take(buf, HEADER_LEN + plen, 8)?.try_into().unwrap());
    let end = HEADER_LEN + plen + 8;
    if buf.len() > end {
        return Err(FormatError::TrailingBytes(buf.len() - end).into());
    }
    let computed: u64 = payload.iter().map(|b| b.count_ones() as u64).sum();
    if computed != stored {
        return Err(FormatError::Checksum { stored, computed }.into());
    }
    if !bits.is_multiple_of(8) && payload[plen - 1] >> (bits % 8) != 0 {
        return Err(FormatError::Padding.into());
    }

    let mut net = CliqueNetwork::new(topology);
    let (n64, mut g) = (n as u64, 0u64);
    for (i, &byte) in payload.iter().enumerate() {
        let mut b = byte;
        while b != 0 {
            let pos = (i as u64) * 8 + b.trailing_zeros() as u64;
            b &= b - 1;
            while pos >= row_base(g + 1, n64) {
                g += 1;
            }
            let h = g + 1 + (pos - row_base(g, n64));
            let (g, h) = (g as usize, h as usize);
            if g / l == h / l {
                return Err(FormatError::IntraClusterEdge { cluster: g / l }.into());
            }
            net.set_edge(g, h);
        }
    }
    Ok(net)
}

pub fn write_network<W: Write>(net: &CliqueNetwork, mut w: W) -> Result<()> {
    w.write_all(&to_bytes(net))?;
    Ok(())
}

pub fn read_network<R: Read>(mut r: R) -> Result<CliqueNetwork> {
    let mut buf = Vec::new();
    r.read_to_end(&mut buf)?;
    from_bytes(&buf)
}

pub fn save(net: &CliqueNetwork, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_bytes(net)).map_err(Error::from)
}

pub fn load(path: impl AsRef<Path>) -> Result<CliqueNetwork> {
    from_bytes(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::message::{random_message, Placement, SparseMessage};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn format_err(r: Result<CliqueNetwork>) -> FormatError {
        match r {
            Err(Error::Format(e)) => e,
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn empty_two_by_two() {
        let net = CliqueNetwork::new(Topology::new(2, 2).unwrap());
        let bytes = to_bytes(&net);
        assert_eq!(bytes.len(), HEADER_LEN + 1 + 8);
        assert_eq!(&bytes[..4], b"CLQN");
        assert_eq!(bytes[HEADER_LEN], 0);
        assert_eq!(from_bytes(&bytes).unwrap(), net);
    }

    #[test]
    fn bit_positions_follow_the_layout() {
        // n = 4; pairs in order: (0,1) (0,2) (0,3) (1,2) (1,3) (2,3)
        let mut net = CliqueNetwork::new(Topology::new(2, 2).unwrap());
        net.learn(&SparseMessage::from_pairs(&[(0, 1), (1, 0)]).unwrap())
            .unwrap();
        // fanals 1 and 2 -> pair (1,2) -> position 3
        let bytes = to_bytes(&net);
        assert_eq!(bytes[HEADER_LEN], 0b0000_1000);
        assert_eq!(
            u64::from_le_bytes(bytes[HEADER_LEN + 1..].try_into().unwrap()),
            1
        );
        assert_eq!(pair_position(2, 3, 4), 5);
    }

    #[test]
    fn round_trip_random_network() {
        let t = Topology::new(30, 16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut net = CliqueNetwork::new(t);
        for _ in 0..2000 {
            net.learn(&random_message(&t, 6, Placement::UniformClusters, &mut rng).unwrap())
                .unwrap();
        }
        let bytes = to_bytes(&net);
        assert_eq!(bytes.len(), encoded_len(&t));
        let back = from_bytes(&bytes).unwrap();
        assert_eq!(back, net);
        back.check_invariants().unwrap();
    }

    #[test]
    fn corruption_is_detected() {
        let net = CliqueNetwork::new(Topology::new(4, 4).unwrap());
        let good = to_bytes(&net);

        let mut b = good.clone();
        b[0] = b'X';
        assert!(matches!(
            format_err(from_bytes(&b)),
            FormatError::BadMagic(_)
        ));

        let mut b = good.clone();
        b[4] = 2;
        assert_eq!(
            format_err(from_bytes(&b)),
            FormatError::UnsupportedVersion(2)
        );

        let b = &good[..good.len() - 3];
        assert!(matches!(
            format_err(from_bytes(b)),
            FormatError::Truncated { .. }
        ));

        let mut b = good.clone();
        b[HEADER_LEN + 2] ^= 0xff;
        assert!(matches!(
            format_err(from_bytes(&b)),
            FormatError::Checksum { .. }
        ));

        let mut b = good.clone();
        b.push(0);
        assert_eq!(format_err(from_bytes(&b)), FormatError::TrailingBytes(1));
    }

    #[test]
    fn intra_cluster_bit_is_rejected() {
        let net = CliqueNetwork::new(Topology::new(2, 2).unwrap());
        let mut b = to_bytes(&net);
        // pair (0,1) is inside cluster 0
        b[HEADER_LEN] = 1;
        b[HEADER_LEN + 1..].copy_from_slice(&1u64.to_le_bytes());
        assert_eq!(
            format_err(from_bytes(&b)),
            FormatError::IntraClusterEdge { cluster: 0 }
        );
    }

    #[test]
    fn padding_must_be_zero() {
        let net = CliqueNetwork::new(Topology::new(2, 2).unwrap());
        let mut b = to_bytes(&net);
        b[HEADER_LEN] = 0b1000_0000;
        b[HEADER_LEN + 1..].copy_from_slice(&1u64.to_le_bytes());
        assert_eq!(format_err(from_bytes(&b)), FormatError::Padding);
    }
}
