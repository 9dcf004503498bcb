use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised while reading a serialized network.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("bad magic {0:?}, expected \"CLQN\"")]
    BadMagic([u8; 4]),
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u16),
    #[error("reserved header field is {0}, expected 0")]
    Reserved(u32),
    #[error("truncated stream: needed {needed} bytes, got {got}")]
    Truncated { needed: usize, got: usize },
    #[error("checksum mismatch: header says {stored} set bits, payload holds {computed}")]
    Checksum { stored: u64, computed: u64 },
    #[error("payload sets an edge inside cluster {cluster}")]
    IntraClusterEdge { cluster: usize },
    #[error("non-zero padding bits after the adjacency triangle")]
    Padding,
    #[error("{0} trailing bytes after checksum")]
    TrailingBytes(usize),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid topology: {0}")]
    Topology(String),
    #[error("invalid message: {0}")]
    Message(String),
    #[error("invalid order profile: {0}")]
    Profile(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
