//! Sparse messages stored as cliques in a clustered binary network.
//!
//! A network of `chi` clusters with `l` fanals each learns a message of
//! order `c` by connecting one fanal in each of `c` clusters into a clique.
//! Retrieval alternates message passing and winner-take-all selection.
//! [`theory`] holds the closed-form density, capacity and error
//! expressions, and [`harness`] runs Monte Carlo error-rate experiments
//! against them.

pub mod bits;
pub mod blurred;
pub mod classify;
pub mod error;
pub mod format;
pub mod harness;
pub mod message;
pub mod network;
pub mod retrieval;
pub mod theory;
pub mod topology;

pub use blurred::DistortionKind;
pub use error::{Error, FormatError, Result};
pub use message::{Fanal, OrderProfile, Placement, SparseMessage};
pub use network::CliqueNetwork;
pub use retrieval::{RetrievalConfig, RetrievalOutcome, Selection, Threshold};
pub use topology::Topology;
