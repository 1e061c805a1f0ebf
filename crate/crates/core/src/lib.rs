//! Exact and randomized tools for threshold phenomena on finite hypergraphs.
//!
//! * [`hypergraph`]: bit-indexed subsets, hypergraphs, upsets and minimal
//!   antichains.
//! * [`measures`]: `μ_p` of an upset, exactly or by sampling, and the
//!   threshold `p_c`.
//! * [`cover`]: covers, exact minimum-cost covers, `p`-smallness
//!   certificates and the expectation-threshold `q`.
//! * [`fragment`]: minimum fragments, the round-by-round cover-building
//!   process, and exhaustive checks of its counting bound.
//! * [`experiments`]: named instance generators and threshold reports.
//! * [`formats`]: document and CSV formats shared by the CLI and the web demo.

pub mod cover;
pub mod error;
pub mod experiments;
pub mod formats;
pub mod fragment;
pub mod hypergraph;
pub mod measures;
pub mod prob;
pub mod rng;
pub mod subset;

pub use cover::{CoverCertificate, CoverSolver, QResult};
pub use error::{Error, Result};
pub use hypergraph::Hypergraph;
pub use prob::Probability;
pub use rng::RandomSeed;
pub use subset::{GroundSet, Subset};
