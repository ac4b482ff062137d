//! Construction and verification of incomplete entangled bases in
//! multi-qudit systems.
//!
//! * [`state`]: pure states, state sets, subspaces
//! * [`cuts`]: bipartitions and Schmidt data
//! * [`analysis`]: exact and numerical subspace analysis, basis verdicts
//! * [`constructions`]: verifier-gated builders and the catalog
//! * [`slocc`], [`locc`]: three-qubit classes and projection flags
//! * [`statefile`], [`report`]: JSON input and output

pub mod analysis;
pub mod constructions;
pub mod cuts;
pub mod error;
pub mod locc;
pub mod report;
pub mod slocc;
pub mod state;
pub mod statefile;

pub use error::{Error, Result};
