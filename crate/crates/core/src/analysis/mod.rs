//! Entanglement content of subspaces.
//!
//! Two kinds of answers come out of this module and they are never mixed:
//! exact verdicts (polynomial identities, explicit witnesses, dimension
//! bounds) and numerical evidence from seeded multi-start searches. Every
//! verdict carries its [`Grade`].

mod count;
mod minors;
mod search;
mod verify;

pub use count::{count_product_states_2d_2x2, quadratic_coefficients, ProductCount, TOL_DISC};
pub use minors::{entangled_witness, only_product_across_cut, schmidt_rank_support_bound};
pub use search::{
    find_maximally_entangled, find_product_state, max_orthogonal_set, max_schmidt_rank_in_subspace,
    maximize_entropy, OrthogonalSet, SchmidtRankEstimate, SearchMode,
};
pub use verify::{
    completion_search, verify_basis, BasisKind, BasisVerdict, Completable, CompletionResult, Outcome,
    VerifyOptions,
};

use serde::Serialize;

use crate::cuts::Bipartition;
use crate::state::{PureState, Tolerance};

/// How much a claim can be trusted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Grade {
    Exact,
    NumericalEvidence,
    RuleBasedCited,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SubspaceStatus {
    OnlyProduct,
    ContainsEntangled,
    NoProductFound,
    ProductFound,
    MeFound,
    NoMeFound,
}

impl SubspaceStatus {
    pub fn carries_witness(self) -> bool {
        matches!(self, Self::ContainsEntangled | Self::ProductFound | Self::MeFound)
    }
}

/// Result of probing one subspace across one cut.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceVerdict {
    pub cut: Bipartition,
    pub status: SubspaceStatus,
    pub grade: Grade,
    pub witness: Option<PureState>,
    /// Diagnostic value of the search: best objective reached, or the
    /// largest minor modulus for the exact test.
    pub score: f64,
}

/// Knobs of the multi-start searches.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub starts: usize,
    pub seed: u64,
    pub max_iters: usize,
    /// Stop when one step improves the objective by less than this fraction
    /// of its magnitude.
    pub convergence: f64,
    pub tol: Tolerance,
    /// Acceptance slack for the smallest Schmidt coefficient of a maximally
    /// entangled candidate.
    pub tol_me: f64,
    /// Random vectors drawn by [`max_schmidt_rank_in_subspace`].
    pub rank_samples: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            starts: 64,
            seed: 0,
            max_iters: 500,
            convergence: 1e-12,
            tol: Tolerance::default(),
            tol_me: 1e-7,
            rank_samples: 64,
        }
    }
}

impl SearchConfig {
    pub fn with_starts(mut self, starts: usize) -> Self {
        self.starts = starts;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_tol(mut self, tol: Tolerance) -> Self {
        self.tol = tol;
        self
    }
}
