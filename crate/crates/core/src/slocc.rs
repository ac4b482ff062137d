//! Three-qubit SLOCC labels and the GHZ/W range witness.

use nalgebra::{DVector, SymmetricEigen};
use serde::{Serialize, Serializer};

use crate::analysis::{count_product_states_2d_2x2, ProductCount};
use crate::cuts::{enumerate_cuts, reduced_density_matrix, schmidt, Bipartition};
use crate::error::{Error, Result};
use crate::state::{PureState, QuditDims, StateSet, Subspace, Tolerance, C64, ONE};

/// Cutoff separating GHZ from W by the 3-tangle.
pub const TOL_TANGLE: f64 = 1e-8;

fn require_three_qubits(space: &QuditDims) -> Result<()> {
    if space != &QuditDims::qubits(3) {
        return Err(Error::InvalidDims(format!("expected 2x2x2, got {space}")));
    }
    Ok(())
}

/// `4 |d1 - 2 d2 + 4 d3|` in the amplitudes `a_ijk`.
pub fn three_tangle(p: &PureState) -> Result<f64> {
    require_three_qubits(p.space())?;
    let a = |i: usize, j: usize, k: usize| p.amps()[4 * i + 2 * j + k];
    let sq = |x: C64| x * x;
    let d1 = sq(a(0, 0, 0)) * sq(a(1, 1, 1))
        + sq(a(0, 0, 1)) * sq(a(1, 1, 0))
        + sq(a(0, 1, 0)) * sq(a(1, 0, 1))
        + sq(a(1, 0, 0)) * sq(a(0, 1, 1));
    let d2 = a(0, 0, 0) * a(1, 1, 1) * a(0, 1, 1) * a(1, 0, 0)
        + a(0, 0, 0) * a(1, 1, 1) * a(1, 0, 1) * a(0, 1, 0)
        + a(0, 0, 0) * a(1, 1, 1) * a(1, 1, 0) * a(0, 0, 1)
        + a(0, 1, 1) * a(1, 0, 0) * a(1, 0, 1) * a(0, 1, 0)
        + a(0, 1, 1) * a(1, 0, 0) * a(1, 1, 0) * a(0, 0, 1)
        + a(1, 0, 1) * a(0, 1, 0) * a(1, 1, 0) * a(0, 0, 1);
    let d3 = a(0, 0, 0) * a(1, 1, 0) * a(1, 0, 1) * a(0, 1, 1) + a(1, 1, 1) * a(0, 0, 1) * a(0, 1, 0) * a(1, 0, 0);
    Ok(4.0 * (d1 - d2 * 2.0 + d3 * 4.0).norm())
}

#[derive(Clone, Debug, PartialEq)]
pub enum SloccClass {
    FullySeparable,
    Biseparable(Bipartition),
    WClass,
    GhzClass,
}

impl SloccClass {
    pub fn label(&self) -> String {
        match self {
            Self::FullySeparable => "SEP".into(),
            Self::Biseparable(cut) => format!("BISEP({})", cut.label()),
            Self::WClass => "W".into(),
            Self::GhzClass => "GHZ".into(),
        }
    }
}

impl Serialize for SloccClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SloccLabel {
    pub class: SloccClass,
    pub tangle: f64,
    /// Schmidt rank at each canonical cut, in enumeration order.
    pub ranks: Vec<usize>,
}

pub fn classify_three_qubit(p: &PureState, tol: Tolerance) -> Result<SloccLabel> {
    require_three_qubits(p.space())?;
    let cuts = enumerate_cuts(p.space())?;
    let ranks = cuts.iter().map(|c| schmidt(p, c, tol).map(|d| d.rank)).collect::<Result<Vec<_>>>()?;
    let tangle = three_tangle(p)?;
    let product_cuts: Vec<&Bipartition> = cuts.iter().zip(&ranks).filter(|(_, &r)| r == 1).map(|(c, _)| c).collect();
    let class = match product_cuts.as_slice() {
        [] if tangle > TOL_TANGLE => SloccClass::GhzClass,
        [] => SloccClass::WClass,
        [cut] => SloccClass::Biseparable((*cut).clone()),
        _ => SloccClass::FullySeparable,
    };
    Ok(SloccLabel { class, tangle, ranks })
}

/// `(|0…0> + |1…1>)/√2`.
pub fn ghz_state(n: usize) -> Result<PureState> {
    let zeros = "0".repeat(n);
    let ones = "1".repeat(n);
    PureState::from_bits(&[(ONE, &zeros), (ONE, &ones)])
}

/// Uniform superposition of the weight-one kets.
pub fn w_state(n: usize) -> Result<PureState> {
    let strings: Vec<String> = (0..n).map(|k| format!("{:0n$b}", 1usize << k)).collect();
    let terms: Vec<(C64, &str)> = strings.iter().map(|s| (ONE, s.as_str())).collect();
    PureState::from_bits(&terms)
}

/// Range of a Hermitian matrix: eigenvectors with eigenvalue above `tol`.
pub fn hermitian_range(rho: &nalgebra::DMatrix<C64>, space: QuditDims, tol: Tolerance) -> Result<Subspace> {
    let eig = SymmetricEigen::new(rho.clone());
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).filter(|&k| eig.eigenvalues[k] > tol.eps()).collect();
    idx.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));
    let vectors: Vec<DVector<C64>> = idx.iter().map(|&k| eig.eigenvectors.column(k).into_owned()).collect();
    Ok(crate::state::orthonormalize(&vectors, &space, tol))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RangeWitness {
    pub n: usize,
    pub w_count: ProductCount,
    pub ghz_count: ProductCount,
}

impl RangeWitness {
    /// One product vector in the W range and two in the GHZ range.
    pub fn succeeds(&self) -> bool {
        self.w_count == ProductCount::One && self.ghz_count == ProductCount::Two
    }
}

/// Product vectors in the ranges of the first-two-party reductions of
/// `|W_n>` and `|GHZ_n>`.
pub fn ghz_w_range_witness(n: usize, tol: Tolerance) -> Result<RangeWitness> {
    if n < 3 {
        return Err(Error::TooFewParties { needed: 3, got: n });
    }
    let count = |p: PureState| -> Result<ProductCount> {
        let rho = reduced_density_matrix(&p, &[0, 1])?;
        let range = hermitian_range(&rho, QuditDims::qubits(2), tol)?;
        count_product_states_2d_2x2(&range, tol)
    };
    Ok(RangeWitness { n, w_count: count(w_state(n)?)?, ghz_count: count(ghz_state(n)?)? })
}

/// Whether the set, together with a one-dimensional complement if there
/// is one, holds both GHZ-class and W-class members.
pub fn resource_dimension_flag(set: &StateSet, tol: Tolerance) -> Result<bool> {
    require_three_qubits(set.space())?;
    let mut members: Vec<PureState> = set.states().to_vec();
    let complement = set.complement();
    if complement.dim() == 1 {
        members.push(complement.basis()[0].clone());
    }
    let mut ghz = false;
    let mut w = false;
    for p in &members {
        match classify_three_qubit(p, tol)?.class {
            SloccClass::GhzClass => ghz = true,
            SloccClass::WClass => w = true,
            _ => {}
        }
    }
    Ok(ghz && w)
}
