//! Bipartitions of a multi-party space and Schmidt analysis across them.

use nalgebra::{DMatrix, DVector, SVD};

use crate::error::{Error, Result};
use crate::state::{PureState, QuditDims, Tolerance, C64, ZERO};

/// A two-block split of the parties, stored as the bit mask of block A.
///
/// The canonical representative always contains party 0, so a cut and its
/// mirror image compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bipartition {
    space: QuditDims,
    mask: u64,
}

impl Bipartition {
    pub fn new(space: QuditDims, mask: u64) -> Result<Self> {
        let m = space.parties();
        let all = full_mask(m);
        if mask == 0 || mask & !all != 0 || mask == all {
            return Err(Error::InvalidCut { mask, parties: m });
        }
        let mask = if mask & 1 == 1 { mask } else { all & !mask };
        Ok(Self { space, mask })
    }

    /// The cut separating `party` from everyone else.
    pub fn lone(space: QuditDims, party: usize) -> Result<Self> {
        if party >= space.parties() {
            return Err(Error::InvalidParameter(format!("party {party} out of range")));
        }
        Self::new(space, 1 << party)
    }

    /// The unique cut of a two-party space.
    pub fn bipartite(space: QuditDims) -> Result<Self> {
        if space.parties() != 2 {
            return Err(Error::CutRequired(space.parties()));
        }
        Self::new(space, 1)
    }

    pub fn space(&self) -> &QuditDims {
        &self.space
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn block_a(&self) -> Vec<usize> {
        (0..self.space.parties()).filter(|p| self.mask >> p & 1 == 1).collect()
    }

    pub fn block_b(&self) -> Vec<usize> {
        (0..self.space.parties()).filter(|p| self.mask >> p & 1 == 0).collect()
    }

    pub fn dim_a(&self) -> usize {
        self.block_a().iter().map(|&p| self.space.dims()[p]).product()
    }

    pub fn dim_b(&self) -> usize {
        self.block_b().iter().map(|&p| self.space.dims()[p]).product()
    }

    /// Human-readable form such as `A|BC`.
    pub fn label(&self) -> String {
        format!("{}|{}", party_names(&self.block_a()), party_names(&self.block_b()))
    }
}

impl std::fmt::Display for Bipartition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.label())
    }
}

pub(crate) fn full_mask(parties: usize) -> u64 {
    if parties >= 64 {
        u64::MAX
    } else {
        (1u64 << parties) - 1
    }
}

pub(crate) fn party_names(parties: &[usize]) -> String {
    if parties.iter().all(|&p| p < 26) {
        parties.iter().map(|&p| (b'A' + p as u8) as char).collect()
    } else {
        let names: Vec<String> = parties.iter().map(|p| format!("P{}", p + 1)).collect();
        names.join(",")
    }
}

/// All `2^(m-1) - 1` canonical cuts in ascending mask order.
pub fn enumerate_cuts(space: &QuditDims) -> Result<Vec<Bipartition>> {
    let m = space.parties();
    if m < 2 {
        return Err(Error::TooFewParties { needed: 2, got: m });
    }
    let all = full_mask(m);
    Ok((1..all)
        .step_by(2)
        .map(|mask| Bipartition { space: space.clone(), mask })
        .collect())
}

/// Reshapes amplitudes into a `d_A × d_B` matrix for an arbitrary party
/// mask (block A need not contain party 0). Indices are lexicographic within
/// each block, preserving party order.
pub(crate) fn reshape_amps(space: &QuditDims, amps: &DVector<C64>, mask: u64) -> DMatrix<C64> {
    let dims = space.dims();
    let (mut da, mut db) = (1, 1);
    for (p, &d) in dims.iter().enumerate() {
        if mask >> p & 1 == 1 {
            da *= d;
        } else {
            db *= d;
        }
    }
    let mut out = DMatrix::from_element(da, db, ZERO);
    let mut digits = vec![0usize; dims.len()];
    for &amp in amps.iter() {
        let (mut row, mut col) = (0, 0);
        for (p, &d) in dims.iter().enumerate() {
            if mask >> p & 1 == 1 {
                row = row * d + digits[p];
            } else {
                col = col * d + digits[p];
            }
        }
        out[(row, col)] = amp;
        for p in (0..dims.len()).rev() {
            digits[p] += 1;
            if digits[p] < dims[p] {
                break;
            }
            digits[p] = 0;
        }
    }
    out
}

pub fn reshape(p: &PureState, cut: &Bipartition) -> Result<DMatrix<C64>> {
    check_space(p.space(), cut)?;
    Ok(reshape_amps(p.space(), p.amps(), cut.mask))
}

fn check_space(space: &QuditDims, cut: &Bipartition) -> Result<()> {
    if space != &cut.space {
        return Err(Error::DimensionMismatch {
            expected: cut.space.to_string(),
            found: space.to_string(),
        });
    }
    Ok(())
}

/// Singular values of a matrix, sorted nonincreasing.
pub(crate) fn singular_values(m: &DMatrix<C64>) -> Vec<f64> {
    let mut sv: Vec<f64> = SVD::new(m.clone(), false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Schmidt coefficients of a state across a cut.
#[derive(Clone, Debug, PartialEq)]
pub struct SchmidtData {
    pub coefficients: Vec<f64>,
    pub rank: usize,
    pub cut: Bipartition,
}

impl SchmidtData {
    pub fn max_min_spread(&self) -> f64 {
        let first = self.coefficients.first().copied().unwrap_or(0.0);
        let last = self.coefficients.last().copied().unwrap_or(0.0);
        first - last
    }
}

pub fn schmidt(p: &PureState, cut: &Bipartition, tol: Tolerance) -> Result<SchmidtData> {
    let m = reshape(p, cut)?;
    let coefficients = singular_values(&m);
    let rank = coefficients.iter().filter(|&&s| s > tol.eps()).count();
    Ok(SchmidtData { coefficients, rank, cut: cut.clone() })
}

/// Full Schmidt decomposition `Σ_k λ_k |u_k>|v_k>`.
#[derive(Clone, Debug)]
pub struct SchmidtDecomposition {
    pub coefficients: Vec<f64>,
    pub left: Vec<DVector<C64>>,
    pub right: Vec<DVector<C64>>,
    pub cut: Bipartition,
}

impl SchmidtDecomposition {
    /// Reassembles the amplitudes in the original party order.
    pub fn reconstruct(&self) -> DVector<C64> {
        let space = &self.cut.space;
        let (da, db) = (self.cut.dim_a(), self.cut.dim_b());
        let mut m = DMatrix::from_element(da, db, ZERO);
        for ((l, u), v) in self.coefficients.iter().zip(&self.left).zip(&self.right) {
            m += u * v.transpose() * C64::new(*l, 0.0);
        }
        let mut amps = DVector::from_element(space.total(), ZERO);
        let dims = space.dims();
        for flat in 0..space.total() {
            let digits = space.digits(flat);
            let (mut row, mut col) = (0, 0);
            for (p, &d) in dims.iter().enumerate() {
                if self.cut.mask >> p & 1 == 1 {
                    row = row * d + digits[p];
                } else {
                    col = col * d + digits[p];
                }
            }
            amps[flat] = m[(row, col)];
        }
        amps
    }
}

pub fn schmidt_decomposition(p: &PureState, cut: &Bipartition) -> Result<SchmidtDecomposition> {
    let m = reshape(p, cut)?;
    let svd = SVD::new(m, true, true);
    let u = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    Ok(SchmidtDecomposition {
        coefficients: order.iter().map(|&k| svd.singular_values[k]).collect(),
        left: order.iter().map(|&k| u.column(k).into_owned()).collect(),
        right: order.iter().map(|&k| v_t.row(k).transpose()).collect(),
        cut: cut.clone(),
    })
}

pub fn is_product(p: &PureState, cut: &Bipartition, tol: Tolerance) -> Result<bool> {
    Ok(schmidt(p, cut, tol)?.rank == 1)
}

pub fn is_maximally_entangled(p: &PureState, cut: &Bipartition, tol: Tolerance) -> Result<bool> {
    maximally_entangled_within(p, cut, tol, tol.eps())
}

/// Full Schmidt rank with coefficient spread below `spread`.
pub fn maximally_entangled_within(
    p: &PureState,
    cut: &Bipartition,
    tol: Tolerance,
    spread: f64,
) -> Result<bool> {
    let data = schmidt(p, cut, tol)?;
    Ok(data.rank == cut.dim_a().min(cut.dim_b()) && data.max_min_spread() < spread)
}

/// Entangled across every canonical cut.
pub fn is_genuinely_entangled(p: &PureState, tol: Tolerance) -> Result<bool> {
    for cut in enumerate_cuts(p.space())? {
        if is_product(p, &cut, tol)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Von Neumann entropy (in bits) of the reduced state on either block.
pub fn entanglement_entropy(p: &PureState, cut: &Bipartition) -> Result<f64> {
    let m = reshape(p, cut)?;
    Ok(entropy_of_singular_values(&singular_values(&m)))
}

pub(crate) fn entropy_of_singular_values(sv: &[f64]) -> f64 {
    sv.iter()
        .map(|s| s * s)
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum()
}

/// Reduced density matrix on the parties in `keep` (any nonempty subset).
pub fn reduced_density_matrix(p: &PureState, keep: &[usize]) -> Result<DMatrix<C64>> {
    let m = p.space().parties();
    if keep.is_empty() || keep.iter().any(|&k| k >= m) {
        return Err(Error::InvalidParameter(format!("cannot keep parties {keep:?} of {m}")));
    }
    let mask = keep.iter().fold(0u64, |acc, &k| acc | 1 << k);
    let mat = reshape_amps(p.space(), p.amps(), mask);
    Ok(&mat * mat.adjoint())
}
