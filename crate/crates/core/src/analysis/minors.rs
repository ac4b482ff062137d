//! Exact product-subspace test.
//!
//! For a subspace with orthonormal basis `{b_i}` and a cut, write
//! `M(c) = Σ c_i R(b_i)` with `R` the cut reshaping. Every 2×2 minor of
//! `M(c)` is a homogeneous quadratic form in `c`, so it vanishes
//! identically iff it vanishes at every `e_i` and every `e_i + e_j`
//! (polarization). All minors vanishing identically is the same as every
//! vector of the subspace being a product across the cut.

use nalgebra::{DMatrix, DVector};

use crate::cuts::{reshape, singular_values, Bipartition};
use crate::error::{Error, Result};
use crate::state::{gram_schmidt, PureState, Subspace, Tolerance, C64};

pub(crate) fn cut_matrices(s: &Subspace, cut: &Bipartition) -> Result<Vec<DMatrix<C64>>> {
    s.basis().iter().map(|b| reshape(b, cut)).collect()
}

/// Largest 2×2 minor modulus of a matrix.
pub(crate) fn max_minor(m: &DMatrix<C64>) -> f64 {
    let (r, c) = m.shape();
    let mut best: f64 = 0.0;
    for p in 0..r {
        for q in p + 1..r {
            for a in 0..c {
                for b in a + 1..c {
                    let minor = m[(p, a)] * m[(q, b)] - m[(p, b)] * m[(q, a)];
                    best = best.max(minor.norm());
                }
            }
        }
    }
    best
}

/// Sum of squared 2×2 minor moduli.
pub(crate) fn minor_energy(m: &DMatrix<C64>) -> f64 {
    let (r, c) = m.shape();
    let mut acc = 0.0;
    for p in 0..r {
        for q in p + 1..r {
            for a in 0..c {
                for b in a + 1..c {
                    acc += (m[(p, a)] * m[(q, b)] - m[(p, b)] * m[(q, a)]).norm_sqr();
                }
            }
        }
    }
    acc
}

/// Largest minor modulus over the polarization points `e_i` and `e_i + e_j`.
fn polarization_scan(mats: &[DMatrix<C64>]) -> (f64, Option<(usize, Option<usize>)>) {
    let mut best = 0.0;
    let mut at = None;
    for i in 0..mats.len() {
        let v = max_minor(&mats[i]);
        if v > best {
            best = v;
            at = Some((i, None));
        }
    }
    for i in 0..mats.len() {
        for j in i + 1..mats.len() {
            let v = max_minor(&(&mats[i] + &mats[j]));
            if v > best {
                best = v;
                at = Some((i, Some(j)));
            }
        }
    }
    (best, at)
}

/// True iff every vector of `s` is a product across `cut`.
pub fn only_product_across_cut(s: &Subspace, cut: &Bipartition, tol: Tolerance) -> Result<bool> {
    if s.dim() == 0 {
        return Err(Error::EmptySubspace);
    }
    let mats = cut_matrices(s, cut)?;
    Ok(polarization_scan(&mats).0 < tol.eps())
}

/// An explicitly entangled vector of `s`, if the exact test finds one.
///
/// Candidates are the basis vectors and the normalized pair sums; the one
/// with the largest second Schmidt coefficient is returned.
pub fn entangled_witness(s: &Subspace, cut: &Bipartition, tol: Tolerance) -> Result<Option<PureState>> {
    if s.dim() == 0 {
        return Err(Error::EmptySubspace);
    }
    let mats = cut_matrices(s, cut)?;
    if polarization_scan(&mats).0 < tol.eps() {
        return Ok(None);
    }
    let basis = s.basis();
    let mut candidates: Vec<DVector<C64>> = basis.iter().map(|b| b.amps().clone()).collect();
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            candidates.push(basis[i].amps() + basis[j].amps());
        }
    }
    let mut best: Option<(f64, DVector<C64>)> = None;
    for v in candidates {
        let p = PureState::normalized(s.space().clone(), v)?;
        let sv = singular_values(&reshape(&p, cut)?);
        let second = sv.get(1).copied().unwrap_or(0.0);
        if best.as_ref().is_none_or(|(b, _)| second > *b) {
            best = Some((second, p.into_amps()));
        }
    }
    let (_, amps) = best.expect("nonempty candidate list");
    Ok(Some(PureState::new(s.space().clone(), amps)?))
}

/// Upper bound on the Schmidt rank of any vector in `s`: the smaller of the
/// dimensions of the summed column and row supports of the reshaped basis.
pub fn schmidt_rank_support_bound(s: &Subspace, cut: &Bipartition, tol: Tolerance) -> Result<usize> {
    if s.dim() == 0 {
        return Err(Error::EmptySubspace);
    }
    let mats = cut_matrices(s, cut)?;
    let cols: Vec<DVector<C64>> = mats
        .iter()
        .flat_map(|m| m.column_iter().map(|c| c.into_owned()).collect::<Vec<_>>())
        .collect();
    let rows: Vec<DVector<C64>> = mats
        .iter()
        .flat_map(|m| m.row_iter().map(|r| r.transpose()).collect::<Vec<_>>())
        .collect();
    let col_rank = gram_schmidt(&cols, tol).len();
    let row_rank = gram_schmidt(&rows, tol).len();
    Ok(col_rank.min(row_rank))
}
