//! Product vectors in a plane of 2⊗2.
//!
//! For a basis `{b1, b2}` with reshapes `M1, M2`, the determinant
//! `det(a M1 + b M2) = α a² + β ab + γ b²` vanishes exactly on the product
//! rays of the plane.

use serde::Serialize;

use super::minors::cut_matrices;
use crate::cuts::Bipartition;
use crate::error::{Error, Result};
use crate::state::{QuditDims, Subspace, Tolerance, C64};

/// Discriminant cutoff on the quadratic scaled to unit max coefficient.
pub const TOL_DISC: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ProductCount {
    /// Never produced: a nonzero binary quadratic always has a root.
    ZeroImpossible,
    One,
    Two,
    Infinite,
}

/// `(α, β, γ)` of `det(a M1 + b M2)` for a plane of 2⊗2.
pub fn quadratic_coefficients(s: &Subspace) -> Result<(C64, C64, C64)> {
    if s.space() != &QuditDims::qubits(2) {
        return Err(Error::InvalidDims(format!("expected 2x2, got {}", s.space())));
    }
    if s.dim() != 2 {
        return Err(Error::InvalidParameter(format!("expected a plane, got dimension {}", s.dim())));
    }
    let cut = Bipartition::bipartite(s.space().clone())?;
    let m = cut_matrices(s, &cut)?;
    let (m1, m2) = (&m[0], &m[1]);
    let alpha = m1[(0, 0)] * m1[(1, 1)] - m1[(0, 1)] * m1[(1, 0)];
    let gamma = m2[(0, 0)] * m2[(1, 1)] - m2[(0, 1)] * m2[(1, 0)];
    let beta = m1[(0, 0)] * m2[(1, 1)] + m2[(0, 0)] * m1[(1, 1)]
        - m1[(0, 1)] * m2[(1, 0)]
        - m2[(0, 1)] * m1[(1, 0)];
    Ok((alpha, beta, gamma))
}

/// Number of product rays in a plane of 2⊗2.
pub fn count_product_states_2d_2x2(s: &Subspace, tol: Tolerance) -> Result<ProductCount> {
    let (a, b, c) = quadratic_coefficients(s)?;
    let scale = a.norm().max(b.norm()).max(c.norm());
    if scale < tol.eps() {
        return Ok(ProductCount::Infinite);
    }
    let (a, b, c) = (a / scale, b / scale, c / scale);
    let disc = b * b - a * c * 4.0;
    Ok(if disc.norm() < TOL_DISC { ProductCount::One } else { ProductCount::Two })
}
