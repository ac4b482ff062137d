//! Pure states of multi-qudit systems and the small amount of vector algebra
//! the rest of the crate is built on.
//!
//! Amplitudes are stored in lexicographic order of the local indices with the
//! leftmost party most significant, so `|v1 v2 ... vm>` has flat index
//! `((v1 * d2 + v2) * d3 + v3) ...`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Accepted deviation of `‖ψ‖` from one when a state is constructed.
pub const NORM_SLACK: f64 = 1e-9;

/// Absolute tolerance used for orthogonality, rank cutoffs and zero tests.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Tolerance(f64);

impl Tolerance {
    pub fn new(eps: f64) -> Result<Self> {
        if eps > 0.0 && eps < 1e-3 {
            Ok(Self(eps))
        } else {
            Err(Error::InvalidTolerance(eps))
        }
    }

    #[inline]
    pub fn eps(self) -> f64 {
        self.0
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self(1e-9)
    }
}

/// Local dimensions `d1 ⊗ d2 ⊗ ... ⊗ dm` of a composite system.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuditDims(Vec<usize>);

impl QuditDims {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidDims("no parties".into()));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidDims(format!("local dimension {d} < 2")));
        }
        let total = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::InvalidDims("total dimension overflows".into()))?;
        if total > 1 << 20 {
            return Err(Error::InvalidDims(format!("total dimension {total} too large")));
        }
        if dims.len() > 63 {
            return Err(Error::InvalidDims("more than 63 parties".into()));
        }
        Ok(Self(dims))
    }

    /// `n` qubits.
    pub fn qubits(n: usize) -> Self {
        Self::new(vec![2; n]).expect("qubit register")
    }

    pub fn dims(&self) -> &[usize] {
        &self.0
    }

    pub fn parties(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> usize {
        self.0.iter().product()
    }

    /// Local indices of a flat basis index.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.0.len()];
        for (slot, &d) in out.iter_mut().zip(&self.0).rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }

    /// Flat basis index of a tuple of local indices.
    pub fn index(&self, digits: &[usize]) -> Result<usize> {
        if digits.len() != self.0.len() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} local indices", self.0.len()),
                found: format!("{}", digits.len()),
            });
        }
        let mut index = 0;
        for (&v, &d) in digits.iter().zip(&self.0) {
            if v >= d {
                return Err(Error::InvalidParameter(format!("local index {v} >= dimension {d}")));
            }
            index = index * d + v;
        }
        Ok(index)
    }

    pub fn concat(&self, other: &QuditDims) -> QuditDims {
        let mut dims = self.0.clone();
        dims.extend_from_slice(&other.0);
        QuditDims(dims)
    }

    /// Dimensions of the parties selected by `parties`, in party order.
    pub fn select(&self, parties: &[usize]) -> Result<QuditDims> {
        QuditDims::new(parties.iter().map(|&p| self.0[p]).collect())
    }
}

impl std::fmt::Display for QuditDims {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", parts.join("x"))
    }
}

/// A unit vector in the space described by its [`QuditDims`].
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    space: QuditDims,
    amps: DVector<C64>,
}

impl PureState {
    /// Wraps amplitudes that are already unit norm (within [`NORM_SLACK`]).
    pub fn new(space: QuditDims, amps: DVector<C64>) -> Result<Self> {
        check_len(&space, amps.len())?;
        let norm = amps.norm();
        if (norm - 1.0).abs() > NORM_SLACK {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { space, amps })
    }

    /// Rescales any nonzero vector to unit norm.
    pub fn normalized(space: QuditDims, amps: DVector<C64>) -> Result<Self> {
        check_len(&space, amps.len())?;
        let norm = amps.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(Self { space, amps: amps.unscale(norm) })
    }

    pub fn from_slice(space: QuditDims, amps: &[C64]) -> Result<Self> {
        Self::new(space, DVector::from_column_slice(amps))
    }

    /// Computational basis ket with the given local indices.
    pub fn basis(space: QuditDims, digits: &[usize]) -> Result<Self> {
        let index = space.index(digits)?;
        let mut amps = DVector::from_element(space.total(), ZERO);
        amps[index] = ONE;
        Ok(Self { space, amps })
    }

    /// Normalized superposition `Σ c_j |s_j>` of qubit kets written as bit strings.
    pub fn from_bits(terms: &[(C64, &str)]) -> Result<Self> {
        let n = terms
            .first()
            .map(|(_, s)| s.len())
            .ok_or_else(|| Error::InvalidParameter("empty superposition".into()))?;
        let space = QuditDims::new(vec![2; n])?;
        let mut amps = DVector::from_element(space.total(), ZERO);
        for (c, bits) in terms {
            amps[bit_index(bits, n)?] += *c;
        }
        Self::normalized(space, amps)
    }

    pub fn space(&self) -> &QuditDims {
        &self.space
    }

    pub fn amps(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn into_amps(self) -> DVector<C64> {
        self.amps
    }

    pub fn inner(&self, other: &PureState) -> Result<C64> {
        inner(self, other)
    }

    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }
}

/// Flat index of a bit string over `n` qubits.
pub fn bit_index(bits: &str, n: usize) -> Result<usize> {
    if bits.len() != n {
        return Err(Error::InvalidParameter(format!("bit string {bits:?} is not {n} long")));
    }
    bits.chars().try_fold(0usize, |acc, ch| match ch {
        '0' => Ok(acc << 1),
        '1' => Ok((acc << 1) | 1),
        _ => Err(Error::InvalidParameter(format!("bit string {bits:?} has non-binary digit"))),
    })
}

fn check_len(space: &QuditDims, len: usize) -> Result<()> {
    if space.total() != len {
        return Err(Error::DimensionMismatch {
            expected: format!("{} amplitudes for {space}", space.total()),
            found: len.to_string(),
        });
    }
    Ok(())
}

fn check_same_space(a: &QuditDims, b: &QuditDims) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { expected: a.to_string(), found: b.to_string() });
    }
    Ok(())
}

/// Kronecker product of raw amplitude vectors; `‖a⊗b‖ = ‖a‖‖b‖`.
pub fn kron(a: &DVector<C64>, b: &DVector<C64>) -> DVector<C64> {
    DVector::from_iterator(
        a.len() * b.len(),
        a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)),
    )
}

pub fn tensor_product(a: &PureState, b: &PureState) -> PureState {
    PureState { space: a.space.concat(&b.space), amps: kron(&a.amps, &b.amps) }
}

/// `<a|b>`, conjugate-linear in `a`.
pub fn inner(a: &PureState, b: &PureState) -> Result<C64> {
    check_same_space(&a.space, &b.space)?;
    Ok(a.amps.dotc(&b.amps))
}

/// Fixes the global phase so the first amplitude with modulus above `tol` is
/// real and positive.
pub fn canonical_phase_vec(v: &DVector<C64>, tol: Tolerance) -> Result<DVector<C64>> {
    let pivot = v.iter().find(|z| z.norm() > tol.eps()).ok_or(Error::ZeroVector)?;
    let phase = pivot.conj() / pivot.norm();
    let mut out = v * phase;
    // Pin the pivot exactly so the map is idempotent on stored amplitudes.
    if let Some(z) = out.iter_mut().find(|z| z.norm() > tol.eps()) {
        *z = C64::new(z.norm(), 0.0);
    }
    Ok(out)
}

pub fn canonical_phase(p: &PureState, tol: Tolerance) -> Result<PureState> {
    Ok(PureState { space: p.space.clone(), amps: canonical_phase_vec(&p.amps, tol)? })
}

/// Ordered collection of mutually orthogonal pure states over one space.
#[derive(Clone, Debug, PartialEq)]
pub struct StateSet {
    space: QuditDims,
    states: Vec<PureState>,
    name: Option<String>,
}

impl StateSet {
    pub fn new(space: QuditDims, states: Vec<PureState>, tol: Tolerance) -> Result<Self> {
        let max = space.total();
        if states.is_empty() || states.len() > max {
            return Err(Error::InvalidCount { got: states.len(), max });
        }
        for s in &states {
            check_same_space(&space, s.space())?;
        }
        for i in 0..states.len() {
            for j in i + 1..states.len() {
                let overlap = states[i].amps.dotc(&states[j].amps).norm();
                if overlap >= tol.eps() {
                    return Err(Error::NotOrthogonal { i, j, overlap });
                }
            }
        }
        Ok(Self { space, states, name: None })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn space(&self) -> &QuditDims {
        &self.space
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// The states reinterpreted as an orthonormal spanning set.
    pub fn span(&self) -> Subspace {
        Subspace { space: self.space.clone(), basis: self.states.clone() }
    }

    pub fn complement(&self) -> Subspace {
        orthogonal_complement(&self.span())
    }

    /// Subset by position, keeping order.
    pub fn select(&self, indices: &[usize], tol: Tolerance) -> Result<StateSet> {
        let states = indices
            .iter()
            .map(|&i| {
                self.states.get(i).cloned().ok_or_else(|| {
                    Error::InvalidParameter(format!("state index {i} out of range"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        StateSet::new(self.space.clone(), states, tol)
    }
}

/// A subspace represented by an orthonormal spanning set.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace {
    space: QuditDims,
    basis: Vec<PureState>,
}

impl Subspace {
    /// Accepts `basis` only if its Gram matrix is the identity within `tol`.
    pub fn from_orthonormal(space: QuditDims, basis: Vec<PureState>, tol: Tolerance) -> Result<Self> {
        for b in &basis {
            check_same_space(&space, b.space())?;
        }
        for i in 0..basis.len() {
            if (basis[i].amps.norm() - 1.0).abs() >= tol.eps() {
                return Err(Error::NotNormalized(basis[i].amps.norm()));
            }
            for j in i + 1..basis.len() {
                let overlap = basis[i].amps.dotc(&basis[j].amps).norm();
                if overlap >= tol.eps() {
                    return Err(Error::NotOrthogonal { i, j, overlap });
                }
            }
        }
        Ok(Self { space, basis })
    }

    pub fn empty(space: QuditDims) -> Self {
        Self { space, basis: Vec::new() }
    }

    /// The whole space, spanned by the computational basis.
    pub fn full(space: QuditDims) -> Self {
        let d = space.total();
        let basis = (0..d)
            .map(|i| {
                let mut amps = DVector::from_element(d, ZERO);
                amps[i] = ONE;
                PureState { space: space.clone(), amps }
            })
            .collect();
        Self { space, basis }
    }

    pub fn space(&self) -> &QuditDims {
        &self.space
    }

    pub fn basis(&self) -> &[PureState] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Orthogonal projector `Σ |b_i><b_i|`.
    pub fn projector(&self) -> DMatrix<C64> {
        let d = self.space.total();
        let mut p = DMatrix::from_element(d, d, ZERO);
        for b in &self.basis {
            p += &b.amps * b.amps.adjoint();
        }
        p
    }

    /// The vector `Σ c_i b_i`, not normalized.
    pub fn combine(&self, coeffs: &DVector<C64>) -> DVector<C64> {
        let mut v = DVector::from_element(self.space.total(), ZERO);
        for (c, b) in coeffs.iter().zip(&self.basis) {
            v.axpy(*c, &b.amps, ONE);
        }
        v
    }

    /// Coordinates of the orthogonal projection of `v` onto this subspace.
    pub fn coordinates(&self, v: &DVector<C64>) -> DVector<C64> {
        DVector::from_iterator(self.basis.len(), self.basis.iter().map(|b| b.amps.dotc(v)))
    }

    /// The orthogonal complement of `w` inside this subspace.
    pub fn deflate(&self, w: &DVector<C64>, tol: Tolerance) -> Subspace {
        let wn = w.unscale(w.norm());
        let residuals: Vec<DVector<C64>> = self
            .basis
            .iter()
            .map(|b| &b.amps - &wn * wn.dotc(&b.amps))
            .collect();
        orthonormalize(&residuals, &self.space, tol)
    }

    pub fn contains(&self, v: &DVector<C64>, tol: Tolerance) -> bool {
        let coords = self.coordinates(v);
        (v - self.combine(&coords)).norm() < tol.eps().sqrt().max(10.0 * tol.eps())
    }
}

fn project_out(v: &mut DVector<C64>, basis: &[DVector<C64>]) {
    for b in basis {
        let c = b.dotc(v);
        v.axpy(-c, b, ONE);
    }
}

/// Modified Gram–Schmidt with one re-orthogonalization pass; residuals with
/// norm below `tol` are dropped.
pub(crate) fn gram_schmidt<'a, I>(vectors: I, tol: Tolerance) -> Vec<DVector<C64>>
where
    I: IntoIterator<Item = &'a DVector<C64>>,
{
    let mut out: Vec<DVector<C64>> = Vec::new();
    for v in vectors {
        let mut r = v.clone();
        project_out(&mut r, &out);
        project_out(&mut r, &out);
        let norm = r.norm();
        if norm >= tol.eps() {
            out.push(r.unscale(norm));
        }
    }
    out
}

/// Modified Gram–Schmidt with one re-orthogonalization pass. Vectors whose
/// residual norm falls below `tol` are dropped, so the output dimension is
/// the numerical rank of the input span. Vectors of the wrong length are
/// ignored.
pub fn orthonormalize(vectors: &[DVector<C64>], space: &QuditDims, tol: Tolerance) -> Subspace {
    let out = gram_schmidt(vectors.iter().filter(|v| v.len() == space.total()), tol);
    Subspace {
        space: space.clone(),
        basis: out.into_iter().map(|amps| PureState { space: space.clone(), amps }).collect(),
    }
}

/// Orthonormal basis of `s^⊥`, built by pivoted Gram–Schmidt over the
/// computational basis: at each step the basis ket with the largest residual
/// is taken (lowest index on ties).
pub fn orthogonal_complement(s: &Subspace) -> Subspace {
    let d = s.space.total();
    let target = d.saturating_sub(s.dim());
    let mut basis: Vec<DVector<C64>> = s.basis.iter().map(|b| b.amps.clone()).collect();
    let mut residuals: Vec<DVector<C64>> = (0..d)
        .map(|i| {
            let mut e = DVector::from_element(d, ZERO);
            e[i] = ONE;
            project_out(&mut e, &basis);
            project_out(&mut e, &basis);
            e
        })
        .collect();
    let mut out = Vec::with_capacity(target);
    for _ in 0..target {
        let (best, norm) = residuals
            .iter()
            .enumerate()
            .map(|(i, r)| (i, r.norm()))
            .fold((0, -1.0), |acc, (i, n)| if n > acc.1 + 1e-14 { (i, n) } else { acc });
        if norm <= 1e-12 {
            break;
        }
        let mut v = residuals[best].unscale(norm);
        project_out(&mut v, &basis);
        let v = v.unscale(v.norm());
        for r in residuals.iter_mut() {
            let c = v.dotc(r);
            r.axpy(-c, &v, ONE);
        }
        basis.push(v.clone());
        out.push(PureState { space: s.space.clone(), amps: v });
    }
    Subspace { space: s.space.clone(), basis: out }
}

/// True iff the orthogonal projectors of `a` and `b` differ by less than
/// `tol` in Frobenius norm.
pub fn span_equal(a: &Subspace, b: &Subspace, tol: Tolerance) -> Result<bool> {
    check_same_space(&a.space, &b.space)?;
    if a.dim() != b.dim() {
        return Ok(false);
    }
    Ok((a.projector() - b.projector()).norm() < tol.eps())
}
