//! Seeded multi-start searches over unit coefficient vectors of a subspace.
//!
//! Each start draws a Gaussian coefficient vector from its own ChaCha stream
//! (stream index = start index), runs projected gradient descent on the unit
//! sphere with Armijo backtracking, and results are reduced in start order.
//! Starts run in parallel; the outcome is identical to a sequential run.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::minors::{cut_matrices, minor_energy};
use super::{
    only_product_across_cut, schmidt_rank_support_bound, Grade, SearchConfig, SubspaceStatus,
    SubspaceVerdict,
};
use crate::cuts::{entanglement_entropy, schmidt, Bipartition};
use crate::error::{Error, Result};
use crate::state::{canonical_phase_vec, PureState, Subspace, C64, ONE, ZERO};

// Stream offsets keep the different searches from sharing start vectors.
const STREAM_PRODUCT: u64 = 0;
const STREAM_ME: u64 = 1 << 32;
const STREAM_ENTROPY: u64 = 2 << 32;
const STREAM_RANK: u64 = 3 << 32;

pub(crate) fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> DVector<C64> {
    let v = DVector::from_fn(dim, |_, _| {
        C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    let n = v.norm();
    v.unscale(n)
}

fn start_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn combine(mats: &[DMatrix<C64>], c: &DVector<C64>) -> DMatrix<C64> {
    let (r, k) = mats[0].shape();
    let mut m = DMatrix::from_element(r, k, ZERO);
    for (ci, mi) in c.iter().zip(mats) {
        m += mi * *ci;
    }
    m
}

/// Wirtinger gradient `∂f/∂c̄_k = <M_k, G>` from the matrix gradient `G = ∂f/∂M̄`.
fn pull_back(mats: &[DMatrix<C64>], g: &DMatrix<C64>) -> DVector<C64> {
    DVector::from_iterator(mats.len(), mats.iter().map(|mk| mk.dotc(g)))
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
fn hermitian_eigen(a: DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let eig = SymmetricEigen::new(a);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_columns(
        &order.iter().map(|&k| eig.eigenvectors.column(k).into_owned()).collect::<Vec<_>>(),
    );
    (values, vectors)
}

/// Smooth objective on unit coefficient vectors, minimized.
pub(crate) trait Objective: Sync {
    /// Value and Wirtinger gradient `∂f/∂c̄`.
    fn eval(&self, c: &DVector<C64>) -> (f64, DVector<C64>);
}

/// `Σ |2×2 minors of M(c)|²`; zero exactly on product vectors.
struct MinorObjective<'a> {
    mats: &'a [DMatrix<C64>],
}

impl Objective for MinorObjective<'_> {
    fn eval(&self, c: &DVector<C64>) -> (f64, DVector<C64>) {
        let m = combine(self.mats, c);
        let a = &m * m.adjoint();
        let trace = a.trace();
        // d/dM̄ of ((tr A)² - tr A²)/2
        let g = &m * trace - &a * &m;
        (minor_energy(&m), pull_back(self.mats, &g))
    }
}

/// Negative of the `k`-th smallest eigenvalue of `M M†` (0-based), i.e. the
/// squared `k`-th smallest Schmidt coefficient. `M` has no more rows than
/// columns.
struct EigenObjective<'a> {
    mats: &'a [DMatrix<C64>],
    k: usize,
}

impl Objective for EigenObjective<'_> {
    fn eval(&self, c: &DVector<C64>) -> (f64, DVector<C64>) {
        let m = combine(self.mats, c);
        let (values, vectors) = hermitian_eigen(&m * m.adjoint());
        let u = vectors.column(self.k);
        let g = -(u * (u.adjoint() * &m));
        (-values[self.k], pull_back(self.mats, &g))
    }
}

/// `‖M M† - 1/d‖²_F`, zero exactly on maximally entangled vectors. Smooth
/// where the smallest eigenvalue is not, so it is used to polish witnesses.
struct FlatnessObjective<'a> {
    mats: &'a [DMatrix<C64>],
}

impl Objective for FlatnessObjective<'_> {
    fn eval(&self, c: &DVector<C64>) -> (f64, DVector<C64>) {
        let m = combine(self.mats, c);
        let d = m.nrows();
        let a = &m * m.adjoint();
        let dev = &a - DMatrix::<C64>::identity(d, d) * C64::new(a.trace().re / d as f64, 0.0);
        let g = &dev * &m * C64::new(2.0, 0.0);
        (dev.norm_squared(), pull_back(self.mats, &g))
    }
}

/// Negative entanglement entropy (nats) of the reduced state `M M†`.
struct EntropyObjective<'a> {
    mats: &'a [DMatrix<C64>],
}

impl Objective for EntropyObjective<'_> {
    fn eval(&self, c: &DVector<C64>) -> (f64, DVector<C64>) {
        let m = combine(self.mats, c);
        let (values, vectors) = hermitian_eigen(&m * m.adjoint());
        let mut neg_entropy = 0.0;
        let weights: Vec<C64> = values
            .iter()
            .map(|&p| {
                let p = p.max(1e-300);
                neg_entropy += p * p.ln();
                C64::new(p.ln() + 1.0, 0.0)
            })
            .collect();
        let diag = DMatrix::from_diagonal(&DVector::from_vec(weights));
        let g = &vectors * diag * vectors.adjoint() * &m;
        (neg_entropy, pull_back(self.mats, &g))
    }
}

/// Projected gradient descent on the unit sphere.
pub(crate) fn descend<O: Objective>(obj: &O, start: DVector<C64>, cfg: &SearchConfig) -> (DVector<C64>, f64) {
    let mut c = start.unscale(start.norm());
    let (mut f, mut g) = obj.eval(&c);
    let mut step = 1.0;
    for _ in 0..cfg.max_iters {
        let radial = c.dotc(&g).re;
        let d = &g - &c * C64::new(radial, 0.0);
        let dn2 = d.norm_squared();
        if dn2 < 1e-32 {
            break;
        }
        let mut accepted = None;
        for _ in 0..60 {
            let trial = &c - &d * C64::new(step, 0.0);
            let trial = trial.unscale(trial.norm());
            let (ft, gt) = obj.eval(&trial);
            if ft <= f - 1e-4 * step * dn2 {
                accepted = Some((trial, ft, gt));
                break;
            }
            step *= 0.5;
        }
        let Some((trial, ft, gt)) = accepted else { break };
        let improvement = f - ft;
        let scale = f.abs();
        c = trial;
        f = ft;
        g = gt;
        step = (step * 2.0).min(1e3);
        if improvement <= cfg.convergence * scale {
            break;
        }
    }
    (c, f)
}

pub(crate) struct StartResult {
    pub coeffs: DVector<C64>,
    pub value: f64,
}

pub(crate) fn multistart<O: Objective>(obj: &O, dim: usize, stream: u64, cfg: &SearchConfig) -> Vec<StartResult> {
    (0..cfg.starts.max(1))
        .into_par_iter()
        .map(|i| {
            let mut rng = start_rng(cfg.seed, stream + i as u64);
            let initial = random_unit(&mut rng, dim);
            let (coeffs, value) = descend(obj, initial, cfg);
            StartResult { coeffs, value }
        })
        .collect()
}

/// Residual whose zeros on the unit sphere are the points a search looks
/// for, with its derivative along a matrix direction.
trait Residual: Sync {
    fn value(&self, m: &DMatrix<C64>) -> Vec<C64>;
    fn derivative(&self, m: &DMatrix<C64>, dm: &DMatrix<C64>) -> Vec<C64>;
}

/// All 2×2 minors; zero exactly on product vectors.
struct Minors;

impl Residual for Minors {
    fn value(&self, m: &DMatrix<C64>) -> Vec<C64> {
        self.derivative(m, m).into_iter().map(|z| z * 0.5).collect()
    }

    fn derivative(&self, m: &DMatrix<C64>, dm: &DMatrix<C64>) -> Vec<C64> {
        let (r, c) = m.shape();
        let mut out = Vec::new();
        for p in 0..r {
            for q in p + 1..r {
                for a in 0..c {
                    for b in a + 1..c {
                        out.push(
                            dm[(p, a)] * m[(q, b)] + m[(p, a)] * dm[(q, b)]
                                - dm[(p, b)] * m[(q, a)]
                                - m[(p, b)] * dm[(q, a)],
                        );
                    }
                }
            }
        }
        out
    }
}

/// Upper triangle of `M M† - tr(M M†)/d`; zero exactly on maximally
/// entangled vectors when `M` has no more rows than columns.
struct Flatness;

fn trace_free_upper(a: &DMatrix<C64>) -> Vec<C64> {
    let d = a.nrows();
    let shift = a.trace() / d as f64;
    let mut out = Vec::with_capacity(d * (d + 1) / 2);
    for i in 0..d {
        for j in i..d {
            out.push(if i == j { a[(i, j)] - shift } else { a[(i, j)] });
        }
    }
    out
}

impl Residual for Flatness {
    fn value(&self, m: &DMatrix<C64>) -> Vec<C64> {
        trace_free_upper(&(m * m.adjoint()))
    }

    fn derivative(&self, m: &DMatrix<C64>, dm: &DMatrix<C64>) -> Vec<C64> {
        trace_free_upper(&(dm * m.adjoint() + m * dm.adjoint()))
    }
}

/// Gauss–Newton refinement of a descent result on `residual = 0`, with the
/// real Jacobian in the coordinates `(Re c, Im c)`. Keeps the iterate with
/// the lowest objective value.
fn gauss_newton<O: Objective, R: Residual>(obj: &O, res: &R, mats: &[DMatrix<C64>], start: StartResult) -> StartResult {
    let k = mats.len();
    let mut best = start;
    let mut c = best.coeffs.clone();
    let mut last = f64::INFINITY;
    for _ in 0..50 {
        let m = combine(mats, &c);
        let r = res.value(&m);
        let norm: f64 = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm >= last || norm == 0.0 {
            break;
        }
        last = norm;
        let n = r.len();
        // last row keeps the step tangent to the sphere
        let mut jac = DMatrix::<f64>::zeros(2 * n + 1, 2 * k);
        for (col, (mk, unit)) in mats.iter().flat_map(|mk| [(mk, ONE), (mk, C64::new(0.0, 1.0))]).enumerate() {
            for (row, z) in res.derivative(&m, &(mk * unit)).into_iter().enumerate() {
                jac[(row, col)] = z.re;
                jac[(n + row, col)] = z.im;
            }
            jac[(2 * n, col)] = (c[col / 2].conj() * unit).re;
        }
        let rhs = DVector::from_iterator(
            2 * n + 1,
            r.iter().map(|z| -z.re).chain(r.iter().map(|z| -z.im)).chain(std::iter::once(0.0)),
        );
        let svd = jac.svd(true, true);
        let cutoff = svd.singular_values.max() * 1e-12;
        let Ok(step) = svd.solve(&rhs, cutoff) else { break };
        let next = DVector::from_fn(k, |i, _| c[i] + C64::new(step[2 * i], step[2 * i + 1]));
        let nn = next.norm();
        if nn == 0.0 || !nn.is_finite() {
            break;
        }
        c = next.unscale(nn);
        let value = obj.eval(&c).0;
        if value < best.value {
            best = StartResult { coeffs: c.clone(), value };
        }
    }
    best
}

/// Index of the smallest value; ties go to the earliest start.
fn best_index(results: &[StartResult]) -> usize {
    let mut best = 0;
    for (i, r) in results.iter().enumerate() {
        if r.value < results[best].value {
            best = i;
        }
    }
    best
}

fn witness(s: &Subspace, coeffs: &DVector<C64>, cfg: &SearchConfig) -> Result<PureState> {
    let v = s.combine(coeffs);
    let v = v.unscale(v.norm());
    PureState::normalized(s.space().clone(), canonical_phase_vec(&v, cfg.tol)?)
}

/// Looks for a product vector of `s` by minimizing the minor energy.
/// A miss is numerical evidence only.
pub fn find_product_state(s: &Subspace, cut: &Bipartition, cfg: &SearchConfig) -> Result<SubspaceVerdict> {
    if s.dim() == 0 {
        return Err(Error::EmptySubspace);
    }
    let mats = cut_matrices(s, cut)?;
    let obj = MinorObjective { mats: &mats };
    let results: Vec<StartResult> = multistart(&obj, s.dim(), STREAM_PRODUCT, cfg)
        .into_par_iter()
        .map(|r| gauss_newton(&obj, &Minors, &mats, r))
        .collect();
    let best = &results[best_index(&results)];
    let tol2 = cfg.tol.eps() * cfg.tol.eps();
    if best.value < tol2 {
        Ok(SubspaceVerdict {
            cut: cut.clone(),
            status: SubspaceStatus::ProductFound,
            grade: Grade::Exact,
            witness: Some(witness(s, &best.coeffs, cfg)?),
            score: best.value,
        })
    } else {
        Ok(SubspaceVerdict {
            cut: cut.clone(),
            status: SubspaceStatus::NoProductFound,
            grade: Grade::NumericalEvidence,
            witness: None,
            score: best.value,
        })
    }
}

/// Reshaped basis oriented so rows are the smaller side.
fn oriented_matrices(s: &Subspace, cut: &Bipartition) -> Result<Vec<DMatrix<C64>>> {
    let mats = cut_matrices(s, cut)?;
    if cut.dim_a() <= cut.dim_b() {
        Ok(mats)
    } else {
        Ok(mats.into_iter().map(|m| m.transpose()).collect())
    }
}

/// Maximizes the smallest Schmidt coefficient over unit vectors of `s`.
/// A hit at `1/√d_min - tol_me` is reported with its witness; a miss is
/// exact when the subspace is product-only or its Schmidt-rank support bound
/// is below `d_min`, numerical evidence otherwise.
pub fn find_maximally_entangled(s: &Subspace, cut: &Bipartition, cfg: &SearchConfig) -> Result<SubspaceVerdict> {
    if s.dim() == 0 {
        return Err(Error::EmptySubspace);
    }
    let d_min = cut.dim_a().min(cut.dim_b());
    let exact_miss = |score| SubspaceVerdict {
        cut: cut.clone(),
        status: SubspaceStatus::NoMeFound,
        grade: Grade::Exact,
        witness: None,
        score,
    };
    if only_product_across_cut(s, cut, cfg.tol)? || schmidt_rank_support_bound(s, cut, cfg.tol)? < d_min {
        return Ok(exact_miss(0.0));
    }
    let mats = oriented_matrices(s, cut)?;
    let obj = EigenObjective { mats: &mats, k: 0 };
    let results: Vec<StartResult> = multistart(&obj, s.dim(), STREAM_ME, cfg)
        .into_par_iter()
        .map(|r| gauss_newton(&obj, &Flatness, &mats, r))
        .collect();
    let best = &results[best_index(&results)];
    let score = (-best.value).max(0.0).sqrt();
    let target = 1.0 / (d_min as f64).sqrt();
    if score >= target - cfg.tol_me {
        let (polished, _) = descend(&FlatnessObjective { mats: &mats }, best.coeffs.clone(), cfg);
        let eigen = EigenObjective { mats: &mats, k: 0 };
        let polished_score = (-eigen.eval(&polished).0).max(0.0).sqrt();
        let (coeffs, score) = if polished_score >= score { (polished, polished_score) } else { (best.coeffs.clone(), score) };
        let found = witness(s, &coeffs, cfg)?;
        let found = snap_maximally_entangled(&found, s, cut, cfg)?.unwrap_or(found);
        Ok(SubspaceVerdict {
            cut: cut.clone(),
            status: SubspaceStatus::MeFound,
            grade: Grade::Exact,
            witness: Some(found),
            score,
        })
    } else {
        Ok(SubspaceVerdict {
            cut: cut.clone(),
            status: SubspaceStatus::NoMeFound,
            grade: Grade::NumericalEvidence,
            witness: None,
            score,
        })
    }
}

/// Maximally entangled vectors of a subspace can sit at a point of second
/// order contact with the maximally entangled manifold, which limits any
/// optimizer to about `√ε` accuracy. Amplitudes below `tol_me` are zeroed;
/// the result is kept only if it is still in `s` and passes the strict
/// predicate.
fn snap_maximally_entangled(p: &PureState, s: &Subspace, cut: &Bipartition, cfg: &SearchConfig) -> Result<Option<PureState>> {
    let amps = p.amps().map(|a| if a.norm() < cfg.tol_me { ZERO } else { a });
    if amps.norm() == 0.0 {
        return Ok(None);
    }
    let snapped = PureState::normalized(p.space().clone(), amps)?;
    let ok = s.contains(snapped.amps(), cfg.tol)
        && crate::cuts::maximally_entangled_within(&snapped, cut, cfg.tol, cfg.tol.eps())?;
    Ok(ok.then_some(snapped))
}

/// Multi-start entanglement-entropy maximization; returns every start's
/// local optimum as a state, in start order, paired with its entropy in bits.
pub fn maximize_entropy(s: &Subspace, cut: &Bipartition, cfg: &SearchConfig) -> Result<Vec<(PureState, f64)>> {
    if s.dim() == 0 {
        return Err(Error::EmptySubspace);
    }
    let mats = oriented_matrices(s, cut)?;
    multistart(&EntropyObjective { mats: &mats }, s.dim(), STREAM_ENTROPY, cfg)
        .iter()
        .map(|r| {
            let p = witness(s, &r.coeffs, cfg)?;
            let h = entanglement_entropy(&p, cut)?;
            Ok((p, h))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SearchMode {
    Entangled,
    MaxEntangled,
}

/// Mutually orthogonal states extracted from a subspace by deflation.
#[derive(Clone, Debug)]
pub struct OrthogonalSet {
    pub states: Vec<PureState>,
    /// The part of the input subspace orthogonal to `states`.
    pub remainder: Subspace,
    /// The search stopped on an exact refusal (or exhausted the subspace).
    /// The size is then final for this deflation path, though another path
    /// could in principle do better.
    pub terminated_exactly: bool,
}

/// Greedy deflation: find a state of the requested kind, keep it, restrict
/// to its orthogonal complement inside the subspace, repeat.
///
/// In [`SearchMode::Entangled`] a candidate is preferred when the remainder
/// it leaves behind is empty or still contains an entangled vector (checked
/// exactly). Candidates are the entropy-ascent optima in decreasing entropy,
/// then the raw random starts; if no candidate passes that look-ahead the
/// highest-entropy one is taken.
pub fn max_orthogonal_set(
    s: &Subspace,
    cut: &Bipartition,
    mode: SearchMode,
    cfg: &SearchConfig,
) -> Result<OrthogonalSet> {
    if s.dim() == 0 {
        return Err(Error::EmptySubspace);
    }
    let mut remainder = s.clone();
    let mut states = Vec::new();
    loop {
        if remainder.dim() == 0 {
            return Ok(OrthogonalSet { states, remainder, terminated_exactly: true });
        }
        let next = match mode {
            SearchMode::MaxEntangled => {
                let v = find_maximally_entangled(&remainder, cut, cfg)?;
                match v.status {
                    SubspaceStatus::MeFound => v.witness,
                    _ => {
                        let exact = v.grade == Grade::Exact;
                        return Ok(OrthogonalSet { states, remainder, terminated_exactly: exact });
                    }
                }
            }
            SearchMode::Entangled => {
                if only_product_across_cut(&remainder, cut, cfg.tol)? {
                    return Ok(OrthogonalSet { states, remainder, terminated_exactly: true });
                }
                pick_entangled(&remainder, cut, cfg)?
            }
        };
        let Some(w) = next else {
            return Ok(OrthogonalSet { states, remainder, terminated_exactly: false });
        };
        remainder = remainder.deflate(w.amps(), cfg.tol);
        states.push(w);
    }
}

fn pick_entangled(s: &Subspace, cut: &Bipartition, cfg: &SearchConfig) -> Result<Option<PureState>> {
    let mut ascended = maximize_entropy(s, cut, cfg)?;
    // stable sort keeps seed order among equal entropies
    ascended.sort_by(|a, b| b.1.total_cmp(&a.1));
    let raw: Vec<PureState> = (0..cfg.starts.max(1))
        .map(|i| {
            let mut rng = start_rng(cfg.seed, STREAM_ENTROPY + i as u64);
            witness(s, &random_unit(&mut rng, s.dim()), cfg)
        })
        .collect::<Result<_>>()?;
    let candidates = ascended.iter().map(|(p, _)| p).chain(raw.iter());
    let mut fallback = None;
    for p in candidates {
        if schmidt(p, cut, cfg.tol)?.rank < 2 {
            continue;
        }
        if fallback.is_none() {
            fallback = Some(p.clone());
        }
        let rest = s.deflate(p.amps(), cfg.tol);
        if rest.dim() == 0 || !only_product_across_cut(&rest, cut, cfg.tol)? {
            return Ok(Some(p.clone()));
        }
    }
    Ok(fallback)
}

/// Largest Schmidt rank found in a subspace, with an exact upper bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct SchmidtRankEstimate {
    /// Rank of an explicit vector of the subspace (a certified lower bound).
    pub max_found: usize,
    /// Dimension bound from the local supports (a certified upper bound).
    pub support_bound: usize,
}

impl SchmidtRankEstimate {
    pub fn is_exact(&self) -> bool {
        self.max_found == self.support_bound
    }

    pub fn grade(&self) -> Grade {
        if self.is_exact() {
            Grade::Exact
        } else {
            Grade::NumericalEvidence
        }
    }
}

/// Samples random unit vectors of `s`, then tries to push the rank up by
/// maximizing the next Schmidt coefficient.
pub fn max_schmidt_rank_in_subspace(s: &Subspace, cut: &Bipartition, cfg: &SearchConfig) -> Result<SchmidtRankEstimate> {
    if s.dim() == 0 {
        return Err(Error::EmptySubspace);
    }
    let support_bound = schmidt_rank_support_bound(s, cut, cfg.tol)?;
    let mut rng = start_rng(cfg.seed, STREAM_RANK);
    let mut max_found = 0;
    let mut best_coeffs = DVector::from_element(s.dim(), ZERO);
    best_coeffs[0] = ONE;
    for _ in 0..cfg.rank_samples.max(1) {
        let c = random_unit(&mut rng, s.dim());
        let p = witness(s, &c, cfg)?;
        let r = schmidt(&p, cut, cfg.tol)?.rank;
        if r > max_found {
            max_found = r;
            best_coeffs = c;
        }
    }
    if max_found < support_bound {
        let mats = oriented_matrices(s, cut)?;
        let rows = mats[0].nrows();
        let refine_cfg = SearchConfig { starts: cfg.starts.min(8), ..cfg.clone() };
        for target in max_found + 1..=support_bound {
            // k-th largest of `rows` eigenvalues is index rows - target ascending
            let obj = EigenObjective { mats: &mats, k: rows - target };
            let mut runs = vec![descend(&obj, best_coeffs.clone(), cfg)];
            runs.extend(
                multistart(&obj, s.dim(), STREAM_RANK + 1 + target as u64 * 1024, &refine_cfg)
                    .into_iter()
                    .map(|r| (r.coeffs, r.value)),
            );
            let (coeffs, _) = runs.into_iter().fold(None::<(DVector<C64>, f64)>, |acc, run| match acc {
                Some(a) if a.1 <= run.1 => Some(a),
                _ => Some(run),
            }).expect("at least one run");
            let p = witness(s, &coeffs, cfg)?;
            let r = schmidt(&p, cut, cfg.tol)?.rank;
            if r >= target {
                max_found = r;
                best_coeffs = coeffs;
            } else {
                break;
            }
        }
    }
    Ok(SchmidtRankEstimate { max_found, support_bound })
}
