//! Projections onto effective two-qubit spaces and rule-based local
//! indistinguishability flags.
//!
//! The flag itself is a cited rule: three orthogonal entangled two-qubit
//! states cannot be perfectly distinguished by LOCC (Walgate–Hardy). No LOCC
//! protocol is searched; flags are graded [`Grade::RuleBasedCited`].

use nalgebra::DVector;
use serde::Serialize;

use crate::analysis::Grade;
use crate::cuts::{reshape_amps, schmidt, Bipartition};
use crate::error::{Error, Result};
use crate::state::{PureState, QuditDims, StateSet, Subspace, Tolerance, ONE};

/// States of a set restricted by `1 ⊗ P(plane)` and renormalized.
#[derive(Clone, Debug)]
pub struct ProjectionResult {
    /// States over 2⊗2: the lone qubit, then coordinates in the plane basis.
    pub projected: StateSet,
    /// Squared norm of each projection before renormalization.
    pub probabilities: Vec<f64>,
    pub cut: Bipartition,
    pub lone_party: usize,
    pub plane: Subspace,
}

impl ProjectionResult {
    /// A two-qubit set taken as is, probability one each.
    pub fn unprojected(set: &StateSet) -> Result<Self> {
        let space = QuditDims::qubits(2);
        if set.space() != &space {
            return Err(Error::InvalidDims(format!("expected 2x2, got {}", set.space())));
        }
        Ok(Self {
            projected: set.clone(),
            probabilities: vec![1.0; set.len()],
            cut: Bipartition::bipartite(space)?,
            lone_party: 0,
            plane: Subspace::full(QuditDims::qubits(1)),
        })
    }
}

/// `span{φ+, ψ+}` on two qubits.
pub fn default_plane() -> Subspace {
    let phi = PureState::from_bits(&[(ONE, "00"), (ONE, "11")]).expect("literal");
    let psi = PureState::from_bits(&[(ONE, "01"), (ONE, "10")]).expect("literal");
    Subspace::from_orthonormal(QuditDims::qubits(2), vec![phi, psi], Tolerance::default()).expect("orthonormal")
}

/// Applies `1 ⊗ P(plane)` with `lone_party` kept and `plane` a 2D subspace
/// of the remaining parties (in party order).
pub fn project_two_qubit(states: &StateSet, lone_party: usize, plane: &Subspace, tol: Tolerance) -> Result<ProjectionResult> {
    let space = states.space();
    let dims = space.dims();
    if lone_party >= dims.len() || dims[lone_party] != 2 {
        return Err(Error::InvalidParameter(format!("party {lone_party} is not a qubit of {space}")));
    }
    let rest: Vec<usize> = (0..dims.len()).filter(|&k| k != lone_party).collect();
    let rest_space = space.select(&rest)?;
    if plane.space() != &rest_space || plane.dim() != 2 {
        return Err(Error::InvalidParameter(format!(
            "plane must be two-dimensional in {rest_space}, got dimension {} in {}",
            plane.dim(),
            plane.space()
        )));
    }
    let eff = QuditDims::qubits(2);
    let mut probabilities = Vec::with_capacity(states.len());
    let mut projected = Vec::with_capacity(states.len());
    for (i, p) in states.states().iter().enumerate() {
        let m = reshape_amps(space, p.amps(), 1 << lone_party);
        let amps = DVector::from_fn(4, |idx, _| {
            let (row, k) = (idx / 2, idx % 2);
            plane.basis()[k].amps().dotc(&m.row(row).transpose())
        });
        let prob = amps.norm_squared();
        if prob < tol.eps() {
            return Err(Error::VanishingProjection(i));
        }
        probabilities.push(prob);
        projected.push(PureState::normalized(eff.clone(), amps)?);
    }
    for i in 0..projected.len() {
        for j in i + 1..projected.len() {
            let overlap = projected[i].amps().dotc(projected[j].amps()).norm();
            if overlap >= tol.eps() {
                return Err(Error::ProjectionNotOrthogonal { i, j, overlap });
            }
        }
    }
    Ok(ProjectionResult {
        projected: StateSet::new(eff, projected, tol)?,
        probabilities,
        cut: Bipartition::lone(space.clone(), lone_party)?,
        lone_party,
        plane: plane.clone(),
    })
}

/// True iff at least three projected states are entangled; they are
/// orthogonal by construction of [`ProjectionResult`].
pub fn walgate_flag(projected: &ProjectionResult, tol: Tolerance) -> Result<bool> {
    let set = &projected.projected;
    if set.len() < 3 {
        return Err(Error::TooFewStates { needed: 3, got: set.len() });
    }
    let cut = Bipartition::bipartite(set.space().clone())?;
    let mut entangled = 0;
    for p in set.states() {
        if schmidt(p, &cut, tol)?.rank == 2 {
            entangled += 1;
        }
    }
    Ok(entangled >= 3)
}

/// Outcome of the projection rule at one single-party cut.
#[derive(Clone, Debug, Serialize)]
pub struct CutFlag {
    pub lone_party: usize,
    pub cut: String,
    pub mask: u64,
    /// Indices of the projected states; empty if no triple qualified.
    pub selection: Vec<usize>,
    pub probabilities: Vec<f64>,
    pub indistinguishable: bool,
    pub grade: Grade,
}

fn try_triple(set: &StateSet, idx: &[usize], party: usize, plane: &Subspace, tol: Tolerance) -> Result<Option<ProjectionResult>> {
    let sub = set.select(idx, tol)?;
    match project_two_qubit(&sub, party, plane, tol) {
        Ok(r) if walgate_flag(&r, tol)? => Ok(Some(r)),
        Ok(_) | Err(Error::VanishingProjection(_)) | Err(Error::ProjectionNotOrthogonal { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Per single-party cut of a three-qubit set: project a triple of states
/// onto `lone qubit ⊗ plane` and apply [`walgate_flag`].
///
/// `planes[k]` is the plane for lone party `k` (default [`default_plane`]).
/// With `selections`, `selections[k]` is the triple used at party `k`;
/// otherwise triples are tried in lexicographic order and the first
/// qualifying one is reported.
pub fn all_cut_indistinguishability_flag(
    set: &StateSet,
    planes: Option<&[Subspace; 3]>,
    selections: Option<&[Vec<usize>; 3]>,
    tol: Tolerance,
) -> Result<Vec<CutFlag>> {
    if set.space() != &QuditDims::qubits(3) {
        return Err(Error::InvalidDims(format!("expected 2x2x2, got {}", set.space())));
    }
    if set.len() < 3 {
        return Err(Error::TooFewStates { needed: 3, got: set.len() });
    }
    let default = default_plane();
    let n = set.len();
    (0..3)
        .map(|party| {
            let plane = planes.map_or(&default, |p| &p[party]);
            let cut = Bipartition::lone(set.space().clone(), party)?;
            let found = match selections {
                Some(sel) => {
                    let r = project_two_qubit(&set.select(&sel[party], tol)?, party, plane, tol)?;
                    let ok = walgate_flag(&r, tol)?;
                    Some((sel[party].clone(), r, ok))
                }
                None => {
                    let mut hit = None;
                    'outer: for a in 0..n {
                        for b in a + 1..n {
                            for c in b + 1..n {
                                if let Some(r) = try_triple(set, &[a, b, c], party, plane, tol)? {
                                    hit = Some((vec![a, b, c], r, true));
                                    break 'outer;
                                }
                            }
                        }
                    }
                    hit
                }
            };
            let (selection, probabilities, indistinguishable) = match found {
                Some((sel, r, ok)) => (sel, r.probabilities, ok),
                None => (Vec::new(), Vec::new(), false),
            };
            Ok(CutFlag {
                lone_party: party,
                cut: cut.label(),
                mask: cut.mask(),
                selection,
                probabilities,
                indistinguishable,
                grade: Grade::RuleBasedCited,
            })
        })
        .collect()
}

/// Plane spanned by two states of the non-lone parties.
pub fn plane_from_states(a: &PureState, b: &PureState, tol: Tolerance) -> Result<Subspace> {
    if a.space() != b.space() {
        return Err(Error::DimensionMismatch { expected: a.space().to_string(), found: b.space().to_string() });
    }
    let s = crate::state::orthonormalize(&[a.amps().clone(), b.amps().clone()], a.space(), tol);
    if s.dim() != 2 {
        return Err(Error::InvalidParameter("plane states must span two dimensions".into()));
    }
    Ok(s)
}
