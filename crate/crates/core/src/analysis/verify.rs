//! Top-level basis verdicts.

use serde::Serialize;

use super::search::{find_maximally_entangled, max_orthogonal_set, SearchMode};
use super::{entangled_witness, Grade, SearchConfig, SubspaceStatus, SubspaceVerdict};
use crate::cuts::{enumerate_cuts, is_genuinely_entangled, is_maximally_entangled, is_product, Bipartition};
use crate::error::{Error, Result};
use crate::state::{PureState, StateSet, Subspace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BasisKind {
    Ueb,
    UebAllCuts,
    Umeb,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Outcome {
    Verified,
    Refuted,
    CompleteBasis,
    Inconclusive,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerifyOptions {
    /// Cut for UEB/UMEB checks; may be omitted for two-party spaces.
    pub cut: Option<Bipartition>,
    /// Report INCONCLUSIVE instead of a numerically graded VERIFIED.
    pub require_exact: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BasisVerdict {
    pub kind: BasisKind,
    pub outcome: Outcome,
    pub grade: Grade,
    pub per_cut: Vec<SubspaceVerdict>,
    pub complement: Subspace,
    /// First state failing the entanglement requirement.
    pub refuted_state: Option<usize>,
}

impl BasisVerdict {
    pub fn complement_dim(&self) -> usize {
        self.complement.dim()
    }

    /// VERIFIED or COMPLETE_BASIS.
    pub fn passed(&self) -> bool {
        matches!(self.outcome, Outcome::Verified | Outcome::CompleteBasis)
    }
}

fn resolve_cut(set: &StateSet, opts: &VerifyOptions) -> Result<Bipartition> {
    match &opts.cut {
        Some(c) if c.space() != set.space() => Err(Error::InvalidCut {
            mask: c.mask(),
            parties: set.space().parties(),
        }),
        Some(c) => Ok(c.clone()),
        None if set.space().parties() == 2 => Bipartition::bipartite(set.space().clone()),
        None => Err(Error::CutRequired(set.space().parties())),
    }
}

fn state_ok(p: &PureState, kind: BasisKind, cut: Option<&Bipartition>, cfg: &SearchConfig) -> Result<bool> {
    match (kind, cut) {
        (BasisKind::UebAllCuts, _) => is_genuinely_entangled(p, cfg.tol),
        (BasisKind::Ueb, Some(c)) => Ok(!is_product(p, c, cfg.tol)?),
        (BasisKind::Umeb, Some(c)) => is_maximally_entangled(p, c, cfg.tol),
        (_, None) => unreachable!("cut resolved for single-cut kinds"),
    }
}

fn only_product_verdict(s: &Subspace, cut: &Bipartition, cfg: &SearchConfig) -> Result<SubspaceVerdict> {
    let witness = entangled_witness(s, cut, cfg.tol)?;
    let (status, score) = match &witness {
        None => (SubspaceStatus::OnlyProduct, 0.0),
        Some(w) => {
            let sv = crate::cuts::schmidt(w, cut, cfg.tol)?;
            (SubspaceStatus::ContainsEntangled, sv.coefficients.get(1).copied().unwrap_or(0.0))
        }
    };
    Ok(SubspaceVerdict { cut: cut.clone(), status, grade: Grade::Exact, witness, score })
}

/// Checks a set against a basis kind.
///
/// Per-state entanglement failures and entangled (or maximally entangled)
/// witnesses in the complement are exact refutations. A UMEB verdict resting
/// on a failed search is graded as numerical evidence.
pub fn verify_basis(set: &StateSet, kind: BasisKind, opts: &VerifyOptions, cfg: &SearchConfig) -> Result<BasisVerdict> {
    let cuts = match kind {
        BasisKind::UebAllCuts => enumerate_cuts(set.space())?,
        _ => vec![resolve_cut(set, opts)?],
    };
    let single = (kind != BasisKind::UebAllCuts).then(|| &cuts[0]);
    let complement = set.complement();
    let verdict = |outcome, grade, per_cut, refuted_state| BasisVerdict {
        kind,
        outcome,
        grade,
        per_cut,
        complement: complement.clone(),
        refuted_state,
    };
    for (i, p) in set.states().iter().enumerate() {
        if !state_ok(p, kind, single, cfg)? {
            return Ok(verdict(Outcome::Refuted, Grade::Exact, Vec::new(), Some(i)));
        }
    }
    if complement.dim() == 0 {
        return Ok(verdict(Outcome::CompleteBasis, Grade::Exact, Vec::new(), None));
    }
    match kind {
        BasisKind::Ueb | BasisKind::UebAllCuts => {
            let per_cut = cuts
                .iter()
                .map(|c| only_product_verdict(&complement, c, cfg))
                .collect::<Result<Vec<_>>>()?;
            let ok = per_cut.iter().all(|v| v.status == SubspaceStatus::OnlyProduct);
            let outcome = if ok { Outcome::Verified } else { Outcome::Refuted };
            Ok(verdict(outcome, Grade::Exact, per_cut, None))
        }
        BasisKind::Umeb => {
            let v = find_maximally_entangled(&complement, &cuts[0], cfg)?;
            let (outcome, grade) = match (v.status, v.grade) {
                (SubspaceStatus::MeFound, _) => (Outcome::Refuted, Grade::Exact),
                (_, Grade::Exact) => (Outcome::Verified, Grade::Exact),
                _ if opts.require_exact => (Outcome::Inconclusive, Grade::NumericalEvidence),
                _ => (Outcome::Verified, Grade::NumericalEvidence),
            };
            Ok(verdict(outcome, grade, vec![v], None))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Completable {
    Yes,
    NoExact,
    NoEvidence,
}

#[derive(Clone, Debug)]
pub struct CompletionResult {
    pub mode: SearchMode,
    pub found: Vec<PureState>,
    pub complement_dim: usize,
    pub completable: Completable,
}

impl CompletionResult {
    pub fn grade(&self) -> Grade {
        match self.completable {
            Completable::Yes | Completable::NoExact => Grade::Exact,
            Completable::NoEvidence => Grade::NumericalEvidence,
        }
    }
}

/// Tries to fill the complement of `set` with mutually orthogonal
/// (maximally) entangled states across `cut`.
pub fn completion_search(
    set: &StateSet,
    cut: &Bipartition,
    mode: SearchMode,
    cfg: &SearchConfig,
) -> Result<CompletionResult> {
    let complement = set.complement();
    if complement.dim() == 0 {
        return Err(Error::CompleteBasis);
    }
    let out = max_orthogonal_set(&complement, cut, mode, cfg)?;
    let completable = if out.states.len() == complement.dim() {
        Completable::Yes
    } else if out.terminated_exactly {
        Completable::NoExact
    } else {
        Completable::NoEvidence
    };
    Ok(CompletionResult { mode, found: out.states, complement_dim: complement.dim(), completable })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{QuditDims, Tolerance, C64, ONE};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn bell(sign: f64, a: &str, b: &str) -> PureState {
        PureState::from_bits(&[(ONE, a), (C64::new(sign, 0.0), b)]).unwrap()
    }

    #[test]
    fn two_bell_states_are_not_a_ueb() {
        let set = StateSet::new(QuditDims::qubits(2), vec![bell(1.0, "00", "11"), bell(-1.0, "00", "11")], tol()).unwrap();
        let v = verify_basis(&set, BasisKind::Ueb, &VerifyOptions::default(), &SearchConfig::default()).unwrap();
        assert_eq!(v.outcome, Outcome::Refuted);
        assert_eq!(v.per_cut[0].status, SubspaceStatus::ContainsEntangled);
        assert!(!is_product(v.per_cut[0].witness.as_ref().unwrap(), &v.per_cut[0].cut, tol()).unwrap());
    }

    #[test]
    fn bell_basis_is_complete() {
        let states = vec![
            bell(1.0, "00", "11"),
            bell(-1.0, "00", "11"),
            bell(1.0, "01", "10"),
            bell(-1.0, "01", "10"),
        ];
        let set = StateSet::new(QuditDims::qubits(2), states, tol()).unwrap();
        let v = verify_basis(&set, BasisKind::Umeb, &VerifyOptions::default(), &SearchConfig::default()).unwrap();
        assert_eq!(v.outcome, Outcome::CompleteBasis);
        assert_eq!(v.complement_dim(), 0);
    }

    #[test]
    fn product_member_refutes_with_index() {
        let set = StateSet::new(
            QuditDims::qubits(2),
            vec![bell(1.0, "00", "11"), PureState::from_bits(&[(ONE, "01")]).unwrap()],
            tol(),
        )
        .unwrap();
        let v = verify_basis(&set, BasisKind::Ueb, &VerifyOptions::default(), &SearchConfig::default()).unwrap();
        assert_eq!(v.outcome, Outcome::Refuted);
        assert_eq!(v.refuted_state, Some(1));
    }

    #[test]
    fn three_party_single_cut_needs_a_cut() {
        let ghz = PureState::from_bits(&[(ONE, "000"), (ONE, "111")]).unwrap();
        let set = StateSet::new(QuditDims::qubits(3), vec![ghz], tol()).unwrap();
        let r = verify_basis(&set, BasisKind::Ueb, &VerifyOptions::default(), &SearchConfig::default());
        assert_eq!(r.unwrap_err(), Error::CutRequired(3));
    }

    #[test]
    fn completing_a_complete_set_is_an_error() {
        let set = StateSet::new(QuditDims::qubits(1 + 1), vec![
            PureState::from_bits(&[(ONE, "00")]).unwrap(),
            PureState::from_bits(&[(ONE, "01")]).unwrap(),
            PureState::from_bits(&[(ONE, "10")]).unwrap(),
            PureState::from_bits(&[(ONE, "11")]).unwrap(),
        ], tol())
        .unwrap();
        let cut = Bipartition::bipartite(set.space().clone()).unwrap();
        let r = completion_search(&set, &cut, SearchMode::Entangled, &SearchConfig::default());
        assert_eq!(r.unwrap_err(), Error::CompleteBasis);
    }
}
