//! Machine-readable verification reports.
//!
//! Reports carry no timestamps or host data; identical inputs, flags and
//! seed give byte-identical output.

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::analysis::{
    completion_search, only_product_across_cut, verify_basis, BasisKind, BasisVerdict, Completable, Grade, Outcome,
    SearchConfig, SearchMode, SubspaceStatus, SubspaceVerdict, VerifyOptions,
};
use crate::cuts::{enumerate_cuts, is_genuinely_entangled, schmidt, Bipartition};
use crate::error::Result;
use crate::locc::{all_cut_indistinguishability_flag, CutFlag};
use crate::slocc::{classify_three_qubit, resource_dimension_flag, SloccClass};
use crate::state::{QuditDims, StateSet, Subspace};
use crate::statefile::{encode, Amplitudes};

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct CutId {
    pub mask: u64,
    pub label: String,
}

impl From<&Bipartition> for CutId {
    fn from(c: &Bipartition) -> Self {
        Self { mask: c.mask(), label: c.label() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InputInfo {
    pub name: String,
    pub dims: Vec<usize>,
    pub state_count: usize,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Settings {
    pub tol: f64,
    pub seed: u64,
    pub starts: usize,
    pub kind: BasisKind,
    pub cut: Option<CutId>,
    pub require_exact: bool,
    pub gram_fix: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SubspaceClaim {
    pub cut: CutId,
    pub status: SubspaceStatus,
    pub grade: Grade,
    pub score: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Amplitudes>,
}

impl From<&SubspaceVerdict> for SubspaceClaim {
    fn from(v: &SubspaceVerdict) -> Self {
        Self {
            cut: (&v.cut).into(),
            status: v.status,
            grade: v.grade,
            score: v.score,
            witness: v.witness.as_ref().map(|w| encode(w.amps())),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerdictReport {
    pub kind: BasisKind,
    pub outcome: Outcome,
    pub grade: Grade,
    pub complement_dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refuted_state: Option<usize>,
    pub per_cut: Vec<SubspaceClaim>,
}

impl From<&BasisVerdict> for VerdictReport {
    fn from(v: &BasisVerdict) -> Self {
        Self {
            kind: v.kind,
            outcome: v.outcome,
            grade: v.grade,
            complement_dim: v.complement_dim(),
            refuted_state: v.refuted_state,
            per_cut: v.per_cut.iter().map(Into::into).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CutRank {
    pub cut: CutId,
    pub rank: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SloccReport {
    pub label: SloccClass,
    pub tangle: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct StateDiagnostics {
    pub index: usize,
    pub schmidt_ranks: Vec<CutRank>,
    pub genuinely_entangled: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slocc: Option<SloccReport>,
    pub grade: Grade,
}

#[derive(Clone, Debug, Serialize)]
pub struct OnlyProductClaim {
    pub cut: CutId,
    pub only_product: bool,
    pub grade: Grade,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComplementReport {
    pub dim: usize,
    pub basis: Vec<Amplitudes>,
    pub only_product: Vec<OnlyProductClaim>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DistinguishabilityReport {
    pub grade: Grade,
    pub rule: &'static str,
    pub flags: Vec<CutFlag>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FlagClaim {
    pub value: bool,
    pub grade: Grade,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompletionReport {
    pub mode: SearchMode,
    pub cut: CutId,
    pub found: usize,
    pub complement_dim: usize,
    pub completable: Completable,
    pub grade: Grade,
    /// UCEB for entangled mode, UCMEB for maximally entangled mode, when the
    /// complement holds some but not enough states.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uncompletable_as: Option<&'static str>,
    /// Strong uncompletability over arbitrary local extensions is not decided.
    pub strong_uncompletability: &'static str,
    pub states: Vec<Amplitudes>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub input: InputInfo,
    pub settings: Settings,
    pub verdict: VerdictReport,
    pub states: Vec<StateDiagnostics>,
    pub complement: ComplementReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slocc_resource_flag: Option<FlagClaim>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distinguishability: Option<DistinguishabilityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub completion: Option<CompletionReport>,
    pub notes: Vec<String>,
}

/// What to compute beyond the basis verdict.
#[derive(Clone, Debug, Default)]
pub struct ReportRequest {
    /// SLOCC resource flag and distinguishability flags (three qubits).
    pub full_diagnostics: bool,
    pub completion: Option<SearchMode>,
    pub planes: Option<[Subspace; 3]>,
    pub gram_fix: bool,
}

const WALGATE_RULE: &str =
    "three orthogonal entangled two-qubit states are not perfectly distinguishable by LOCC (Walgate and Hardy, 2002)";

fn state_diagnostics(set: &StateSet, cuts: &[Bipartition], cfg: &SearchConfig) -> Result<Vec<StateDiagnostics>> {
    let three_qubits = set.space() == &QuditDims::qubits(3);
    set.states()
        .iter()
        .enumerate()
        .map(|(index, p)| {
            let schmidt_ranks = cuts
                .iter()
                .map(|c| Ok(CutRank { cut: c.into(), rank: schmidt(p, c, cfg.tol)?.rank }))
                .collect::<Result<Vec<_>>>()?;
            let slocc = if three_qubits {
                let l = classify_three_qubit(p, cfg.tol)?;
                Some(SloccReport { label: l.class, tangle: l.tangle })
            } else {
                None
            };
            Ok(StateDiagnostics {
                index,
                schmidt_ranks,
                genuinely_entangled: is_genuinely_entangled(p, cfg.tol)?,
                slocc,
                grade: Grade::Exact,
            })
        })
        .collect()
}

fn complement_report(verdict: &BasisVerdict, cuts: &[Bipartition], cfg: &SearchConfig) -> Result<ComplementReport> {
    let c = &verdict.complement;
    let only_product = if c.dim() == 0 {
        Vec::new()
    } else {
        cuts.iter()
            .map(|cut| {
                Ok(OnlyProductClaim {
                    cut: cut.into(),
                    only_product: only_product_across_cut(c, cut, cfg.tol)?,
                    grade: Grade::Exact,
                })
            })
            .collect::<Result<Vec<_>>>()?
    };
    Ok(ComplementReport { dim: c.dim(), basis: c.basis().iter().map(|b| encode(b.amps())).collect(), only_product })
}

/// Runs the verifier and assembles the report. `input` is the raw file
/// content used for the digest.
pub fn build_report(
    input: &[u8],
    set: &StateSet,
    kind: BasisKind,
    opts: &VerifyOptions,
    cfg: &SearchConfig,
    request: &ReportRequest,
) -> Result<Report> {
    let verdict = verify_basis(set, kind, opts, cfg)?;
    let cuts = enumerate_cuts(set.space())?;
    let mut notes = Vec::new();
    if kind == BasisKind::Umeb && verdict.outcome == Outcome::Verified {
        notes.push(
            "UMEB discrimination with an entangled resource (teleportation based) is cited only, not checked".into(),
        );
    }
    let three_qubits = set.space() == &QuditDims::qubits(3);
    let (slocc_resource_flag, distinguishability) = if request.full_diagnostics && three_qubits {
        let flag = FlagClaim { value: resource_dimension_flag(set, cfg.tol)?, grade: Grade::RuleBasedCited };
        let dist = if set.len() >= 3 {
            let flags = all_cut_indistinguishability_flag(set, request.planes.as_ref(), None, cfg.tol)?;
            Some(DistinguishabilityReport { grade: Grade::RuleBasedCited, rule: WALGATE_RULE, flags })
        } else {
            notes.push("fewer than three states: no projection flags".into());
            None
        };
        (Some(flag), dist)
    } else {
        (None, None)
    };
    let completion = match request.completion {
        Some(mode) if verdict.complement_dim() > 0 => {
            let cut = match &opts.cut {
                Some(c) => c.clone(),
                None => Bipartition::bipartite(set.space().clone())?,
            };
            let r = completion_search(set, &cut, mode, cfg)?;
            let uncompletable_as = (r.completable != Completable::Yes && !r.found.is_empty()).then_some(match mode {
                SearchMode::Entangled => "UCEB",
                SearchMode::MaxEntangled => "UCMEB",
            });
            Some(CompletionReport {
                mode,
                cut: (&cut).into(),
                found: r.found.len(),
                complement_dim: r.complement_dim,
                completable: r.completable,
                grade: r.grade(),
                uncompletable_as,
                strong_uncompletability: "OUT_OF_SCOPE",
                states: r.found.iter().map(|p| encode(p.amps())).collect(),
            })
        }
        Some(_) => {
            notes.push("complete basis: no completion search".into());
            None
        }
        None => None,
    };
    Ok(Report {
        tool: "entbasis",
        version: env!("CARGO_PKG_VERSION"),
        command: if request.full_diagnostics { "analyze" } else { "verify" },
        input: InputInfo {
            name: set.name().unwrap_or("unnamed").to_string(),
            dims: set.space().dims().to_vec(),
            state_count: set.len(),
            sha256: sha256_hex(input),
        },
        settings: Settings {
            tol: cfg.tol.eps(),
            seed: cfg.seed,
            starts: cfg.starts,
            kind,
            cut: opts.cut.as_ref().map(Into::into),
            require_exact: opts.require_exact,
            gram_fix: request.gram_fix,
        },
        verdict: (&verdict).into(),
        states: state_diagnostics(set, &cuts, cfg)?,
        complement: complement_report(&verdict, &cuts, cfg)?,
        slocc_resource_flag,
        distinguishability,
        completion,
        notes,
    })
}

/// Process exit code for an outcome.
pub fn exit_code(outcome: Outcome) -> i32 {
    match outcome {
        Outcome::Verified | Outcome::CompleteBasis => 0,
        Outcome::Refuted => 1,
        Outcome::Inconclusive => 2,
    }
}

fn enum_name<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v).ok().and_then(|j| j.as_str().map(str::to_string)).unwrap_or_default()
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = Vec::new();
        let v = &self.verdict;
        out.push(format!("input     {} ({} states in {:?}) sha256 {}", self.input.name, self.input.state_count, self.input.dims, self.input.sha256));
        out.push(format!("settings  tol {:e}  seed {}  starts {}", self.settings.tol, self.settings.seed, self.settings.starts));
        out.push(format!("verdict   {} {} [{}]", enum_name(&v.kind), enum_name(&v.outcome), enum_name(&v.grade)));
        if let Some(i) = v.refuted_state {
            out.push(format!("          state {i} fails the entanglement requirement"));
        }
        out.push(format!("complement dimension {}", v.complement_dim));
        for c in &v.per_cut {
            out.push(format!("  {:<8} {} [{}] score {:e}", c.cut.label, enum_name(&c.status), enum_name(&c.grade), c.score));
        }
        for s in &self.states {
            let ranks: Vec<String> = s.schmidt_ranks.iter().map(|r| format!("{}:{}", r.cut.label, r.rank)).collect();
            let label = s.slocc.as_ref().map(|l| format!(" {} tau={:.9}", l.label.label(), l.tangle)).unwrap_or_default();
            out.push(format!("state {:<3} ranks {}{}", s.index, ranks.join(" "), label));
        }
        if let Some(f) = &self.slocc_resource_flag {
            out.push(format!("slocc resource flag {} [{}]", f.value, enum_name(&f.grade)));
        }
        if let Some(d) = &self.distinguishability {
            for f in &d.flags {
                out.push(format!(
                    "party {} ({}) selection {:?} probabilities {:?} indistinguishable {} [{}]",
                    f.lone_party,
                    f.cut,
                    f.selection,
                    f.probabilities,
                    f.indistinguishable,
                    enum_name(&f.grade)
                ));
            }
        }
        if let Some(c) = &self.completion {
            out.push(format!(
                "completion {} across {}: found {} of {} -> {}{} [{}]",
                enum_name(&c.mode),
                c.cut.label,
                c.found,
                c.complement_dim,
                enum_name(&c.completable),
                c.uncompletable_as.map(|u| format!(" ({u})")).unwrap_or_default(),
                enum_name(&c.grade)
            ));
        }
        for n in &self.notes {
            out.push(format!("note: {n}"));
        }
        out.join("\n") + "\n"
    }
}
