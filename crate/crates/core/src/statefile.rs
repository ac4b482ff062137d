//! JSON state files.
//!
//! ```json
//! {
//!   "name": "eq1-ueb",
//!   "dims": [2, 2],
//!   "states": [[[0.577, 0.0], [0.577, 0.0], [0.577, 0.0], [0.0, 0.0]], ...],
//!   "planes": [{"lone_party": 0, "states": [[[0.707, 0.0], ...], [...]]}],
//!   "expected_kind": "UEB"
//! }
//! ```
//!
//! Amplitudes are `[re, im]` pairs written in shortest round-trip form, so
//! serialize then deserialize reproduces every bit.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::constructions::ExpectedKind;
use crate::error::{Error, Result};
use crate::state::{orthonormalize, PureState, QuditDims, StateSet, Subspace, Tolerance, C64, NORM_SLACK};

/// Largest norm deviation that is silently renormalized on load.
pub const RENORMALIZE_SLACK: f64 = 1e-6;

pub type Amplitudes = Vec<[f64; 2]>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaneSpec {
    pub lone_party: usize,
    /// Two states over the remaining parties.
    pub states: Vec<Amplitudes>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub name: String,
    pub dims: Vec<usize>,
    pub states: Vec<Amplitudes>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub planes: Option<Vec<PlaneSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_kind: Option<ExpectedKind>,
}

pub fn encode(v: &DVector<C64>) -> Amplitudes {
    v.iter().map(|a| [a.re, a.im]).collect()
}

fn decode(raw: &Amplitudes) -> DVector<C64> {
    DVector::from_iterator(raw.len(), raw.iter().map(|[re, im]| C64::new(*re, *im)))
}

/// Accepts unit vectors as they are, rescales small norm drift, rejects the
/// rest.
fn load_state(space: &QuditDims, raw: &Amplitudes) -> Result<PureState> {
    if raw.len() != space.total() {
        return Err(Error::DimensionMismatch { expected: space.total().to_string(), found: raw.len().to_string() });
    }
    if raw.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::StateFile("non-finite amplitude".into()));
    }
    let v = decode(raw);
    let norm = v.norm();
    if (norm - 1.0).abs() <= NORM_SLACK {
        PureState::new(space.clone(), v)
    } else if (norm - 1.0).abs() <= RENORMALIZE_SLACK {
        PureState::normalized(space.clone(), v)
    } else {
        Err(Error::NotNormalized(norm))
    }
}

impl StateFile {
    pub fn from_set(set: &StateSet, expected_kind: Option<ExpectedKind>) -> Self {
        Self {
            name: set.name().unwrap_or("unnamed").to_string(),
            dims: set.space().dims().to_vec(),
            states: set.states().iter().map(|p| encode(p.amps())).collect(),
            planes: None,
            expected_kind,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::StateFile(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("state files always serialize")
    }

    pub fn space(&self) -> Result<QuditDims> {
        QuditDims::new(self.dims.clone())
    }

    /// Validated state set. With `gram_fix` the states are re-orthonormalized
    /// in order first; otherwise non-orthogonal input is an error.
    pub fn to_state_set(&self, tol: Tolerance, gram_fix: bool) -> Result<StateSet> {
        let space = self.space()?;
        let mut states = self.states.iter().map(|raw| load_state(&space, raw)).collect::<Result<Vec<_>>>()?;
        if gram_fix {
            let raw: Vec<DVector<C64>> = states.iter().map(|p| p.amps().clone()).collect();
            let fixed = orthonormalize(&raw, &space, tol);
            if fixed.dim() != states.len() {
                return Err(Error::StateFile(format!(
                    "states are linearly dependent: rank {} for {} states",
                    fixed.dim(),
                    states.len()
                )));
            }
            states = fixed.basis().to_vec();
        }
        Ok(StateSet::new(space, states, tol)?.with_name(self.name.clone()))
    }

    /// Per lone party planes for three-qubit files, indexed by party.
    pub fn planes(&self, tol: Tolerance) -> Result<Option<[Subspace; 3]>> {
        let Some(specs) = &self.planes else { return Ok(None) };
        let space = self.space()?;
        if space != QuditDims::qubits(3) {
            return Err(Error::StateFile("planes are only defined for 2x2x2 files".into()));
        }
        let rest = QuditDims::qubits(2);
        let mut out: [Option<Subspace>; 3] = [None, None, None];
        for spec in specs {
            if spec.lone_party >= 3 || out[spec.lone_party].is_some() {
                return Err(Error::StateFile(format!("bad or repeated plane for party {}", spec.lone_party)));
            }
            let [a, b] = spec.states.as_slice() else {
                return Err(Error::StateFile("a plane needs exactly two states".into()));
            };
            let (a, b) = (load_state(&rest, a)?, load_state(&rest, b)?);
            out[spec.lone_party] = Some(crate::locc::plane_from_states(&a, &b, tol)?);
        }
        match out {
            [Some(a), Some(b), Some(c)] => Ok(Some([a, b, c])),
            _ => Err(Error::StateFile("planes must cover parties 0, 1 and 2".into())),
        }
    }
}
