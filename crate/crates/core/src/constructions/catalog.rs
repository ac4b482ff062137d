use serde::{Deserialize, Serialize};

use super::{
    bell_meb, bell_states, gate, embed_meb, four_qubit_ueb, meb_extension_completion, three_qubit_mixed_ueb, three_qubit_w_ueb,
    two_qubit_ueb_fourier, two_qubit_ueb_real,
};
use crate::analysis::{BasisKind, Outcome, SearchConfig};
use crate::error::{Error, Result};
use crate::state::{QuditDims, StateSet, Tolerance, ONE, ZERO};

/// Property a catalog entry is built to have.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ExpectedKind {
    Ueb,
    UebAllCuts,
    Umeb,
    /// Complete maximally entangled basis: COMPLETE_BASIS under the UMEB check.
    Meb,
}

impl ExpectedKind {
    pub fn basis_kind(self) -> BasisKind {
        match self {
            Self::Ueb => BasisKind::Ueb,
            Self::UebAllCuts => BasisKind::UebAllCuts,
            Self::Umeb | Self::Meb => BasisKind::Umeb,
        }
    }

    pub fn outcome(self) -> Outcome {
        match self {
            Self::Meb => Outcome::CompleteBasis,
            _ => Outcome::Verified,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub dims: &'static [usize],
    pub cardinality: usize,
    pub expected: ExpectedKind,
    pub provenance: &'static str,
    build: fn() -> Result<StateSet>,
}

impl CatalogEntry {
    pub fn space(&self) -> QuditDims {
        QuditDims::new(self.dims.to_vec()).expect("catalog dimensions are valid")
    }

    /// Builds the (verifier-gated) set, named after the entry.
    pub fn build(&self) -> Result<StateSet> {
        Ok((self.build)()?.with_name(self.name))
    }
}

fn eq3_meb() -> Result<StateSet> {
    bell_meb(2)
}

fn eq3_in_2x3() -> Result<StateSet> {
    embed_meb(2, 1)
}

fn eq4_completion() -> Result<StateSet> {
    let x = [ZERO, ZERO, ONE, ZERO];
    let xp = [ZERO, ZERO, ZERO, ONE];
    let space = QuditDims::new(vec![2, 4])?;
    let mut states = bell_states(2, space.clone())?;
    states.extend(meb_extension_completion(&x, &xp)?.states().iter().cloned());
    let set = StateSet::new(space, states, Tolerance::default())?;
    gate(&set, ExpectedKind::Meb, &SearchConfig::default())?;
    Ok(set)
}

static CATALOG: &[CatalogEntry] = &[
    CatalogEntry {
        name: "eq1-ueb",
        dims: &[2, 2],
        cardinality: 3,
        expected: ExpectedKind::Ueb,
        provenance: "two-qubit UEB, real unequal coefficients",
        build: two_qubit_ueb_real,
    },
    CatalogEntry {
        name: "eq2-ueb",
        dims: &[2, 2],
        cardinality: 3,
        expected: ExpectedKind::Ueb,
        provenance: "two-qubit UEB, equally entangled Fourier states",
        build: two_qubit_ueb_fourier,
    },
    CatalogEntry {
        name: "eq3-meb",
        dims: &[2, 2],
        cardinality: 4,
        expected: ExpectedKind::Meb,
        provenance: "two-qubit Bell basis",
        build: eq3_meb,
    },
    CatalogEntry {
        name: "eq3-in-2x3",
        dims: &[2, 3],
        cardinality: 4,
        expected: ExpectedKind::Umeb,
        provenance: "Bell basis embedded in 2x3 as a UMEB",
        build: eq3_in_2x3,
    },
    CatalogEntry {
        name: "eq4-completion",
        dims: &[2, 4],
        cardinality: 8,
        expected: ExpectedKind::Meb,
        provenance: "Bell basis plus the four extension states, a complete MEB of 2x4",
        build: eq4_completion,
    },
    CatalogEntry {
        name: "eq5-w-ueb",
        dims: &[2, 2, 2],
        cardinality: 6,
        expected: ExpectedKind::UebAllCuts,
        provenance: "three-qubit W-class UEB, unextendible across every cut",
        build: three_qubit_w_ueb,
    },
    CatalogEntry {
        name: "eq6-mixed-ueb",
        dims: &[2, 2, 2],
        cardinality: 7,
        expected: ExpectedKind::UebAllCuts,
        provenance: "three-qubit GHZ/W mixed UEB of maximal cardinality",
        build: three_qubit_mixed_ueb,
    },
    CatalogEntry {
        name: "appendix-4qubit",
        dims: &[2, 2, 2, 2],
        cardinality: 15,
        expected: ExpectedKind::UebAllCuts,
        provenance: "four-qubit UEB of maximal cardinality (W-type, GHZ-type and |0000> blocks)",
        build: four_qubit_ueb,
    },
];

pub fn catalog() -> &'static [CatalogEntry] {
    CATALOG
}

pub fn find_entry(name: &str) -> Result<&'static CatalogEntry> {
    CATALOG.iter().find(|e| e.name == name).ok_or_else(|| Error::UnknownName(name.to_string()))
}
