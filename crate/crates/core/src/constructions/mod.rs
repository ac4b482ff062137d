//! Builders for incomplete entangled bases.
//!
//! Every builder runs its output through [`verify_basis`] before returning
//! it and fails with [`Error::GateFailed`] when the declared property does
//! not hold.

mod catalog;

pub use catalog::{catalog, find_entry, CatalogEntry, ExpectedKind};

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::DVector;

use crate::analysis::{
    completion_search, verify_basis, BasisKind, BasisVerdict, Completable, Grade, Outcome, SearchConfig, SearchMode,
    VerifyOptions,
};
use crate::cuts::{is_genuinely_entangled, Bipartition};
use crate::error::{Error, Result};
use crate::state::{bit_index, kron, PureState, QuditDims, StateSet, Tolerance, C64, ONE, ZERO};

/// `exp(2πi r / k)`.
pub fn root_of_unity(r: usize, k: usize) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * (r % k) as f64 / k as f64)
}

fn tol() -> Tolerance {
    Tolerance::default()
}

fn set(states: Vec<PureState>, name: &str) -> Result<StateSet> {
    let space = states
        .first()
        .map(|s| s.space().clone())
        .ok_or_else(|| Error::InvalidParameter("empty state list".into()))?;
    Ok(StateSet::new(space, states, tol())?.with_name(name))
}

/// Runs the verifier and insists on the expected outcome.
pub fn gate(set: &StateSet, expected: ExpectedKind, cfg: &SearchConfig) -> Result<BasisVerdict> {
    let name = set.name().unwrap_or("unnamed").to_string();
    let verdict = verify_basis(set, expected.basis_kind(), &VerifyOptions::default(), cfg)?;
    let want = expected.outcome();
    if verdict.outcome != want {
        return Err(Error::GateFailed {
            name,
            reason: format!("expected {want:?}, verifier returned {:?}", verdict.outcome),
        });
    }
    if verdict.grade != Grade::Exact {
        return Err(Error::GateFailed { name, reason: "verdict is not exact".into() });
    }
    Ok(verdict)
}

fn gated(set: StateSet, expected: ExpectedKind) -> Result<StateSet> {
    gate(&set, expected, &SearchConfig::default())?;
    Ok(set)
}

fn check_distinct(strings: &[&str]) -> Result<usize> {
    let n = strings
        .first()
        .map(|s| s.len())
        .ok_or_else(|| Error::InvalidParameter("no bit strings".into()))?;
    let mut seen = std::collections::BTreeSet::new();
    for s in strings {
        let idx = bit_index(s, n)?;
        if !seen.insert(idx) {
            return Err(Error::InvalidParameter(format!("duplicate bit string {s}")));
        }
    }
    Ok(n)
}

fn superpositions(strings: &[&str], coeff: impl Fn(usize, usize) -> C64) -> Result<Vec<PureState>> {
    check_distinct(strings)?;
    (0..strings.len())
        .map(|r| {
            let terms: Vec<(C64, &str)> = strings.iter().enumerate().map(|(j, s)| (coeff(r, j), *s)).collect();
            PureState::from_bits(&terms)
        })
        .collect()
}

/// `s_r = k^{-1/2} Σ_j ω_k^{jr} |string_j>` for `r = 0..k`.
pub fn dft_superposition(strings: &[&str]) -> Result<StateSet> {
    let k = strings.len();
    set(superpositions(strings, |r, j| root_of_unity(j * r, k))?, "dft")
}

fn bit_reverse(x: usize, bits: u32) -> usize {
    if bits == 0 {
        0
    } else {
        x.reverse_bits() >> (usize::BITS - bits)
    }
}

/// Hadamard-row variant: coefficient `(-1)^{popcount(bitrev(r) & j)}`;
/// needs a power-of-two number of strings.
pub fn hadamard_superposition(strings: &[&str]) -> Result<StateSet> {
    let k = strings.len();
    if !k.is_power_of_two() {
        return Err(Error::InvalidParameter(format!("{k} strings is not a power of two")));
    }
    let bits = k.trailing_zeros();
    let coeff = |r: usize, j: usize| {
        if (bit_reverse(r, bits) & j).count_ones().is_multiple_of(2) {
            ONE
        } else {
            -ONE
        }
    };
    set(superpositions(strings, coeff)?, "hadamard")
}

fn bits(terms: &[(C64, &str)]) -> PureState {
    PureState::from_bits(terms).expect("well-formed literal state")
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Three real two-qubit states with complement `|11>`.
pub fn two_qubit_ueb_real() -> Result<StateSet> {
    let s3 = 1.0 / 3f64.sqrt();
    let states = vec![
        bits(&[(re(s3), "00"), (re(s3), "01"), (re(s3), "10")]),
        bits(&[(re(FRAC_1_SQRT_2), "01"), (re(-FRAC_1_SQRT_2), "10")]),
        bits(&[
            (re(s3 * 2f64.sqrt()), "00"),
            (re(-s3 * FRAC_1_SQRT_2), "01"),
            (re(-s3 * FRAC_1_SQRT_2), "10"),
        ]),
    ];
    gated(set(states, "eq1-ueb")?, ExpectedKind::Ueb)
}

/// Three equally entangled two-qubit states (cube-root-of-unity phases).
pub fn two_qubit_ueb_fourier() -> Result<StateSet> {
    let w = root_of_unity(1, 3);
    let w2 = root_of_unity(2, 3);
    let states = vec![
        bits(&[(ONE, "00"), (ONE, "01"), (ONE, "10")]),
        bits(&[(ONE, "00"), (w, "01"), (w2, "10")]),
        bits(&[(ONE, "00"), (w2, "01"), (w, "10")]),
    ];
    gated(set(states, "eq2-ueb")?, ExpectedKind::Ueb)
}

/// An ordered orthonormal pair of qubit vectors.
pub type QubitPair = [[C64; 2]; 2];

fn check_pair(p: &QubitPair, what: &str) -> Result<()> {
    let v0 = DVector::from_column_slice(&p[0]);
    let v1 = DVector::from_column_slice(&p[1]);
    let bad = (v0.norm() - 1.0).abs() > tol().eps() || (v1.norm() - 1.0).abs() > tol().eps() || v0.dotc(&v1).norm() > tol().eps();
    if bad {
        Err(Error::InvalidParameter(format!("{what} is not an orthonormal pair")))
    } else {
        Ok(())
    }
}

/// Output of [`two_qubit_ueb_general`].
#[derive(Clone, Debug)]
pub struct GeneralUeb {
    pub set: StateSet,
    pub verdict: BasisVerdict,
}

/// Fourier combinations of `|a0>, |a1>, |b0'>` for local bases `{a, b}`,
/// `{0, 1}` and `{0', 1'}`.
///
/// When `|0'>` equals `|0>` up to phase the UEB property is guaranteed and
/// enforced; otherwise the verdict is returned for inspection.
pub fn two_qubit_ueb_general(local_a: &QubitPair, local_b: &QubitPair, local_b_primed: &QubitPair) -> Result<GeneralUeb> {
    check_pair(local_a, "first-party pair")?;
    check_pair(local_b, "second-party pair")?;
    check_pair(local_b_primed, "primed second-party pair")?;
    let v = |c: &[C64; 2]| DVector::from_column_slice(c);
    let a = v(&local_a[0]);
    let b = v(&local_a[1]);
    let products = [kron(&a, &v(&local_b[0])), kron(&a, &v(&local_b[1])), kron(&b, &v(&local_b_primed[0]))];
    let space = QuditDims::qubits(2);
    let states = (0..3)
        .map(|r| {
            let amps = products
                .iter()
                .enumerate()
                .fold(DVector::from_element(4, ZERO), |acc, (j, p)| acc + p * root_of_unity(j * r, 3));
            PureState::normalized(space.clone(), amps)
        })
        .collect::<Result<Vec<_>>>()?;
    let set = set(states, "ueb-general")?;
    let verdict = verify_basis(&set, BasisKind::Ueb, &VerifyOptions::default(), &SearchConfig::default())?;
    let primed_matches = v(&local_b[0]).dotc(&v(&local_b_primed[0])).norm() > 1.0 - tol().eps();
    if primed_matches && verdict.outcome != Outcome::Verified {
        return Err(Error::GateFailed { name: "ueb-general".into(), reason: format!("{:?}", verdict.outcome) });
    }
    Ok(GeneralUeb { set, verdict })
}

fn bell_states(d: usize, space: QuditDims) -> Result<Vec<PureState>> {
    let db = space.dims()[1];
    let mut out = Vec::with_capacity(d * d);
    for t in 0..d {
        for k in 0..d {
            let mut amps = DVector::from_element(space.total(), ZERO);
            for j in 0..d {
                amps[j * db + (j + t) % d] = root_of_unity(j * k, d);
            }
            out.push(PureState::normalized(space.clone(), amps)?);
        }
    }
    Ok(out)
}

/// Generalized Bell basis `d^{-1/2} Σ_j ω_d^{jk} |j>|j+t>`, ordered by
/// `t` then `k`.
pub fn bell_meb(d: usize) -> Result<StateSet> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("d = {d} < 2")));
    }
    let space = QuditDims::new(vec![d, d])?;
    gated(set(bell_states(d, space)?, "bell-meb")?, ExpectedKind::Meb)
}

/// The `d⊗d` Bell basis inside `d⊗(d+n)`.
pub fn embed_meb(d: usize, n: usize) -> Result<StateSet> {
    if d < 2 || n == 0 || n >= d {
        return Err(Error::InvalidParameter(format!("need 1 <= n < d, got d = {d}, n = {n}")));
    }
    let space = QuditDims::new(vec![d, d + n])?;
    gated(set(bell_states(d, space)?, "embed-meb")?, ExpectedKind::Umeb)
}

fn four_level(v: &[C64; 4]) -> DVector<C64> {
    DVector::from_column_slice(v)
}

/// `(|0x> ± |1x'>)/√2, (|0x'> ± |1x>)/√2` in 2⊗4.
///
/// `x` and `x'` must be orthonormal and orthogonal to `|0>` and `|1>`; the
/// gate checks that together with the embedded Bell basis they complete an
/// MEB of 2⊗4.
pub fn meb_extension_completion(x: &[C64; 4], x_prime: &[C64; 4]) -> Result<StateSet> {
    let (x, xp) = (four_level(x), four_level(x_prime));
    let e = tol().eps();
    let off_support = x[0].norm() < e && x[1].norm() < e && xp[0].norm() < e && xp[1].norm() < e;
    if !off_support || (x.norm() - 1.0).abs() > e || (xp.norm() - 1.0).abs() > e || x.dotc(&xp).norm() > e {
        return Err(Error::InvalidParameter(
            "extension pair must be orthonormal and orthogonal to the original levels".into(),
        ));
    }
    let space = QuditDims::new(vec![2, 4])?;
    let zero = DVector::from_column_slice(&[ONE, ZERO]);
    let one = DVector::from_column_slice(&[ZERO, ONE]);
    let mut states = Vec::new();
    for (u, w) in [(&x, &xp), (&xp, &x)] {
        for sign in [1.0, -1.0] {
            let amps = (kron(&zero, u) + kron(&one, w) * re(sign)) * re(FRAC_1_SQRT_2);
            states.push(PureState::new(space.clone(), amps)?);
        }
    }
    let extension = set(states, "meb-extension")?;
    let mut union = bell_states(2, space)?;
    union.extend(extension.states().iter().cloned());
    gate(&set(union, "meb-extension-union")?, ExpectedKind::Meb, &SearchConfig::default())?;
    Ok(extension)
}

/// The 2⊗2 Bell basis of [`embed_meb`]`(2, 1)` with `φ+` removed, in 2⊗3.
///
/// Gate: its complement holds exactly one maximally entangled state in any
/// orthogonal family (exact refusal after the first).
pub fn prop2a_set(cfg: &SearchConfig) -> Result<StateSet> {
    let full = embed_meb(2, 1)?;
    let set = full.select(&[1, 2, 3], tol())?.with_name("prop2a-set");
    let cut = Bipartition::bipartite(set.space().clone())?;
    let res = completion_search(&set, &cut, SearchMode::MaxEntangled, cfg)?;
    if res.found.len() != 1 || res.completable != Completable::NoExact {
        return Err(Error::GateFailed {
            name: "prop2a-set".into(),
            reason: format!("found {} maximally entangled states ({:?})", res.found.len(), res.completable),
        });
    }
    Ok(set)
}

/// Three-qubit W-class UEB, unextendible across every cut.
pub fn three_qubit_w_ueb() -> Result<StateSet> {
    let w = root_of_unity(1, 3);
    let w2 = root_of_unity(2, 3);
    let states = vec![
        bits(&[(ONE, "001"), (ONE, "010"), (ONE, "100")]),
        bits(&[(ONE, "001"), (w, "010"), (w2, "100")]),
        bits(&[(ONE, "001"), (w2, "010"), (w, "100")]),
        bits(&[(ONE, "000"), (ONE, "101"), (ONE, "110")]),
        bits(&[(ONE, "000"), (w, "101"), (w2, "110")]),
        bits(&[(ONE, "000"), (w2, "101"), (w, "110")]),
    ];
    gated(set(states, "eq5-w-ueb")?, ExpectedKind::UebAllCuts)
}

/// Four GHZ-class and three W-class states; complement `|111>`.
pub fn three_qubit_mixed_ueb() -> Result<StateSet> {
    let w = root_of_unity(1, 3);
    let w2 = root_of_unity(2, 3);
    let m = -ONE;
    let states = vec![
        bits(&[(ONE, "000"), (ONE, "011"), (ONE, "101"), (ONE, "110")]),
        bits(&[(ONE, "000"), (ONE, "011"), (m, "101"), (m, "110")]),
        bits(&[(ONE, "000"), (m, "011"), (ONE, "101"), (m, "110")]),
        bits(&[(ONE, "000"), (m, "011"), (m, "101"), (ONE, "110")]),
        bits(&[(ONE, "001"), (ONE, "010"), (ONE, "100")]),
        bits(&[(ONE, "001"), (w, "010"), (w2, "100")]),
        bits(&[(ONE, "001"), (w2, "010"), (w, "100")]),
    ];
    gated(set(states, "eq6-mixed-ueb")?, ExpectedKind::UebAllCuts)
}

/// The fifteen four-qubit states in listing order: W-type on weight one,
/// W-type on weight three, GHZ pairs, then the `|0011>, |1100>, |0000>`
/// block.
pub fn four_qubit_ueb() -> Result<StateSet> {
    let mut states = Vec::with_capacity(15);
    states.extend(hadamard_superposition(&["0001", "0010", "0100", "1000"])?.states().iter().cloned());
    states.extend(hadamard_superposition(&["1110", "1101", "1011", "0111"])?.states().iter().cloned());
    for (x, y) in [("0101", "1010"), ("0110", "1001")] {
        states.push(bits(&[(ONE, x), (ONE, y)]));
        states.push(bits(&[(ONE, x), (-ONE, y)]));
    }
    let h = re(FRAC_1_SQRT_2);
    states.push(bits(&[(ONE, "0011"), (ONE, "1100")]));
    states.push(bits(&[(h, "0011"), (-h, "1100"), (ONE, "0000")]));
    states.push(bits(&[(h, "0011"), (-h, "1100"), (-ONE, "0000")]));
    gated(set(states, "appendix-4qubit")?, ExpectedKind::UebAllCuts)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CoeffVariant {
    Dft,
    HadamardIfPowerOfTwo,
}

fn bit_string(x: usize, n: usize) -> String {
    format!("{x:0n$b}")
}

/// The W-type blocks, designated pair and remaining pairs for `n` qubits, as
/// bit strings in emission order.
fn n_qubit_layout(n: usize) -> (Vec<String>, Vec<String>, (String, String), Vec<(String, String)>) {
    let all = (1usize << n) - 1;
    let weight_one: Vec<String> = (0..n).map(|k| bit_string(1 << k, n)).collect();
    let weight_rest: Vec<String> = (0..n).map(|k| bit_string(all ^ (1 << k), n)).collect();
    let mut pairs: Vec<(String, String)> = (1..all)
        .filter(|&x| {
            let w = x.count_ones() as usize;
            w != 1 && w != n - 1 && x < all ^ x
        })
        .map(|x| (bit_string(x, n), bit_string(all ^ x, n)))
        .collect();
    // numeric order equals lexicographic order at fixed width
    pairs.sort();
    let designated = pairs.remove(0);
    (weight_one, weight_rest, designated, pairs)
}

/// `2^n - 1` genuinely entangled `n`-qubit states with complement `|1…1>`.
///
/// Emission order: W-type superposition over weight-one strings, the same over
/// their complements, the three states built on the smallest complementary
/// pair and `|0…0>`, then `(|x> ± |x̄>)/√2` for the remaining pairs.
pub fn n_qubit_ueb(n: usize, variant: CoeffVariant) -> Result<StateSet> {
    if n < 4 {
        return Err(Error::InvalidParameter(format!("n = {n} < 4")));
    }
    if n > 12 {
        return Err(Error::InvalidParameter(format!("n = {n} exceeds the supported 12 qubits")));
    }
    let (w1, wr, (x0, y0), pairs) = n_qubit_layout(n);
    let block = |strings: &[String]| -> Result<StateSet> {
        let refs: Vec<&str> = strings.iter().map(String::as_str).collect();
        match variant {
            CoeffVariant::HadamardIfPowerOfTwo if n.is_power_of_two() => hadamard_superposition(&refs),
            _ => dft_superposition(&refs),
        }
    };
    let mut states = Vec::with_capacity((1 << n) - 1);
    states.extend(block(&w1)?.states().iter().cloned());
    states.extend(block(&wr)?.states().iter().cloned());
    let zeros = "0".repeat(n);
    let h = re(FRAC_1_SQRT_2);
    states.push(bits(&[(ONE, &x0), (ONE, &y0)]));
    states.push(bits(&[(h, &x0), (-h, &y0), (ONE, &zeros)]));
    states.push(bits(&[(h, &x0), (-h, &y0), (-ONE, &zeros)]));
    for (x, y) in &pairs {
        states.push(bits(&[(ONE, x), (ONE, y)]));
        states.push(bits(&[(ONE, x), (-ONE, y)]));
    }
    let set = set(states, "nqubit-ueb")?;
    for (i, p) in set.states().iter().enumerate() {
        if !is_genuinely_entangled(p, tol())? {
            return Err(Error::GateFailed { name: "nqubit-ueb".into(), reason: format!("state {i} is not genuinely entangled") });
        }
    }
    gated(set, ExpectedKind::UebAllCuts)
}
