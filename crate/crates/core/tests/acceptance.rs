//! Acceptance harness: one PASS/FAIL line per criterion.

use std::f64::consts::FRAC_1_SQRT_2;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use entbasis::analysis::{
    count_product_states_2d_2x2, max_orthogonal_set, max_schmidt_rank_in_subspace, maximize_entropy,
    only_product_across_cut, verify_basis, BasisKind, Grade, Outcome, ProductCount, SearchConfig, SearchMode,
    VerifyOptions,
};
use entbasis::constructions::{
    bell_meb, embed_meb, four_qubit_ueb, meb_extension_completion, n_qubit_ueb, prop2a_set, three_qubit_mixed_ueb,
    three_qubit_w_ueb, two_qubit_ueb_fourier, two_qubit_ueb_general, two_qubit_ueb_real, CoeffVariant, QubitPair,
};
use entbasis::cuts::{is_genuinely_entangled, is_maximally_entangled, is_product, reduced_density_matrix, Bipartition};
use entbasis::locc::{all_cut_indistinguishability_flag, walgate_flag, ProjectionResult};
use entbasis::slocc::{classify_three_qubit, ghz_w_range_witness, resource_dimension_flag, w_state, SloccClass};
use entbasis::state::{orthonormalize, span_equal, PureState, QuditDims, StateSet, Subspace, Tolerance, C64, ONE, ZERO};

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn tol() -> Tolerance {
    Tolerance::default()
}

fn cfg() -> SearchConfig {
    SearchConfig::default()
}

fn ket(s: &str) -> PureState {
    PureState::from_bits(&[(ONE, s)]).unwrap()
}

fn ray(p: PureState) -> Subspace {
    Subspace::from_orthonormal(p.space().clone(), vec![p], tol()).unwrap()
}

fn within(elapsed: Duration, limit: f64) -> Check {
    let s = elapsed.as_secs_f64();
    if s < limit {
        Ok(format!("{s:.2}s < {limit}s"))
    } else {
        Err(format!("took {s:.2}s, limit {limit}s"))
    }
}

fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> DVector<C64> {
    DVector::from_fn(n, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

fn unit(rng: &mut ChaCha8Rng, n: usize) -> DVector<C64> {
    gaussian(rng, n).normalize()
}

fn orthonormal_pair(rng: &mut ChaCha8Rng) -> QubitPair {
    let a = unit(rng, 2);
    let phase = C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
    [[a[0], a[1]], [-a[1].conj() * phase, a[0].conj() * phase]]
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let real = two_qubit_ueb_real().map_err(|e| e.to_string())?;
    let fourier = two_qubit_ueb_fourier().map_err(|e| e.to_string())?;
    for set in [&real, &fourier] {
        let v = verify_basis(set, BasisKind::Ueb, &VerifyOptions::default(), &cfg()).unwrap();
        ensure!((v.outcome, v.grade) == (Outcome::Verified, Grade::Exact), "{:?} {:?}", v.outcome, v.grade);
        ensure!(v.complement_dim() == 1, "complement dim {}", v.complement_dim());
        ensure!(span_equal(&v.complement, &ray(ket("11")), tol()).unwrap(), "complement is not |11>");
    }
    ensure!(span_equal(&real.span(), &fourier.span(), tol()).unwrap(), "spans differ");
    within(start.elapsed(), 1.0)
}

fn criterion_2() -> Check {
    let start = Instant::now();
    let cut = Bipartition::bipartite(QuditDims::qubits(2)).unwrap();
    for seed in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = orthonormal_pair(&mut rng);
        let b = orthonormal_pair(&mut rng);
        let phase = C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
        let b_primed: QubitPair = [b[0], [b[1][0] * phase, b[1][1] * phase]];
        let g = two_qubit_ueb_general(&a, &b, &b_primed).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure!(g.set.len() == 3, "seed {seed}: {} states", g.set.len());
        ensure!(g.verdict.outcome == Outcome::Verified, "seed {seed}: {:?}", g.verdict.outcome);
        let c = &g.verdict.complement;
        ensure!(c.dim() == 1 && is_product(&c.basis()[0], &cut, tol()).unwrap(), "seed {seed}: complement not a product ray");
        ensure!(walgate_flag(&ProjectionResult::unprojected(&g.set).unwrap(), tol()).unwrap(), "seed {seed}: walgate flag false");
    }
    within(start.elapsed(), 10.0).map(|t| format!("200 seeds, {t}"))
}

fn criterion_3() -> Check {
    let start = Instant::now();
    for d in 2..=4 {
        for n in 1..d {
            let s = embed_meb(d, n).map_err(|e| e.to_string())?;
            let v = verify_basis(&s, BasisKind::Umeb, &VerifyOptions::default(), &cfg()).unwrap();
            ensure!((v.outcome, v.grade) == (Outcome::Verified, Grade::Exact), "d={d} n={n}: {:?} {:?}", v.outcome, v.grade);
            let cut = Bipartition::bipartite(s.space().clone()).unwrap();
            let est = max_schmidt_rank_in_subspace(&v.complement, &cut, &cfg()).unwrap();
            ensure!(est.max_found == n, "d={d} n={n}: max rank {}", est.max_found);
        }
    }
    within(start.elapsed(), 10.0)
}

fn criterion_4() -> Check {
    let x = [ZERO, ZERO, ONE, ZERO];
    let xp = [ZERO, ZERO, ZERO, ONE];
    let ext = meb_extension_completion(&x, &xp).map_err(|e| e.to_string())?;
    let space = QuditDims::new(vec![2, 4]).unwrap();
    let mut all: Vec<PureState> = bell_meb(2)
        .unwrap()
        .states()
        .iter()
        .map(|p| {
            let a = p.amps();
            PureState::from_slice(space.clone(), &[a[0], a[1], ZERO, ZERO, a[2], a[3], ZERO, ZERO]).unwrap()
        })
        .collect();
    all.extend(ext.states().iter().cloned());
    ensure!(all.len() == 8, "{} states", all.len());
    let cut = Bipartition::bipartite(space.clone()).unwrap();
    let mut worst = 0.0f64;
    for (i, p) in all.iter().enumerate() {
        ensure!(is_maximally_entangled(p, &cut, tol()).unwrap(), "state {i} not maximally entangled");
        for q in &all[i + 1..] {
            worst = worst.max(p.inner(q).unwrap().norm());
        }
    }
    ensure!(worst < 1e-9, "overlap {worst:e}");
    let set = StateSet::new(space, all, tol()).unwrap();
    let v = verify_basis(&set, BasisKind::Umeb, &VerifyOptions::default(), &cfg()).unwrap();
    ensure!(v.outcome == Outcome::CompleteBasis, "{:?}", v.outcome);
    Ok(format!("max overlap {worst:.1e}"))
}

fn criterion_5() -> Check {
    let start = Instant::now();
    let set = prop2a_set(&cfg()).map_err(|e| e.to_string())?;
    let comp = set.complement();
    let cut = Bipartition::bipartite(set.space().clone()).unwrap();
    let phi = PureState::from_slice(
        set.space().clone(),
        &[C64::new(FRAC_1_SQRT_2, 0.0), ZERO, ZERO, ZERO, C64::new(FRAC_1_SQRT_2, 0.0), ZERO],
    )
    .unwrap();
    let me = max_orthogonal_set(&comp, &cut, SearchMode::MaxEntangled, &cfg()).unwrap();
    ensure!(me.states.len() == 1, "{} maximally entangled states", me.states.len());
    let f = me.states[0].fidelity(&phi).unwrap();
    ensure!(f > 1.0 - 1e-9, "fidelity {f}");
    let ent = max_orthogonal_set(&comp, &cut, SearchMode::Entangled, &cfg()).unwrap();
    ensure!(ent.states.len() == 3 && ent.remainder.dim() == 0, "{} entangled states", ent.states.len());
    let mut full = set.states().to_vec();
    full.extend(ent.states.iter().cloned());
    ensure!(StateSet::new(set.space().clone(), full, tol()).unwrap().complement().dim() == 0, "not a full basis");
    within(start.elapsed(), 5.0).map(|t| format!("fidelity {f:.15}, {t}"))
}

fn criterion_6() -> Check {
    let s = three_qubit_w_ueb().map_err(|e| e.to_string())?;
    let v = verify_basis(&s, BasisKind::UebAllCuts, &VerifyOptions::default(), &cfg()).unwrap();
    ensure!((v.outcome, v.grade) == (Outcome::Verified, Grade::Exact), "{:?} {:?}", v.outcome, v.grade);
    ensure!(v.per_cut.len() == 3 && v.per_cut.iter().all(|c| c.grade == Grade::Exact), "per-cut grades");
    ensure!(s.len() == 6, "{} states", s.len());
    for (i, p) in s.states().iter().enumerate() {
        ensure!(is_genuinely_entangled(p, tol()).unwrap(), "state {i} not genuinely entangled");
        let l = classify_three_qubit(p, tol()).unwrap();
        ensure!(l.tangle < 1e-8 && l.class == SloccClass::WClass, "state {i}: {} tau {}", l.class.label(), l.tangle);
    }
    Ok("6 W-class states".into())
}

fn criterion_7() -> Check {
    let s = three_qubit_mixed_ueb().map_err(|e| e.to_string())?;
    let v = verify_basis(&s, BasisKind::UebAllCuts, &VerifyOptions::default(), &cfg()).unwrap();
    ensure!((v.outcome, v.grade) == (Outcome::Verified, Grade::Exact), "{:?} {:?}", v.outcome, v.grade);
    let labels: Vec<_> = s.states().iter().map(|p| classify_three_qubit(p, tol()).unwrap()).collect();
    let ghz = labels.iter().filter(|l| l.class == SloccClass::GhzClass && (l.tangle - 1.0).abs() < 1e-8).count();
    let w = labels.iter().filter(|l| l.class == SloccClass::WClass).count();
    ensure!((ghz, w) == (4, 3), "{ghz} GHZ, {w} W");
    ensure!(resource_dimension_flag(&s, tol()).unwrap(), "resource flag false");
    let flags = all_cut_indistinguishability_flag(&s, None, None, tol()).unwrap();
    for f in &flags {
        ensure!(f.indistinguishable, "party {} not flagged", f.lone_party);
        ensure!(f.probabilities.len() == 3, "party {}: probabilities {:?}", f.lone_party, f.probabilities);
        for (p, e) in f.probabilities.iter().zip([1.0, 1.0, 5.0 / 6.0]) {
            ensure!((p - e).abs() < 1e-9, "party {}: probabilities {:?}", f.lone_party, f.probabilities);
        }
    }
    let five = s.select(&[0, 1, 2, 3, 4], tol()).unwrap();
    let flags5 = all_cut_indistinguishability_flag(&five, None, None, tol()).unwrap();
    ensure!(flags5.iter().all(|f| f.indistinguishable), "first five states not flagged");
    Ok("4 GHZ + 3 W, flags on all cuts".into())
}

fn criterion_8() -> Check {
    let w = three_qubit_w_ueb().map_err(|e| e.to_string())?.len();
    let m = three_qubit_mixed_ueb().map_err(|e| e.to_string())?.len();
    ensure!((w, m) == (6, 7), "cardinalities {w}, {m}");
    Ok("6 and 7".into())
}

fn criterion_9() -> Check {
    let listing = four_qubit_ueb().map_err(|e| e.to_string())?;
    let generated = n_qubit_ueb(4, CoeffVariant::HadamardIfPowerOfTwo).map_err(|e| e.to_string())?;
    let order: Vec<usize> = (0..8).chain(12..15).chain(8..12).collect();
    let mut worst = 1.0f64;
    for (g, &l) in generated.states().iter().zip(&order) {
        worst = worst.min(g.fidelity(&listing.states()[l]).unwrap());
    }
    ensure!(worst > 1.0 - 1e-12, "min fidelity {worst}");
    let mut timing = String::new();
    for n in [5, 6] {
        let start = Instant::now();
        let s = n_qubit_ueb(n, CoeffVariant::Dft).map_err(|e| e.to_string())?;
        let v = verify_basis(&s, BasisKind::UebAllCuts, &VerifyOptions::default(), &cfg()).unwrap();
        ensure!((v.outcome, v.grade) == (Outcome::Verified, Grade::Exact), "n={n}: {:?} {:?}", v.outcome, v.grade);
        ensure!(v.per_cut.len() == (1 << (n - 1)) - 1, "n={n}: {} cuts", v.per_cut.len());
        if n == 6 {
            ensure!(s.len() == 63, "{} states", s.len());
            timing = within(start.elapsed(), 60.0)?;
        }
    }
    Ok(format!("N=4 min fidelity {worst:.15}, N=6 {timing}"))
}

fn criterion_10() -> Check {
    for n in 3..=8 {
        let w = ghz_w_range_witness(n, tol()).unwrap();
        ensure!(w.succeeds(), "N={n}: W {:?}, GHZ {:?}", w.w_count, w.ghz_count);
        let rho = reduced_density_matrix(&w_state(n).unwrap(), &[0, 1]).unwrap();
        let mut expect = DMatrix::from_element(4, 4, ZERO);
        // (2|psi+><psi+| + (N-2)|00><00|) / N with psi+ on indices 1 and 2
        for (r, c) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            expect[(r, c)] = C64::new(1.0 / n as f64, 0.0);
        }
        expect[(0, 0)] = C64::new((n - 2) as f64 / n as f64, 0.0);
        let err = (rho - expect).iter().map(|z| z.norm()).fold(0.0, f64::max);
        ensure!(err < 1e-8, "N={n}: reduced W state off by {err:e}");
    }
    Ok("N = 3..8".into())
}

/// Test-side entanglement search: random points of the subspace, largest
/// second singular value of the reshaped vector.
fn oracle_entangled(s: &Subspace, db: usize, rng: &mut ChaCha8Rng) -> bool {
    (0..16).any(|_| {
        let c = unit(rng, s.dim());
        let v = s.basis().iter().zip(c.iter()).fold(DVector::from_element(2 * db, ZERO), |acc, (b, x)| acc + b.amps() * *x);
        let m = DMatrix::from_fn(2, db, |r, col| v[r * db + col]);
        m.singular_values()[1] > 1e-6
    })
}

#[derive(Clone, Copy, Debug)]
enum Family {
    Haar,
    ProductRay,
    FixedA,
    FixedB,
    TwoProducts,
    ProductPlusTilt,
}

fn random_subspace(rng: &mut ChaCha8Rng, db: usize, family: Family) -> (Subspace, Option<bool>) {
    let space = QuditDims::new(vec![2, db]).unwrap();
    let kr = |a: &DVector<C64>, b: &DVector<C64>| DVector::from_fn(2 * db, |i, _| a[i / db] * b[i % db]);
    let (vectors, only_product): (Vec<DVector<C64>>, Option<bool>) = match family {
        Family::Haar => {
            let k = rng.random_range(1..2 * db);
            ((0..k).map(|_| gaussian(rng, 2 * db)).collect(), None)
        }
        Family::ProductRay => (vec![kr(&unit(rng, 2), &unit(rng, db))], Some(true)),
        Family::FixedA => {
            let a = unit(rng, 2);
            let k = rng.random_range(1..=db);
            ((0..k).map(|_| kr(&a, &gaussian(rng, db))).collect(), Some(true))
        }
        Family::FixedB => {
            let b = unit(rng, db);
            let k = rng.random_range(1..=2);
            ((0..k).map(|_| kr(&gaussian(rng, 2), &b)).collect(), Some(true))
        }
        Family::TwoProducts => (
            vec![kr(&unit(rng, 2), &unit(rng, db)), kr(&unit(rng, 2), &unit(rng, db))],
            Some(false),
        ),
        Family::ProductPlusTilt => {
            let a = unit(rng, 2);
            let a_perp = DVector::from_column_slice(&[-a[1].conj(), a[0].conj()]);
            let k = rng.random_range(1..db);
            let mut v: Vec<DVector<C64>> = (0..k).map(|_| kr(&a, &gaussian(rng, db))).collect();
            v.push(kr(&a_perp, &unit(rng, db)));
            (v, Some(false))
        }
    };
    (orthonormalize(&vectors, &space, tol()), only_product)
}

/// Distinct projective roots of `det(x M1 + M2)` from three sample values.
fn brute_force_count(m1: &DMatrix<C64>, m2: &DMatrix<C64>) -> ProductCount {
    let det = |x: C64| {
        let m = m1 * x + m2;
        m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
    };
    let (f0, f1, fm) = (det(ZERO), det(ONE), det(-ONE));
    let a = (f1 + fm) / 2.0 - f0;
    let b = (f1 - fm) / 2.0;
    let c = f0;
    let scale = a.norm().max(b.norm()).max(c.norm());
    if scale < 1e-12 {
        return ProductCount::Infinite;
    }
    let (a, b, c) = (a / scale, b / scale, c / scale);
    let roots: Vec<DVector<C64>> = if a.norm() < 1e-12 {
        // infinity is a root; b x + c gives the other unless b vanishes
        if b.norm() < 1e-12 {
            vec![DVector::from_column_slice(&[ONE, ZERO])]
        } else {
            vec![DVector::from_column_slice(&[ONE, ZERO]), DVector::from_column_slice(&[-c / b, ONE])]
        }
    } else {
        let disc = (b * b - a * c * 4.0).sqrt();
        let r1 = (-b + disc) / (a * 2.0);
        let r2 = (-b - disc) / (a * 2.0);
        vec![DVector::from_column_slice(&[r1, ONE]).normalize(), DVector::from_column_slice(&[r2, ONE]).normalize()]
    };
    // roots are distinct iff the projective points differ
    let distinct = roots.len() == 2 && roots[0].dotc(&roots[1]).norm() < 1.0 - 1e-6;
    for r in &roots {
        let m = m1 * r[0] + m2 * r[1];
        let sv = m.singular_values();
        assert!(sv[1] < 1e-6 * sv[0].max(1e-300), "root is not a product vector");
    }
    if distinct {
        ProductCount::Two
    } else {
        ProductCount::One
    }
}

fn structured_two_plane(rng: &mut ChaCha8Rng, want: ProductCount) -> Subspace {
    let space = QuditDims::qubits(2);
    let u = |rng: &mut ChaCha8Rng| {
        let p = orthonormal_pair(rng);
        DMatrix::from_fn(2, 2, |r, c| p[c][r])
    };
    let (ua, ub) = (u(rng), u(rng));
    let local = |v: [C64; 4]| {
        let m = DMatrix::from_fn(2, 2, |r, c| v[2 * r + c]);
        let t = &ua * m * ub.transpose();
        DVector::from_fn(4, |i, _| t[(i / 2, i % 2)])
    };
    let vectors = match want {
        ProductCount::Infinite => vec![local([ONE, ZERO, ZERO, ZERO]), local([ZERO, ONE, ZERO, ZERO])],
        _ => vec![local([ONE, ZERO, ZERO, ZERO]), local([ZERO, ONE, ONE, ZERO])],
    };
    orthonormalize(&vectors, &space, tol())
}

fn criterion_11() -> Check {
    let start = Instant::now();
    let families = [
        Family::Haar,
        Family::ProductRay,
        Family::FixedA,
        Family::FixedB,
        Family::TwoProducts,
        Family::ProductPlusTilt,
    ];
    let mut only_product_cases = 0;
    for i in 0..500u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + i);
        let db = [2, 3, 4][(i % 3) as usize];
        let family = families[(i / 3) as usize % families.len()];
        let (s, truth) = random_subspace(&mut rng, db, family);
        let cut = Bipartition::bipartite(s.space().clone()).unwrap();
        let exact = only_product_across_cut(&s, &cut, tol()).unwrap();
        let oracle = oracle_entangled(&s, db, &mut rng);
        let search_cfg = cfg().with_starts(16).with_seed(i);
        let best = maximize_entropy(&s, &cut, &search_cfg).unwrap().into_iter().map(|(_, h)| h).fold(0.0, f64::max);
        let searched = best > 1e-6;
        ensure!(exact != oracle, "case {i} ({family:?}, 2x{db}): only-product {exact}, oracle entangled {oracle}");
        ensure!(exact != searched, "case {i} ({family:?}, 2x{db}): only-product {exact}, entropy search {best:e}");
        if let Some(t) = truth {
            ensure!(t == exact, "case {i} ({family:?}): expected only-product {t}");
        }
        only_product_cases += exact as usize;
    }
    let mut tally = [0usize; 3];
    for i in 0..500u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(5000 + i);
        let s = match i % 5 {
            0 => structured_two_plane(&mut rng, ProductCount::Infinite),
            1 => structured_two_plane(&mut rng, ProductCount::One),
            _ => random_subspace(&mut rng, 2, Family::Haar).0,
        };
        let s = if s.dim() == 2 {
            s
        } else {
            orthonormalize(&[gaussian(&mut rng, 4), gaussian(&mut rng, 4)], &QuditDims::qubits(2), tol())
        };
        let m: Vec<DMatrix<C64>> =
            s.basis().iter().map(|b| DMatrix::from_fn(2, 2, |r, c| b.amps()[2 * r + c])).collect();
        let brute = brute_force_count(&m[0], &m[1]);
        let lib = count_product_states_2d_2x2(&s, tol()).unwrap();
        ensure!(lib == brute, "count case {i}: library {lib:?}, brute force {brute:?}");
        match lib {
            ProductCount::One => tally[0] += 1,
            ProductCount::Two => tally[1] += 1,
            ProductCount::Infinite => tally[2] += 1,
            ProductCount::ZeroImpossible => return Err(format!("count case {i}: zero products in a 2x2 plane")),
        }
    }
    let t = start.elapsed().as_secs_f64();
    Ok(format!(
        "500 subspaces ({only_product_cases} only-product), 500 planes (ONE {}, TWO {}, INFINITE {}), {t:.2}s",
        tally[0], tally[1], tally[2]
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 11] = [
        ("two-qubit UEBs verify exactly with complement |11>", criterion_1),
        ("general two-qubit UEB over 200 seeds", criterion_2),
        ("embedded Bell bases are exact UMEBs", criterion_3),
        ("2x4 extension completes an MEB", criterion_4),
        ("Bell complement in 2x3: one ME state, three entangled", criterion_5),
        ("W-type UEB across all cuts", criterion_6),
        ("mixed GHZ/W UEB, labels and flags", criterion_7),
        ("three-qubit cardinalities 6 and 7", criterion_8),
        ("n-qubit generator", criterion_9),
        ("GHZ/W range witness", criterion_10),
        ("oracle equivalence suite", criterion_11),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match result {
            Ok(detail) => println!("PASS criterion {}: {name} ({detail})", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {}: {name} ({detail})", k + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
