//! Engines against their brute-force references.

use radperc::bits::BitMask;
use radperc::clifford::{conjugate, evolve_otoc_with, CircuitParams, TwoQubitClifford};
use radperc::dp::{branching_probs, run_with, InitialCondition, QuditDim};
use radperc::oracle::{
    dense_commutes, dense_conjugate, exact_density, CliffordCatalog, FullTableau, Script,
};
use radperc::pauli::{rank_restricted, PauliLetter, PauliString};
use radperc::rng::stream;
use radperc::stabilizer::{GeneratorSet, InitCase, Region};
use rand::Rng;

fn random_string<R: Rng>(n: usize, rng: &mut R) -> PauliString {
    let mut s = PauliString::identity(n);
    for i in 0..n {
        s.set(i, PauliLetter::ALL[rng.random_range(0..4)]);
    }
    s
}

#[test]
fn symplectic_conjugation_matches_dense_matrices() {
    let catalog = CliffordCatalog::build();
    let mut rng = stream(100, 0);
    for _ in 0..100 {
        let g = TwoQubitClifford::sample(&mut rng);
        let n = rng.random_range(2..=3);
        let i = rng.random_range(0..n);
        let j = (i + rng.random_range(1..n)) % n;
        let s = random_string(n, &mut rng);
        assert_eq!(
            conjugate(&s, &g, (i, j)).unwrap(),
            dense_conjugate(&catalog, &g, (i, j), &s).unwrap(),
            "{s} on ({i},{j})"
        );
    }
}

#[test]
fn commutation_matches_dense_matrices() {
    for n in 1..=3 {
        let all: Vec<PauliString> = (0..4usize.pow(n as u32))
            .map(|code| {
                let mut s = PauliString::identity(n);
                for i in 0..n {
                    s.set(i, PauliLetter::ALL[(code >> (2 * i)) & 3]);
                }
                s
            })
            .collect();
        for a in &all {
            for b in &all {
                assert_eq!(
                    a.commutes(b).unwrap(),
                    dense_commutes(a, b).unwrap(),
                    "{a} {b}"
                );
            }
        }
    }
}

fn as_span_equal(a: &[PauliString], b: &[PauliString]) -> bool {
    let Some(w) = a.first().or(b.first()).map(PauliString::width) else {
        return true;
    };
    let all = BitMask::ones(w);
    let ra = rank_restricted(a, &all);
    let rb = rank_restricted(b, &all);
    let rab = rank_restricted(a.iter().chain(b), &all);
    ra == rb && rb == rab
}

#[test]
fn partial_tracking_matches_full_tableau() {
    for case in [
        InitCase::MixedS2MixedE,
        InitCase::PureS2MixedE,
        InitCase::PureAll,
    ] {
        for r in 0..100u64 {
            let mut rng = stream(200, r);
            let k = 1 + (r as usize % 8);
            let p = [0.05, 0.15, 0.3, 0.6][r as usize % 4];
            let script = Script::random(8, p, 12, &mut rng);
            let mut g = GeneratorSet::init(case, 8, k).unwrap();
            let mut t = FullTableau::init(case, 8, k).unwrap();
            script.run_generators(&mut g).unwrap();
            script.run_tableau(&mut t).unwrap();
            g.check_invariants().unwrap();
            for region in Region::ALL {
                assert_eq!(
                    g.entropy(region),
                    t.entropy(region),
                    "{case} r={r} {region:?}"
                );
                assert_eq!(
                    g.entropy(region),
                    g.entropy_by_subgroup(region),
                    "{case} r={r} {region:?}"
                );
            }
            assert_eq!(g.decode_fidelity(), t.decode_fidelity(), "{case} r={r}");
            assert!(as_span_equal(g.as_rows(), &t.as_subgroup()), "{case} r={r}");
        }
    }
}

#[test]
fn long_scripts_keep_the_as_span() {
    for case in [
        InitCase::MixedS2MixedE,
        InitCase::PureS2MixedE,
        InitCase::PureAll,
    ] {
        let mut rng = stream(201, 0);
        let script = Script::random(8, 0.1, 100, &mut rng);
        let mut g = GeneratorSet::init(case, 8, 3).unwrap();
        let mut t = FullTableau::init(case, 8, 3).unwrap();
        script.run_generators(&mut g).unwrap();
        script.run_tableau(&mut t).unwrap();
        assert!(as_span_equal(g.as_rows(), &t.as_subgroup()), "{case}");
    }
}

/// Mean and standard error of per-trajectory values.
fn stats(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

#[test]
fn particle_process_matches_exact_markov_chain() {
    let n = 6;
    let t_max = 12;
    let trials = 20_000;
    for q in [QuditDim::Finite(2), QuditDim::Infinite] {
        for p in [0.2, 0.5] {
            let params = branching_probs(q, p).unwrap();
            let init = InitialCondition::SingleSite(0);
            let exact = exact_density(n, q, p, &init, t_max).unwrap();
            let mut dens = vec![vec![0.0; trials]; t_max + 1];
            let mut alive = vec![vec![0.0; trials]; t_max + 1];
            for i in 0..trials {
                run_with(
                    &init,
                    &params,
                    n,
                    t_max,
                    &mut stream(300, i as u64),
                    |t, occ| {
                        dens[t][i] = occ.count_ones() as f64 / n as f64;
                        alive[t][i] = f64::from(u8::from(occ.any()));
                    },
                )
                .unwrap();
            }
            for t in 1..=t_max {
                let (m, s) = stats(&dens[t]);
                assert!(
                    (m - exact.rho[t]).abs() <= 4.0 * s + 1e-12,
                    "q={q} p={p} t={t}: {m} vs {}",
                    exact.rho[t]
                );
                let (m, s) = stats(&alive[t]);
                assert!(
                    (m - exact.surv[t]).abs() <= 4.0 * s + 1e-12,
                    "q={q} p={p} t={t}"
                );
            }
        }
    }
}

#[test]
fn clifford_occupations_follow_the_particle_process() {
    let n = 16;
    let depth = 32;
    let trials = 20_000;
    for p in [0.1, 0.25] {
        let params = CircuitParams::new(n, p, depth, 0).unwrap();
        let branching = branching_probs(QuditDim::Finite(2), p).unwrap();
        let mut cl = vec![vec![0.0; trials]; depth + 1];
        let mut dp = vec![vec![0.0; trials]; depth + 1];
        for i in 0..trials {
            evolve_otoc_with(&params, &mut stream(400, i as u64), |t, occ: &BitMask| {
                cl[t][i] = occ.count_ones() as f64;
            });
            run_with(
                &InitialCondition::SingleSite(0),
                &branching,
                n,
                depth,
                &mut stream(401, i as u64),
                |t, occ| {
                    dp[t][i] = occ.count_ones() as f64;
                },
            )
            .unwrap();
        }
        for t in [1, 2, 4, 8, 16, 32] {
            let (a, sa) = stats(&cl[t]);
            let (b, sb) = stats(&dp[t]);
            let sigma = (sa * sa + sb * sb).sqrt();
            assert!(
                (a - b).abs() <= 4.0 * sigma,
                "p={p} t={t}: {a} vs {b} ± {sigma}"
            );
        }
    }
}
