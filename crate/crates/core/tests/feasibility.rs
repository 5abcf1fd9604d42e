mod common;

use common::random_hermitian_uniform;
use opsys_core::feasibility::{brute_force_2x2, solve, FeasibilityProblem, SolverOptions, Verdict};
use opsys_core::matrix::{HermitianMatrix, Tolerance};
use opsys_core::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn opts() -> SolverOptions {
    SolverOptions::default()
}

fn problem(s: &HermitianMatrix, t: &HermitianMatrix, level: usize, n: usize, eps: f64) -> FeasibilityProblem {
    FeasibilityProblem::new(level, n, s.clone(), t.clone(), eps).unwrap()
}

// Both blocks are lifted by a common shift so that feasible and infeasible
// draws come in comparable numbers.
#[test]
fn agrees_with_oracle_on_balanced_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let (mut decisive, mut feasible, mut infeasible) = (0, 0, 0);
    for _ in 0..100 {
        let mu: f64 = rng.random_range(0.0..1.5);
        let s = random_hermitian_uniform(2, 1.0, &mut rng).shift(mu);
        let t = random_hermitian_uniform(2, 1.0, &mut rng).shift(mu);
        let dyk = solve(&problem(&s, &t, 1, 2, 0.0), &opts()).unwrap();
        let brute = brute_force_2x2(&s, &t, 400).unwrap();
        if dyk.is_decisive() && brute.is_decisive() {
            decisive += 1;
            assert_eq!(dyk.verdict, brute.verdict, "s = {s:?}, t = {t:?}");
        }
        match brute.verdict {
            Verdict::Feasible => feasible += 1,
            Verdict::Infeasible => infeasible += 1,
            Verdict::Undecided => {}
        }
    }
    assert!(decisive >= 90, "only {decisive} decisive");
    assert!(feasible >= 20 && infeasible >= 20, "{feasible} feasible, {infeasible} infeasible");
}

#[test]
fn witnesses_are_valid() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let tol = Tolerance::default();
    let mut checked = 0;
    for q in 0..60 {
        let (k, n) = [(1, 2), (2, 2), (1, 3), (2, 3)][q % 4];
        let d = k * n;
        let s = random_hermitian_uniform(d, 1.0, &mut rng).shift(2.0);
        let t = random_hermitian_uniform(d, 1.0, &mut rng).shift(2.0);
        let p = problem(&s, &t, k, n, 0.0);
        let out = solve(&p, &opts()).unwrap();
        if let Some(w) = &out.witness {
            checked += 1;
            assert!(p.witness_valid(w, &tol).unwrap());
            // The witness lies in M_k(D_n): entries off the i ≡ j (mod n) pattern vanish.
            for i in 0..d {
                for j in 0..d {
                    if i % n != j % n {
                        assert_eq!(w.as_matrix()[(i, j)].norm(), 0.0);
                    }
                }
            }
        }
    }
    assert!(checked >= 20, "only {checked} feasible draws");
}

#[test]
fn infeasible_when_blocks_sum_is_not_psd() {
    // (S + A) + (T − A) = S + T, so a negative direction of S + T is fatal.
    let s = HermitianMatrix::diag(&[-2.0, 1.0]);
    let t = HermitianMatrix::diag(&[1.0, 1.0]);
    let out = solve(&problem(&s, &t, 1, 2, 0.0), &opts()).unwrap();
    assert_eq!(out.verdict, Verdict::Infeasible);
    assert!(out.gap.unwrap() > 0.1);
}

#[test]
fn rejects_bad_problems() {
    let i2 = HermitianMatrix::identity(2);
    let i3 = HermitianMatrix::identity(3);
    assert!(matches!(FeasibilityProblem::new(1, 2, i2.clone(), i3, 0.0), Err(Error::ShapeMismatch { .. })));
    assert!(FeasibilityProblem::new(1, 2, i2.clone(), i2.clone(), -1.0).is_err());
    assert!(FeasibilityProblem::new(1, 2, i2.clone(), i2.clone(), f64::NAN).is_err());
    assert!(FeasibilityProblem::new(0, 2, i2.clone(), i2, 0.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // Raising the shift only enlarges the feasible set.
    #[test]
    fn feasibility_is_monotone_in_the_shift(seed in any::<u64>(), eps in 0.0f64..0.5, extra in 0.01f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_hermitian_uniform(4, 1.0, &mut rng).shift(0.5);
        let t = random_hermitian_uniform(4, 1.0, &mut rng).shift(0.5);
        let lo = solve(&problem(&s, &t, 2, 2, eps), &opts()).unwrap();
        let hi = solve(&problem(&s, &t, 2, 2, eps + extra), &opts()).unwrap();
        if lo.verdict == Verdict::Feasible {
            prop_assert_ne!(hi.verdict, Verdict::Infeasible);
        }
        if hi.verdict == Verdict::Infeasible {
            prop_assert_ne!(lo.verdict, Verdict::Feasible);
        }
    }

    // The cone is invariant under positive scaling.
    #[test]
    fn feasibility_is_scale_invariant(seed in any::<u64>(), c in 0.1f64..10.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mu: f64 = rng.random_range(0.0..1.5);
        let s = random_hermitian_uniform(2, 1.0, &mut rng).shift(mu);
        let t = random_hermitian_uniform(2, 1.0, &mut rng).shift(mu);
        let a = solve(&problem(&s, &t, 1, 2, 0.0), &opts()).unwrap();
        let b = solve(&problem(&s.scale(c), &t.scale(c), 1, 2, 0.0), &opts()).unwrap();
        if a.is_decisive() && b.is_decisive() {
            prop_assert_eq!(a.verdict, b.verdict);
        }
    }
}
