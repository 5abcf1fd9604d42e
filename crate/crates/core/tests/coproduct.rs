mod common;

use common::random_graph;
use opsys_core::coproduct::{default_ladder, CoproductSystem};
use opsys_core::feasibility::{project_block_diagonal, solve, FeasibilityProblem, SolverOptions, Verdict};
use opsys_core::graph_systems::graph_system;
use opsys_core::matrix::{HermitianMatrix, Tolerance};
use opsys_core::{build_coproduct, DiagonalAlgebra, Error, Graph, MatrixOperatorSystem, MemberVerdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tol() -> Tolerance {
    Tolerance::default()
}

fn opts() -> SolverOptions {
    SolverOptions::default()
}

fn random_pair(n: usize, rng: &mut ChaCha8Rng) -> (MatrixOperatorSystem, MatrixOperatorSystem, CoproductSystem) {
    let s = graph_system(&random_graph(n, 0.5, rng));
    let t = graph_system(&random_graph(n, 0.5, rng));
    let cp = build_coproduct(&s, &t, &tol()).unwrap();
    (s, t, cp)
}

/// Random hermitian element of `M_k(D_n)`.
fn random_block_diagonal(k: usize, n: usize, rng: &mut ChaCha8Rng) -> HermitianMatrix {
    let h = common::random_hermitian_uniform(k * n, 1.0, rng);
    project_block_diagonal(h.as_matrix(), n)
}

#[test]
fn kernel_elements_vanish_in_the_quotient() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for q in 0..20 {
        let n = 2 + q % 3;
        let (_, _, cp) = random_pair(n, &mut rng);
        let coords: Vec<f64> = (0..cp.kernel().dim()).map(|_| rng.random_range(-2.0..2.0)).collect();
        let j = cp.kernel().element(&coords);
        let (l, r) = opsys_core::coproduct::split(&j, n);
        assert!(cp.quotient(&l, &r).unwrap().norm() < 1e-12);
        // Kernel elements are a ⊕ −a with a diagonal.
        assert!(l.add(&r).frobenius_norm() < 1e-12);
        assert!(l.sub(&project_block_diagonal(l.as_matrix(), n)).frobenius_norm() < 1e-12);
    }
}

#[test]
fn quotient_map_is_positive() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for q in 0..100 {
        let n = 2 + q % 2;
        let k = 1 + (q / 2) % 2;
        let (s_sys, t_sys, cp) = random_pair(n, &mut rng);
        let s = s_sys.random_psd_level(k, &mut rng).unwrap();
        let t = t_sys.random_psd_level(k, &mut rng).unwrap();
        let out = cp.d_cone_member(&s, &t, &opts()).unwrap();
        assert_eq!(out.verdict, Verdict::Feasible, "query {q}");
    }
}

#[test]
fn quotient_ignores_diagonal_transfers() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for q in 0..40 {
        let n = 2 + q % 3;
        let k = 1 + q % 2;
        let (s_sys, t_sys, cp) = random_pair(n, &mut rng);
        let s = s_sys.random_level_hermitian(k, &mut rng);
        let t = t_sys.random_level_hermitian(k, &mut rng);
        let a = random_block_diagonal(k, n, &mut rng);
        let x = cp.quotient(&s, &t).unwrap();
        let y = cp.quotient(&s.add(&a), &t.sub(&a)).unwrap();
        assert!(x.distance(&y) < 1e-12);
    }
}

#[test]
fn embeddings_agree_on_the_diagonal() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    for q in 0..20 {
        let n = 2 + q % 3;
        let k = 1 + q % 2;
        let (s_sys, t_sys, cp) = random_pair(n, &mut rng);
        let d = random_block_diagonal(k, n, &mut rng);
        let l = cp.embed_left(&s_sys.level_element(k, d.clone(), &tol()).unwrap()).unwrap();
        let r = cp.embed_right(&t_sys.level_element(k, d, &tol()).unwrap()).unwrap();
        assert!(l.distance(&r) < 1e-12);
    }
}

#[test]
fn canonical_representative_is_nearest() {
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    for q in 0..30 {
        let n = 2 + q % 2;
        let k = 1 + q % 2;
        let (s_sys, t_sys, cp) = random_pair(n, &mut rng);
        let s = s_sys.random_level_hermitian(k, &mut rng);
        let t = t_sys.random_level_hermitian(k, &mut rng);
        let x = cp.quotient(&s, &t).unwrap();
        let best = x.norm();
        for _ in 0..20 {
            let a = random_block_diagonal(k, n, &mut rng).scale(rng.random_range(0.0..2.0));
            let other = x.left().add(&a).direct_sum(&x.right().sub(&a)).frobenius_norm();
            assert!(best <= other + 1e-12);
        }
    }
}

#[test]
fn coproduct_dimension_and_roundtrip() {
    let mut rng = ChaCha8Rng::seed_from_u64(36);
    for q in 0..10 {
        let n = 2 + q % 3;
        let (s, t, cp) = random_pair(n, &mut rng);
        assert_eq!(cp.dim(), s.dim() + t.dim() - n);
        let back = CoproductSystem::from_json(&cp.to_json(), &tol()).unwrap();
        assert_eq!(back.dim(), cp.dim());
        assert_eq!(back.n(), n);
    }
}

#[test]
fn unit_is_an_interior_member() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let (_, _, cp) = random_pair(3, &mut rng);
    for k in 1..=2 {
        let (verdict, _) = cp.d_cone_verdict(&cp.coset_unit(k), &opts()).unwrap();
        assert_eq!(verdict, MemberVerdict::Member);
        let ladder = cp.c_cone_member(&cp.coset_unit(k), &default_ladder(), &opts()).unwrap();
        assert_eq!(ladder.verdict, MemberVerdict::Member);
        assert_eq!(ladder.trace.len(), default_ladder().len());
    }
}

#[test]
fn negative_unit_is_a_non_member() {
    let mut rng = ChaCha8Rng::seed_from_u64(38);
    let (_, _, cp) = random_pair(2, &mut rng);
    let minus = HermitianMatrix::identity(2).scale(-1.0);
    let x = cp.quotient(&minus, &minus).unwrap();
    assert_eq!(cp.d_cone_verdict(&x, &opts()).unwrap().0, MemberVerdict::NonMember);
    assert_eq!(cp.c_cone_member(&x, &default_ladder(), &opts()).unwrap().verdict, MemberVerdict::NonMember);
}

#[test]
fn mismatched_factors_are_rejected() {
    let a = graph_system(&Graph::path(2));
    let b = graph_system(&Graph::path(3));
    assert!(build_coproduct(&a, &b, &tol()).is_err());
    // A system that is not a D_n-bimodule is rejected too.
    let mut rng = ChaCha8Rng::seed_from_u64(39);
    let g = vec![common::random_complex(2, 2, &mut rng)];
    let generic = opsys_core::make_system(2, &g).unwrap();
    assert!(build_coproduct(&generic, &a, &tol()).is_err());
}

#[test]
fn embeddings_check_membership() {
    let s = graph_system(&Graph::empty(2));
    let cp = build_coproduct(&s, &s, &tol()).unwrap();
    let full = MatrixOperatorSystem::full(2);
    let off = common::random_hermitian_uniform(2, 1.0, &mut ChaCha8Rng::seed_from_u64(40));
    let u = full.level_element(1, off, &tol()).unwrap();
    assert!(matches!(cp.embed_left(&u), Err(Error::NotInSystem(_))));
}

#[test]
fn diagonal_congruence_preserves_the_cone() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut checked = 0;
    for q in 0..40 {
        let n = 2 + q % 2;
        let k = 1 + q % 2;
        let m = 1 + (q / 2) % 2;
        let (s_sys, t_sys, cp) = random_pair(n, &mut rng);
        let s = s_sys.random_level_hermitian(k, &mut rng).shift(1.5);
        let t = t_sys.random_level_hermitian(k, &mut rng).shift(1.5);
        let p = FeasibilityProblem::new(k, n, s.clone(), t.clone(), 0.0).unwrap();
        let Some(a) = solve(&p, &opts()).unwrap().witness else { continue };
        checked += 1;
        let x = DiagonalAlgebra::new(n).random_block(m, k, &mut rng);
        let (xs, xt, xa) = (s.congruence(&x).unwrap(), t.congruence(&x).unwrap(), a.congruence(&x).unwrap());
        // The transported witness stays in M_m(D_n) and certifies the image.
        assert!(xa.sub(&project_block_diagonal(xa.as_matrix(), n)).frobenius_norm() < 1e-12);
        let image = FeasibilityProblem::new(m, n, xs.clone(), xt.clone(), 0.0).unwrap();
        assert!(image.witness_valid(&xa, &tol()).unwrap());
        assert!(cp.quotient(&xs, &xt).is_ok());
    }
    assert!(checked >= 15, "only {checked} feasible draws");
}
