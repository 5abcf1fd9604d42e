//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any failure.

mod common;

use std::time::{Duration, Instant};

use opsys_core::coproduct::{counterexample_pair, default_ladder, CoproductSystem};
use opsys_core::feasibility::{brute_force_2x2, solve, FeasibilityProblem, SolverOptions, Verdict};
use opsys_core::graph_systems::{diagonal_expectation, generated_algebra, graph_system, Graph};
use opsys_core::matrix::{eigvals_hermitian, is_psd, min_eigenvalue, ComplexMatrix, HermitianMatrix, Tolerance};
use opsys_core::operator_system::{DiagonalAlgebra, LevelElement, MatrixOperatorSystem};
use opsys_core::{build_coproduct, LinearMatrixMap, MemberVerdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn run(id: &str, title: &str, budget: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let in_time = budget.is_none_or(|b| elapsed <= b);
    let pass = out.pass && in_time;
    let budget_note = budget.map_or(String::new(), |b| format!(" (budget {:.0?})", b));
    println!(
        "[{}] criterion {id}: {title}: {}; {:.2?}{budget_note}",
        if pass { "PASS" } else { "FAIL" },
        out.detail,
        elapsed
    );
    pass
}

fn tol() -> Tolerance {
    Tolerance::default()
}

fn opts() -> SolverOptions {
    SolverOptions::default()
}

fn m2() -> MatrixOperatorSystem {
    MatrixOperatorSystem::full(2)
}

fn criterion_1() -> Outcome {
    let (s, t) = counterexample_pair();
    let cp = build_coproduct(&m2(), &m2(), &tol()).unwrap();
    let sl = m2().level_element(1, s.clone(), &tol()).unwrap();
    let tl = m2().level_element(1, t.clone(), &tol()).unwrap();
    let out = cp.d_cone_member(&sl, &tl, &opts()).unwrap();

    // Reference witness A = I₂, checked on closed forms and eigenvalues.
    let s_plus = s.shift(1.0);
    let t_minus = t.shift(-1.0);
    let s_plus_min = min_eigenvalue(&s_plus).unwrap();
    let t_minus_psd = is_psd(&t_minus, &tol()).unwrap();
    let reference_ok = (s_plus_min - 0.5).abs() <= 1e-12 && t_minus_psd;
    let solver_witness_ok = out
        .witness
        .as_ref()
        .map(|a| FeasibilityProblem::new(1, 2, s.clone(), t.clone(), 0.0).unwrap().witness_valid(a, &tol()).unwrap())
        .unwrap_or(false);

    let sum_psd = is_psd(&s.direct_sum(&t), &tol()).unwrap();
    let sum_min = min_eigenvalue(&s.direct_sum(&t)).unwrap();

    let pass = out.verdict == Verdict::Feasible
        && solver_witness_ok
        && reference_ok
        && !sum_psd
        && (sum_min + 0.5).abs() <= 1e-9;
    Outcome {
        pass,
        detail: format!(
            "d-cone {:?} in {} iters, λ_min(s+I) = {s_plus_min:.12}, s⊕t PSD = {sum_psd}, λ_min(s⊕t) = {sum_min:.12}",
            out.verdict, out.iterations
        ),
    }
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut failures = Vec::new();
    for trial in 0..20 {
        let n = rng.random_range(2..=5);
        let g1 = common::random_graph(n, 0.5, &mut rng);
        let g2 = common::random_graph(n, 0.5, &mut rng);
        let (s, t) = (graph_system(&g1), graph_system(&g2));
        let cp = build_coproduct(&s, &t, &tol()).unwrap();
        let expected = s.dim() + t.dim() - n;
        let by_edges = (n + 2 * g1.edge_count()) + (n + 2 * g2.edge_count()) - n;
        if cp.dim() != expected || expected != by_edges {
            failures.push(format!("trial {trial}: n={n} got {} expected {expected}", cp.dim()));
        }
    }
    let m2_dim = build_coproduct(&m2(), &m2(), &tol()).unwrap().dim();
    Outcome {
        pass: failures.is_empty() && m2_dim == 6,
        detail: format!("20 random pairs, {} mismatches; dim M₂ ⊕_D₂ M₂ = {m2_dim}", failures.len()),
    }
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    // Plain draws are almost all infeasible; a shifted second batch covers the other side.
    let mut tally = |shifted: bool| {
        let (mut decisive, mut opposite, mut feasible) = (0, 0, 0);
        for _ in 0..50 {
            let mu = if shifted { rng.random_range(0.0..6.0) } else { 0.0 };
            let s = common::random_hermitian_uniform(2, 3.0, &mut rng).shift(mu);
            let t = common::random_hermitian_uniform(2, 3.0, &mut rng).shift(mu);
            let dyk = solve(&FeasibilityProblem::new(1, 2, s.clone(), t.clone(), 0.0).unwrap(), &opts()).unwrap();
            let brute = brute_force_2x2(&s, &t, 400).unwrap();
            if dyk.is_decisive() && brute.is_decisive() {
                decisive += 1;
                if dyk.verdict != brute.verdict {
                    opposite += 1;
                }
            }
            if brute.is_feasible() {
                feasible += 1;
            }
        }
        (decisive, opposite, feasible)
    };
    let (d1, o1, f1) = tally(false);
    let (d2, o2, f2) = tally(true);
    Outcome {
        pass: o1 + o2 == 0 && d1 >= 45 && d2 >= 45 && f1 + f2 >= 20,
        detail: format!(
            "plain {d1}/50 decisive ({f1} feasible), shifted {d2}/50 decisive ({f2} feasible), {} opposite verdicts",
            o1 + o2
        ),
    }
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let ladder = default_ladder();
    let (mut agree, mut boundary, mut members, mut strict) = (0, 0, 0, Vec::new());
    for q in 0..100 {
        let n = if q % 2 == 0 { 2 } else { 3 };
        let k = 1 + (q / 2) % 2;
        let s_sys = graph_system(&common::random_graph(n, 0.6, &mut rng));
        let t_sys = graph_system(&common::random_graph(n, 0.6, &mut rng));
        let cp = build_coproduct(&s_sys, &t_sys, &tol()).unwrap();
        let mu: f64 = rng.random_range(-0.5..2.5);
        let s = s_sys.random_level_hermitian(k, &mut rng).shift(mu);
        let t = t_sys.random_level_hermitian(k, &mut rng).shift(mu);
        let x = cp.quotient(&s, &t).unwrap();
        let (d, _) = cp.d_cone_verdict(&x, &opts()).unwrap();
        let c = cp.c_cone_member(&x, &ladder, &opts()).unwrap().verdict;
        if d == MemberVerdict::Member {
            members += 1;
        }
        if c == d && matches!(d, MemberVerdict::Member | MemberVerdict::NonMember) {
            agree += 1;
        } else if d == MemberVerdict::Boundary || c == MemberVerdict::Boundary {
            boundary += 1;
        } else {
            strict.push(format!("q{q} (n={n}, k={k}): d={d:?} c={c:?}"));
        }
    }
    Outcome {
        pass: strict.is_empty(),
        detail: format!(
            "{agree} agree ({members} members), {boundary} boundary, {} violations {:?}",
            strict.len(),
            strict
        ),
    }
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let cp = build_coproduct(&m2(), &m2(), &tol()).unwrap();
    let ladder = default_ladder();
    let (mut checked, mut excluded, mut violations, mut psd_count) = (0, 0, 0, 0);
    for i in 0..100 {
        let k = 1 + i % 2;
        let h = m2().random_level_hermitian(k, &mut rng);
        let lmin = min_eigenvalue(&h).unwrap();
        let delta: f64 = rng.random_range(-1.0..1.0);
        let u = h.shift(delta - lmin);
        let vals = eigvals_hermitian(&u).unwrap();
        let norm = vals.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if vals[0].abs() < 10.0 * tol().psd_slack(norm) {
            excluded += 1;
            continue;
        }
        checked += 1;
        let positive = is_psd(&u, &tol()).unwrap();
        psd_count += positive as usize;
        let e = cp.embed_left(&m2().level_element(k, u, &tol()).unwrap()).unwrap();
        let member = cp.c_cone_member(&e, &ladder, &opts()).unwrap().verdict;
        let expected = if positive { MemberVerdict::Member } else { MemberVerdict::NonMember };
        if member != expected {
            violations += 1;
        }
    }
    Outcome {
        pass: violations == 0,
        detail: format!("{checked} checked ({psd_count} PSD), {excluded} boundary-excluded, {violations} violations"),
    }
}

fn criterion_6() -> Outcome {
    let cp = build_coproduct(&m2(), &m2(), &tol()).unwrap();
    let phi1 = LinearMatrixMap::identity(&m2());
    let phi2 = diagonal_expectation(2);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let phi = cp.universal_map(&phi1, &phi2, 100, &mut rng).unwrap();

    let unit_err = (&phi.apply_coset(&cp.coset_unit(1), &tol()).unwrap() - &ComplexMatrix::identity(2)).frobenius_norm();

    let mut compose_err: f64 = 0.0;
    let mut probes: Vec<HermitianMatrix> = m2().basis().to_vec();
    for _ in 0..20 {
        probes.push(m2().random_hermitian(&mut rng));
    }
    for u in &probes {
        let lu = LevelElement::new(2, 1, u.clone()).unwrap();
        let left = phi.apply_coset(&cp.embed_left(&lu).unwrap(), &tol()).unwrap();
        let right = phi.apply_coset(&cp.embed_right(&lu).unwrap(), &tol()).unwrap();
        compose_err = compose_err
            .max((&left - &phi1.apply(u.as_matrix(), &tol()).unwrap()).frobenius_norm())
            .max((&right - &phi2.apply(u.as_matrix(), &tol()).unwrap()).frobenius_norm());
    }

    let kpos = phi.lifted().sampled_kpositive(2, 500, &mut rng, &tol()).unwrap();
    let bimodule = phi.lifted().bimodule_map_check(&tol()).unwrap();

    let pass = unit_err < 1e-10 && compose_err < 1e-10 && kpos.passed() && bimodule;
    Outcome {
        pass,
        detail: format!(
            "‖Φ(1) − I‖ = {unit_err:.1e}, max ‖Φ∘i − φ‖ = {compose_err:.1e}, 2-positive(500) = {}, bimodule = {bimodule}",
            kpos.passed()
        ),
    }
}

fn criterion_7() -> Outcome {
    let cp: CoproductSystem = build_coproduct(&m2(), &m2(), &tol()).unwrap();
    let rep = cp.intersection_check();

    // a ⊕ −a has spectrum {±a_i}, so λ_min = −max|a_i| exactly.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut purity = true;
    for n in 1..=4 {
        let kernel = opsys_core::coproduct::KernelJ::new(n);
        let mut samples: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        for _ in 0..25 {
            samples.push((0..n).map(|_| rng.random_range(-2.0..2.0)).collect());
        }
        for a in samples {
            let el = kernel.element(&a);
            let min = min_eigenvalue(&el).unwrap();
            let max_abs = a.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            let psd = is_psd(&el, &tol()).unwrap();
            if psd != (max_abs == 0.0) || (min + max_abs).abs() > 1e-14 {
                purity = false;
            }
        }
        if !is_psd(&kernel.element(&vec![0.0; n]), &tol()).unwrap() {
            purity = false;
        }
    }

    let k3 = generated_algebra(&graph_system(&Graph::complete(3)), &tol()).unwrap();
    let d3 = generated_algebra(&DiagonalAlgebra::new(3).as_system(), &tol()).unwrap();
    let k3_full = k3.same_span(&MatrixOperatorSystem::full(3), &tol());
    let pass = rep.holds && rep.intersection_dim == 2 && purity && k3.dim() == 9 && k3_full && d3.dim() == 3;
    Outcome {
        pass,
        detail: format!(
            "i₁(S)∩i₂(T) = D₂: {} (dim {}), kernel purity: {purity}, dim C*(S_K₃) = {}, dim C*(D₃) = {}",
            rep.holds,
            rep.intersection_dim,
            k3.dim(),
            d3.dim()
        ),
    }
}

fn main() {
    let results = [
        run("1", "counterexample reproduction", Some(Duration::from_secs(1)), criterion_1),
        run("2", "dimension formula", Some(Duration::from_secs(5)), criterion_2),
        run("3", "Dykstra vs brute-force oracle", Some(Duration::from_secs(10)), criterion_3),
        run("4", "proximinality over D₂, D₃", Some(Duration::from_secs(60)), criterion_4),
        run("5", "embedding order-isomorphism", None, criterion_5),
        run("6", "universal map contract", None, criterion_6),
        run("7", "structural identities", None, criterion_7),
    ];
    let finite_ok = results[1] && results[6];
    println!(
        "[{}] criterion 8: excluded infinite-dimensional claims: not reproduced; finite ingredients (dimension formula, generated algebra) {}",
        if finite_ok { "PASS" } else { "FAIL" },
        if finite_ok { "verified by criteria 2 and 7" } else { "NOT verified" }
    );
    let failed = results.iter().filter(|&&p| !p).count() + usize::from(!finite_ok);
    println!("acceptance: {} of 8 criteria passed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
