use std::fs;
use std::path::Path;

use opsys_core::coproduct::{default_ladder, CoproductSystem, LadderOutcome};
use opsys_core::feasibility::FeasibilityOutcome;
use opsys_core::graph_systems::graph_system;
use opsys_core::matrix::{eigvals_hermitian, is_psd, HermitianMatrix};
use opsys_core::{
    build_coproduct, diagonal_expectation, generated_algebra, r_subsystem_demo, DiagonalAlgebra, Error, Graph,
    LinearMatrixMap, MatrixOperatorSystem, MemberVerdict, SolverOptions, Tolerance,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::report::{CheckVerdict, ReportBuilder, RunReport};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(String),
    Verification(String),
    Undecided(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 1,
            Self::Verification(_) => 2,
            Self::Undecided(_) => 3,
            Self::Input(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Usage(m) => write!(f, "usage error: {m}"),
            Self::Input(m) => write!(f, "input error: {m}"),
            Self::Verification(m) => write!(f, "verification failed: {m}"),
            Self::Undecided(m) => write!(f, "undecided: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NumericalFailure(_) | Error::IllConditioned(_) => Self::Undecided(e.to_string()),
            Error::IncompatibleSystems(_) | Error::MapContract(_) => Self::Verification(e.to_string()),
            _ => Self::Input(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Clone, Copy, Debug)]
pub struct Settings {
    pub seed: u64,
    pub opts: SolverOptions,
}

impl Settings {
    pub fn tol(&self) -> Tolerance {
        self.opts.tolerance
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

fn read_input(report: &mut ReportBuilder, path: &Path) -> CliResult<String> {
    let bytes = fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    report.input(&path.display().to_string(), &bytes);
    String::from_utf8(bytes).map_err(|_| CliError::Input(format!("{}: not UTF-8", path.display())))
}

fn write_output(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_system(report: &mut ReportBuilder, path: &Path, s: &Settings) -> CliResult<MatrixOperatorSystem> {
    let text = read_input(report, path)?;
    MatrixOperatorSystem::from_json(&text, &s.tol()).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_matrix(report: &mut ReportBuilder, path: &Path) -> CliResult<HermitianMatrix> {
    let text = read_input(report, path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn cmd_graph(input: &Path, out: Option<&Path>, s: &Settings) -> CliResult<RunReport> {
    let mut report = ReportBuilder::new("graph");
    let text = read_input(&mut report, input)?;
    let g = Graph::parse(&text)?;
    let sys = graph_system(&g);
    let (n, e) = (g.vertex_count(), g.edge_count());
    report.check(
        "dimension",
        CheckVerdict::from_bool(sys.dim() == n + 2 * e),
        json!({"n": n, "edges": e, "dim": sys.dim(), "expected": n + 2 * e}),
    );
    let bimodule = sys.bimodule_check(&DiagonalAlgebra::new(n), 16, &mut s.rng(), &s.tol());
    report.check("bimodule", CheckVerdict::from_bool(bimodule), json!({"trials": 16}));
    if let Some(out) = out {
        write_output(out, &sys.to_json())?;
        let back = MatrixOperatorSystem::from_json(&fs::read_to_string(out).unwrap_or_default(), &s.tol());
        let same = back.map(|b| b.same_span(&sys, &s.tol())).unwrap_or(false);
        report.check("roundtrip", CheckVerdict::from_bool(same), json!({"out": out.display().to_string()}));
    }
    Ok(report.finish())
}

pub fn cmd_build(left: &Path, right: &Path, out: &Path, s: &Settings) -> CliResult<RunReport> {
    let mut report = ReportBuilder::new("build");
    let l = load_system(&mut report, left, s)?;
    let r = load_system(&mut report, right, s)?;
    let cp = build_coproduct(&l, &r, &s.tol())?;
    let expected = l.dim() + r.dim() - cp.n();
    report.check(
        "dimension-formula",
        CheckVerdict::from_bool(cp.dim() == expected),
        json!({"dim": cp.dim(), "left": l.dim(), "right": r.dim(), "n": cp.n(), "expected": expected}),
    );
    let inter = cp.intersection_check();
    report.check("intersection", CheckVerdict::from_bool(inter.holds), json!(inter));
    write_output(out, &cp.to_json())?;
    let back = CoproductSystem::from_json(&fs::read_to_string(out).unwrap_or_default(), &s.tol());
    let same = back.map(|b| b.dim() == cp.dim()).unwrap_or(false);
    report.check("roundtrip", CheckVerdict::from_bool(same), json!({"out": out.display().to_string()}));
    Ok(report.finish())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cone {
    D,
    C,
}

#[derive(Serialize)]
struct TraceEntry {
    eps: f64,
    verdict: opsys_core::Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    gap: Option<f64>,
    iterations: usize,
}

#[derive(Serialize)]
pub struct MemberAnswer {
    verdict: MemberVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<HermitianMatrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<Vec<TraceEntry>>,
}

fn membership_check(v: MemberVerdict) -> CheckVerdict {
    match v {
        MemberVerdict::Member => CheckVerdict::Pass,
        MemberVerdict::NonMember => CheckVerdict::Fail,
        MemberVerdict::Boundary => CheckVerdict::Boundary,
        MemberVerdict::Undecided => CheckVerdict::Undecided,
    }
}

pub fn cmd_member(
    cp_path: &Path,
    level: usize,
    s_path: &Path,
    t_path: &Path,
    cone: Cone,
    st: &Settings,
) -> CliResult<(RunReport, Value)> {
    if level == 0 {
        return Err(CliError::Usage("--level must be positive".into()));
    }
    let mut report = ReportBuilder::new("member");
    let text = read_input(&mut report, cp_path)?;
    let cp = CoproductSystem::from_json(&text, &st.tol()).map_err(|e| CliError::Input(format!("{}: {e}", cp_path.display())))?;
    let s = load_matrix(&mut report, s_path)?;
    let t = load_matrix(&mut report, t_path)?;
    let su = cp.sum().left().level_element(level, s, &st.tol())?;
    let tu = cp.sum().right().level_element(level, t, &st.tol())?;
    let x = cp.quotient_of(&su, &tu)?;
    // Solver witnesses refer to the canonical representative `(s − A*, t + A*)`;
    // report them against the pair as given.
    let offset = x.left().sub(su.block());
    let rebase = |w: Option<HermitianMatrix>| w.map(|w| w.add(&offset));

    let answer = match cone {
        Cone::D => {
            let (verdict, out) = cp.d_cone_verdict(&x, &st.opts)?;
            MemberAnswer {
                verdict,
                witness: rebase(out.witness.clone()),
                gap: out.gap,
                trace: None,
            }
        }
        Cone::C => {
            let LadderOutcome { verdict, trace } = cp.c_cone_member(&x, &default_ladder(), &st.opts)?;
            let last: Option<&FeasibilityOutcome> = trace.last().map(|step| &step.outcome);
            MemberAnswer {
                verdict,
                witness: rebase(last.and_then(|o| o.witness.clone())),
                gap: last.and_then(|o| o.gap),
                trace: Some(
                    trace
                        .iter()
                        .map(|step| TraceEntry {
                            eps: step.eps,
                            verdict: step.outcome.verdict,
                            gap: step.outcome.gap,
                            iterations: step.outcome.iterations,
                        })
                        .collect(),
                ),
            }
        }
    };
    let value = serde_json::to_value(&answer).expect("answer serializes");
    let cone_name = if cone == Cone::D { "d" } else { "c" };
    report.check(
        "membership",
        membership_check(answer.verdict),
        json!({"cone": cone_name, "level": level, "verdict": answer.verdict, "gap": answer.gap}),
    );
    Ok((report.finish(), value))
}

pub fn cmd_demo_paper(s: &Settings) -> CliResult<RunReport> {
    let mut report = ReportBuilder::new("demo-paper");
    demo_checks(&mut report, s)?;
    Ok(report.finish())
}

fn demo_checks(report: &mut ReportBuilder, s: &Settings) -> CliResult<()> {
    let demo = r_subsystem_demo(&s.opts)?;
    report.check(
        "R-subsystem bijection",
        CheckVerdict::from_bool(demo.r_dim == 6 && demo.coproduct_dim == 6 && demo.q_image_dim == 6),
        json!({"dim_R": demo.r_dim, "dim_quotient": demo.coproduct_dim, "dim_q(R)": demo.q_image_dim}),
    );
    let d = &demo.d_cone;
    report.check(
        "coset in D_1",
        CheckVerdict::from_bool(d.is_feasible() && demo.reference_witness_valid),
        json!({"solver": d.verdict, "iterations": d.iterations, "witness_A=I_valid": demo.reference_witness_valid}),
    );
    report.check(
        "coset in C_1",
        membership_check(demo.c_cone),
        json!({"verdict": demo.c_cone}),
    );
    report.check(
        "s+t not positive",
        CheckVerdict::from_bool((demo.direct_sum_min_eigenvalue + 0.5).abs() <= 1e-9),
        json!({"min_eigenvalue": demo.direct_sum_min_eigenvalue}),
    );
    Ok(())
}

fn random_graph(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Graph {
    let mut edges = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            if rng.random_bool(p) {
                edges.push((i, j));
            }
        }
    }
    Graph::new(n, edges).expect("edges lie in range")
}

fn boundary_count(verdicts: &[MemberVerdict]) -> usize {
    verdicts.iter().filter(|v| **v == MemberVerdict::Boundary).count()
}

pub fn cmd_paper_suite(s: &Settings) -> CliResult<RunReport> {
    let mut report = ReportBuilder::new("paper-suite");
    let tol = s.tol();
    let mut rng = s.rng();
    demo_checks(&mut report, s)?;

    let m2 = MatrixOperatorSystem::full(2);
    let cp = build_coproduct(&m2, &m2, &tol)?;
    let inter = cp.intersection_check();
    report.check(
        "intersection M2+M2",
        CheckVerdict::from_bool(inter.holds && inter.intersection_dim == 2),
        json!(inter),
    );

    let mut mismatches = 0;
    for _ in 0..20 {
        let n = rng.random_range(2..=5);
        let a = graph_system(&random_graph(n, 0.5, &mut rng));
        let b = graph_system(&random_graph(n, 0.5, &mut rng));
        let c = build_coproduct(&a, &b, &tol)?;
        mismatches += (c.dim() != a.dim() + b.dim() - n) as usize;
    }
    report.check(
        "dimension formula",
        CheckVerdict::from_bool(mismatches == 0 && cp.dim() == 6),
        json!({"pairs": 20, "mismatches": mismatches, "dim_M2+M2": cp.dim()}),
    );

    // Proximinality: the ladder and the direct cone agree.
    let ladder = default_ladder();
    let (mut disagree, mut undecided, mut verdicts) = (0, 0, Vec::new());
    for q in 0..40 {
        let n = 2 + q % 2;
        let k = 1 + (q / 2) % 2;
        let a = graph_system(&random_graph(n, 0.6, &mut rng));
        let b = graph_system(&random_graph(n, 0.6, &mut rng));
        let c = build_coproduct(&a, &b, &tol)?;
        let mu: f64 = rng.random_range(-0.5..2.5);
        let x = c.quotient(
            &a.random_level_hermitian(k, &mut rng).shift(mu),
            &b.random_level_hermitian(k, &mut rng).shift(mu),
        )?;
        let (d, _) = c.d_cone_verdict(&x, &s.opts)?;
        let cv = c.c_cone_member(&x, &ladder, &s.opts)?.verdict;
        verdicts.extend([d, cv]);
        if d == MemberVerdict::Undecided || cv == MemberVerdict::Undecided {
            undecided += 1;
        } else if d != cv && d != MemberVerdict::Boundary && cv != MemberVerdict::Boundary {
            disagree += 1;
        }
    }
    report.check(
        "proximinality ladder",
        summarize(disagree, undecided),
        json!({"queries": 40, "disagree": disagree, "undecided": undecided, "boundary": boundary_count(&verdicts)}),
    );

    // Embedding order-isomorphism on M_2.
    let (mut violations, mut undecided, mut excluded) = (0, 0, 0);
    for q in 0..40 {
        let k = 1 + q % 2;
        let h = m2.random_level_hermitian(k, &mut rng);
        let min = eigvals_hermitian(&h)?[0];
        let u = h.shift(rng.random_range(-1.0..1.0) - min);
        let lmin = eigvals_hermitian(&u)?[0];
        if lmin.abs() < 10.0 * tol.psd_eps {
            excluded += 1;
            continue;
        }
        let e = cp.embed_left(&m2.level_element(k, u.clone(), &tol)?)?;
        let verdict = cp.c_cone_member(&e, &ladder, &s.opts)?.verdict;
        let expected = if is_psd(&u, &tol)? { MemberVerdict::Member } else { MemberVerdict::NonMember };
        match verdict {
            MemberVerdict::Undecided => undecided += 1,
            MemberVerdict::Boundary => excluded += 1,
            v if v != expected => violations += 1,
            _ => {}
        }
    }
    report.check(
        "embedding order-isomorphism",
        summarize(violations, undecided),
        json!({"samples": 40, "violations": violations, "undecided": undecided, "boundary_excluded": excluded}),
    );

    let phi1 = LinearMatrixMap::identity(&m2);
    let phi2 = diagonal_expectation(2);
    let universal = cp.universal_map(&phi1, &phi2, 200, &mut rng);
    report.check(
        "universal map",
        CheckVerdict::from_bool(universal.is_ok()),
        json!({"error": universal.err().map(|e| e.to_string())}),
    );

    for (name, sys, expected) in [
        ("C*(S_K3)", graph_system(&Graph::complete(3)), 9),
        ("C*(S_P4)", graph_system(&Graph::path(4)), 16),
        ("C*(D_3)", DiagonalAlgebra::new(3).as_system(), 3),
    ] {
        let alg = generated_algebra(&sys, &tol)?;
        report.check(
            &format!("generated algebra {name}"),
            CheckVerdict::from_bool(alg.dim() == expected),
            json!({"dim": alg.dim(), "expected": expected}),
        );
    }
    Ok(report.finish())
}

fn summarize(failures: usize, undecided: usize) -> CheckVerdict {
    if failures > 0 {
        CheckVerdict::Fail
    } else if undecided > 0 {
        CheckVerdict::Undecided
    } else {
        CheckVerdict::Pass
    }
}
