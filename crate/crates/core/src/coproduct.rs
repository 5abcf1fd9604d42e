//! The amalgamated coproduct `S ⊕_{D_n} T`, realized as the quotient of
//! `S ⊕ T ⊆ M_{2n}` by `J = {a ⊕ −a : a ∈ D_n}`.
//!
//! Cosets are represented canonically by their Frobenius-orthogonal
//! projection off `J`. Level-`k` cosets are pairs of `kn×kn` blocks (the
//! canonical shuffle of `M_k(S ⊕ T)`), and `M_k(J)` is `{(A, −A) : A ∈ M_k(D_n)}`.
//! The quotient cones are decided by [`crate::feasibility`]:
//!
//! * `D_k`: some `A ∈ M_k(D_n)_h` makes `s + A ⪰ 0` and `t − A ⪰ 0`;
//! * `C_k`: the same with `s + ε·I`, `t + ε·I` for every `ε` on a ladder.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cp_maps::{DiagonalAction, LinearMatrixMap};
use crate::error::{shape, Error, Result};
use crate::feasibility::{self, project_block_diagonal, FeasibilityOutcome, FeasibilityProblem, SolverOptions, Verdict};
use crate::matrix::{eig_hermitian, min_eigenvalue, ComplexMatrix, HermitianMatrix, Tolerance};
use crate::operator_system::{DiagonalAlgebra, LevelElement, MatrixOperatorSystem, SystemSpec};
use crate::subspace::RealSubspace;

/// Bimodule spot-check trials run when a coproduct is built.
const BUILD_BIMODULE_TRIALS: usize = 8;

/// `S ⊕ T` as block-diagonal matrices in `M_{2n}`.
#[derive(Clone, Debug)]
pub struct DirectSumSystem {
    left: MatrixOperatorSystem,
    right: MatrixOperatorSystem,
    ambient: MatrixOperatorSystem,
}

impl DirectSumSystem {
    pub fn new(left: MatrixOperatorSystem, right: MatrixOperatorSystem, tol: &Tolerance) -> Result<Self> {
        let n = left.ambient_dim();
        if right.ambient_dim() != n {
            return Err(Error::IncompatibleSystems(format!(
                "left system lives in M_{n}, right in M_{}",
                right.ambient_dim()
            )));
        }
        let zero = HermitianMatrix::zeros(n);
        let gens: Vec<_> = left
            .basis()
            .iter()
            .map(|b| b.direct_sum(&zero).into_matrix())
            .chain(right.basis().iter().map(|c| zero.direct_sum(c).into_matrix()))
            .collect();
        let ambient = MatrixOperatorSystem::new(2 * n, &gens, tol)?.with_label(format!("{} ⊕ {}", left.label(), right.label()));
        Ok(Self { left, right, ambient })
    }

    pub fn left(&self) -> &MatrixOperatorSystem {
        &self.left
    }

    pub fn right(&self) -> &MatrixOperatorSystem {
        &self.right
    }

    pub fn ambient(&self) -> &MatrixOperatorSystem {
        &self.ambient
    }

    pub fn n(&self) -> usize {
        self.left.ambient_dim()
    }
}

/// `J = {a ⊕ −a : a ∈ D_n}` with orthonormal basis `(E_ii ⊕ −E_ii)/√2`.
#[derive(Clone, Debug)]
pub struct KernelJ {
    n: usize,
    span: RealSubspace,
}

impl KernelJ {
    pub fn new(n: usize) -> Self {
        let basis = (0..n)
            .map(|i| {
                let mut d = vec![0.0; 2 * n];
                d[i] = std::f64::consts::FRAC_1_SQRT_2;
                d[n + i] = -std::f64::consts::FRAC_1_SQRT_2;
                HermitianMatrix::diag(&d)
            })
            .collect();
        Self {
            n,
            span: RealSubspace::from_orthonormal(2 * n, basis),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &[HermitianMatrix] {
        self.span.basis()
    }

    pub fn dim(&self) -> usize {
        self.span.len()
    }

    /// `a ⊕ −a` for a real diagonal `a`.
    pub fn element(&self, a: &[f64]) -> HermitianMatrix {
        let neg: Vec<f64> = a.iter().map(|x| -x).collect();
        HermitianMatrix::diag(a).direct_sum(&HermitianMatrix::diag(&neg))
    }
}

/// A level-`k` coset, held by its canonical representative `(left, right)`.
#[derive(Clone, Debug)]
pub struct CosetElement {
    level: usize,
    n: usize,
    left: HermitianMatrix,
    right: HermitianMatrix,
}

impl CosetElement {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn left(&self) -> &HermitianMatrix {
        &self.left
    }

    pub fn right(&self) -> &HermitianMatrix {
        &self.right
    }

    /// Frobenius distance between canonical representatives.
    pub fn distance(&self, other: &CosetElement) -> f64 {
        if self.level != other.level || self.n != other.n {
            return f64::INFINITY;
        }
        let l = self.left.sub(&other.left).frobenius_norm();
        let r = self.right.sub(&other.right).frobenius_norm();
        (l * l + r * r).sqrt()
    }

    pub fn norm(&self) -> f64 {
        (self.left.frobenius_norm().powi(2) + self.right.frobenius_norm().powi(2)).sqrt()
    }

    /// Level-1 representative as a block-diagonal matrix in `M_{2n}`.
    pub fn as_direct_sum(&self) -> HermitianMatrix {
        self.left.direct_sum(&self.right)
    }
}

/// Verdict of a quotient-cone membership query.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MemberVerdict {
    Member,
    NonMember,
    /// Within the boundary slack of the cone; not forced either way.
    Boundary,
    Undecided,
}

#[derive(Clone, Debug, Serialize)]
pub struct LadderStep {
    pub eps: f64,
    pub outcome: FeasibilityOutcome,
}

#[derive(Clone, Debug, Serialize)]
pub struct LadderOutcome {
    pub verdict: MemberVerdict,
    pub trace: Vec<LadderStep>,
}

/// `{1e-1, 1e-2, …, 1e-6}`.
pub fn default_ladder() -> Vec<f64> {
    (1..=6).map(|e| 10f64.powi(-e)).collect()
}

#[derive(Clone, Debug)]
pub struct CoproductSystem {
    sum: DirectSumSystem,
    kernel: KernelJ,
    coset_span: RealSubspace,
    tol: Tolerance,
}

/// JSON form of a built coproduct.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoproductSpec {
    pub n: usize,
    pub left: SystemSpec,
    pub right: SystemSpec,
    pub dim: usize,
    pub kernel_dim: usize,
    pub coset_basis: Vec<HermitianMatrix>,
}

/// Builds `S ⊕_{D_n} T`; both systems must be `D_n`-bimodules in `M_n`.
pub fn build_coproduct(
    left: &MatrixOperatorSystem,
    right: &MatrixOperatorSystem,
    tol: &Tolerance,
) -> Result<CoproductSystem> {
    let n = left.ambient_dim();
    if right.ambient_dim() != n {
        return Err(Error::IncompatibleSystems(format!(
            "systems live in M_{n} and M_{}",
            right.ambient_dim()
        )));
    }
    let alg = DiagonalAlgebra::new(n);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for sys in [left, right] {
        if !sys.bimodule_check(&alg, BUILD_BIMODULE_TRIALS, &mut rng, tol) {
            return Err(Error::IncompatibleSystems(format!(
                "`{}` is not a D_{n}-bimodule",
                sys.label()
            )));
        }
    }
    let sum = DirectSumSystem::new(left.clone(), right.clone(), tol)?;
    let kernel = KernelJ::new(n);

    let mut all = kernel.span.clone();
    let mut complement = Vec::new();
    for b in sum.ambient.basis() {
        let before = all.len();
        if all.push(b, tol.subspace_eps) {
            complement.push(all.basis()[before].clone());
        }
    }
    if all.len() != sum.ambient.dim() {
        return Err(Error::IncompatibleSystems(format!(
            "J is not contained in S ⊕ T (span grew to {} from {})",
            all.len(),
            sum.ambient.dim()
        )));
    }
    Ok(CoproductSystem {
        sum,
        kernel,
        coset_span: RealSubspace::from_orthonormal(2 * n, complement),
        tol: *tol,
    })
}

impl CoproductSystem {
    pub fn n(&self) -> usize {
        self.sum.n()
    }

    /// Complex dimension of the quotient.
    pub fn dim(&self) -> usize {
        self.coset_span.len()
    }

    pub fn sum(&self) -> &DirectSumSystem {
        &self.sum
    }

    pub fn kernel(&self) -> &KernelJ {
        &self.kernel
    }

    pub fn coset_basis(&self) -> &[HermitianMatrix] {
        self.coset_span.basis()
    }

    pub fn tolerance(&self) -> &Tolerance {
        &self.tol
    }

    /// Quotient map at level `k` on a pair of `kn×kn` hermitian blocks.
    pub fn quotient(&self, s: &HermitianMatrix, t: &HermitianMatrix) -> Result<CosetElement> {
        let n = self.n();
        if s.dim() != t.dim() || !s.dim().is_multiple_of(n) || s.dim() == 0 {
            return Err(shape(format!("pair of kn×kn blocks (n = {n})"), format!("{} and {}", s.dim(), t.dim())));
        }
        let half = &s.as_matrix().scale(0.5) - &t.as_matrix().scale(0.5);
        let a = project_block_diagonal(&half, n);
        Ok(CosetElement {
            level: s.dim() / n,
            n,
            left: s.sub(&a),
            right: t.add(&a),
        })
    }

    /// Quotient of level elements of `S` and `T`, checked for membership.
    pub fn quotient_of(&self, s: &LevelElement, t: &LevelElement) -> Result<CosetElement> {
        self.check_pair(s, t)?;
        self.quotient(s.block(), t.block())
    }

    /// Coset unit `(I ⊕ I) + J` at level `k`.
    pub fn coset_unit(&self, k: usize) -> CosetElement {
        let i = HermitianMatrix::identity(k * self.n());
        self.quotient(&i, &i).expect("identity blocks have matching shape")
    }

    /// `i₁(u) = 2·q(u ⊕ 0)`.
    pub fn embed_left(&self, u: &LevelElement) -> Result<CosetElement> {
        self.check_member(&self.sum.left, u)?;
        let zero = HermitianMatrix::zeros(u.block().dim());
        self.quotient(&u.block().scale(2.0), &zero)
    }

    /// `i₂(u) = 2·q(0 ⊕ u)`.
    pub fn embed_right(&self, u: &LevelElement) -> Result<CosetElement> {
        self.check_member(&self.sum.right, u)?;
        let zero = HermitianMatrix::zeros(u.block().dim());
        self.quotient(&zero, &u.block().scale(2.0))
    }

    fn check_member(&self, sys: &MatrixOperatorSystem, u: &LevelElement) -> Result<()> {
        if u.block_size() != self.n() || !sys.contains_level(u.block().as_matrix(), u.level(), &self.tol)? {
            return Err(Error::NotInSystem(sys.label().to_string()));
        }
        Ok(())
    }

    fn check_pair(&self, s: &LevelElement, t: &LevelElement) -> Result<()> {
        if s.level() != t.level() {
            return Err(shape(format!("level {}", s.level()), format!("level {}", t.level())));
        }
        self.check_member(&self.sum.left, s)?;
        self.check_member(&self.sum.right, t)
    }

    fn problem(&self, x: &CosetElement, eps: f64) -> Result<FeasibilityProblem> {
        FeasibilityProblem::new(x.level, self.n(), x.left.clone(), x.right.clone(), eps)
    }

    /// `D_k` membership of `q(s ⊕ t)`.
    pub fn d_cone_member(&self, s: &LevelElement, t: &LevelElement, opts: &SolverOptions) -> Result<FeasibilityOutcome> {
        self.check_pair(s, t)?;
        let p = FeasibilityProblem::new(s.level(), self.n(), s.block().clone(), t.block().clone(), 0.0)?;
        feasibility::solve(&p, opts)
    }

    /// `D_k` membership of a coset, through its canonical representative.
    pub fn d_cone_member_coset(&self, x: &CosetElement, opts: &SolverOptions) -> Result<FeasibilityOutcome> {
        feasibility::solve(&self.problem(x, 0.0)?, opts)
    }

    /// `D_k` verdict with boundary classification.
    ///
    /// A feasible query whose blocks, shrunk by the boundary slack
    /// `10·psd_eps·(1 + ‖·‖)`, become infeasible is `Boundary`; so is an
    /// infeasible one whose gap cannot certify a margin beyond that slack.
    pub fn d_cone_verdict(&self, x: &CosetElement, opts: &SolverOptions) -> Result<(MemberVerdict, FeasibilityOutcome)> {
        let p = self.problem(x, 0.0)?;
        let out = feasibility::solve(&p, opts)?;
        let slack = self.boundary_slack(x, opts);
        let verdict = match out.verdict {
            Verdict::Feasible => {
                if feasibility::solve_offset(&p, -slack, opts)?.is_feasible() {
                    MemberVerdict::Member
                } else {
                    MemberVerdict::Boundary
                }
            }
            Verdict::Infeasible => self.classify_gap(x, out.gap, slack),
            Verdict::Undecided => {
                if feasibility::solve_offset(&p, slack, opts)?.is_feasible() {
                    MemberVerdict::Boundary
                } else {
                    MemberVerdict::Undecided
                }
            }
        };
        Ok((verdict, out))
    }

    /// `C_k` membership: `D_k` membership after adding `ε·(I ⊕ I)` for every
    /// `ε` of the ladder.
    ///
    /// Feasibility is monotone in `ε`, so an infeasible rung settles the
    /// query at once, and an undecided rung is skipped: it is implied by any
    /// later (smaller) feasible rung. Only the last rung being undecided
    /// leaves the verdict open. Rungs are expected in decreasing order.
    pub fn c_cone_member(&self, x: &CosetElement, ladder: &[f64], opts: &SolverOptions) -> Result<LadderOutcome> {
        let mut trace = Vec::with_capacity(ladder.len());
        let slack = self.boundary_slack(x, opts);
        for &eps in ladder {
            if eps.is_nan() || eps <= 0.0 {
                return Err(Error::InvalidInput(format!("ladder entries must be positive, got {eps}")));
            }
            let out = feasibility::solve(&self.problem(x, eps)?, opts)?;
            let verdict = out.verdict;
            let gap = out.gap;
            trace.push(LadderStep { eps, outcome: out });
            match verdict {
                Verdict::Feasible => {}
                Verdict::Infeasible => {
                    return Ok(LadderOutcome {
                        verdict: self.classify_gap(x, gap, slack),
                        trace,
                    })
                }
                Verdict::Undecided => {}
            }
        }
        let verdict = match trace.last().map(|step| step.outcome.verdict) {
            Some(Verdict::Undecided) => MemberVerdict::Undecided,
            _ => MemberVerdict::Member,
        };
        Ok(LadderOutcome { verdict, trace })
    }

    /// `C_k` membership for level elements of `S` and `T`.
    pub fn c_cone_member_pair(
        &self,
        s: &LevelElement,
        t: &LevelElement,
        ladder: &[f64],
        opts: &SolverOptions,
    ) -> Result<LadderOutcome> {
        let x = self.quotient_of(s, t)?;
        self.c_cone_member(&x, ladder, opts)
    }

    fn boundary_slack(&self, x: &CosetElement, opts: &SolverOptions) -> f64 {
        let scale = x.left.frobenius_norm().max(x.right.frobenius_norm());
        10.0 * opts.tolerance.psd_slack(scale)
    }

    // Shifting both blocks by m·I moves the pair by m·√(2d) in Frobenius
    // norm, so a gap above slack·√(2d) certifies a margin below −slack.
    fn classify_gap(&self, x: &CosetElement, gap: Option<f64>, slack: f64) -> MemberVerdict {
        let reach = slack * ((2 * x.left.dim()) as f64).sqrt();
        match gap {
            Some(g) if g > reach => MemberVerdict::NonMember,
            _ => MemberVerdict::Boundary,
        }
    }

    /// Compares `i₁(S) ∩ i₂(T)` with the image of `D_n` in the quotient.
    pub fn intersection_check(&self) -> IntersectionReport {
        let eps = self.tol.subspace_eps;
        let n = self.n();
        let image = |sys: &MatrixOperatorSystem, left: bool| -> RealSubspace {
            let reps = sys.basis().iter().map(|b| {
                let zero = HermitianMatrix::zeros(n);
                let (l, r) = if left { (b.scale(2.0), zero) } else { (zero, b.scale(2.0)) };
                self.quotient(&l, &r).expect("level-1 blocks").as_direct_sum()
            });
            RealSubspace::spanned_by(2 * n, reps, eps)
        };
        let left = image(&self.sum.left, true);
        let right = image(&self.sum.right, false);
        let algebra = image(&DiagonalAlgebra::new(n).as_system(), true);
        let intersection_dim = left.intersection_dim(&right, eps);
        let holds = intersection_dim == algebra.len()
            && left.contains_subspace(&algebra, eps)
            && right.contains_subspace(&algebra, eps);
        IntersectionReport {
            holds,
            intersection_dim,
            algebra_dim: algebra.len(),
        }
    }

    /// `R = {s ⊕ t : E(s) = E(t)}` for the diagonal expectation `E`.
    pub fn r_subsystem(&self) -> Result<RealSubspace> {
        let n = self.n();
        let basis = self.sum.ambient.basis();
        // Constraint rows: the n diagonal coordinates of E(s) − E(t).
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| basis.iter().map(|b| b.as_matrix()[(i, i)].re - b.as_matrix()[(n + i, n + i)].re).collect())
            .collect();
        let d = basis.len();
        let gram = ComplexMatrix::from_fn(d, d, |a, b| {
            rows.iter().map(|r| r[a] * r[b]).sum::<f64>().into()
        });
        let eig = eig_hermitian(&HermitianMatrix::new(gram)?)?;
        let cutoff = 1e-10 * (1.0 + eig.spectral_norm());
        let mut candidates = Vec::new();
        for (k, &lam) in eig.values.iter().enumerate() {
            if lam.abs() > cutoff {
                continue;
            }
            let re: Vec<f64> = (0..d).map(|r| eig.vectors[(r, k)].re).collect();
            let im: Vec<f64> = (0..d).map(|r| eig.vectors[(r, k)].im).collect();
            for coords in [re, im] {
                candidates.push(self.sum.ambient.subspace().combine_real(&coords));
            }
        }
        Ok(RealSubspace::spanned_by(2 * n, candidates, self.tol.subspace_eps))
    }

    /// Builds `Φ(s ⊕ t + J) = (φ₁(s) + φ₂(t))/2` after re-verifying the
    /// inputs: same target, unital, sampled 2-positive, `D_n`-bimodule, and
    /// agreeing on `D_n`.
    pub fn universal_map<R: Rng + ?Sized>(
        &self,
        phi1: &LinearMatrixMap,
        phi2: &LinearMatrixMap,
        trials: usize,
        rng: &mut R,
    ) -> Result<UniversalMap> {
        let tol = &self.tol;
        let n = self.n();
        if !phi1.domain().same_span(&self.sum.left, tol) || !phi2.domain().same_span(&self.sum.right, tol) {
            return Err(Error::IncompatibleSystems("map domains must be the coproduct factors".into()));
        }
        let m = phi1.target_dim();
        if phi2.target_dim() != m {
            return Err(Error::IncompatibleSystems(format!(
                "maps land in M_{m} and M_{}",
                phi2.target_dim()
            )));
        }
        for i in 0..n {
            let a = ComplexMatrix::unit(n, i, i);
            let d = (&phi1.apply(&a, tol)? - &phi2.apply(&a, tol)?).frobenius_norm();
            if d > 1e-8 {
                return Err(Error::IllConditioned(format!(
                    "φ₁ and φ₂ differ on E_{{{0},{0}}} by {d:e}",
                    i + 1
                )));
            }
        }
        for (name, phi) in [("φ₁", phi1), ("φ₂", phi2)] {
            if !phi.is_unital(1e-10) {
                return Err(Error::MapContract(format!("unital: {name}(1) ≠ 1")));
            }
            if !phi.bimodule_map_check(tol)? {
                return Err(Error::MapContract(format!("a D_{n}-bimodule map: {name}")));
            }
            for k in 1..=2 {
                if !phi.sampled_kpositive(k, trials, rng, tol)?.passed() {
                    return Err(Error::MapContract(format!("{k}-positive: {name}")));
                }
            }
        }
        let target_action = phi1.target_action().cloned().unwrap_or_else(|| DiagonalAction::identity(n));
        let map = LinearMatrixMap::from_fn(self.sum.ambient.clone(), m, |h| {
            let l = h.as_matrix().submatrix(0, 0, n, n);
            let r = h.as_matrix().submatrix(n, n, n, n);
            let a = phi1.apply(&l, tol).expect("left block lies in S");
            let b = phi2.apply(&r, tol).expect("right block lies in T");
            (&a + &b).scale(0.5)
        })?
        .with_actions(DiagonalAction::repeated(n, 2), target_action);
        Ok(UniversalMap {
            map,
            n,
            phi1: phi1.clone(),
            phi2: phi2.clone(),
        })
    }

    pub fn to_spec(&self) -> CoproductSpec {
        CoproductSpec {
            n: self.n(),
            left: self.sum.left.to_spec(),
            right: self.sum.right.to_spec(),
            dim: self.dim(),
            kernel_dim: self.kernel.dim(),
            coset_basis: self.coset_basis().to_vec(),
        }
    }

    /// Rebuilds from the factor systems and checks the recorded dimensions.
    pub fn from_spec(spec: &CoproductSpec, tol: &Tolerance) -> Result<Self> {
        let left = MatrixOperatorSystem::from_spec(&spec.left, tol)?;
        let right = MatrixOperatorSystem::from_spec(&spec.right, tol)?;
        if left.ambient_dim() != spec.n {
            return Err(Error::InvalidInput(format!(
                "recorded n = {} but left system lives in M_{}",
                spec.n,
                left.ambient_dim()
            )));
        }
        let cp = build_coproduct(&left, &right, tol)?;
        if cp.dim() != spec.dim || cp.kernel.dim() != spec.kernel_dim {
            return Err(Error::InvalidInput(format!(
                "recorded dimensions (dim {}, kernel {}) disagree with rebuilt ({}, {})",
                spec.dim,
                spec.kernel_dim,
                cp.dim(),
                cp.kernel.dim()
            )));
        }
        Ok(cp)
    }

    pub fn from_json(text: &str, tol: &Tolerance) -> Result<Self> {
        let spec: CoproductSpec =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("coproduct JSON: {e}")))?;
        Self::from_spec(&spec, tol)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_spec()).expect("coproduct spec serializes")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct IntersectionReport {
    pub holds: bool,
    pub intersection_dim: usize,
    pub algebra_dim: usize,
}

/// `Φ : S ⊕_{D_n} T → M_m` from the universal property.
#[derive(Clone, Debug)]
pub struct UniversalMap {
    map: LinearMatrixMap,
    n: usize,
    phi1: LinearMatrixMap,
    phi2: LinearMatrixMap,
}

impl UniversalMap {
    /// `Φ` lifted to `S ⊕ T ⊆ M_{2n}`; it vanishes on `J`.
    pub fn lifted(&self) -> &LinearMatrixMap {
        &self.map
    }

    /// `Φ^{(k)}` on a coset: `[(φ₁(l_ij) + φ₂(r_ij))/2]`.
    pub fn apply_coset(&self, x: &CosetElement, tol: &Tolerance) -> Result<ComplexMatrix> {
        let k = x.level;
        let l = self.phi1.apply_level(x.left.as_matrix(), k, tol)?;
        let r = self.phi2.apply_level(x.right.as_matrix(), k, tol)?;
        Ok((&l + &r).scale(0.5))
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// Certificate table of the R-subsystem demonstration on `M_2 ⊕_{D_2} M_2`.
#[derive(Clone, Debug, Serialize)]
pub struct RSubsystemReport {
    pub r_dim: usize,
    pub coproduct_dim: usize,
    pub q_image_dim: usize,
    pub d_cone: FeasibilityOutcome,
    pub reference_witness_valid: bool,
    pub c_cone: MemberVerdict,
    pub direct_sum_min_eigenvalue: f64,
}

impl RSubsystemReport {
    /// (a) `q|_R` is a bijection, (b) the coset is positive, (c) `s ⊕ t` is not.
    pub fn passed(&self) -> bool {
        self.r_dim == 6
            && self.coproduct_dim == 6
            && self.q_image_dim == 6
            && self.d_cone.is_feasible()
            && self.reference_witness_valid
            && self.c_cone == MemberVerdict::Member
            && (self.direct_sum_min_eigenvalue + 0.5).abs() <= 1e-9
    }
}

/// The pair `s = [[2, 5/2], [5/2, 2]]`, `t = 2·I₂`.
pub fn counterexample_pair() -> (HermitianMatrix, HermitianMatrix) {
    (
        HermitianMatrix::from_real(2, &[2.0, 2.5, 2.5, 2.0]).expect("symmetric"),
        HermitianMatrix::diag(&[2.0, 2.0]),
    )
}

/// On `S = T = M_2` over `D_2`: the restriction of the quotient map to
/// `R = {s ⊕ t : E(s) = E(t)}` is a linear bijection whose inverse is not
/// positive.
pub fn r_subsystem_demo(opts: &SolverOptions) -> Result<RSubsystemReport> {
    let tol = opts.tolerance;
    let m2 = MatrixOperatorSystem::full(2);
    let cp = build_coproduct(&m2, &m2, &tol)?;

    let r = cp.r_subsystem()?;
    let images = r.basis().iter().map(|b| {
        let (l, rr) = split(b, 2);
        cp.quotient(&l, &rr).expect("level-1 blocks").as_direct_sum()
    });
    let q_image = RealSubspace::spanned_by(4, images, tol.subspace_eps);

    let (s, t) = counterexample_pair();
    let x = cp.quotient(&s, &t)?;
    let d_cone = cp.d_cone_member_coset(&x, opts)?;
    let problem = FeasibilityProblem::new(1, 2, s.clone(), t.clone(), 0.0)?;
    let reference_witness_valid = problem.witness_valid(&HermitianMatrix::identity(2), &tol)?;
    let c_cone = cp.c_cone_member(&x, &default_ladder(), opts)?.verdict;
    let direct_sum_min_eigenvalue = min_eigenvalue(&s.direct_sum(&t))?;

    Ok(RSubsystemReport {
        r_dim: r.len(),
        coproduct_dim: cp.dim(),
        q_image_dim: q_image.len(),
        d_cone,
        reference_witness_valid,
        c_cone,
        direct_sum_min_eigenvalue,
    })
}

/// Diagonal blocks of a block-diagonal element of `M_{2n}`.
pub fn split(h: &HermitianMatrix, n: usize) -> (HermitianMatrix, HermitianMatrix) {
    let m = h.as_matrix();
    (
        HermitianMatrix::symmetrize(&m.submatrix(0, 0, n, n)),
        HermitianMatrix::symmetrize(&m.submatrix(n, n, n, n)),
    )
}
