//! Concrete operator systems `S ⊆ M_n` with their matrix levels and the
//! `D_n`-bimodule structure.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{shape, Error, Result};
use crate::matrix::{eigvals_hermitian, is_psd, ComplexMatrix, HermitianMatrix, Tolerance, C64};
use crate::subspace::RealSubspace;

/// Self-adjoint unital subspace of `M_n`, stored as a real-orthonormal
/// hermitian basis whose first element is `I_n/√n`.
#[derive(Clone, Debug)]
pub struct MatrixOperatorSystem {
    label: String,
    span: RealSubspace,
    is_algebra: bool,
}

/// JSON form of a system: `{"ambient_dim", "label", "generators"}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SystemSpec {
    pub ambient_dim: usize,
    #[serde(default)]
    pub label: String,
    #[serde(default)]
    pub generators: Vec<ComplexMatrix>,
}

impl MatrixOperatorSystem {
    /// Operator system spanned by `I_n` and `G, G*` for every generator.
    pub fn new(n: usize, generators: &[ComplexMatrix], tol: &Tolerance) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("ambient dimension must be positive".into()));
        }
        for g in generators {
            if g.rows() != n || g.cols() != n {
                return Err(shape(format!("{n}x{n}"), g.shape_str()));
            }
            if !g.is_finite() {
                return Err(Error::InvalidInput("non-finite generator entry".into()));
            }
        }
        let candidates = std::iter::once(HermitianMatrix::identity(n)).chain(
            generators.iter().flat_map(|g| {
                [HermitianMatrix::symmetrize(g), HermitianMatrix::imaginary_part(g)]
            }),
        );
        Ok(Self {
            label: String::new(),
            span: RealSubspace::spanned_by(n, candidates, tol.subspace_eps),
            is_algebra: false,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub(crate) fn with_algebra_flag(mut self, flag: bool) -> Self {
        self.is_algebra = flag;
        self
    }

    /// The full matrix algebra `M_n`.
    pub fn full(n: usize) -> Self {
        let units: Vec<_> = (0..n)
            .flat_map(|i| (0..n).map(move |j| ComplexMatrix::unit(n, i, j)))
            .collect();
        Self::new(n, &units, &Tolerance::default())
            .expect("matrix units are well-formed")
            .with_label(format!("M_{n}"))
            .with_algebra_flag(true)
    }

    pub fn ambient_dim(&self) -> usize {
        self.span.ambient_dim()
    }

    /// Complex dimension of `S` (= real dimension of its hermitian part).
    pub fn dim(&self) -> usize {
        self.span.len()
    }

    pub fn basis(&self) -> &[HermitianMatrix] {
        self.span.basis()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_algebra(&self) -> bool {
        self.is_algebra
    }

    pub fn subspace(&self) -> &RealSubspace {
        &self.span
    }

    /// Distance of `m` to the complex span is at most `subspace_eps·(1 + ‖m‖_F)`.
    pub fn contains(&self, m: &ComplexMatrix, tol: &Tolerance) -> Result<bool> {
        let n = self.ambient_dim();
        if m.rows() != n || m.cols() != n {
            return Err(shape(format!("{n}x{n}"), m.shape_str()));
        }
        Ok(self.span.contains(m, tol.subspace_eps))
    }

    /// Mutual containment of spans.
    pub fn same_span(&self, other: &Self, tol: &Tolerance) -> bool {
        self.ambient_dim() == other.ambient_dim()
            && self.span.same_span(&other.span, tol.subspace_eps)
    }

    pub fn is_subsystem_of(&self, other: &Self, tol: &Tolerance) -> bool {
        self.ambient_dim() == other.ambient_dim()
            && other.span.contains_subspace(&self.span, tol.subspace_eps)
    }

    /// Order norm `inf{r ≥ 0 : r·I ± v ⪰ 0}`, i.e. the spectral radius.
    pub fn order_norm(&self, v: &HermitianMatrix, tol: &Tolerance) -> Result<f64> {
        if !self.contains(v.as_matrix(), tol)? {
            return Err(Error::NotInSystem(self.label.clone()));
        }
        let values = eigvals_hermitian(v)?;
        Ok(values.iter().fold(0.0_f64, |m, x| m.max(x.abs())))
    }

    /// Every `n×n` block of `block` lies in the span.
    pub fn contains_level(&self, block: &ComplexMatrix, level: usize, tol: &Tolerance) -> Result<bool> {
        let n = self.ambient_dim();
        if block.rows() != level * n || block.cols() != level * n {
            return Err(shape(format!("{0}x{0}", level * n), block.shape_str()));
        }
        for i in 0..level {
            for j in 0..level {
                if !self.span.contains(&block.block(i, j, n), tol.subspace_eps) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Wrap `block` as an element of `M_level(S)`.
    pub fn level_element(&self, level: usize, block: HermitianMatrix, tol: &Tolerance) -> Result<LevelElement> {
        if level == 0 {
            return Err(Error::InvalidInput("level must be positive".into()));
        }
        if !self.contains_level(block.as_matrix(), level, tol)? {
            return Err(Error::NotInSystem(self.label.clone()));
        }
        Ok(LevelElement {
            level,
            n: self.ambient_dim(),
            block,
        })
    }

    /// `x ∈ M_k(S)^+`, with the cone inherited from `M_{kn}`.
    pub fn level_positive(&self, x: &LevelElement, tol: &Tolerance) -> Result<bool> {
        if x.n != self.ambient_dim() || !self.contains_level(x.block.as_matrix(), x.level, tol)? {
            return Err(Error::NotInSystem(self.label.clone()));
        }
        is_psd(&x.block, tol)
    }

    /// Bimodule test over `D_n`.
    ///
    /// The span condition `d·b·d′ ∈ S` is checked exhaustively over matrix
    /// units and basis elements, which is complete by bilinearity. The cone
    /// condition `X·P·X* ∈ M_m(S)^+` is sampled for levels `k, m ≤ 2`.
    pub fn bimodule_check<R: Rng + ?Sized>(
        &self,
        alg: &DiagonalAlgebra,
        trials: usize,
        rng: &mut R,
        tol: &Tolerance,
    ) -> bool {
        let n = self.ambient_dim();
        if alg.dim() != n {
            return false;
        }
        for b in self.basis() {
            for i in 0..n {
                for j in 0..n {
                    let x = alg.sandwich(i, b.as_matrix(), j);
                    if !self.span.contains(&x, tol.subspace_eps) {
                        return false;
                    }
                }
            }
        }
        for t in 0..trials {
            let k = 1 + t % 2;
            let m = 1 + (t / 2) % 2;
            let p = match self.random_psd_level(k, rng) {
                Ok(p) => p,
                Err(_) => return false,
            };
            let x = alg.random_block(m, k, rng);
            let Ok(image) = p.block.congruence(&x) else {
                return false;
            };
            match (is_psd(&image, tol), self.contains_level(image.as_matrix(), m, tol)) {
                (Ok(true), Ok(true)) => {}
                _ => return false,
            }
        }
        true
    }

    /// Random element of `S` with standard complex Gaussian coordinates.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> ComplexMatrix {
        let coords: Vec<C64> = (0..self.dim()).map(|_| gaussian_c(rng)).collect();
        self.span.combine(&coords)
    }

    pub fn random_hermitian<R: Rng + ?Sized>(&self, rng: &mut R) -> HermitianMatrix {
        let coords: Vec<f64> = (0..self.dim()).map(|_| rng.sample(StandardNormal)).collect();
        self.span.combine_real(&coords)
    }

    /// Random hermitian element of `M_k(S)`: `s_ij` Gaussian in `S` for
    /// `i < j`, `s_ji = s_ij*`, hermitian diagonal blocks.
    pub fn random_level_hermitian<R: Rng + ?Sized>(&self, k: usize, rng: &mut R) -> HermitianMatrix {
        let n = self.ambient_dim();
        let mut block = ComplexMatrix::zeros(k * n, k * n);
        for i in 0..k {
            block.set_block(i, i, self.random_hermitian(rng).as_matrix());
            for j in i + 1..k {
                let s = self.random_element(rng);
                block.set_block(j, i, &s.adjoint());
                block.set_block(i, j, &s);
            }
        }
        HermitianMatrix::symmetrize(&block)
    }

    /// Random PSD element of `M_k(S)`: a random hermitian `H` shifted to
    /// `H − λ_min(H)·I + δ·I`, with `δ = 0` (a boundary point) half the time.
    pub fn random_psd_level<R: Rng + ?Sized>(&self, k: usize, rng: &mut R) -> Result<LevelElement> {
        let h = self.random_level_hermitian(k, rng);
        let min = eigvals_hermitian(&h)?[0];
        let delta = if rng.random_bool(0.5) { 0.0 } else { rng.random::<f64>() };
        Ok(LevelElement {
            level: k,
            n: self.ambient_dim(),
            block: h.shift(delta - min),
        })
    }

    pub fn to_spec(&self) -> SystemSpec {
        SystemSpec {
            ambient_dim: self.ambient_dim(),
            label: self.label.clone(),
            generators: self.basis().iter().map(|b| b.as_matrix().clone()).collect(),
        }
    }

    pub fn from_spec(spec: &SystemSpec, tol: &Tolerance) -> Result<Self> {
        Ok(Self::new(spec.ambient_dim, &spec.generators, tol)?.with_label(spec.label.clone()))
    }

    pub fn from_json(text: &str, tol: &Tolerance) -> Result<Self> {
        let spec: SystemSpec =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("system JSON: {e}")))?;
        Self::from_spec(&spec, tol)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_spec()).expect("system spec serializes")
    }
}

/// Operator system spanned by `I_n` and the given generators, default tolerances.
pub fn make_system(n: usize, generators: &[ComplexMatrix]) -> Result<MatrixOperatorSystem> {
    MatrixOperatorSystem::new(n, generators, &Tolerance::default())
}

/// `D_n`, the diagonal matrices in `M_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DiagonalAlgebra {
    dim: usize,
}

impl DiagonalAlgebra {
    pub fn new(dim: usize) -> Self {
        assert!(dim > 0, "D_n needs n ≥ 1");
        Self { dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn unit(&self, i: usize) -> ComplexMatrix {
        ComplexMatrix::unit(self.dim, i, i)
    }

    /// `E_ii · m · E_jj`.
    pub fn sandwich(&self, i: usize, m: &ComplexMatrix, j: usize) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        out[(i, j)] = m[(i, j)];
        out
    }

    pub fn as_system(&self) -> MatrixOperatorSystem {
        let units: Vec<_> = (0..self.dim).map(|i| self.unit(i)).collect();
        MatrixOperatorSystem::new(self.dim, &units, &Tolerance::default())
            .expect("diagonal units are well-formed")
            .with_label(format!("D_{}", self.dim))
            .with_algebra_flag(true)
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> ComplexMatrix {
        let mut d = ComplexMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            d[(i, i)] = gaussian_c(rng);
        }
        d
    }

    /// Random `X ∈ M_{m,k}(D_n)` as an `(m·n)×(k·n)` matrix.
    pub fn random_block<R: Rng + ?Sized>(&self, m: usize, k: usize, rng: &mut R) -> ComplexMatrix {
        let n = self.dim;
        let mut x = ComplexMatrix::zeros(m * n, k * n);
        for a in 0..m {
            for b in 0..k {
                for i in 0..n {
                    x[(a * n + i, b * n + i)] = gaussian_c(rng);
                }
            }
        }
        x
    }
}

/// Hermitian element `[s_ij]` of `M_k(S)`, with `s_ij ∈ M_n`.
#[derive(Clone, Debug)]
pub struct LevelElement {
    level: usize,
    n: usize,
    block: HermitianMatrix,
}

impl LevelElement {
    /// Unchecked against any particular system; only shapes are validated.
    pub fn new(n: usize, level: usize, block: HermitianMatrix) -> Result<Self> {
        if n == 0 || level == 0 {
            return Err(Error::InvalidInput("level and block size must be positive".into()));
        }
        if block.dim() != n * level {
            return Err(shape(format!("{0}x{0}", n * level), block.as_matrix().shape_str()));
        }
        Ok(Self { level, n, block })
    }

    /// The matrix order unit `I_{kn}`.
    pub fn unit(n: usize, level: usize) -> Self {
        Self {
            level,
            n,
            block: HermitianMatrix::identity(n * level),
        }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn block_size(&self) -> usize {
        self.n
    }

    pub fn block(&self) -> &HermitianMatrix {
        &self.block
    }

    pub fn entry(&self, i: usize, j: usize) -> ComplexMatrix {
        self.block.as_matrix().block(i, j, self.n)
    }
}

pub(crate) fn gaussian_c<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}
