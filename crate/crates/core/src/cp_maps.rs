//! Linear maps out of operator systems and their positivity certificates.
//!
//! On a full matrix algebra complete positivity is decided exactly by the
//! Choi matrix. On a proper subspace domain only sampled k-positivity is
//! available: a passing verdict is evidence, not a proof.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{shape, Error, Result};
use crate::matrix::{eigvals_hermitian, is_psd, psd_verdict, ComplexMatrix, HermitianMatrix, Tolerance, C64};
use crate::operator_system::{gaussian_c, MatrixOperatorSystem};

/// Diagonal `*`-representation of `D_n` on `C^m`: `π(E_ii)` is the
/// projection onto the coordinates `p` with `labels[p] == i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagonalAction {
    pub n: usize,
    pub labels: Vec<usize>,
}

impl DiagonalAction {
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            labels: (0..n).collect(),
        }
    }

    /// `a ↦ a ⊕ a ⊕ … ⊕ a` (`copies` times).
    pub fn repeated(n: usize, copies: usize) -> Self {
        Self {
            n,
            labels: (0..copies).flat_map(|_| 0..n).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn represent(&self, i: usize) -> ComplexMatrix {
        let m = self.dim();
        let mut p = ComplexMatrix::zeros(m, m);
        for (pos, &l) in self.labels.iter().enumerate() {
            if l == i {
                p[(pos, pos)] = C64::new(1.0, 0.0);
            }
        }
        p
    }

    /// `π(E_ii) · x · π(E_jj)`.
    pub fn sandwich(&self, i: usize, x: &ComplexMatrix, j: usize) -> ComplexMatrix {
        let m = self.dim();
        ComplexMatrix::from_fn(m, m, |r, c| {
            if self.labels[r] == i && self.labels[c] == j {
                x[(r, c)]
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }
}

/// Linear map `φ : S → M_m` stored by its images of the domain basis.
#[derive(Clone, Debug)]
pub struct LinearMatrixMap {
    domain: MatrixOperatorSystem,
    target_dim: usize,
    images: Vec<ComplexMatrix>,
    source_action: Option<DiagonalAction>,
    target_action: Option<DiagonalAction>,
}

/// JSON form: the domain system plus `φ(b_r)` for each basis element, in order.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapSpec {
    pub domain_basis: Vec<HermitianMatrix>,
    pub source_dim: usize,
    pub target_dim: usize,
    pub images: Vec<ComplexMatrix>,
}

/// Outcome of a sampled k-positivity test.
#[derive(Clone, Debug)]
pub enum KPositivity {
    Passed { trials: usize },
    Counterexample { input: HermitianMatrix, min_eigenvalue: f64 },
}

impl KPositivity {
    pub fn passed(&self) -> bool {
        matches!(self, KPositivity::Passed { .. })
    }
}

const HERMITIAN_PRESERVING_EPS: f64 = 1e-10;

impl LinearMatrixMap {
    /// Build `φ` from its action on hermitian domain elements; the action is
    /// evaluated once per basis element and extended complex-linearly.
    pub fn from_fn<F>(domain: MatrixOperatorSystem, target_dim: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(&HermitianMatrix) -> ComplexMatrix,
    {
        let images: Vec<_> = domain.basis().iter().map(&mut f).collect();
        Self::from_images(domain, target_dim, images)
    }

    pub fn from_images(domain: MatrixOperatorSystem, target_dim: usize, images: Vec<ComplexMatrix>) -> Result<Self> {
        if images.len() != domain.dim() {
            return Err(shape(format!("{} images", domain.dim()), format!("{} images", images.len())));
        }
        for img in &images {
            if img.rows() != target_dim || img.cols() != target_dim {
                return Err(shape(format!("{target_dim}x{target_dim}"), img.shape_str()));
            }
            if img.hermitian_deviation() > HERMITIAN_PRESERVING_EPS * (1.0 + img.frobenius_norm()) {
                return Err(Error::MapContract("hermitian-preserving".into()));
            }
        }
        Ok(Self {
            domain,
            target_dim,
            images,
            source_action: None,
            target_action: None,
        })
    }

    pub fn with_actions(mut self, source: DiagonalAction, target: DiagonalAction) -> Self {
        self.source_action = Some(source);
        self.target_action = Some(target);
        self
    }

    /// The identity map on `sys`.
    pub fn identity(sys: &MatrixOperatorSystem) -> Self {
        let n = sys.ambient_dim();
        Self::from_fn(sys.clone(), n, |h| h.as_matrix().clone()).expect("identity is hermitian-preserving")
    }

    /// The transpose map on `sys` (`sys` must be closed under transposition).
    pub fn transpose(sys: &MatrixOperatorSystem) -> Self {
        let n = sys.ambient_dim();
        Self::from_fn(sys.clone(), n, |h| h.as_matrix().transpose()).expect("transpose is hermitian-preserving")
    }

    pub fn domain(&self) -> &MatrixOperatorSystem {
        &self.domain
    }

    pub fn source_dim(&self) -> usize {
        self.domain.ambient_dim()
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn target_action(&self) -> Option<&DiagonalAction> {
        self.target_action.as_ref()
    }

    pub fn images(&self) -> &[ComplexMatrix] {
        &self.images
    }

    pub fn apply(&self, m: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix> {
        if !self.domain.contains(m, tol)? {
            return Err(Error::NotInSystem(self.domain.label().to_string()));
        }
        Ok(self.apply_unchecked(m))
    }

    /// `φ(P_S m)`, skipping the membership test.
    pub(crate) fn apply_unchecked(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let coords = self.domain.subspace().coordinates(m);
        let mut out = ComplexMatrix::zeros(self.target_dim, self.target_dim);
        for (img, c) in self.images.iter().zip(coords) {
            out.axpy(c, img);
        }
        out
    }

    /// `φ^{(k)}([x_ij]) = [φ(x_ij)]`.
    pub fn apply_level(&self, x: &ComplexMatrix, k: usize, tol: &Tolerance) -> Result<ComplexMatrix> {
        let n = self.source_dim();
        if x.rows() != k * n || x.cols() != k * n {
            return Err(shape(format!("{0}x{0}", k * n), x.shape_str()));
        }
        let m = self.target_dim;
        let mut out = ComplexMatrix::zeros(k * m, k * m);
        for i in 0..k {
            for j in 0..k {
                out.set_block(i, j, &self.apply(&x.block(i, j, n), tol)?);
            }
        }
        Ok(out)
    }

    /// `self ∘ inner`; `inner` must land in the domain of `self`.
    pub fn compose(&self, inner: &LinearMatrixMap, tol: &Tolerance) -> Result<Self> {
        if inner.target_dim != self.source_dim() {
            return Err(shape(format!("target M_{}", self.source_dim()), format!("M_{}", inner.target_dim)));
        }
        let images = inner
            .images
            .iter()
            .map(|img| self.apply(img, tol))
            .collect::<Result<Vec<_>>>()?;
        Self::from_images(inner.domain.clone(), self.target_dim, images)
    }

    pub fn is_unital(&self, eps: f64) -> bool {
        let n = self.source_dim();
        let image = self.apply_unchecked(&ComplexMatrix::identity(n));
        (&image - &ComplexMatrix::identity(self.target_dim)).frobenius_norm() <= eps
    }

    /// Choi matrix `[φ(E_ij)]`; needs the full `M_n` domain.
    pub fn choi_matrix(&self) -> Result<HermitianMatrix> {
        let n = self.source_dim();
        if self.domain.dim() != n * n {
            return Err(Error::DomainNotFull {
                domain_dim: self.domain.dim(),
                full_dim: n * n,
            });
        }
        let m = self.target_dim;
        let mut choi = ComplexMatrix::zeros(n * m, n * m);
        for i in 0..n {
            for j in 0..n {
                choi.set_block(i, j, &self.apply_unchecked(&ComplexMatrix::unit(n, i, j)));
            }
        }
        HermitianMatrix::new(choi)
    }

    /// Complete positivity on the full matrix algebra via the Choi matrix.
    pub fn choi_psd(&self, tol: &Tolerance) -> Result<bool> {
        is_psd(&self.choi_matrix()?, tol)
    }

    /// Draws `trials` PSD elements of `M_k(domain)` and checks their images.
    ///
    /// Draws alternate between shifted random hermitian elements (boundary
    /// points of the cone half the time) and, on full domains, `V*V` with `V`
    /// of random rank.
    pub fn sampled_kpositive<R: Rng + ?Sized>(
        &self,
        k: usize,
        trials: usize,
        rng: &mut R,
        tol: &Tolerance,
    ) -> Result<KPositivity> {
        let n = self.source_dim();
        let full = self.domain.dim() == n * n;
        for t in 0..trials {
            let p = if full && t % 2 == 1 {
                random_gram(k * n, rng)
            } else {
                self.domain.random_psd_level(k, rng)?.block().clone()
            };
            let image = HermitianMatrix::symmetrize(&self.apply_level(p.as_matrix(), k, tol)?);
            let values = eigvals_hermitian(&image)?;
            if !psd_verdict(&values, tol) {
                return Ok(KPositivity::Counterexample {
                    input: p,
                    min_eigenvalue: values[0],
                });
            }
        }
        Ok(KPositivity::Passed { trials })
    }

    /// Exhaustive `D_n`-bimodule test over diagonal units and domain basis:
    /// `φ(E_ii·b·E_jj) = π(E_ii)·φ(b)·π(E_jj)`, plus `φ(a) = π(a)·φ(1)`.
    ///
    /// Without explicit actions both sides default to the identity
    /// representation, which needs `target_dim == source_dim`.
    pub fn bimodule_map_check(&self, tol: &Tolerance) -> Result<bool> {
        let n = self.source_dim();
        let source = self.source_action.clone().unwrap_or_else(|| DiagonalAction::identity(n));
        if source.dim() != n {
            return Err(Error::MissingRepresentation(format!(
                "source action acts on C^{}, domain lives in M_{n}",
                source.dim()
            )));
        }
        let target = match &self.target_action {
            Some(a) => a.clone(),
            None if self.target_dim == n => DiagonalAction::identity(n),
            None => {
                return Err(Error::MissingRepresentation(format!(
                    "target M_{} differs from source M_{n}",
                    self.target_dim
                )))
            }
        };
        if target.dim() != self.target_dim || target.n != source.n {
            return Err(Error::MissingRepresentation("source and target actions disagree".into()));
        }
        let eps = 1e-10;
        let alg_n = source.n;
        for (b, img) in self.domain.basis().iter().zip(&self.images) {
            for i in 0..alg_n {
                for j in 0..alg_n {
                    let x = source.sandwich(i, b.as_matrix(), j);
                    if !self.domain.contains(&x, tol)? {
                        return Ok(false);
                    }
                    let lhs = self.apply_unchecked(&x);
                    let rhs = target.sandwich(i, img, j);
                    if (&lhs - &rhs).frobenius_norm() > eps * (1.0 + img.frobenius_norm()) {
                        return Ok(false);
                    }
                }
            }
        }
        let phi_one = self.apply_unchecked(&ComplexMatrix::identity(n));
        for i in 0..alg_n {
            let a = source.represent(i);
            if !self.domain.contains(&a, tol)? {
                return Ok(false);
            }
            let lhs = self.apply_unchecked(&a);
            let rhs = &target.represent(i) * &phi_one;
            if (&lhs - &rhs).frobenius_norm() > eps {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn to_spec(&self) -> MapSpec {
        MapSpec {
            domain_basis: self.domain.basis().to_vec(),
            source_dim: self.source_dim(),
            target_dim: self.target_dim,
            images: self.images.clone(),
        }
    }

    /// Rebuilds the domain from the declared basis; images are re-expressed
    /// against the re-orthonormalized basis.
    pub fn from_spec(spec: &MapSpec, tol: &Tolerance) -> Result<Self> {
        if spec.domain_basis.len() != spec.images.len() {
            return Err(shape(
                format!("{} images", spec.domain_basis.len()),
                format!("{} images", spec.images.len()),
            ));
        }
        let gens: Vec<_> = spec.domain_basis.iter().map(|b| b.as_matrix().clone()).collect();
        let domain = MatrixOperatorSystem::new(spec.source_dim, &gens, tol)?;
        if domain.dim() != spec.domain_basis.len() {
            return Err(Error::InvalidInput(
                "declared domain basis must be linearly independent and contain the unit".into(),
            ));
        }
        // New basis element b = Σ c_s d_s over the declared basis d, with G·c = (⟨d_s, b⟩)_s.
        let declared = crate::subspace::RealSubspace::spanned_by(spec.source_dim, spec.domain_basis.clone(), 0.0);
        if declared.len() != spec.domain_basis.len() {
            return Err(Error::InvalidInput("declared domain basis is degenerate".into()));
        }
        let gram = gram_matrix(&spec.domain_basis);
        let images = domain
            .basis()
            .iter()
            .map(|b| {
                let rhs: Vec<f64> = spec.domain_basis.iter().map(|d| d.real_inner(b)).collect();
                let coeffs = solve_spd(&gram, &rhs)?;
                let mut img = ComplexMatrix::zeros(spec.target_dim, spec.target_dim);
                for (c, src) in coeffs.iter().zip(&spec.images) {
                    img.axpy(C64::new(*c, 0.0), src);
                }
                Ok(img)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_images(domain, spec.target_dim, images)
    }
}

fn gram_matrix(basis: &[HermitianMatrix]) -> Vec<Vec<f64>> {
    basis
        .iter()
        .map(|a| basis.iter().map(|b| a.real_inner(b)).collect())
        .collect()
}

/// Cholesky solve of a small symmetric positive-definite system.
fn solve_spd(a: &[Vec<f64>], b: &[f64]) -> Result<Vec<f64>> {
    let n = b.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = a[i][j] - (0..j).map(|p| l[i][p] * l[j][p]).sum::<f64>();
            if i == j {
                if s <= 0.0 {
                    return Err(Error::NumericalFailure("Gram matrix is not positive definite".into()));
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    let mut y = vec![0.0; n];
    for i in 0..n {
        y[i] = (b[i] - (0..i).map(|p| l[i][p] * y[p]).sum::<f64>()) / l[i][i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        x[i] = (y[i] - (i + 1..n).map(|p| l[p][i] * x[p]).sum::<f64>()) / l[i][i];
    }
    Ok(x)
}

/// `V*V` for a random `r×dim` Gaussian `V`, `r` uniform in `1..=dim`.
fn random_gram<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> HermitianMatrix {
    let r = rng.random_range(1..=dim);
    let v = ComplexMatrix::from_fn(r, dim, |_, _| gaussian_c(rng));
    HermitianMatrix::symmetrize(&(&v.adjoint() * &v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_systems::diagonal_expectation;
    use crate::matrix::min_eigenvalue;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn choi_examples() {
        let m2 = MatrixOperatorSystem::full(2);
        assert!(LinearMatrixMap::identity(&m2).choi_psd(&tol()).unwrap());
        let t = LinearMatrixMap::transpose(&m2);
        assert!(!t.choi_psd(&tol()).unwrap());
        // Choi matrix of the transpose is the swap operator, spectrum {−1, 1, 1, 1}.
        assert!((min_eigenvalue(&t.choi_matrix().unwrap()).unwrap() + 1.0).abs() < 1e-12);
        for n in 1..=4 {
            assert!(diagonal_expectation(n).choi_psd(&tol()).unwrap());
        }
    }

    #[test]
    fn choi_needs_full_domain() {
        let d2 = crate::operator_system::DiagonalAlgebra::new(2).as_system();
        let id = LinearMatrixMap::identity(&d2);
        assert!(matches!(id.choi_psd(&tol()), Err(Error::DomainNotFull { .. })));
    }

    #[test]
    fn sampled_positivity_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m2 = MatrixOperatorSystem::full(2);
        for k in 1..=3 {
            assert!(LinearMatrixMap::identity(&m2)
                .sampled_kpositive(k, 50, &mut rng, &tol())
                .unwrap()
                .passed());
        }
        let verdict = LinearMatrixMap::transpose(&m2)
            .sampled_kpositive(2, 200, &mut rng, &tol())
            .unwrap();
        match verdict {
            KPositivity::Counterexample { input, min_eigenvalue } => {
                assert!(min_eigenvalue < 0.0);
                assert!(is_psd(&input, &tol()).unwrap());
            }
            KPositivity::Passed { .. } => panic!("transpose is not 2-positive"),
        }
    }

    #[test]
    fn bimodule_map_examples() {
        let m2 = MatrixOperatorSystem::full(2);
        assert!(diagonal_expectation(2).bimodule_map_check(&tol()).unwrap());
        assert!(LinearMatrixMap::identity(&m2).bimodule_map_check(&tol()).unwrap());
        assert!(!LinearMatrixMap::transpose(&m2).bimodule_map_check(&tol()).unwrap());
    }

    #[test]
    fn missing_representation() {
        let m2 = MatrixOperatorSystem::full(2);
        let widen = LinearMatrixMap::from_fn(m2, 4, |h| h.direct_sum(h).into_matrix()).unwrap();
        assert!(matches!(
            widen.bimodule_map_check(&tol()),
            Err(Error::MissingRepresentation(_))
        ));
        let widen = widen.with_actions(DiagonalAction::identity(2), DiagonalAction::repeated(2, 2));
        assert!(widen.bimodule_map_check(&tol()).unwrap());
    }

    #[test]
    fn rejects_non_hermitian_preserving_images() {
        let m2 = MatrixOperatorSystem::full(2);
        let r = LinearMatrixMap::from_fn(m2, 2, |h| h.as_matrix().scale_c(C64::new(0.0, 1.0)));
        assert!(matches!(r, Err(Error::MapContract(_))));
    }

    #[test]
    fn spec_round_trip() {
        let e = diagonal_expectation(3);
        let back = LinearMatrixMap::from_spec(&e.to_spec(), &tol()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let x = e.domain().random_element(&mut rng);
            let d = (&e.apply(&x, &tol()).unwrap() - &back.apply(&x, &tol()).unwrap()).frobenius_norm();
            assert!(d < 1e-12);
        }
    }
}
