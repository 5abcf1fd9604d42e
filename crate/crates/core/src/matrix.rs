//! Dense complex matrices, hermitian eigendecomposition and PSD utilities.
//!
//! Everything here is small and dense: the operator systems handled by this
//! crate live in `M_n` with `n` at most a few dozen, and the level-`k` blocks
//! handled by the feasibility engine have side `k·n`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{shape, Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Matrix unit `E_{i,j}` in `M_n` (0-indexed).
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(i, j)] = ONE;
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(shape(
                format!("{} entries", rows * cols),
                format!("{} entries", data.len()),
            ));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 {
            return Err(Error::InvalidInput("matrix must be non-empty".into()));
        }
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidInput("ragged matrix rows".into()));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.concat(),
        })
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn shape_str(&self) -> String {
        format!("{}x{}", self.rows, self.cols)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|z| z * c)
    }

    pub fn scale_c(&self, c: C64) -> Self {
        self.map(|z| z * c)
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(self.zip(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(self.zip(other, |a, b| a - b))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(shape(
                format!("{} rows on the right", self.cols),
                other.shape_str(),
            ));
        }
        Ok(self.matmul(other))
    }

    /// `self += c · other`; shapes must agree.
    pub fn axpy(&mut self, c: C64, other: &Self) {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
    }

    fn zip(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    fn matmul(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.data[i * self.cols + l];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[l * other.cols..(l + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(shape(self.shape_str(), other.shape_str()));
        }
        Ok(())
    }

    /// Copy of the `size×size` block at block coordinates `(bi, bj)`.
    pub fn block(&self, bi: usize, bj: usize, size: usize) -> Self {
        Self::from_fn(size, size, |i, j| self[(bi * size + i, bj * size + j)])
    }

    pub fn set_block(&mut self, bi: usize, bj: usize, block: &Self) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(bi * block.rows + i, bj * block.cols + j)] = block[(i, j)];
            }
        }
    }

    /// Assemble a `k×k` block matrix from `blocks[i][j]`, all of equal shape.
    pub fn from_blocks(blocks: &[Vec<Self>]) -> Result<Self> {
        let k = blocks.len();
        let first = blocks
            .first()
            .and_then(|r| r.first())
            .ok_or_else(|| Error::InvalidInput("empty block matrix".into()))?;
        let (r, c) = (first.rows, first.cols);
        let width = blocks[0].len();
        let mut out = Self::zeros(k * r, width * c);
        for (bi, row) in blocks.iter().enumerate() {
            if row.len() != width {
                return Err(Error::InvalidInput("ragged block rows".into()));
            }
            for (bj, b) in row.iter().enumerate() {
                if b.rows != r || b.cols != c {
                    return Err(shape(format!("{r}x{c}"), b.shape_str()));
                }
                out.set_block(bi, bj, b);
            }
        }
        Ok(out)
    }

    /// Block-diagonal `self ⊕ other`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)];
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out[(self.rows + i, self.cols + j)] = other[(i, j)];
            }
        }
        out
    }

    /// Sub-matrix `[r0, r0+rows) × [c0, c0+cols)`.
    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// Panics on incompatible shapes; use [`ComplexMatrix::try_mul`] for checked products.
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        self.matmul(rhs)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        self.zip(rhs, |a, b| a + b)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        self.zip(rhs, |a, b| a - b)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.map(|z| -z)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:>9.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

// JSON form: row-major nested arrays of `[re, im]` pairs.
impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| [self[(i, j)].re, self[(i, j)].im]).collect())
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(deserializer)?;
        let rows: Vec<Vec<C64>> = rows
            .into_iter()
            .map(|r| r.into_iter().map(|[re, im]| C64::new(re, im)).collect())
            .collect();
        ComplexMatrix::from_rows(&rows).map_err(D::Error::custom)
    }
}

/// Square complex matrix equal to its conjugate transpose.
#[derive(Clone, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    /// Symmetrizes `(M + M*)/2`; rejects inputs further than
    /// `1e-6·(1 + ‖M‖_F)` from hermitian.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(shape("square matrix", m.shape_str()));
        }
        if !m.is_finite() {
            return Err(Error::InvalidInput("non-finite matrix entry".into()));
        }
        let deviation = m.hermitian_deviation();
        if deviation > 1e-6 * (1.0 + m.frobenius_norm()) {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self::symmetrize(&m))
    }

    /// Hermitian part `(M + M*)/2` of any square matrix.
    pub fn symmetrize(m: &ComplexMatrix) -> Self {
        assert!(m.is_square(), "hermitian part needs a square matrix");
        let n = m.rows;
        let mut h = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            h[(i, i)] = C64::new(m[(i, i)].re, 0.0);
            for j in i + 1..n {
                let z = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
                h[(i, j)] = z;
                h[(j, i)] = z.conj();
            }
        }
        Self(h)
    }

    /// Skew part as a hermitian matrix: `(M − M*)/(2i)`, so `M = Re + i·Im`.
    pub fn imaginary_part(m: &ComplexMatrix) -> Self {
        let n = m.rows;
        let skew = ComplexMatrix::from_fn(n, n, |i, j| (m[(i, j)] - m[(j, i)].conj()) * C64::new(0.0, -0.5));
        Self::symmetrize(&skew)
    }

    pub fn from_real(n: usize, data: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_real(n, n, data)?)
    }

    pub fn zeros(n: usize) -> Self {
        Self(ComplexMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        Self(ComplexMatrix::identity(n))
    }

    pub fn diag(values: &[f64]) -> Self {
        Self(ComplexMatrix::diag_real(values))
    }

    pub fn dim(&self) -> usize {
        self.0.rows
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.frobenius_norm()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(&self.0 - &other.0)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self(self.0.scale(c))
    }

    pub fn shift(&self, c: f64) -> Self {
        let mut m = self.0.clone();
        for i in 0..m.rows {
            m[(i, i)] += c;
        }
        Self(m)
    }

    /// `X · H · X*`, hermitian by construction.
    pub fn congruence(&self, x: &ComplexMatrix) -> Result<Self> {
        let xh = x.try_mul(&self.0)?;
        Ok(Self::symmetrize(&xh.try_mul(&x.adjoint())?))
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        Self(self.0.direct_sum(&other.0))
    }

    /// Real Frobenius inner product `Re tr(A B)`; real-valued on hermitian pairs.
    pub fn real_inner(&self, other: &Self) -> f64 {
        self.0
            .data
            .iter()
            .zip(&other.0.data)
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum()
    }
}

impl fmt::Debug for HermitianMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Hermitian{:?}", self.0)
    }
}

impl Serialize for HermitianMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for HermitianMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        HermitianMatrix::new(ComplexMatrix::deserialize(deserializer)?).map_err(D::Error::custom)
    }
}

/// Numerical slack used by every cone and subspace test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Relative eigenvalue slack: the absolute slack for an operand `H` is
    /// `psd_eps · (1 + ‖H‖_2)`.
    pub psd_eps: f64,
    /// Rank and membership slack, relative to `1 + ‖M‖_F`.
    pub subspace_eps: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            psd_eps: 1e-9,
            subspace_eps: 1e-8,
        }
    }
}

impl Tolerance {
    pub fn new(psd_eps: f64, subspace_eps: f64) -> Result<Self> {
        if !(psd_eps >= 0.0 && subspace_eps >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "tolerances must be nonnegative (psd_eps = {psd_eps}, subspace_eps = {subspace_eps})"
            )));
        }
        Ok(Self {
            psd_eps,
            subspace_eps,
        })
    }

    /// Absolute eigenvalue slack for an operand of spectral norm `norm`.
    pub fn psd_slack(&self, norm: f64) -> f64 {
        self.psd_eps * (1.0 + norm)
    }

    /// Absolute residual slack for an operand of Frobenius norm `norm`.
    pub fn subspace_slack(&self, norm: f64) -> f64 {
        self.subspace_eps * (1.0 + norm)
    }
}

/// Spectral decomposition `H = U · diag(values) · U*`, values ascending.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigen {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn spectral_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// `U · diag(f(λ)) · U*`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let n = self.values.len();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let ui = self.vectors[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += ui * self.vectors[(j, k)].conj();
                }
            }
        }
        HermitianMatrix::symmetrize(&out)
    }
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic complex Jacobi eigendecomposition of a hermitian matrix.
pub fn eig_hermitian(h: &HermitianMatrix) -> Result<Eigen> {
    jacobi(h, true)
}

/// Eigenvalues only, ascending.
pub fn eigvals_hermitian(h: &HermitianMatrix) -> Result<Vec<f64>> {
    Ok(jacobi(h, false)?.values)
}

fn jacobi(h: &HermitianMatrix, want_vectors: bool) -> Result<Eigen> {
    let n = h.dim();
    let mut a = h.0.clone();
    let mut u = if want_vectors {
        ComplexMatrix::identity(n)
    } else {
        ComplexMatrix::zeros(0, 0)
    };
    let total = a.frobenius_norm();
    if total == 0.0 || n == 1 {
        return Ok(finish(a, u, want_vectors, n));
    }
    let target = f64::EPSILON * total;

    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= target {
            return Ok(finish(a, u, want_vectors, n));
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= f64::MIN_POSITIVE || r <= 1e-300 {
                    continue;
                }
                let phase = apq / r;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * r);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let t = if tau == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // J = [[c, s], [-s·conj(phase), c·conj(phase)]] acting on columns p, q.
                let jpp = C64::new(c, 0.0);
                let jpq = C64::new(s, 0.0);
                let jqp = -phase.conj() * s;
                let jqq = phase.conj() * c;
                // A ← A·J
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = aip * jpp + aiq * jqp;
                    a[(i, q)] = aip * jpq + aiq * jqq;
                }
                // A ← J*·A
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = jpp.conj() * apj + jqp.conj() * aqj;
                    a[(q, j)] = jpq.conj() * apj + jqq.conj() * aqj;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
                if want_vectors {
                    for i in 0..n {
                        let uip = u[(i, p)];
                        let uiq = u[(i, q)];
                        u[(i, p)] = uip * jpp + uiq * jqp;
                        u[(i, q)] = uip * jpq + uiq * jqq;
                    }
                }
            }
        }
    }
    Err(Error::NumericalFailure(format!(
        "Jacobi eigensolver did not converge in {JACOBI_MAX_SWEEPS} sweeps (dim {n})"
    )))
}

fn finish(a: ComplexMatrix, u: ComplexMatrix, want_vectors: bool, n: usize) -> Eigen {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = if want_vectors {
        ComplexMatrix::from_fn(n, n, |i, k| u[(i, order[k])])
    } else {
        u
    };
    Eigen { values, vectors }
}

/// `true` iff `λ_min(H) ≥ −psd_eps·(1 + ‖H‖_2)`.
pub fn is_psd(h: &HermitianMatrix, tol: &Tolerance) -> Result<bool> {
    let values = eigvals_hermitian(h)?;
    Ok(psd_verdict(&values, tol))
}

pub(crate) fn psd_verdict(values: &[f64], tol: &Tolerance) -> bool {
    let min = values.first().copied().unwrap_or(0.0);
    let norm = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    min >= -tol.psd_slack(norm)
}

pub fn min_eigenvalue(h: &HermitianMatrix) -> Result<f64> {
    Ok(eigvals_hermitian(h)?.first().copied().unwrap_or(0.0))
}

/// Frobenius-nearest PSD matrix: clip negative eigenvalues to zero.
pub fn psd_project(h: &HermitianMatrix) -> Result<HermitianMatrix> {
    let eig = eig_hermitian(h)?;
    if eig.min() >= 0.0 {
        return Ok(h.clone());
    }
    Ok(eig.reconstruct_with(|l| l.max(0.0)))
}

/// `tr(A* B)`.
pub fn frobenius_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
    if a.rows != b.rows || a.cols != b.cols {
        return Err(shape(a.shape_str(), b.shape_str()));
    }
    Ok(a.data.iter().zip(&b.data).map(|(x, y)| x.conj() * y).sum())
}
