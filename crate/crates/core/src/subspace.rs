//! Real-linear subspaces of hermitian matrices with an orthonormal basis
//! under the Frobenius inner product.
//!
//! A family of hermitian matrices that is orthonormal for `Re tr(A B)` is
//! also orthonormal for the complex inner product `tr(A* B)`, so the same
//! basis decides membership of arbitrary complex matrices in the complex span.

use crate::matrix::{frobenius_inner, ComplexMatrix, HermitianMatrix, C64};

#[derive(Clone, Debug)]
pub struct RealSubspace {
    dim: usize,
    basis: Vec<HermitianMatrix>,
}

impl RealSubspace {
    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            basis: Vec::new(),
        }
    }

    /// Orthonormalize `candidates` in order, dropping those whose residual
    /// against the span so far is at most `eps·(1 + ‖c‖_F)`.
    pub fn spanned_by<I>(dim: usize, candidates: I, eps: f64) -> Self
    where
        I: IntoIterator<Item = HermitianMatrix>,
    {
        let mut s = Self::empty(dim);
        for c in candidates {
            s.push(&c, eps);
        }
        s
    }

    /// Trust `basis` as already orthonormal.
    pub(crate) fn from_orthonormal(dim: usize, basis: Vec<HermitianMatrix>) -> Self {
        Self { dim, basis }
    }

    /// Adds the component of `h` orthogonal to the current span; returns
    /// whether the dimension grew.
    pub fn push(&mut self, h: &HermitianMatrix, eps: f64) -> bool {
        debug_assert_eq!(h.dim(), self.dim);
        let scale = h.frobenius_norm();
        let mut r = h.clone();
        // Two passes of modified Gram–Schmidt.
        for _ in 0..2 {
            for b in &self.basis {
                let c = b.real_inner(&r);
                r = r.sub(&b.scale(c));
            }
        }
        let norm = r.frobenius_norm();
        if norm <= eps * (1.0 + scale) || norm == 0.0 {
            return false;
        }
        self.basis.push(r.scale(1.0 / norm));
        true
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    /// Real dimension of the span, equal to the complex dimension of its
    /// complexification.
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[HermitianMatrix] {
        &self.basis
    }

    /// Complex coordinates `tr(b_r* M)` of `m` against the basis.
    pub fn coordinates(&self, m: &ComplexMatrix) -> Vec<C64> {
        self.basis
            .iter()
            .map(|b| frobenius_inner(b.as_matrix(), m).expect("shape checked by caller"))
            .collect()
    }

    pub fn combine(&self, coords: &[C64]) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for (b, &c) in self.basis.iter().zip(coords) {
            out.axpy(c, b.as_matrix());
        }
        out
    }

    pub fn combine_real(&self, coords: &[f64]) -> HermitianMatrix {
        let mut out = HermitianMatrix::zeros(self.dim);
        for (b, &c) in self.basis.iter().zip(coords) {
            out = out.add(&b.scale(c));
        }
        out
    }

    /// Orthogonal projection onto the complex span.
    pub fn project(&self, m: &ComplexMatrix) -> ComplexMatrix {
        self.combine(&self.coordinates(m))
    }

    pub fn residual(&self, m: &ComplexMatrix) -> f64 {
        (m - &self.project(m)).frobenius_norm()
    }

    pub fn contains(&self, m: &ComplexMatrix, eps: f64) -> bool {
        m.rows() == self.dim
            && m.cols() == self.dim
            && self.residual(m) <= eps * (1.0 + m.frobenius_norm())
    }

    pub fn contains_subspace(&self, other: &RealSubspace, eps: f64) -> bool {
        other.basis.iter().all(|b| self.contains(b.as_matrix(), eps))
    }

    pub fn same_span(&self, other: &RealSubspace, eps: f64) -> bool {
        self.len() == other.len()
            && self.contains_subspace(other, eps)
            && other.contains_subspace(self, eps)
    }

    /// Span of both subspaces.
    pub fn join(&self, other: &RealSubspace, eps: f64) -> RealSubspace {
        let mut s = self.clone();
        for b in &other.basis {
            s.push(b, eps);
        }
        s
    }

    /// `dim(U ∩ W) = dim U + dim W − dim(U + W)`.
    pub fn intersection_dim(&self, other: &RealSubspace, eps: f64) -> usize {
        self.len() + other.len() - self.join(other, eps).len()
    }
}
