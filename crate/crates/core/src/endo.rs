//! Real symmetric endomorphisms of the realified representation space.
//!
//! Matrices act on the orthonormal real coordinates `(Re c, Im c)` of the
//! unitary weight-basis coordinates `c`. In these coordinates Gram-adjoint
//! means transpose; [`SymEndo::from_monomial`] and [`SymEndo::to_monomial`]
//! convert from and to the Gram-weighted monomial coordinates.
//!
//! A symmetric tensor `t` in `S^2(S^n C^2)` is identified with the
//! J-anticommuting symmetric endomorphism `v -> t^T conj(v)`, with real matrix
//! `[[Re t, Im t], [Im t, -Re t]]`. The identification is equivariant and
//! doubles squared Hilbert-Schmidt norms.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{op_norm, sym_eigen};
use crate::rep::{c, complex_structure, group_matrix_real, same_label, sqrt_gram, GroupElement, IrrepVector};
use crate::tensor::{tensor_of, TensorElement};

const SYM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SymEndo {
    n: usize,
    m: DMatrix<f64>,
}

impl SymEndo {
    /// `n` is the representation label; `m` must be a symmetric
    /// `2(n+1) x 2(n+1)` matrix.
    pub fn new(n: usize, m: DMatrix<f64>) -> Result<Self> {
        let d = 2 * (n + 1);
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::Mismatch { expected: d, got: m.nrows() });
        }
        let asym = (&m - m.transpose()).norm();
        if asym > SYM_TOL * m.norm().max(1.0) {
            return Err(Error::Domain(format!("matrix is not symmetric (defect {asym:.3e})")));
        }
        let m = (&m + m.transpose()) * 0.5;
        Ok(Self { n, m })
    }

    pub fn zero(n: usize) -> Self {
        let d = 2 * (n + 1);
        Self { n, m: DMatrix::zeros(d, d) }
    }

    pub fn identity(n: usize) -> Self {
        let d = 2 * (n + 1);
        Self { n, m: DMatrix::identity(d, d) }
    }

    /// Symmetric matrix in realified monomial coordinates (self-adjoint for the
    /// realified Gram product).
    pub fn from_monomial(n: usize, m: &DMatrix<f64>) -> Result<Self> {
        let s = realified_sqrt_gram(n);
        let d = s.len();
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::Mismatch { expected: d, got: m.nrows() });
        }
        Self::new(n, DMatrix::from_fn(d, d, |i, j| s[i] * m[(i, j)] / s[j]))
    }

    pub fn to_monomial(&self) -> DMatrix<f64> {
        let s = realified_sqrt_gram(self.n);
        let d = s.len();
        DMatrix::from_fn(d, d, |i, j| self.m[(i, j)] * s[j] / s[i])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Complex dimension `N = n + 1` of the underlying space.
    pub fn complex_dim(&self) -> usize {
        self.n + 1
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.m
    }

    pub fn op_norm(&self) -> f64 {
        op_norm(&self.m)
    }

    /// Hilbert-Schmidt norm.
    pub fn norm(&self) -> f64 {
        self.m.norm()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        sym_eigen(&self.m).0.iter().copied().collect()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_label(self.n, other.n)?;
        Ok(Self { n: self.n, m: &self.m + &other.m })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        same_label(self.n, other.n)?;
        Ok(Self { n: self.n, m: &self.m - &other.m })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { n: self.n, m: &self.m * s }
    }

    /// `R(g) S R(g)^T`.
    pub fn conjugate(&self, g: &GroupElement) -> Self {
        let r = group_matrix_real(self.n, g);
        Self { n: self.n, m: &r * &self.m * r.transpose() }
    }

    /// Norm of `JS + SJ` relative to the norm of `S`.
    pub fn j_commutation_defect(&self) -> f64 {
        let j = complex_structure(self.n + 1);
        (&j * &self.m - &self.m * &j).norm() / self.m.norm().max(f64::MIN_POSITIVE)
    }

    pub fn j_anticommutation_defect(&self) -> f64 {
        let j = complex_structure(self.n + 1);
        (&j * &self.m + &self.m * &j).norm() / self.m.norm().max(f64::MIN_POSITIVE)
    }
}

fn realified_sqrt_gram(n: usize) -> Vec<f64> {
    let s = sqrt_gram(n);
    s.iter().chain(s.iter()).copied().collect()
}

/// Splits `S` into its J-commuting and J-anticommuting parts.
pub fn split_j(s: &SymEndo) -> (SymEndo, SymEndo) {
    let j = complex_structure(s.n + 1);
    let jsj = &j * &s.m * &j;
    let commuting = (&s.m - &jsj) * 0.5;
    let anti = (&s.m + &jsj) * 0.5;
    (SymEndo { n: s.n, m: commuting }, SymEndo { n: s.n, m: anti })
}

/// J-anticommuting endomorphism of a symmetric tensor given on unitary
/// coordinates.
fn endo_of_unitary(n: usize, t: &DMatrix<Complex64>) -> SymEndo {
    let d = n + 1;
    let mut m = DMatrix::zeros(2 * d, 2 * d);
    for i in 0..d {
        for j in 0..d {
            let z = t[(i, j)];
            m[(i, j)] = z.re;
            m[(i, j + d)] = z.im;
            m[(i + d, j)] = z.im;
            m[(i + d, j + d)] = -z.re;
        }
    }
    SymEndo { n, m: (&m + m.transpose()) * 0.5 }
}

/// The endomorphism of the symmetric tensor `a (x) b + b (x) a`.
pub fn endo_from_pair(a: &IrrepVector, b: &IrrepVector) -> Result<SymEndo> {
    let t = tensor_of(a, b)?;
    endo_from_tensor(&t.add(&t.swap())?)
}

/// Inverse of [`endo_to_tensor`] on symmetric tensors.
pub fn endo_from_tensor(t: &TensorElement) -> Result<SymEndo> {
    if !t.is_symmetric(1e-10) {
        return Err(Error::Domain("tensor is not symmetric".into()));
    }
    Ok(endo_of_unitary(t.n(), &t.unitary_coords()))
}

pub fn endo_to_tensor(x: &SymEndo) -> Result<TensorElement> {
    if x.m.norm() > 0.0 && x.j_anticommutation_defect() > 1e-10 {
        return Err(Error::Domain(format!(
            "endomorphism is not J-anticommuting (defect {:.3e})",
            x.j_anticommutation_defect()
        )));
    }
    let d = x.n + 1;
    let t = DMatrix::from_fn(d, d, |i, j| c(x.m[(i, j)], x.m[(i + d, j)]));
    TensorElement::from_unitary(x.n, &t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::weight_vector;

    #[test]
    fn identity_is_j_commuting() {
        let (c, a) = split_j(&SymEndo::identity(3));
        assert_eq!(c, SymEndo::identity(3));
        assert!(a.norm() == 0.0);
    }

    #[test]
    fn pair_of_weight_vectors() {
        let (n, k) = (4i64, 2i64);
        let a = weight_vector(n, k - 2).unwrap();
        let b = weight_vector(n, k).unwrap();
        let x = endo_from_pair(&a, &b).unwrap();
        let t = endo_to_tensor(&x).unwrap();
        let ab = tensor_of(&a, &b).unwrap();
        let want = ab.add(&ab.swap()).unwrap();
        assert!(t.sub(&want).unwrap().norm() < 1e-14);
        assert_eq!(endo_from_pair(&b, &a).unwrap(), x);
    }

    #[test]
    fn commuting_input_rejected() {
        assert!(matches!(endo_to_tensor(&SymEndo::identity(2)), Err(Error::Domain(_))));
        assert!(SymEndo::new(1, DMatrix::from_fn(4, 4, |i, j| (i * 4 + j) as f64)).is_err());
    }

    #[test]
    fn monomial_roundtrip() {
        let m = DMatrix::from_fn(6, 6, |i, j| ((i + 1) * (j + 1)) as f64 + if i == j { 1.0 } else { 0.0 });
        let s = SymEndo::new(2, m).unwrap();
        let back = SymEndo::from_monomial(2, &s.to_monomial()).unwrap();
        assert!((back.matrix() - s.matrix()).norm() < 1e-12);
    }
}
