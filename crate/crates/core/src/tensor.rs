//! `S^n C^2 (x) S^n C^2` and its Clebsch-Gordan decomposition.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::sym_eigen;
use crate::rep::{binom, c, group_matrix_monomial, same_label, sqrt_gram, GroupElement, IrrepVector};

/// Coefficients on the products of monomials, entry (p, q) multiplying
/// `e1^{n-p} e2^p (x) e1^{n-q} e2^q`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorElement {
    n: usize,
    coeffs: DMatrix<Complex64>,
}

impl TensorElement {
    pub fn new(n: usize, coeffs: DMatrix<Complex64>) -> Result<Self> {
        if coeffs.nrows() != n + 1 || coeffs.ncols() != n + 1 {
            return Err(Error::Mismatch { expected: n + 1, got: coeffs.nrows().max(coeffs.ncols()) });
        }
        Ok(Self { n, coeffs })
    }

    pub fn zero(n: usize) -> Self {
        Self { n, coeffs: DMatrix::zeros(n + 1, n + 1) }
    }

    /// Product of two monomials `E_p (x) E_q`.
    pub fn monomial(n: usize, p: usize, q: usize) -> Self {
        let mut t = Self::zero(n);
        t.coeffs[(p, q)] = c(1.0, 0.0);
        t
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &DMatrix<Complex64> {
        &self.coeffs
    }

    /// Coefficients on the orthonormal basis `u (x) u`.
    pub fn unitary_coords(&self) -> DMatrix<Complex64> {
        let s = sqrt_gram(self.n);
        DMatrix::from_fn(self.n + 1, self.n + 1, |p, q| self.coeffs[(p, q)] * s[p] * s[q])
    }

    pub fn from_unitary(n: usize, t: &DMatrix<Complex64>) -> Result<Self> {
        let s = sqrt_gram(n);
        let coeffs = DMatrix::from_fn(t.nrows(), t.ncols(), |p, q| t[(p, q)] / (s[p] * s[q]));
        Self::new(n, coeffs)
    }

    /// Row-major flattening of the unitary coordinates.
    pub fn unitary_vec(&self) -> DVector<Complex64> {
        let u = self.unitary_coords();
        let d = self.n + 1;
        DVector::from_fn(d * d, |i, _| u[(i / d, i % d)])
    }

    pub fn from_unitary_vec(n: usize, v: &DVector<Complex64>) -> Result<Self> {
        let d = n + 1;
        if v.len() != d * d {
            return Err(Error::Mismatch { expected: d * d, got: v.len() });
        }
        Self::from_unitary(n, &DMatrix::from_fn(d, d, |p, q| v[p * d + q]))
    }

    pub fn norm_sqr(&self) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for p in 0..=n {
            for q in 0..=n {
                acc += binom(n, p) * binom(n, q) * self.coeffs[(p, q)].norm_sqr();
            }
        }
        acc
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        same_label(self.n, other.n)?;
        let a = self.unitary_coords();
        let b = other.unitary_coords();
        Ok(a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum())
    }

    /// Exchanges the two factors.
    pub fn swap(&self) -> Self {
        Self { n: self.n, coeffs: self.coeffs.transpose() }
    }

    pub fn symmetrize(&self) -> Self {
        Self { n: self.n, coeffs: (&self.coeffs + self.coeffs.transpose()) * c(0.5, 0.0) }
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (&self.coeffs - self.coeffs.transpose()).norm() <= tol * self.coeffs.norm().max(1.0)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_label(self.n, other.n)?;
        Ok(Self { n: self.n, coeffs: &self.coeffs + &other.coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        same_label(self.n, other.n)?;
        Ok(Self { n: self.n, coeffs: &self.coeffs - &other.coeffs })
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { n: self.n, coeffs: &self.coeffs * s }
    }

    /// Diagonal action `g (x) g`.
    pub fn act(&self, g: &GroupElement) -> Self {
        let m = group_matrix_monomial(self.n, g.matrix());
        Self { n: self.n, coeffs: &m * &self.coeffs * m.transpose() }
    }
}

pub fn tensor_of(v: &IrrepVector, w: &IrrepVector) -> Result<TensorElement> {
    same_label(v.n(), w.n())?;
    let d = v.n() + 1;
    let coeffs = DMatrix::from_fn(d, d, |p, q| v.coeffs()[p] * w.coeffs()[q]);
    TensorElement::new(v.n(), coeffs)
}

/// Raising operator on unitary coordinates. The lowering operator is its
/// transpose.
pub(crate) fn raising_unitary(n: usize) -> DMatrix<f64> {
    let mut e = DMatrix::zeros(n + 1, n + 1);
    for p in 1..=n {
        e[(p - 1, p)] = ((p * (n - p + 1)) as f64).sqrt();
    }
    e
}

fn diag_op(y: &DMatrix<f64>) -> DMatrix<f64> {
    let id = DMatrix::identity(y.nrows(), y.ncols());
    y.kronecker(&id) + id.kronecker(y)
}

/// Casimir of the diagonal action on row-major unitary tensor coordinates.
/// Acts on the `S^m` component as `m (m + 2)`.
pub fn tensor_casimir(n: usize) -> DMatrix<f64> {
    let e = diag_op(&raising_unitary(n));
    let f = e.transpose();
    let h = diag_op(&DMatrix::from_fn(n + 1, n + 1, |i, j| {
        if i == j {
            n as f64 - 2.0 * i as f64
        } else {
            0.0
        }
    }));
    &h * &h + (&e * &f + &f * &e) * 2.0
}

/// Orthogonal projector onto the `S^m` summand of `S^n (x) S^n`, as a real
/// matrix on row-major unitary tensor coordinates.
#[derive(Debug, Clone)]
pub struct IsotypicProjector {
    n: usize,
    m: usize,
    matrix: Arc<DMatrix<f64>>,
}

impl IsotypicProjector {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.matrix.trace().round() as usize
    }

    pub fn apply(&self, t: &TensorElement) -> Result<TensorElement> {
        same_label(self.n, t.n())?;
        let v = t.unitary_vec();
        let out = self.matrix.map(|x| c(x, 0.0)) * v;
        TensorElement::from_unitary_vec(self.n, &out)
    }
}

type ProjectorTable = HashMap<usize, Arc<Vec<Arc<DMatrix<f64>>>>>;

fn projector_table(n: usize) -> Arc<Vec<Arc<DMatrix<f64>>>> {
    static CACHE: OnceLock<Mutex<ProjectorTable>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().unwrap().get(&n) {
        return t.clone();
    }
    let (vals, vecs) = sym_eigen(&tensor_casimir(n));
    let dim = (n + 1) * (n + 1);
    // index j holds the projector onto S^{2j}
    let mut table = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let m = 2 * j;
        let target = (m * (m + 2)) as f64;
        let mut p = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            if (vals[i] - target).abs() < 0.5 {
                let v = vecs.column(i);
                p += &v * v.transpose();
            }
        }
        table.push(Arc::new(p));
    }
    let table = Arc::new(table);
    cache.lock().unwrap().insert(n, table.clone());
    table
}

pub fn isotypic_projector(n: usize, m: usize) -> Result<IsotypicProjector> {
    if m > 2 * n || m % 2 != 0 {
        return Err(Error::Argument(format!("S^{m} is not a summand of S^{n} (x) S^{n}")));
    }
    let matrix = projector_table(n)[m / 2].clone();
    Ok(IsotypicProjector { n, m, matrix })
}
