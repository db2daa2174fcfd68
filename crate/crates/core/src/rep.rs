//! Irreducible representations `S^n C^2` of SU(2).
//!
//! Vectors are stored by their coefficients on the monomials
//! `e1^{n-p} e2^p`, p = 0..n, where each monomial is the sum of its distinct
//! tensor arrangements. The monomial of index p has squared norm
//! `binom(n, p)` and weight `n - 2p`; dividing by the square root of that norm
//! gives the unitary weight basis `u_{n-2p}`.

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

const GROUP_TOL: f64 = 1e-12;

pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Binomial coefficient as a float. Exact for every label this crate uses.
pub fn binom(n: usize, p: usize) -> f64 {
    if p > n {
        return 0.0;
    }
    let p = p.min(n - p);
    let mut acc = 1.0;
    for i in 0..p {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// Diagonal Gram matrix of the monomial basis of `S^n C^2`.
pub fn gram(n: i64) -> Result<DMatrix<f64>> {
    let n = label(n)?;
    Ok(DMatrix::from_diagonal(&DVector::from_iterator(
        n + 1,
        (0..=n).map(|p| binom(n, p)),
    )))
}

pub(crate) fn label(n: i64) -> Result<usize> {
    usize::try_from(n).map_err(|_| Error::Argument(format!("representation label {n} is negative")))
}

/// Square roots of the Gram weights; maps monomial coordinates to unitary
/// weight-basis coordinates.
pub(crate) fn sqrt_gram(n: usize) -> Vec<f64> {
    (0..=n).map(|p| binom(n, p).sqrt()).collect()
}

/// Index p of the weight vector `u_w`.
pub fn weight_index(n: usize, w: i64) -> Result<usize> {
    let ni = n as i64;
    if w < -ni || w > ni || (ni - w) % 2 != 0 {
        return Err(Error::Argument(format!("weight {w} does not occur in S^{n}")));
    }
    Ok(((ni - w) / 2) as usize)
}

#[derive(Debug, Clone, PartialEq)]
pub struct IrrepVector {
    n: usize,
    coeffs: Vec<Complex64>,
}

impl IrrepVector {
    pub fn new(n: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != n + 1 {
            return Err(Error::Mismatch { expected: n + 1, got: coeffs.len() });
        }
        Ok(Self { n, coeffs })
    }

    pub fn zero(n: usize) -> Self {
        Self { n, coeffs: vec![Complex64::new(0.0, 0.0); n + 1] }
    }

    /// Builds a vector from its coordinates in the unitary weight basis.
    pub fn from_unitary(n: usize, u: &DVector<Complex64>) -> Result<Self> {
        if u.len() != n + 1 {
            return Err(Error::Mismatch { expected: n + 1, got: u.len() });
        }
        let s = sqrt_gram(n);
        Ok(Self { n, coeffs: (0..=n).map(|p| u[p] / s[p]).collect() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn unitary_coords(&self) -> DVector<Complex64> {
        let s = sqrt_gram(self.n);
        DVector::from_iterator(self.n + 1, self.coeffs.iter().zip(s).map(|(c, s)| c * s))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(p, c)| binom(self.n, p) * c.norm_sqr())
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { n: self.n, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_label(self.n, other.n)?;
        Ok(Self {
            n: self.n,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(c(-1.0, 0.0)))
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let coeffs = (0..=n)
            .map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self { n, coeffs }
    }
}

pub(crate) fn same_label(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::Mismatch { expected: a, got: b });
    }
    Ok(())
}

/// Unit weight vector `u_w` of `S^n C^2`.
pub fn weight_vector(n: i64, w: i64) -> Result<IrrepVector> {
    let n = label(n)?;
    let p = weight_index(n, w)?;
    let mut v = IrrepVector::zero(n);
    v.coeffs[p] = c(binom(n, p).powf(-0.5), 0.0);
    Ok(v)
}

/// Hermitian product, linear in the first argument.
pub fn inner(v: &IrrepVector, w: &IrrepVector) -> Result<Complex64> {
    same_label(v.n, w.n)?;
    Ok(v.coeffs
        .iter()
        .zip(&w.coeffs)
        .enumerate()
        .map(|(p, (a, b))| a * b.conj() * binom(v.n, p))
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElement(Matrix2<Complex64>);

impl GroupElement {
    pub fn new(m: Matrix2<Complex64>) -> Result<Self> {
        let unitary = (m.adjoint() * m - Matrix2::identity()).norm();
        let det = (m.determinant() - c(1.0, 0.0)).norm();
        if unitary > GROUP_TOL || det > GROUP_TOL {
            return Err(Error::Domain(format!(
                "not in SU(2): unitarity defect {unitary:.3e}, determinant defect {det:.3e}"
            )));
        }
        Ok(Self(m))
    }

    /// Wraps a matrix already known to be special unitary up to rounding.
    pub(crate) fn new_unchecked(m: Matrix2<Complex64>) -> Self {
        Self(m)
    }

    pub fn identity() -> Self {
        Self(Matrix2::identity())
    }

    /// `diag(e^{i theta}, e^{-i theta})`.
    pub fn torus(theta: f64) -> Self {
        let e = Complex64::from_polar(1.0, theta);
        Self(Matrix2::new(e, c(0.0, 0.0), c(0.0, 0.0), e.conj()))
    }

    /// Haar-distributed element (uniform unit quaternion).
    pub fn haar<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut q = [0.0f64; 4];
        loop {
            for x in q.iter_mut() {
                *x = rng.sample(StandardNormal);
            }
            let norm = q.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-8 {
                q.iter_mut().for_each(|x| *x /= norm);
                break;
            }
        }
        let a = c(q[0], q[1]);
        let b = c(q[2], q[3]);
        Self(Matrix2::new(a, -b.conj(), b, a.conj()))
    }

    pub fn matrix(&self) -> &Matrix2<Complex64> {
        &self.0
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self(self.0 * other.0)
    }

    pub fn inverse(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// `exp(X)` for an algebra element.
    pub fn exp(x: &AlgebraElement) -> Self {
        // X^2 = -theta^2 I for traceless anti-Hermitian X
        let m = x.0;
        let theta = (-(m * m)[(0, 0)].re).max(0.0).sqrt();
        let (cos, sinc) = if theta < 1e-8 {
            (1.0 - theta * theta / 2.0, 1.0 - theta * theta / 6.0)
        } else {
            (theta.cos(), theta.sin() / theta)
        };
        Self(Matrix2::identity() * c(cos, 0.0) + m * c(sinc, 0.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgebraElement(Matrix2<Complex64>);

impl AlgebraElement {
    pub fn new(m: Matrix2<Complex64>) -> Result<Self> {
        let herm = (m + m.adjoint()).norm();
        let trace = m.trace().norm();
        if herm > GROUP_TOL || trace > GROUP_TOL {
            return Err(Error::Domain(format!(
                "not in su(2): anti-Hermitian defect {herm:.3e}, trace {trace:.3e}"
            )));
        }
        Ok(Self(m))
    }

    pub fn zero() -> Self {
        Self(Matrix2::zeros())
    }

    /// Real coordinates on the basis `su2_basis()`.
    pub fn from_coords(a: [f64; 3]) -> Self {
        let b = su2_basis();
        Self(b[0].0 * c(a[0], 0.0) + b[1].0 * c(a[1], 0.0) + b[2].0 * c(a[2], 0.0))
    }

    pub fn matrix(&self) -> &Matrix2<Complex64> {
        &self.0
    }

    pub fn bracket(&self, other: &Self) -> Self {
        Self(self.0 * other.0 - other.0 * self.0)
    }

    pub fn scale(&self, t: f64) -> Self {
        Self(self.0 * c(t, 0.0))
    }
}

/// Orthogonal basis of su(2): the torus generator `diag(i, -i)` followed by
/// the two off-diagonal generators spanning its orthogonal complement.
pub fn su2_basis() -> [AlgebraElement; 3] {
    let z = c(0.0, 0.0);
    let i = c(0.0, 1.0);
    let one = c(1.0, 0.0);
    [
        AlgebraElement(Matrix2::new(i, z, z, -i)),
        AlgebraElement(Matrix2::new(z, one, -one, z)),
        AlgebraElement(Matrix2::new(z, i, i, z)),
    ]
}

/// Complement of the torus in su(2).
pub fn complement_basis() -> [AlgebraElement; 2] {
    let [_, x, y] = su2_basis();
    [x, y]
}

/// Raising, lowering and weight operators on monomial coordinates.
fn sl2_generators(n: usize) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
    let d = n + 1;
    let mut e = DMatrix::zeros(d, d);
    let mut f = DMatrix::zeros(d, d);
    let mut h = DMatrix::zeros(d, d);
    for p in 0..d {
        h[(p, p)] = n as f64 - 2.0 * p as f64;
        if p >= 1 {
            e[(p - 1, p)] = (n - p + 1) as f64;
        }
        if p < n {
            f[(p + 1, p)] = (p + 1) as f64;
        }
    }
    (e, f, h)
}

fn to_complex(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|x| c(x, 0.0))
}

/// Matrix of a traceless complex 2x2 matrix acting on monomial coordinates.
pub(crate) fn algebra_matrix_monomial(n: usize, x: &Matrix2<Complex64>) -> DMatrix<Complex64> {
    let (e, f, h) = sl2_generators(n);
    to_complex(&h) * x[(0, 0)] + to_complex(&e) * x[(0, 1)] + to_complex(&f) * x[(1, 0)]
}

/// Same operator on unitary weight-basis coordinates.
pub(crate) fn algebra_matrix_unitary(n: usize, x: &Matrix2<Complex64>) -> DMatrix<Complex64> {
    let d = n + 1;
    let mut out = DMatrix::zeros(d, d);
    for p in 0..d {
        out[(p, p)] = x[(0, 0)] * (n as f64 - 2.0 * p as f64);
        if p >= 1 {
            out[(p - 1, p)] = x[(0, 1)] * ((p * (n - p + 1)) as f64).sqrt();
        }
        if p < n {
            out[(p + 1, p)] = x[(1, 0)] * (((p + 1) * (n - p)) as f64).sqrt();
        }
    }
    out
}

fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![c(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Matrix of `g` on monomial coordinates, by substituting `g e1`, `g e2`
/// into each monomial and expanding.
pub(crate) fn group_matrix_monomial(n: usize, g: &Matrix2<Complex64>) -> DMatrix<Complex64> {
    let d = n + 1;
    let img1 = [g[(0, 0)], g[(1, 0)]];
    let img2 = [g[(0, 1)], g[(1, 1)]];
    let mut poly = DMatrix::zeros(d, d);
    for p in 0..d {
        let mut acc = vec![c(1.0, 0.0)];
        for _ in 0..(n - p) {
            acc = poly_mul(&acc, &img1);
        }
        for _ in 0..p {
            acc = poly_mul(&acc, &img2);
        }
        for (q, v) in acc.into_iter().enumerate() {
            poly[(q, p)] = v;
        }
    }
    // polynomial coefficients are binom-weighted monomial coordinates
    DMatrix::from_fn(d, d, |q, p| poly[(q, p)] * binom(n, p) / binom(n, q))
}

pub(crate) fn group_matrix_unitary(n: usize, g: &Matrix2<Complex64>) -> DMatrix<Complex64> {
    let s = sqrt_gram(n);
    let m = group_matrix_monomial(n, g);
    DMatrix::from_fn(n + 1, n + 1, |q, p| m[(q, p)] * s[q] / s[p])
}

fn apply(m: &DMatrix<Complex64>, v: &IrrepVector) -> IrrepVector {
    let x = DVector::from_column_slice(&v.coeffs);
    let y = m * x;
    IrrepVector { n: v.n, coeffs: y.iter().copied().collect() }
}

pub fn group_action(g: &GroupElement, v: &IrrepVector) -> IrrepVector {
    apply(&group_matrix_monomial(v.n, &g.0), v)
}

pub fn algebra_action(x: &AlgebraElement, v: &IrrepVector) -> IrrepVector {
    apply(&algebra_matrix_monomial(v.n, &x.0), v)
}

/// Invariant antilinear structure: `u_{n-2p} -> (-1)^p u_{-n+2p}`.
pub fn sigma(v: &IrrepVector) -> IrrepVector {
    let n = v.n;
    let mut out = IrrepVector::zero(n);
    for p in 0..=n {
        let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
        out.coeffs[n - p] = v.coeffs[p].conj() * sign;
    }
    out
}

/// Casimir `-sum X_a^2` over `su2_basis()`, on monomial coordinates.
/// Acts on `S^n C^2` as the scalar `n (n + 2)`.
pub fn casimir(n: i64) -> Result<DMatrix<f64>> {
    let n = label(n)?;
    let mut acc = DMatrix::<Complex64>::zeros(n + 1, n + 1);
    for x in su2_basis() {
        let m = algebra_matrix_monomial(n, &x.0);
        acc -= &m * &m;
    }
    Ok(acc.map(|z| z.re))
}

/// Real coordinates `(Re c, Im c)` of a complex vector.
pub(crate) fn realify_vec(v: &DVector<Complex64>) -> DVector<f64> {
    let d = v.len();
    DVector::from_fn(2 * d, |i, _| if i < d { v[i].re } else { v[i - d].im })
}

pub(crate) fn complexify_vec(x: &DVector<f64>) -> DVector<Complex64> {
    let d = x.len() / 2;
    DVector::from_fn(d, |i, _| c(x[i], x[i + d]))
}

/// Real `2d x 2d` matrix of a complex-linear map on `C^d`.
pub(crate) fn realify_mat(m: &DMatrix<Complex64>) -> DMatrix<f64> {
    let d = m.nrows();
    let mut out = DMatrix::zeros(2 * d, 2 * d);
    for i in 0..d {
        for j in 0..d {
            let z = m[(i, j)];
            out[(i, j)] = z.re;
            out[(i, j + d)] = -z.im;
            out[(i + d, j)] = z.im;
            out[(i + d, j + d)] = z.re;
        }
    }
    out
}

/// Multiplication by `i` in realified coordinates.
pub fn complex_structure(dim: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * dim, 2 * dim);
    for i in 0..dim {
        j[(i + dim, i)] = 1.0;
        j[(i, i + dim)] = -1.0;
    }
    j
}

/// Real orthogonal matrix of `g` on the realified unitary coordinates.
pub fn group_matrix_real(n: usize, g: &GroupElement) -> DMatrix<f64> {
    realify_mat(&group_matrix_unitary(n, &g.0))
}

/// Realified unitary-basis matrix of `sigma`. Real symmetric when n is even.
pub fn sigma_matrix_real(n: usize) -> DMatrix<f64> {
    let d = n + 1;
    let mut out = DMatrix::zeros(2 * d, 2 * d);
    for p in 0..d {
        let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
        out[(n - p, p)] = sign;
        out[(n - p + d, p + d)] = -sign;
    }
    out
}

/// A vector of `S^n C^2` seen as a real vector: real and imaginary parts of
/// the monomial coordinates. The monomial Gram weights carry over to both
/// halves.
#[derive(Debug, Clone, PartialEq)]
pub struct RealifiedVector {
    n: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl RealifiedVector {
    pub fn realify(v: &IrrepVector) -> Self {
        Self {
            n: v.n,
            re: v.coeffs.iter().map(|z| z.re).collect(),
            im: v.coeffs.iter().map(|z| z.im).collect(),
        }
    }

    pub fn complexify(&self) -> IrrepVector {
        IrrepVector {
            n: self.n,
            coeffs: self.re.iter().zip(&self.im).map(|(&a, &b)| c(a, b)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Monomial coordinates `(Re, Im)`, length `2(n+1)`.
    pub fn coords(&self) -> Vec<f64> {
        self.re.iter().chain(&self.im).copied().collect()
    }

    /// Coordinates on the orthonormal real basis `(u_w, i u_w)`.
    pub fn orthonormal(&self) -> DVector<f64> {
        realify_vec(&self.complexify().unitary_coords())
    }

    pub fn from_orthonormal(n: usize, x: &DVector<f64>) -> Result<Self> {
        if x.len() != 2 * (n + 1) {
            return Err(Error::Mismatch { expected: 2 * (n + 1), got: x.len() });
        }
        Ok(Self::realify(&IrrepVector::from_unitary(n, &complexify_vec(x))?))
    }

    /// Multiplication by `i`.
    pub fn apply_j(&self) -> Self {
        Self { n: self.n, re: self.im.iter().map(|x| -x).collect(), im: self.re.clone() }
    }
}
