//! Exact rational arithmetic for the combinatorial identities: Gram weights,
//! contraction kernels and Casimir projectors on monomial coordinates.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::contraction::{contract_coeffs, contract_power_coeffs};

pub type Rational = BigRational;

pub fn rational(x: i64) -> Rational {
    BigRational::from_integer(BigInt::from(x))
}

pub fn binom_exact(n: usize, p: usize) -> BigInt {
    if p > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..p {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Monomial Gram product of two real rational coefficient vectors.
pub fn inner_exact(n: usize, a: &[Rational], b: &[Rational]) -> Rational {
    (0..=n)
        .map(|p| BigRational::from_integer(binom_exact(n, p)) * &a[p] * &b[p])
        .fold(Rational::zero(), |x, y| x + y)
}

fn zeros(r: usize, c: usize) -> DMatrix<Rational> {
    DMatrix::from_element(r, c, Rational::zero())
}

pub fn matmul(a: &DMatrix<Rational>, b: &DMatrix<Rational>) -> DMatrix<Rational> {
    assert_eq!(a.ncols(), b.nrows());
    let mut out = zeros(a.nrows(), b.ncols());
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            let x = &a[(i, k)];
            if x.is_zero() {
                continue;
            }
            for j in 0..b.ncols() {
                if !b[(k, j)].is_zero() {
                    out[(i, j)] += x * &b[(k, j)];
                }
            }
        }
    }
    out
}

/// Rank by fraction-exact Gaussian elimination.
pub fn rank(m: &DMatrix<Rational>) -> usize {
    let mut a = m.clone();
    let (rows, cols) = a.shape();
    let mut r = 0;
    for col in 0..cols {
        let Some(pivot) = (r..rows).find(|&i| !a[(i, col)].is_zero()) else {
            continue;
        };
        a.swap_rows(r, pivot);
        let inv = a[(r, col)].recip();
        for j in col..cols {
            a[(r, j)] = &a[(r, j)] * &inv;
        }
        for i in 0..rows {
            if i != r && !a[(i, col)].is_zero() {
                let f = a[(i, col)].clone();
                for j in col..cols {
                    let v = &f * &a[(r, j)];
                    a[(i, j)] -= v;
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// Flattens an `(n+1) x (n+1)` coefficient matrix row-major.
fn flatten(t: &DMatrix<Rational>) -> Vec<Rational> {
    let d = t.nrows();
    (0..d * d).map(|i| t[(i / d, i % d)].clone()).collect()
}

/// Matrix of `j` contractions on row-major monomial tensor coordinates.
pub fn contraction_power_matrix(n: usize, j: usize) -> DMatrix<Rational> {
    let din = (n + 1) * (n + 1);
    let m = n - j + 1;
    let mut out = zeros(m * m, din);
    for i in 0..din {
        let mut e = zeros(n + 1, n + 1);
        e[(i / (n + 1), i % (n + 1))] = Rational::one();
        let img = if j == 1 { contract_coeffs(&e) } else { contract_power_coeffs(&e, j) };
        for (r, v) in flatten(&img).into_iter().enumerate() {
            out[(r, i)] = v;
        }
    }
    out
}

pub fn contraction_kernel_dim(n: usize) -> usize {
    (n + 1) * (n + 1) - rank(&contraction_power_matrix(n, 1))
}

fn sl2_integer(n: usize) -> [DMatrix<Rational>; 3] {
    let d = n + 1;
    let mut e = zeros(d, d);
    let mut f = zeros(d, d);
    let mut h = zeros(d, d);
    for p in 0..d {
        h[(p, p)] = rational(n as i64 - 2 * p as i64);
        if p >= 1 {
            e[(p - 1, p)] = rational((n - p + 1) as i64);
        }
        if p < n {
            f[(p + 1, p)] = rational((p + 1) as i64);
        }
    }
    [e, f, h]
}

fn kron(a: &DMatrix<Rational>, b: &DMatrix<Rational>) -> DMatrix<Rational> {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            if a[(i, j)].is_zero() {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = &a[(i, j)] * &b[(k, l)];
                }
            }
        }
    }
    out
}

/// Integer Casimir of the diagonal action on monomial tensor coordinates;
/// `m (m + 2)` on the `S^m` summand.
pub fn tensor_casimir_exact(n: usize) -> DMatrix<Rational> {
    let id = DMatrix::from_fn(n + 1, n + 1, |i, j| if i == j { Rational::one() } else { Rational::zero() });
    let [e, f, h] = sl2_integer(n).map(|y| kron(&y, &id) + kron(&id, &y));
    let hh = matmul(&h, &h);
    let ef = matmul(&e, &f) + matmul(&f, &e);
    hh + &ef + ef
}

/// Projector onto `S^m` as a Lagrange polynomial in the Casimir.
pub fn isotypic_projector_exact(n: usize, m: usize) -> DMatrix<Rational> {
    let cas = tensor_casimir_exact(n);
    let dim = cas.nrows();
    let id = DMatrix::from_fn(dim, dim, |i, j| if i == j { Rational::one() } else { Rational::zero() });
    let lam = |m: usize| rational((m * (m + 2)) as i64);
    let mut p = id.clone();
    for j in 0..=n {
        let other = 2 * j;
        if other == m {
            continue;
        }
        let factor = (&cas - &id * lam(other)) * (lam(m) - lam(other)).recip();
        p = matmul(&p, &factor);
    }
    p
}

pub fn is_zero(m: &DMatrix<Rational>) -> bool {
    m.iter().all(|x| x.is_zero())
}

pub fn max_abs(m: &DMatrix<Rational>) -> Rational {
    m.iter().map(|x| x.abs()).fold(Rational::zero(), |a, b| if b > a { b } else { a })
}
