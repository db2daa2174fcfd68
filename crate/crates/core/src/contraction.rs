//! The invariant contraction `S^n (x) S^n -> S^{n-1} (x) S^{n-1}`, its
//! iterates, the isometric rescaling and the induced correspondence between
//! moduli ambients of neighbouring labels.
//!
//! On monomial coordinates the contraction pairs the last factor of the left
//! monomial with the first factor of the right one through the symplectic
//! form `w(e1, e2) = 1`:
//!
//! `E_p (x) E_q -> E_p (x) E_{q-1} - E_{p-1} (x) E_q`,
//!
//! with out-of-range terms dropped.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, DVector, Scalar};
use num_complex::Complex64;
use num_traits::Num;

use crate::endo::{endo_from_tensor, endo_to_tensor, SymEndo};
use crate::error::{Error, Result};
use crate::rep::c;
use crate::span::{eigenspace_label, moduli_ambient};
use crate::tensor::{isotypic_projector, TensorElement};

/// Row `j` of Pascal's triangle built by repeated addition.
fn pascal_row<T: Clone + Num>(j: usize) -> Vec<T> {
    let mut row = vec![T::one()];
    for _ in 0..j {
        let mut next = vec![T::one(); row.len() + 1];
        for i in 1..row.len() {
            next[i] = row[i - 1].clone() + row[i].clone();
        }
        row = next;
    }
    row
}

/// One contraction on monomial coordinates of any scalar type.
pub fn contract_coeffs<T: Scalar + Num>(t: &DMatrix<T>) -> DMatrix<T> {
    let n = t.nrows() - 1;
    let mut out = DMatrix::from_element(n, n, T::zero());
    for p in 0..=n {
        for q in 0..=n {
            let a = t[(p, q)].clone();
            if a.is_zero() {
                continue;
            }
            if p < n && q >= 1 {
                out[(p, q - 1)] = out[(p, q - 1)].clone() + a.clone();
            }
            if p >= 1 && q < n {
                out[(p - 1, q)] = out[(p - 1, q)].clone() - a;
            }
        }
    }
    out
}

/// `j` contractions at once:
/// `E_p (x) E_q -> sum_b (-1)^b binom(j, b) E_{p-b} (x) E_{q-j+b}`,
/// keeping the terms whose indices fit in `S^{n-j}`.
pub fn contract_power_coeffs<T: Scalar + Num>(t: &DMatrix<T>, j: usize) -> DMatrix<T> {
    let n = t.nrows() - 1;
    assert!(j <= n, "cannot contract S^{n} {j} times");
    let m = n - j;
    let binoms = pascal_row::<T>(j);
    let mut out = DMatrix::from_element(m + 1, m + 1, T::zero());
    for p in 0..=n {
        for q in 0..=n {
            let a = t[(p, q)].clone();
            if a.is_zero() {
                continue;
            }
            for b in 0..=j {
                let rest = j - b;
                if p < b || q < rest || p - b > m || q - rest > m {
                    continue;
                }
                let term = binoms[b].clone() * a.clone();
                let cell = &mut out[(p - b, q - rest)];
                *cell = if b % 2 == 0 { cell.clone() + term } else { cell.clone() - term };
            }
        }
    }
    out
}

pub fn contract(t: &TensorElement) -> Result<TensorElement> {
    if t.n() == 0 {
        return Err(Error::Argument("cannot contract S^0 (x) S^0".into()));
    }
    TensorElement::new(t.n() - 1, contract_coeffs(t.coeffs()))
}

/// The `2r`-fold contraction.
pub fn contract_power(t: &TensorElement, r: usize) -> Result<TensorElement> {
    if 2 * r > t.n() {
        return Err(Error::Argument(format!("{} contractions exceed the label {}", 2 * r, t.n())));
    }
    TensorElement::new(t.n() - 2 * r, contract_power_coeffs(t.coeffs(), 2 * r))
}

/// Matrix of a tensor map on row-major unitary coordinates.
fn unitary_matrix(
    n_in: usize,
    n_out: usize,
    f: impl Fn(&TensorElement) -> Result<TensorElement>,
) -> Result<DMatrix<f64>> {
    let din = (n_in + 1) * (n_in + 1);
    let dout = (n_out + 1) * (n_out + 1);
    let mut m = DMatrix::zeros(dout, din);
    for i in 0..din {
        let mut e = DVector::zeros(din);
        e[i] = c(1.0, 0.0);
        let img = f(&TensorElement::from_unitary_vec(n_in, &e)?)?.unitary_vec();
        for r in 0..dout {
            m[(r, i)] = img[r].re;
        }
    }
    Ok(m)
}

/// Matrix of the contraction on unitary coordinates.
pub fn contraction_matrix(n: usize) -> Result<DMatrix<f64>> {
    if n == 0 {
        return Err(Error::Argument("cannot contract S^0 (x) S^0".into()));
    }
    unitary_matrix(n, n - 1, contract)
}

/// Per-summand scale factors making the contraction an isometry on each
/// `S^{2n-2r}`, r = 1..n, keyed by the summand label `2n - 2r`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionConstants {
    pub n: usize,
    pub c: BTreeMap<usize, f64>,
}

impl ContractionConstants {
    pub fn get(&self, m: usize) -> Option<f64> {
        self.c.get(&m).copied()
    }
}

struct Modified {
    constants: ContractionConstants,
    matrix: DMatrix<f64>,
}

fn modified(n: usize) -> Result<Arc<Modified>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Modified>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(m) = cache.lock().unwrap().get(&n) {
        return Ok(m.clone());
    }
    let cmat = contraction_matrix(n)?;
    let mut constants = BTreeMap::new();
    let mut matrix = DMatrix::zeros(n * n, (n + 1) * (n + 1));
    for r in 1..=n {
        let label = 2 * n - 2 * r;
        let proj = isotypic_projector(n, label)?;
        let p = proj.matrix();
        let (col, _) = p
            .diagonal()
            .iter()
            .enumerate()
            .fold((0, f64::MIN), |best, (i, &v)| if v > best.1 { (i, v) } else { best });
        let probe = p.column(col) / p.column(col).norm();
        let gain = (&cmat * probe).norm();
        if gain < 1e-12 {
            return Err(Error::Consistency(format!("contraction annihilates S^{label} in S^{n} (x) S^{n}")));
        }
        constants.insert(label, 1.0 / gain);
        matrix += &cmat * p * (1.0 / gain);
    }
    let entry = Arc::new(Modified { constants: ContractionConstants { n, c: constants }, matrix });
    cache.lock().unwrap().insert(n, entry.clone());
    Ok(entry)
}

pub fn modified_constants(n: usize) -> Result<ContractionConstants> {
    if n == 0 {
        return Err(Error::Argument("modified contraction needs n >= 1".into()));
    }
    Ok(modified(n)?.constants.clone())
}

/// Matrix of the rescaled contraction on unitary coordinates. Its transpose
/// is the adjoint.
pub fn modified_matrix(n: usize) -> Result<DMatrix<f64>> {
    if n == 0 {
        return Err(Error::Argument("modified contraction needs n >= 1".into()));
    }
    Ok(modified(n)?.matrix.clone())
}

fn apply_real(m: &DMatrix<f64>, v: &DVector<Complex64>) -> DVector<Complex64> {
    let re = m * v.map(|z| z.re);
    let im = m * v.map(|z| z.im);
    DVector::from_fn(re.len(), |i, _| c(re[i], im[i]))
}

/// Rescaled contraction, or with `adjoint` its adjoint from the smaller
/// space `S^n (x) S^n` to `S^{n+1} (x) S^{n+1}`.
pub fn contract_modified(t: &TensorElement, adjoint: bool) -> Result<TensorElement> {
    if adjoint {
        let n = t.n() + 1;
        let m = modified(n)?;
        TensorElement::from_unitary_vec(n, &apply_real(&m.matrix.transpose(), &t.unitary_vec()))
    } else {
        if t.n() == 0 {
            return Err(Error::Argument("cannot contract S^0 (x) S^0".into()));
        }
        let m = modified(t.n())?;
        TensorElement::from_unitary_vec(t.n() - 1, &apply_real(&m.matrix, &t.unitary_vec()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `(k, l) -> (k, l - 1)`
    Down,
    /// `(k, l) -> (k, l + 1)`
    Up,
}

pub const AMBIENT_TOL: f64 = 1e-8;

/// Transports a moduli direction to the neighbouring label by the squared
/// rescaled contraction (or its adjoint) and restores the operator norm.
pub fn correspond(d: &SymEndo, k: i64, l: usize, direction: Direction) -> Result<SymEndo> {
    let n = eigenspace_label(k, l);
    if d.n() != n {
        return Err(Error::Mismatch { expected: n, got: d.n() });
    }
    let target_l = match direction {
        Direction::Down if l == 0 => {
            return Err(Error::Argument("cannot lower l = 0".into()));
        }
        Direction::Down => l - 1,
        Direction::Up => l + 1,
    };
    let residual = moduli_ambient(k, l)?.residual(d.matrix());
    if residual > AMBIENT_TOL {
        return Err(Error::Domain(format!("not in the moduli ambient (residual {residual:.3e})")));
    }
    let norm = d.op_norm();
    if norm >= 1.0 {
        return Err(Error::Domain(format!("operator norm {norm} is not below 1")));
    }
    let target_n = eigenspace_label(k, target_l);
    if d.norm() == 0.0 {
        return Ok(SymEndo::zero(target_n));
    }
    let adjoint = direction == Direction::Up;
    let t = endo_to_tensor(d)?;
    let t2 = contract_modified(&contract_modified(&t, adjoint)?, adjoint)?;
    let moved = endo_from_tensor(&t2)?;
    if moved.norm() < 1e-10 * d.norm() {
        return Err(Error::Consistency(
            "squared contraction vanishes on a nonzero ambient element".into(),
        ));
    }
    Ok(moved.scale(norm / moved.op_norm()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(t: &TensorElement) -> Complex64 {
        t.coeffs()[(0, 0)]
    }

    #[test]
    fn degree_one_values() {
        let c12 = contract(&TensorElement::monomial(1, 0, 1)).unwrap();
        let c21 = contract(&TensorElement::monomial(1, 1, 0)).unwrap();
        let c11 = contract(&TensorElement::monomial(1, 0, 0)).unwrap();
        assert_eq!(scalar(&c12), c(1.0, 0.0));
        assert_eq!(scalar(&c21), c(-1.0, 0.0));
        assert_eq!(scalar(&c11), c(0.0, 0.0));
    }

    #[test]
    fn argument_errors() {
        assert!(contract(&TensorElement::zero(0)).is_err());
        assert!(contract_power(&TensorElement::zero(3), 2).is_err());
        assert!(modified_constants(0).is_err());
    }

    #[test]
    fn zero_power_is_identity() {
        let t = TensorElement::monomial(3, 1, 2);
        assert_eq!(contract_power(&t, 0).unwrap(), t);
    }

    #[test]
    fn constants_positive() {
        for n in 1..=8 {
            let k = modified_constants(n).unwrap();
            assert_eq!(k.c.len(), n);
            assert!(k.c.values().all(|&x| x > 0.0));
        }
    }

    #[test]
    fn zero_corresponds_to_zero() {
        let out = correspond(&SymEndo::zero(4), 2, 1, Direction::Down).unwrap();
        assert_eq!(out, SymEndo::zero(2));
        assert!(correspond(&SymEndo::zero(2), 2, 0, Direction::Down).is_err());
    }
}
