//! The sigma-fixed real form of `S^{2m} C^2`, a real irreducible
//! representation of dimension `2m + 1`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::rep::{group_matrix_real, weight_index, GroupElement};

/// Orthonormal basis of the real form, as columns of a `2(n+1) x (n+1)`
/// matrix in realified unitary coordinates. `n` must be even.
pub fn real_form_basis(n: usize) -> Result<DMatrix<f64>> {
    if n % 2 != 0 {
        return Err(Error::Argument(format!("S^{n} has no real form (odd label)")));
    }
    let d = n + 1;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut b = DMatrix::zeros(2 * d, d);
    let mut col = 0;
    for p in 0..n / 2 {
        let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
        // u_p + (-1)^p u_{n-p}
        b[(p, col)] = h;
        b[(n - p, col)] = sign * h;
        col += 1;
        // i u_p - i (-1)^p u_{n-p}
        b[(d + p, col)] = h;
        b[(d + n - p, col)] = -sign * h;
        col += 1;
    }
    let mid = n / 2;
    if mid % 2 == 0 {
        b[(mid, col)] = 1.0;
    } else {
        b[(d + mid, col)] = 1.0;
    }
    Ok(b)
}

/// Orthogonal matrix of `g` on real-form coordinates.
pub fn real_form_group_matrix(n: usize, basis: &DMatrix<f64>, g: &GroupElement) -> DMatrix<f64> {
    basis.transpose() * group_matrix_real(n, g) * basis
}

/// Real-form coordinates of the realified vector `c u_w + sigma(c u_w)`
/// for `c = 1` and `c = i`, orthonormalized. For `w = 0` the two coincide up
/// to scale and a single column is returned.
pub fn weight_pair(n: usize, basis: &DMatrix<f64>, w: i64) -> Result<DMatrix<f64>> {
    let p = weight_index(n, w)?;
    let d = n + 1;
    let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
    let mut one = DVector::zeros(2 * d);
    one[p] += 1.0;
    one[n - p] += sign;
    let mut imag = DVector::zeros(2 * d);
    imag[d + p] += 1.0;
    imag[d + n - p] -= sign;
    let mut cols: Vec<DVector<f64>> = Vec::new();
    for v in [one, imag] {
        let mut x = basis.transpose() * v;
        for q in &cols {
            let proj = q.dot(&x);
            x.axpy(-proj, q, 1.0);
        }
        let norm = x.norm();
        if norm > 1e-12 {
            cols.push(x / norm);
        }
    }
    Ok(DMatrix::from_columns(&cols))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::sigma_matrix_real;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn basis_is_orthonormal_and_sigma_fixed() {
        for n in [0usize, 2, 4, 6] {
            let b = real_form_basis(n).unwrap();
            let d = n + 1;
            assert!((b.transpose() * &b - DMatrix::identity(d, d)).norm() < 1e-14);
            let s = sigma_matrix_real(n);
            assert!((&s * &b - &b).norm() < 1e-14);
        }
        assert!(real_form_basis(3).is_err());
    }

    #[test]
    fn real_form_is_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 4;
        let b = real_form_basis(n).unwrap();
        let g = GroupElement::haar(&mut rng);
        let r = real_form_group_matrix(n, &b, &g);
        assert!((&r * r.transpose() - DMatrix::identity(5, 5)).norm() < 1e-12);
        let full = group_matrix_real(n, &g) * &b;
        assert!((&b * &r - full).norm() < 1e-12);
    }

    #[test]
    fn weight_pair_dimensions() {
        let b = real_form_basis(4).unwrap();
        assert_eq!(weight_pair(4, &b, -2).unwrap().ncols(), 2);
        assert_eq!(weight_pair(4, &b, 0).unwrap().ncols(), 1);
    }
}
