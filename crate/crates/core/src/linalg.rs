//! Small dense linear-algebra helpers shared by the decomposition and geometry code.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Eigen-decomposition of a symmetric matrix with eigenvalues sorted ascending.
pub fn sym_eigen(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vecs = DMatrix::zeros(n, n);
    for (j, &i) in order.iter().enumerate() {
        vecs.set_column(j, &eig.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Largest absolute eigenvalue of a symmetric matrix.
pub fn op_norm(m: &DMatrix<f64>) -> f64 {
    let (vals, _) = sym_eigen(m);
    vals.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// Applies `f` to the spectrum of a symmetric matrix.
pub fn sym_fn(m: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let (vals, vecs) = sym_eigen(m);
    let d = DMatrix::from_diagonal(&vals.map(f));
    &vecs * d * vecs.transpose()
}

/// Dimension of the vectorized upper triangle of a `d x d` symmetric matrix.
pub fn sym_dim(d: usize) -> usize {
    d * (d + 1) / 2
}

/// Hilbert-Schmidt isometric vectorization of a symmetric matrix
/// (off-diagonal entries weighted by sqrt 2).
pub fn svec(m: &DMatrix<f64>) -> DVector<f64> {
    let d = m.nrows();
    let mut out = DVector::zeros(sym_dim(d));
    let mut idx = 0;
    for i in 0..d {
        for j in i..d {
            out[idx] = if i == j {
                m[(i, i)]
            } else {
                0.5 * (m[(i, j)] + m[(j, i)]) * std::f64::consts::SQRT_2
            };
            idx += 1;
        }
    }
    out
}

/// Inverse of [`svec`].
pub fn smat(v: &DVector<f64>, d: usize) -> DMatrix<f64> {
    assert_eq!(v.len(), sym_dim(d));
    let mut m = DMatrix::zeros(d, d);
    let mut idx = 0;
    for i in 0..d {
        for j in i..d {
            if i == j {
                m[(i, i)] = v[idx];
            } else {
                let x = v[idx] / std::f64::consts::SQRT_2;
                m[(i, j)] = x;
                m[(j, i)] = x;
            }
            idx += 1;
        }
    }
    m
}

/// Incrementally grown orthonormal basis (modified Gram-Schmidt, two passes).
#[derive(Debug, Clone)]
pub struct OrthoBasis {
    dim: usize,
    vectors: Vec<DVector<f64>>,
    rel_tol: f64,
}

impl OrthoBasis {
    pub fn new(dim: usize, rel_tol: f64) -> Self {
        Self { dim, vectors: Vec::new(), rel_tol }
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_full(&self) -> bool {
        self.vectors.len() == self.dim
    }

    /// Adds `v` if it has a component outside the current span above the
    /// relative threshold. Returns whether the rank increased.
    pub fn push(&mut self, v: &DVector<f64>) -> bool {
        let norm = v.norm();
        if norm == 0.0 || self.is_full() {
            return false;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &self.vectors {
                let c = b.dot(&w);
                w.axpy(-c, b, 1.0);
            }
        }
        let rest = w.norm();
        if rest > self.rel_tol * norm {
            self.vectors.push(w / rest);
            true
        } else {
            false
        }
    }

    pub fn vectors(&self) -> &[DVector<f64>] {
        &self.vectors
    }

    /// Rows are the basis vectors.
    pub fn to_matrix(&self) -> DMatrix<f64> {
        rows_to_matrix(&self.vectors, self.dim)
    }
}

pub fn rows_to_matrix(rows: &[DVector<f64>], dim: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(rows.len(), dim);
    for (i, r) in rows.iter().enumerate() {
        m.set_row(i, &r.transpose());
    }
    m
}

/// Orthonormal basis (as rows) of the span of the given rows, using a relative
/// singular-value threshold.
pub fn row_span(rows: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    if rows.nrows() == 0 {
        return DMatrix::zeros(0, rows.ncols());
    }
    let svd = rows.clone().svd(false, true);
    let vt = svd.v_t.expect("right singular vectors requested");
    let top = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
    if top <= 0.0 {
        return DMatrix::zeros(0, rows.ncols());
    }
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > rel_tol * top)
        .collect();
    let mut out = DMatrix::zeros(keep.len(), rows.ncols());
    for (r, &i) in keep.iter().enumerate() {
        out.set_row(r, &vt.row(i));
    }
    out
}

/// Orthonormal basis (rows) of the orthogonal complement of the row span of
/// an orthonormal row set.
pub fn complement(rows: &DMatrix<f64>, dim: usize) -> DMatrix<f64> {
    let proj = if rows.nrows() == 0 {
        DMatrix::zeros(dim, dim)
    } else {
        rows.transpose() * rows
    };
    let resid = DMatrix::identity(dim, dim) - proj;
    let (vals, vecs) = sym_eigen(&resid);
    let keep: Vec<usize> = (0..dim).filter(|&i| vals[i] > 0.5).collect();
    let mut out = DMatrix::zeros(keep.len(), dim);
    for (r, &i) in keep.iter().enumerate() {
        out.set_row(r, &vecs.column(i).transpose());
    }
    out
}

/// Spectral-norm distance between the orthogonal projectors onto two row spans
/// (rows assumed orthonormal). Equals the sine of the largest principal angle
/// when the dimensions agree, and 1 otherwise.
pub fn subspace_distance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    if a.nrows() != b.nrows() {
        return 1.0;
    }
    if a.nrows() == 0 {
        return 0.0;
    }
    let pa = a.transpose() * a;
    let pb = b.transpose() * b;
    op_norm(&(pa - pb))
}

/// Orthogonal projector onto the column span of a full-column-rank matrix,
/// together with the pseudo-inverse `(B^T B)^{-1} B^T`.
pub fn column_projector(b: &DMatrix<f64>) -> Option<(DMatrix<f64>, DMatrix<f64>)> {
    let gram = b.transpose() * b;
    let inv = gram.try_inverse()?;
    let pinv = &inv * b.transpose();
    Some((b * &pinv, pinv))
}

pub fn frob(m: &DMatrix<f64>) -> f64 {
    m.norm()
}
