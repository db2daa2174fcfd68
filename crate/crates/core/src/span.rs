//! Orbit spans of symmetrized rank-two operators and the ambient space of
//! moduli points.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::endo::endo_from_tensor;
use crate::error::{Error, Result};
use crate::linalg::{complement, row_span, smat, subspace_distance, svec, sym_dim, OrthoBasis};
use crate::realform::{real_form_basis, real_form_group_matrix, weight_pair};
use crate::rep::{c, group_matrix_real, GroupElement};
use crate::tensor::{isotypic_projector, TensorElement};

/// Consecutive samples without rank growth before an orbit span is accepted.
pub const STABLE_SAMPLES: usize = 50;
pub const MAX_SAMPLES: usize = 2000;
/// Relative threshold below which a new orbit vector counts as dependent.
pub const RANK_TOL: f64 = 1e-8;
pub const AGREEMENT_TOL: f64 = 1e-8;
pub const DEFAULT_SEED: u64 = 0x5eed;

/// Hilbert-Schmidt orthonormal family of symmetric `side x side` matrices,
/// stored as rows of isometric half-vectorizations.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    side: usize,
    rows: DMatrix<f64>,
}

impl SubspaceBasis {
    pub fn new(side: usize, rows: DMatrix<f64>) -> Result<Self> {
        if rows.ncols() != sym_dim(side) {
            return Err(Error::Mismatch { expected: sym_dim(side), got: rows.ncols() });
        }
        Ok(Self { side, rows })
    }

    pub fn empty(side: usize) -> Self {
        Self { side, rows: DMatrix::zeros(0, sym_dim(side)) }
    }

    pub fn from_matrices(side: usize, mats: &[DMatrix<f64>]) -> Result<Self> {
        let mut rows = DMatrix::zeros(mats.len(), sym_dim(side));
        for (i, m) in mats.iter().enumerate() {
            if m.nrows() != side {
                return Err(Error::Mismatch { expected: side, got: m.nrows() });
            }
            rows.set_row(i, &svec(m).transpose());
        }
        Ok(Self { side, rows: row_span(&rows, RANK_TOL) })
    }

    pub fn dim(&self) -> usize {
        self.rows.nrows()
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn rows(&self) -> &DMatrix<f64> {
        &self.rows
    }

    pub fn element(&self, i: usize) -> DMatrix<f64> {
        smat(&self.rows.row(i).transpose(), self.side)
    }

    pub fn elements(&self) -> Vec<DMatrix<f64>> {
        (0..self.dim()).map(|i| self.element(i)).collect()
    }

    /// Coordinates of the orthogonal projection of `m`.
    pub fn coords(&self, m: &DMatrix<f64>) -> DVector<f64> {
        &self.rows * svec(m)
    }

    pub fn combine(&self, coords: &DVector<f64>) -> DMatrix<f64> {
        smat(&(self.rows.transpose() * coords), self.side)
    }

    pub fn project(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        self.combine(&self.coords(m))
    }

    /// Norm of the component of `m` outside the span, relative to `|m|`.
    pub fn residual(&self, m: &DMatrix<f64>) -> f64 {
        let norm = m.norm();
        if norm == 0.0 {
            return 0.0;
        }
        (m - self.project(m)).norm() / norm
    }

    pub fn orthonormality_defect(&self) -> f64 {
        let g = &self.rows * self.rows.transpose();
        (g - DMatrix::identity(self.dim(), self.dim())).amax()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        subspace_distance(&self.rows, &other.rows)
    }

    pub fn complement(&self) -> Self {
        Self { side: self.side, rows: complement(&self.rows, sym_dim(self.side)) }
    }
}

fn sym_outer(x: &DVector<f64>, y: &DVector<f64>) -> DMatrix<f64> {
    x * y.transpose() + y * x.transpose()
}

/// Span over sampled group elements of `sym(R(g) x, R(g) y)` for the given
/// generator pairs, seeded with the `extra` matrices.
pub fn orbit_span(
    side: usize,
    pairs: &[(DVector<f64>, DVector<f64>)],
    rep: impl Fn(&GroupElement) -> DMatrix<f64>,
    extra: &[DMatrix<f64>],
    seed: u64,
) -> Result<SubspaceBasis> {
    let mut basis = OrthoBasis::new(sym_dim(side), RANK_TOL);
    for m in extra {
        basis.push(&svec(m));
    }
    if !pairs.is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut stable = 0;
        let mut samples = 0;
        while !basis.is_full() && stable < STABLE_SAMPLES {
            if samples >= MAX_SAMPLES {
                return Err(Error::Convergence {
                    samples,
                    rank: basis.rank(),
                    full: sym_dim(side),
                });
            }
            let r = rep(&GroupElement::haar(&mut rng));
            let mut grew = false;
            for (x, y) in pairs {
                grew |= basis.push(&svec(&sym_outer(&(&r * x), &(&r * y))));
            }
            samples += 1;
            stable = if grew { 0 } else { stable + 1 };
        }
    }
    SubspaceBasis::new(side, basis.to_matrix())
}

/// Which fiber vectors enter the orbit span.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpanKind {
    /// Both entries from the reference fiber.
    FiberFiber,
    /// One entry moved off the fiber by the tangent directions.
    TangentFiber,
}

/// Label of `S^{|k|+2l} C^2`.
pub fn eigenspace_label(k: i64, l: usize) -> usize {
    k.unsigned_abs() as usize + 2 * l
}

/// Index of the reference fiber vector `u_{-k}`.
pub(crate) fn fiber_index(k: i64, l: usize) -> usize {
    let n = eigenspace_label(k, l) as i64;
    ((n + k) / 2) as usize
}

fn unit(dim: usize, i: usize) -> DVector<f64> {
    let mut v = DVector::zeros(dim);
    v[i] = 1.0;
    v
}

fn generator_pairs(k: i64, l: usize, kind: SpanKind) -> Vec<(DVector<f64>, DVector<f64>)> {
    let n = eigenspace_label(k, l);
    let d = n + 1;
    let p = fiber_index(k, l);
    let fiber = [unit(2 * d, p), unit(2 * d, d + p)];
    let xs: Vec<DVector<f64>> = match kind {
        SpanKind::FiberFiber => fiber.to_vec(),
        SpanKind::TangentFiber => {
            let mut xs = Vec::new();
            // weights -k - 2 and -k + 2
            for q in [p as i64 + 1, p as i64 - 1] {
                if (0..d as i64).contains(&q) {
                    xs.push(unit(2 * d, q as usize));
                    xs.push(unit(2 * d, d + q as usize));
                }
            }
            xs
        }
    };
    let mut pairs = Vec::new();
    for x in &xs {
        for y in &fiber {
            pairs.push((x.clone(), y.clone()));
        }
    }
    pairs
}

pub fn gs_span(k: i64, l: usize, kind: SpanKind, seed: u64) -> Result<SubspaceBasis> {
    let n = eigenspace_label(k, l);
    orbit_span(2 * (n + 1), &generator_pairs(k, l, kind), |g| group_matrix_real(n, g), &[], seed)
}

/// Fiber-fiber orbit span for the real standard setting: the real form of
/// `S^{2|k|+2l} C^2` with reference fiber the realified weight pair `-2k, 2k`.
pub fn gs_span_real_standard(k: i64, l: usize, seed: u64) -> Result<SubspaceBasis> {
    let n = 2 * (k.unsigned_abs() as usize + l);
    let basis = real_form_basis(n)?;
    let fiber = weight_pair(n, &basis, -2 * k)?;
    let cols: Vec<DVector<f64>> = fiber.column_iter().map(|c| c.into_owned()).collect();
    let mut pairs = Vec::new();
    for x in &cols {
        for y in &cols {
            pairs.push((x.clone(), y.clone()));
        }
    }
    orbit_span(n + 1, &pairs, |g| real_form_group_matrix(n, &basis, g), &[], seed)
}

/// Orthogonal complement of both orbit spans and the identity.
pub fn moduli_ambient_orbit(k: i64, l: usize, seed: u64) -> Result<SubspaceBasis> {
    let n = eigenspace_label(k, l);
    let side = 2 * (n + 1);
    let mut pairs = generator_pairs(k, l, SpanKind::TangentFiber);
    pairs.extend(generator_pairs(k, l, SpanKind::FiberFiber));
    let id = DMatrix::identity(side, side);
    let span = orbit_span(side, &pairs, |g| group_matrix_real(n, g), &[id], seed)?;
    Ok(span.complement())
}

/// Realified `S^{2n-4r}` summands of `S^2(S^n C^2)` for `r >= l + 1`.
pub fn moduli_ambient_isotypic(k: i64, l: usize) -> Result<SubspaceBasis> {
    let n = eigenspace_label(k, l);
    let side = 2 * (n + 1);
    let mut mats = Vec::new();
    let mut r = l + 1;
    while 2 * r <= n {
        let proj = isotypic_projector(n, 2 * n - 4 * r)?;
        let p = proj.matrix();
        // the projector's columns span the summand
        for col in 0..p.ncols() {
            if p[(col, col)] < 1e-12 {
                continue;
            }
            let v = DVector::from_iterator(p.nrows(), p.column(col).iter().map(|&x| c(x, 0.0)));
            let t = TensorElement::from_unitary_vec(n, &v)?;
            for s in [c(1.0, 0.0), Complex64::i()] {
                mats.push(endo_from_tensor(&t.scale(s))?.into_matrix());
            }
        }
        r += 1;
    }
    SubspaceBasis::from_matrices(side, &mats)
}

type AmbientCache = HashMap<(i64, usize), SubspaceBasis>;

/// Ambient space of moduli points with labels `(k, l)`. Computed by both the
/// orbit and the isotypic routes; disagreement is a consistency error.
pub fn moduli_ambient(k: i64, l: usize) -> Result<SubspaceBasis> {
    static CACHE: OnceLock<Mutex<AmbientCache>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(b) = cache.lock().unwrap().get(&(k, l)) {
        return Ok(b.clone());
    }
    let iso = moduli_ambient_isotypic(k, l)?;
    let orbit = moduli_ambient_orbit(k, l, DEFAULT_SEED)?;
    let dist = iso.distance(&orbit);
    if dist > AGREEMENT_TOL {
        return Err(Error::Consistency(format!(
            "ambient for (k, l) = ({k}, {l}): orbit route dim {} vs isotypic route dim {}, distance {dist:.3e}",
            orbit.dim(),
            iso.dim()
        )));
    }
    cache.lock().unwrap().insert((k, l), iso.clone());
    Ok(iso)
}
