//! Differential geometry of projector fields: pullback metric, Kahler angle,
//! mean curvature operator, curvature and degree, and the eigen-equation of
//! the induced sections.
//!
//! The Grassmannian metric is `1/2 tr(dP dP)`. The sphere carries
//! `kappa * g_FS`, with `kappa` calibrated once so that the degree-one
//! standard map has energy density `4 pi`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::column_projector;
use crate::moduli::{build_t, oriented_frame, Chart, ChartPoint, EquivariantField, ModuliPoint, ProjectorField};
use crate::quadrature::{gauss_legendre, gauss_legendre_on, legendre};
use crate::rep::{realify_vec, IrrepVector};

/// Default central-difference step for derivative cross-checks.
pub const FD_STEP: f64 = 1e-5;

/// A projector with its first chart derivatives.
#[derive(Debug, Clone)]
pub struct ProjectorJet {
    pub point: ChartPoint,
    pub projector: DMatrix<f64>,
    /// Oriented orthonormal fiber basis (columns).
    pub frame: DMatrix<f64>,
    /// `dP/dx`, `dP/dy` in the chart's real coordinates.
    pub d1: [DMatrix<f64>; 2],
}

impl ProjectorJet {
    /// `dP(X)` for a chart tangent vector `X`.
    pub fn directional(&self, x: [f64; 2]) -> DMatrix<f64> {
        &self.d1[0] * x[0] + &self.d1[1] * x[1]
    }
}

/// Exact derivative: `dP = (I - P) dB B^+ + (B^+)^T dB^T (I - P)` for the
/// differentiated spanning pair `B`.
pub fn projector_jet<F: ProjectorField + ?Sized>(field: &F, p: &ChartPoint) -> Result<ProjectorJet> {
    let jet = field.fiber_jet(p)?;
    let (proj, pinv) = column_projector(&jet.span)
        .ok_or_else(|| Error::Degenerate(format!("{:?}: spanning pair is singular", p.coord)))?;
    let frame = oriented_frame(&jet.span)
        .ok_or_else(|| Error::Degenerate(format!("{:?}: spanning pair is singular", p.coord)))?;
    let id = DMatrix::identity(proj.nrows(), proj.ncols());
    let comp = &id - &proj;
    let d1 = [0, 1].map(|i| {
        let half = &comp * &jet.d1[i] * &pinv;
        &half + half.transpose()
    });
    Ok(ProjectorJet { point: *p, projector: proj, frame, d1 })
}

/// Central-difference derivative of the projector.
pub fn projector_jet_fd<F: ProjectorField + ?Sized>(field: &F, p: &ChartPoint, h: f64) -> Result<ProjectorJet> {
    let center = field.projector(p)?;
    let d1 = [(h, 0.0), (0.0, h)].map(|(dx, dy)| -> Result<DMatrix<f64>> {
        let plus = field.projector(&p.shifted(dx, dy))?.matrix;
        let minus = field.projector(&p.shifted(-dx, -dy))?.matrix;
        Ok((plus - minus) / (2.0 * h))
    });
    let [dx, dy] = d1;
    Ok(ProjectorJet { point: *p, projector: center.matrix, frame: center.frame, d1: [dx?, dy?] })
}

pub fn projector_derivative<F: ProjectorField + ?Sized>(field: &F, p: &ChartPoint, x: [f64; 2]) -> Result<DMatrix<f64>> {
    Ok(projector_jet(field, p)?.directional(x))
}

fn calibrate_kappa() -> f64 {
    let field = EquivariantField::standard(1, 0);
    let jet = projector_jet(&field, &ChartPoint::finite(Complex64::new(0.0, 0.0)))
        .expect("standard map is regular at the origin");
    let sample = measure(&jet, &Matrix2::identity()).expect("standard map is immersive");
    sample.e / (4.0 * PI)
}

/// Scale of the sphere metric relative to Fubini-Study.
pub fn kappa() -> f64 {
    static KAPPA: OnceLock<f64> = OnceLock::new();
    *KAPPA.get_or_init(calibrate_kappa)
}

/// Oriented orthonormal frame `(e, J e)` of `kappa * g_FS` at `p`, in chart
/// coordinates.
pub fn tangent_frame(p: &ChartPoint) -> [Vector2<f64>; 2] {
    let f = p.conformal() / kappa().sqrt();
    [Vector2::new(f, 0.0), Vector2::new(0.0, f)]
}

fn frame_matrix(p: &ChartPoint) -> Matrix2<f64> {
    let [a, b] = tangent_frame(p);
    Matrix2::from_columns(&[a, b])
}

/// Per-point measurements of a projector field in an orthonormal tangent
/// frame.
#[derive(Debug, Clone)]
pub struct GeomSample {
    pub point: ChartPoint,
    pub metric: Matrix2<f64>,
    /// Mean of the metric's diagonal.
    pub m: f64,
    pub cos_theta: f64,
    /// Mean curvature operator on the oriented fiber basis.
    pub a: Matrix2<f64>,
    pub e: f64,
    /// Curvature of the induced connection on the frame, `<F(e1, e2) s1, s2>`.
    pub curvature: f64,
    /// Same in chart coordinates, `<F(d_x, d_y) s1, s2>`.
    pub curvature_chart: f64,
}

impl GeomSample {
    pub fn z(&self) -> Option<Complex64> {
        self.point.z()
    }

    /// `|A + mu id| / mu` for `mu = -tr A / 2`.
    pub fn proportionality_defect(&self) -> f64 {
        let mu = -self.a.trace() / 2.0;
        (self.a + Matrix2::identity() * mu).norm() / mu.abs()
    }
}

/// `tangent` holds the frame vectors as columns in chart coordinates.
pub(crate) fn measure(jet: &ProjectorJet, tangent: &Matrix2<f64>) -> Result<GeomSample> {
    let d = jet.projector.nrows();
    let comp = DMatrix::identity(d, d) - &jet.projector;
    let scaled = [0, 1].map(|a| &jet.d1[0] * tangent[(0, a)] + &jet.d1[1] * tangent[(1, a)]);
    // B_a maps the tautological side into the fiber
    let b = scaled.clone().map(|x| &jet.projector * x * &comp);
    let metric = Matrix2::from_fn(|i, j| b[i].dot(&b[j]));
    let m = 0.5 * metric.trace();
    if m < 1e-12 {
        return Err(Error::Degenerate(format!("{:?}: differential vanishes", jet.point.coord)));
    }
    let s1 = jet.frame.column(0);
    let s2 = jet.frame.column(1);
    let jq = &s2 * s1.transpose() - &s1 * s2.transpose();
    let cos_theta = (&jq * &b[0]).dot(&b[1]) / (b[0].norm() * b[1].norm());
    let bbt = &b[0] * b[0].transpose() + &b[1] * b[1].transpose();
    let a = Matrix2::from_fn(|i, j| -(jet.frame.column(i).transpose() * &bbt * jet.frame.column(j))[(0, 0)]);
    let e = -a.trace();
    let comm = &jet.d1[0] * &jet.d1[1] - &jet.d1[1] * &jet.d1[0];
    let f = &jet.projector * comm * &jet.projector;
    let curvature_chart = (s2.transpose() * f * s1)[(0, 0)];
    Ok(GeomSample {
        point: jet.point,
        metric,
        m,
        cos_theta,
        a,
        e,
        curvature: curvature_chart * tangent.determinant(),
        curvature_chart,
    })
}

pub fn sample<F: ProjectorField + ?Sized>(field: &F, p: &ChartPoint) -> Result<GeomSample> {
    measure(&projector_jet(field, p)?, &frame_matrix(p))
}

pub fn sample_fd<F: ProjectorField + ?Sized>(field: &F, p: &ChartPoint, h: f64) -> Result<GeomSample> {
    measure(&projector_jet_fd(field, p, h)?, &frame_matrix(p))
}

/// Pullback metric in the orthonormal frame, with its homothety factor.
pub fn pullback_metric<F: ProjectorField + ?Sized>(field: &F, p: &ChartPoint) -> Result<(Matrix2<f64>, f64)> {
    let s = sample(field, p)?;
    Ok((s.metric, s.m))
}

pub fn kahler_angle<F: ProjectorField + ?Sized>(field: &F, p: &ChartPoint) -> Result<f64> {
    Ok(sample(field, p)?.cos_theta)
}

pub fn mean_curvature_operator<F: ProjectorField + ?Sized>(field: &F, p: &ChartPoint) -> Result<Matrix2<f64>> {
    Ok(sample(field, p)?.a)
}

/// `mu` of the degree-one standard map, the energy unit.
pub fn calibration_mu() -> f64 {
    static MU: OnceLock<f64> = OnceLock::new();
    *MU.get_or_init(|| {
        let s = sample(&EquivariantField::standard(1, 0), &ChartPoint::finite(Complex64::new(0.0, 0.0)))
            .expect("standard map is immersive");
        -s.a.trace() / 2.0
    })
}

/// Energy of a `(k, l)` map in units of the degree-one standard map.
pub fn expected_energy_ratio(k: i64, l: usize) -> f64 {
    let k = k.unsigned_abs() as f64;
    let l = l as f64;
    2.0 * l * (k + l + 1.0) + k
}

#[derive(Debug, Clone)]
pub struct EhReport {
    pub samples: Vec<GeomSample>,
    /// Grid mean of `-tr A / 2`.
    pub mu: f64,
    /// `max |A + mu id| / mu` against the grid mean.
    pub max_a_deviation: f64,
    /// `max |g - m id| / m`.
    pub max_conformality_defect: f64,
    pub energy_spread: f64,
    pub cos_mean: f64,
    pub cos_std: f64,
    pub energy_ratio: f64,
    pub expected_ratio: f64,
}

pub fn eh_verify(pt: &ModuliPoint, grid: &[ChartPoint]) -> Result<EhReport> {
    let field = EquivariantField::moduli(pt)?;
    let samples = grid.iter().map(|p| sample(&field, p)).collect::<Result<Vec<_>>>()?;
    Ok(summarize(samples, pt.k(), pt.l()))
}

pub(crate) fn summarize(samples: Vec<GeomSample>, k: i64, l: usize) -> EhReport {
    let count = samples.len() as f64;
    let mu = samples.iter().map(|s| -s.a.trace() / 2.0).sum::<f64>() / count;
    let max_a_deviation = samples
        .iter()
        .map(|s| (s.a + Matrix2::identity() * mu).norm() / mu)
        .fold(0.0, f64::max);
    let max_conformality_defect = samples
        .iter()
        .map(|s| (s.metric - Matrix2::identity() * s.m).norm() / s.m)
        .fold(0.0, f64::max);
    let (emin, emax) = samples.iter().fold((f64::MAX, f64::MIN), |(lo, hi), s| (lo.min(s.e), hi.max(s.e)));
    let cos_mean = samples.iter().map(|s| s.cos_theta).sum::<f64>() / count;
    let cos_var = samples.iter().map(|s| (s.cos_theta - cos_mean).powi(2)).sum::<f64>() / count;
    EhReport {
        mu,
        max_a_deviation,
        max_conformality_defect,
        energy_spread: (emax - emin) / (2.0 * mu),
        cos_mean,
        cos_std: cos_var.sqrt(),
        energy_ratio: mu / calibration_mu(),
        expected_ratio: expected_energy_ratio(k, l),
        samples,
    }
}

/// Raw curvature integral `-(1/2 pi) int F`, over the unit disc of each chart
/// with `radial` Gauss-Legendre nodes and `angular` trapezoid nodes.
pub fn degree_integral<F: ProjectorField + ?Sized>(field: &F, radial: usize, angular: usize) -> Result<f64> {
    let rule = gauss_legendre_on(radial, 0.0, 1.0);
    let dtheta = 2.0 * PI / angular as f64;
    let mut total = 0.0;
    for chart in [Chart::Finite, Chart::Infinite] {
        for &(r, w) in &rule {
            for j in 0..angular {
                let theta = (j as f64 + 0.5) * dtheta;
                let p = ChartPoint { chart, coord: Complex64::from_polar(r, theta) };
                let jet = projector_jet(field, &p)?;
                total += measure(&jet, &Matrix2::identity())?.curvature_chart * r * w * dtheta;
            }
        }
    }
    Ok(-total / (2.0 * PI))
}

pub const DEGREE_TOL: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeEstimate {
    pub value: f64,
    pub nearest: i64,
    pub deviation: f64,
}

pub fn degree_estimate<F: ProjectorField + ?Sized>(field: &F, radial: usize, angular: usize) -> Result<DegreeEstimate> {
    let value = degree_integral(field, radial, angular)?;
    let nearest = value.round() as i64;
    let deviation = (value - nearest as f64).abs();
    if deviation > DEGREE_TOL {
        return Err(Error::Resolution(format!(
            "curvature integral {value:.6} is not within {DEGREE_TOL} of an integer; refine the quadrature"
        )));
    }
    Ok(DegreeEstimate { value, nearest, deviation })
}

/// Central-difference norm of `nabla A = P (dA) P` in the orthonormal frame,
/// with `A` extended to the ambient space through the fiber basis.
pub fn mean_curvature_gradient<F: ProjectorField + ?Sized>(field: &F, p: &ChartPoint, h: f64) -> Result<f64> {
    let ambient = |q: &ChartPoint| -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let s = sample(field, q)?;
        let jet = projector_jet(field, q)?;
        let a = DMatrix::from_fn(2, 2, |i, j| s.a[(i, j)]);
        Ok((&jet.frame * a * jet.frame.transpose(), jet.projector))
    };
    let (_, proj) = ambient(p)?;
    let scale = p.conformal() / kappa().sqrt();
    let mut worst: f64 = 0.0;
    for (dx, dy) in [(h, 0.0), (0.0, h)] {
        let (plus, _) = ambient(&p.shifted(dx, dy))?;
        let (minus, _) = ambient(&p.shifted(-dx, -dy))?;
        let grad = &proj * ((plus - minus) / (2.0 * h)) * &proj * scale;
        worst = worst.max(grad.norm());
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TakahashiReport {
    /// `max |Lap t - mu t| / sup |t|` over the grid.
    pub residual: f64,
    /// Least-squares eigenvalue `<Lap t, t> / <t, t>` over the grid.
    pub mu_fit: f64,
    /// `mu` from the mean curvature operator.
    pub mu: f64,
    pub step: f64,
}

impl TakahashiReport {
    pub fn mu_mismatch(&self) -> f64 {
        (self.mu_fit - self.mu).abs() / self.mu
    }
}

/// Checks that the section `t = P (T^{-1} w)` of the quotient bundle is an
/// eigensection of the rough Laplacian with eigenvalue `mu`, using
/// second-order covariant differences with step `step`.
pub fn takahashi_residual(pt: &ModuliPoint, w: &IrrepVector, grid: &[ChartPoint], step: f64) -> Result<TakahashiReport> {
    if !(step > 0.0 && step <= 1e-1) {
        return Err(Error::Resolution(format!("step {step} must lie in (0, 0.1]")));
    }
    if w.n() != pt.n() {
        return Err(Error::Mismatch { expected: pt.n(), got: w.n() });
    }
    let field = EquivariantField::moduli(pt)?;
    let t_inv = build_t(pt)?
        .matrix()
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Boundary("T is singular".into()))?;
    let constant = t_inv * realify_vec(&w.unitary_coords());
    let proj = |q: &ChartPoint| -> Result<DMatrix<f64>> { Ok(field.projector(q)?.matrix) };
    let section = |q: &ChartPoint| -> Result<DVector<f64>> { Ok(proj(q)? * &constant) };
    let kap = kappa();
    let mut lap_t = Vec::with_capacity(grid.len());
    let mut mu_sum = 0.0;
    for p in grid {
        let center_p = proj(p)?;
        let t0 = &center_p * &constant;
        let mut acc = DVector::zeros(t0.len());
        for (dx, dy) in [(step, 0.0), (0.0, step)] {
            let fwd = section(&p.shifted(dx, dy))?;
            let bwd = section(&p.shifted(-dx, -dy))?;
            let half_fwd = proj(&p.shifted(dx / 2.0, dy / 2.0))?;
            let half_bwd = proj(&p.shifted(-dx / 2.0, -dy / 2.0))?;
            acc += half_fwd * (&fwd - &t0) - half_bwd * (&t0 - &bwd);
        }
        let lap = -(&center_p * acc) * (p.conformal().powi(2) / (kap * step * step));
        mu_sum += sample(&field, p)?.e / 2.0;
        lap_t.push((lap, t0));
    }
    let mu = mu_sum / grid.len() as f64;
    let sup = lap_t.iter().map(|(_, t)| t.norm()).fold(0.0, f64::max);
    if sup == 0.0 {
        return Err(Error::Degenerate("the section vanishes on the grid".into()));
    }
    let residual = lap_t.iter().map(|(l, t)| (l - t * mu).norm()).fold(0.0, f64::max) / sup;
    let num: f64 = lap_t.iter().map(|(l, t)| l.dot(t)).sum();
    let den: f64 = lap_t.iter().map(|(_, t)| t.dot(t)).sum();
    Ok(TakahashiReport { residual, mu_fit: num / den, mu, step })
}

/// Legendre coefficients of `x -> tr(P(o) P(x))` as a function of the
/// cosine of the angle from the reference point `o`. For equivariant fields
/// this is the spectral content of the composed immersion into symmetric
/// matrices and is invariant under ambient isometries.
pub fn correlation_spectrum<F: ProjectorField + ?Sized>(field: &F, max_degree: usize, nodes: usize) -> Result<Vec<f64>> {
    let origin = field.projector(&ChartPoint::finite(Complex64::new(0.0, 0.0)))?.matrix;
    let mut values = Vec::with_capacity(nodes);
    for (x, w) in gauss_legendre(nodes) {
        // angle from the point z = 0
        let z = ((1.0 - x) / (1.0 + x)).sqrt();
        let q = field.projector(&ChartPoint::from_z(Complex64::new(z, 0.0)))?.matrix;
        values.push((x, w, origin.dot(&q)));
    }
    Ok((0..=max_degree)
        .map(|j| {
            let s: f64 = values.iter().map(|(x, w, v)| w * v * legendre(j, *x)).sum();
            s * (2 * j + 1) as f64 / 2.0
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa_calibration() {
        assert!((kappa() - 1.0 / PI).abs() < 1e-12);
        let s = sample(&EquivariantField::standard(1, 0), &ChartPoint::finite(Complex64::new(0.2, 0.1))).unwrap();
        assert!((s.e - 4.0 * PI).abs() < 1e-10);
    }

    #[test]
    fn frame_at_origin() {
        let [e1, e2] = tangent_frame(&ChartPoint::finite(Complex64::new(0.0, 0.0)));
        let s = kappa().powf(-0.5);
        assert!((e1 - Vector2::new(s, 0.0)).norm() < 1e-14);
        assert!((e2 - Vector2::new(0.0, s)).norm() < 1e-14);
    }

    #[test]
    fn coarse_takahashi_step_rejected() {
        let pt = ModuliPoint::standard(1, 0);
        let w = crate::rep::weight_vector(1, 1).unwrap();
        assert!(matches!(takahashi_residual(&pt, &w, &[], 0.5), Err(Error::Resolution(_))));
    }
}
