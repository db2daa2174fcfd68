//! Gauss maps of immersed spheres in Euclidean space. The Gauss map sends a
//! point to its tangent plane, viewed as the quotient fiber of the
//! evaluation map; its mean curvature operator is compared with the
//! shape operator of the mean curvature vector and the Ricci tensor.

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{measure, projector_jet};
use crate::moduli::{oriented_frame, section_jet, ChartPoint, FiberJet, ProjectorField, RealRep};
use crate::realform::weight_pair;

/// Second-order jet of an immersion in chart coordinates.
#[derive(Debug, Clone)]
pub struct ImmersionJet {
    pub point: ChartPoint,
    pub value: DVector<f64>,
    pub d1: [DVector<f64>; 2],
    /// `d2[i][j] = d_i d_j I`.
    pub d2: [[DVector<f64>; 2]; 2],
}

impl ImmersionJet {
    pub fn metric(&self) -> Matrix2<f64> {
        Matrix2::from_fn(|i, j| self.d1[i].dot(&self.d1[j]))
    }

    /// `d_k g_ij = <d_k d_i I, d_j I> + <d_i I, d_k d_j I>`, indexed `[k]`.
    pub fn metric_derivative(&self) -> [Matrix2<f64>; 2] {
        [0, 1].map(|k| {
            Matrix2::from_fn(|i, j| self.d2[k][i].dot(&self.d1[j]) + self.d1[i].dot(&self.d2[k][j]))
        })
    }

    fn tangent(&self) -> DMatrix<f64> {
        DMatrix::from_columns(&[self.d1[0].clone(), self.d1[1].clone()])
    }
}

pub trait Immersion {
    fn ambient_dim(&self) -> usize;

    fn value(&self, p: &ChartPoint) -> Result<DVector<f64>>;

    fn jet(&self, p: &ChartPoint) -> Result<ImmersionJet>;
}

impl<I: Immersion + ?Sized> Immersion for &I {
    fn ambient_dim(&self) -> usize {
        (**self).ambient_dim()
    }
    fn value(&self, p: &ChartPoint) -> Result<DVector<f64>> {
        (**self).value(p)
    }
    fn jet(&self, p: &ChartPoint) -> Result<ImmersionJet> {
        (**self).jet(p)
    }
}

/// Orbit map `g -> R(g) v` of a real orthogonal representation, descended to
/// the sphere through a local section. Well defined when `v` is fixed by
/// the diagonal circle.
#[derive(Debug, Clone)]
pub struct OrbitImmersion {
    rep: RealRep,
    v: DVector<f64>,
}

impl OrbitImmersion {
    /// Orbit of the invariant unit vector of the real form of `S^{2m} C^2`,
    /// a minimal immersion into the unit sphere of `R^{2m+1}`. For `m = 1`
    /// this is the round sphere, for `m = 2` the Veronese surface.
    pub fn veronese(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Argument("needs m >= 1".into()));
        }
        let rep = RealRep::real_form(2 * m, 0)?;
        let v = weight_pair(2 * m, rep.restriction().unwrap(), 0)?.column(0).into_owned();
        Ok(Self { rep, v })
    }

    pub fn degree(&self) -> usize {
        self.rep.dim() / 2
    }
}

impl Immersion for OrbitImmersion {
    fn ambient_dim(&self) -> usize {
        self.rep.dim()
    }

    fn value(&self, p: &ChartPoint) -> Result<DVector<f64>> {
        Ok(self.rep.group(&section_jet(p).g) * &self.v)
    }

    fn jet(&self, p: &ChartPoint) -> Result<ImmersionJet> {
        let s = section_jet(p);
        let r = self.rep.group(&s.g);
        let gi = s.g.adjoint();
        let y = [0, 1].map(|i| self.rep.algebra(&(gi * s.d1[i])));
        let yv = [0, 1].map(|i| &y[i] * &self.v);
        let d1 = [0, 1].map(|i| &r * &yv[i]);
        // d_j (g^* d_i g) = (d_j g)^* d_i g + g^* d_j d_i g
        let d2 = [0, 1].map(|i| {
            [0, 1].map(|j| {
                let dy = self.rep.algebra(&(s.d1[j].adjoint() * s.d1[i] + gi * s.d2[j][i]));
                &r * (&y[j] * &yv[i] + dy * &self.v)
            })
        });
        Ok(ImmersionJet { point: *p, value: r * &self.v, d1, d2 })
    }
}

/// Central-difference jet of another immersion's values.
#[derive(Debug, Clone)]
pub struct FdImmersion<I> {
    pub inner: I,
    pub step: f64,
}

pub const FD_IMMERSION_STEP: f64 = 1e-3;

impl<I: Immersion> FdImmersion<I> {
    pub fn new(inner: I) -> Self {
        Self { inner, step: FD_IMMERSION_STEP }
    }
}

impl<I: Immersion> Immersion for FdImmersion<I> {
    fn ambient_dim(&self) -> usize {
        self.inner.ambient_dim()
    }

    fn value(&self, p: &ChartPoint) -> Result<DVector<f64>> {
        self.inner.value(p)
    }

    fn jet(&self, p: &ChartPoint) -> Result<ImmersionJet> {
        let h = self.step;
        let dirs = [(h, 0.0), (0.0, h)];
        let at = |dx: f64, dy: f64| self.inner.value(&p.shifted(dx, dy));
        let value = at(0.0, 0.0)?;
        let mut d1 = [DVector::zeros(0), DVector::zeros(0)];
        for (i, (dx, dy)) in dirs.into_iter().enumerate() {
            d1[i] = (at(dx, dy)? - at(-dx, -dy)?) / (2.0 * h);
        }
        let dxx = (at(h, 0.0)? - &value * 2.0 + at(-h, 0.0)?) / (h * h);
        let dyy = (at(0.0, h)? - &value * 2.0 + at(0.0, -h)?) / (h * h);
        let dxy = (at(h, h)? - at(h, -h)? - at(-h, h)? + at(-h, -h)?) / (4.0 * h * h);
        Ok(ImmersionJet { point: *p, value, d1, d2: [[dxx, dxy.clone()], [dxy, dyy]] })
    }
}

/// Tangent-plane field of an immersion, oriented by `(d_x I, d_y I)`.
#[derive(Debug, Clone)]
pub struct GaussMapField<I>(pub I);

impl<I: Immersion> ProjectorField for GaussMapField<I> {
    fn ambient_dim(&self) -> usize {
        self.0.ambient_dim()
    }

    fn fiber_jet(&self, p: &ChartPoint) -> Result<FiberJet> {
        let jet = self.0.jet(p)?;
        let span = jet.tangent();
        if oriented_frame(&span).is_none() {
            return Err(Error::Degenerate(format!("{:?}: differential is rank deficient", p.coord)));
        }
        let d1 = [0, 1].map(|i| DMatrix::from_columns(&[jet.d2[i][0].clone(), jet.d2[i][1].clone()]));
        Ok(FiberJet { span, d1 })
    }
}

/// Step for differencing the exact metric derivatives in the curvature.
pub const CURVATURE_STEP: f64 = 1e-4;

/// Gaussian curvature from the metric and its derivatives (Brioschi), the
/// second derivatives by central differences of the first.
pub fn gaussian_curvature<I: Immersion + ?Sized>(imm: &I, p: &ChartPoint) -> Result<f64> {
    let h = CURVATURE_STEP;
    let jet = imm.jet(p)?;
    let g = jet.metric();
    let [gu, gv] = jet.metric_derivative();
    let shifted = |dx: f64, dy: f64| -> Result<[Matrix2<f64>; 2]> { Ok(imm.jet(&p.shifted(dx, dy))?.metric_derivative()) };
    let (xp, xm) = (shifted(h, 0.0)?, shifted(-h, 0.0)?);
    let (yp, ym) = (shifted(0.0, h)?, shifted(0.0, -h)?);
    let (e, f, gg) = (g[(0, 0)], g[(0, 1)], g[(1, 1)]);
    let (e_u, e_v) = (gu[(0, 0)], gv[(0, 0)]);
    let (f_u, f_v) = (gu[(0, 1)], gv[(0, 1)]);
    let (g_u, g_v) = (gu[(1, 1)], gv[(1, 1)]);
    let e_vv = (yp[1][(0, 0)] - ym[1][(0, 0)]) / (2.0 * h);
    let g_uu = (xp[0][(1, 1)] - xm[0][(1, 1)]) / (2.0 * h);
    let f_uv = (yp[0][(0, 1)] - ym[0][(0, 1)]) / (2.0 * h);
    let m1 = nalgebra::Matrix3::new(
        -0.5 * e_vv + f_uv - 0.5 * g_uu, 0.5 * e_u, f_u - 0.5 * e_v,
        f_v - 0.5 * g_u, e, f,
        0.5 * g_v, f, gg,
    );
    let m2 = nalgebra::Matrix3::new(0.0, 0.5 * e_v, 0.5 * g_u, 0.5 * e_v, e, f, 0.5 * g_u, f, gg);
    let det = e * gg - f * f;
    Ok((m1.determinant() - m2.determinant()) / (det * det))
}

#[derive(Debug, Clone)]
pub struct GaussSample {
    pub point: ChartPoint,
    /// Mean curvature operator of the Gauss map on an orthonormal tangent frame.
    pub a: Matrix2<f64>,
    /// `<K*_X n, Y> = -<n, II(X, Y)>` on the same frame.
    pub shape_n: Matrix2<f64>,
    /// Ricci tensor, `K id` on a surface.
    pub ricci: Matrix2<f64>,
    pub gaussian_curvature: f64,
    /// Mean curvature vector `n = tr II`.
    pub mean_curvature: DVector<f64>,
    /// `|A - (K*n - Ric)| / |A|`.
    pub literal_residual: f64,
    /// `|A - (K*n + Ric)| / |A|`, the sign forced by the Gauss equation.
    pub corrected_residual: f64,
    /// `|A + mu id| / mu` with `mu = -tr A / 2`.
    pub proportionality_defect: f64,
}

pub fn gauss_map<I: Immersion + ?Sized>(imm: &I, p: &ChartPoint) -> Result<GaussSample> {
    let jet = imm.jet(p)?;
    let tangent = jet.tangent();
    let metric = jet.metric();
    let eig = metric.symmetric_eigen();
    if eig.eigenvalues.min() < 1e-14 {
        return Err(Error::Degenerate(format!("{:?}: differential is rank deficient", p.coord)));
    }
    // e_a = sum_i E_ia d_i I is orthonormal for E = g^{-1/2}
    let inv_sqrt = eig.eigenvectors * Matrix2::from_diagonal(&eig.eigenvalues.map(|x| x.powf(-0.5))) * eig.eigenvectors.transpose();
    let frame = &tangent * DMatrix::from_fn(2, 2, |i, j| inv_sqrt[(i, j)]);
    let dim = jet.value.len();
    let normal = DMatrix::identity(dim, dim) - &frame * frame.transpose();
    let second = |a: usize, b: usize| -> DVector<f64> {
        let mut v = DVector::zeros(dim);
        for i in 0..2 {
            for j in 0..2 {
                v.axpy(inv_sqrt[(i, a)] * inv_sqrt[(j, b)], &jet.d2[i][j], 1.0);
            }
        }
        &normal * v
    };
    let ii = [[second(0, 0), second(0, 1)], [second(1, 0), second(1, 1)]];
    let n = &ii[0][0] + &ii[1][1];
    let shape_n = Matrix2::from_fn(|a, b| -n.dot(&ii[a][b]));
    let k = gaussian_curvature(imm, p)?;
    let ricci = Matrix2::identity() * k;

    let field = GaussMapField(imm);
    let pjet = projector_jet(&field, p)?;
    let s = measure(&pjet, &inv_sqrt)?;
    // A is reported on the fiber frame; move it to the tangent frame
    let q = pjet.frame.transpose() * &frame;
    let q = Matrix2::from_fn(|i, j| q[(i, j)]);
    let a = q.transpose() * s.a * q;
    let norm = a.norm();
    let mu = -a.trace() / 2.0;
    Ok(GaussSample {
        point: *p,
        a,
        shape_n,
        ricci,
        gaussian_curvature: k,
        mean_curvature: n,
        literal_residual: (a - (shape_n - ricci)).norm() / norm,
        corrected_residual: (a - (shape_n + ricci)).norm() / norm,
        proportionality_defect: (a + Matrix2::identity() * mu).norm() / mu.abs(),
    })
}

/// Convenience for a point given by its finite-chart coordinate.
pub fn gauss_map_at<I: Immersion + ?Sized>(imm: &I, z: Complex64) -> Result<GaussSample> {
    gauss_map(imm, &ChartPoint::from_z(z))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn veronese_lies_on_unit_sphere() {
        let v = OrbitImmersion::veronese(2).unwrap();
        for z in [Complex64::new(0.0, 0.0), Complex64::new(0.4, -1.3)] {
            let x = v.value(&ChartPoint::from_z(z)).unwrap();
            assert!((x.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn round_sphere_curvature() {
        let s = OrbitImmersion::veronese(1).unwrap();
        let k = gaussian_curvature(&s, &ChartPoint::finite(Complex64::new(0.3, 0.2))).unwrap();
        assert!((k - 1.0).abs() < 1e-7);
    }
}
