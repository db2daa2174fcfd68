//! Moduli points and the projector fields they induce on the Riemann sphere.
//!
//! A point `(k, l, D)` deforms the standard map of `W = S^{|k|+2l} C^2` by
//! `T = (id + D)^{1/2}`: the quotient fiber over `[g]` is the real plane
//! `T R(g) span{u_{-k}, J u_{-k}}`.

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::endo::SymEndo;
use crate::error::{Error, Result};
use crate::linalg::{subspace_distance, sym_eigen, sym_fn};
use crate::realform::{real_form_basis, weight_pair};
use crate::rep::{c, complex_structure, realify_mat, sigma_matrix_real, GroupElement};
use crate::rep::{algebra_matrix_unitary, group_matrix_unitary, weight_index};
use crate::span::{eigenspace_label, fiber_index, moduli_ambient};

pub const AMBIENT_TOL: f64 = 1e-8;
/// Eigenvalues of `id + D` below this count as zero.
pub const KERNEL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct ModuliPoint {
    k: i64,
    l: usize,
    d: SymEndo,
}

impl ModuliPoint {
    pub fn new(k: i64, l: usize, d: SymEndo) -> Result<Self> {
        let n = eigenspace_label(k, l);
        if d.n() != n {
            return Err(Error::Mismatch { expected: n, got: d.n() });
        }
        Ok(Self { k, l, d })
    }

    /// The undeformed point `D = 0`.
    pub fn standard(k: i64, l: usize) -> Self {
        Self { k, l, d: SymEndo::zero(eigenspace_label(k, l)) }
    }

    /// Ambient combination with the given coordinates, optionally rescaled to
    /// the given operator norm.
    pub fn from_coords(k: i64, l: usize, coords: &[f64], op_norm: Option<f64>) -> Result<Self> {
        let ambient = moduli_ambient(k, l)?;
        if coords.len() != ambient.dim() {
            return Err(Error::Mismatch { expected: ambient.dim(), got: coords.len() });
        }
        let n = eigenspace_label(k, l);
        let mut m = ambient.combine(&DVector::from_column_slice(coords));
        if let Some(target) = op_norm {
            let norm = crate::linalg::op_norm(&m);
            if norm == 0.0 {
                if target != 0.0 {
                    return Err(Error::Argument("cannot rescale the zero direction".into()));
                }
            } else {
                m *= target / norm;
            }
        }
        Self::new(k, l, SymEndo::new(n, m)?)
    }

    /// Gaussian direction in the ambient scaled to operator norm `op_norm`.
    /// Labels with a trivial ambient give `D = 0`.
    pub fn random(k: i64, l: usize, op_norm: f64, seed: u64) -> Result<Self> {
        let dim = moduli_ambient(k, l)?.dim();
        if dim == 0 {
            return Ok(Self::standard(k, l));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coords: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
        Self::from_coords(k, l, &coords, Some(op_norm))
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn n(&self) -> usize {
        self.d.n()
    }

    /// Complex dimension `N = |k| + 2l + 1`.
    pub fn complex_dim(&self) -> usize {
        self.d.n() + 1
    }

    pub fn d(&self) -> &SymEndo {
        &self.d
    }

    /// Image under the circle `e^{i theta}` of the centralizer of the group
    /// action: `D -> R D R^T` with `R = cos(theta) + sin(theta) J`.
    pub fn rotate(&self, theta: f64) -> Self {
        let r = circle_rotation(self.complex_dim(), theta);
        let m = &r * self.d.matrix() * r.transpose();
        Self { k: self.k, l: self.l, d: SymEndo::new(self.n(), m).expect("rotation keeps symmetry") }
    }

    pub fn with_d(&self, d: SymEndo) -> Result<Self> {
        Self::new(self.k, self.l, d)
    }
}

pub fn circle_rotation(complex_dim: usize, theta: f64) -> DMatrix<f64> {
    DMatrix::identity(2 * complex_dim, 2 * complex_dim) * theta.cos()
        + complex_structure(complex_dim) * theta.sin()
}

/// The group-invariant direction of the ambient, present when the ambient
/// contains the trivial summand: the realified real structure.
pub fn invariant_direction(k: i64, l: usize) -> Result<SymEndo> {
    let n = eigenspace_label(k, l);
    let candidate = SymEndo::new(n, sigma_matrix_real(n));
    let ambient = moduli_ambient(k, l)?;
    match candidate {
        Ok(s) if ambient.residual(s.matrix()) < AMBIENT_TOL => Ok(s),
        _ => Err(Error::Argument(format!("the ambient of ({k}, {l}) has no invariant direction"))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub ambient_residual: f64,
    pub op_norm: f64,
    /// Smallest eigenvalue of `id + D`.
    pub positivity_margin: f64,
    pub interior: bool,
    pub in_closure: bool,
    pub issues: Vec<String>,
}

pub fn validate(pt: &ModuliPoint) -> Diagnostics {
    let mut issues = Vec::new();
    let ambient_residual = match moduli_ambient(pt.k, pt.l) {
        Ok(a) => a.residual(pt.d.matrix()),
        Err(e) => {
            issues.push(e.to_string());
            f64::INFINITY
        }
    };
    let op_norm = pt.d.op_norm();
    let positivity_margin = 1.0 + pt.d.eigenvalues().first().copied().unwrap_or(0.0);
    if ambient_residual > AMBIENT_TOL {
        issues.push(format!("ambient residual {ambient_residual:.3e}"));
    }
    if op_norm >= 1.0 - 1e-12 {
        issues.push(format!("operator norm {op_norm:.6} violates positivity of id + D"));
    }
    let ok = ambient_residual <= AMBIENT_TOL;
    Diagnostics {
        ambient_residual,
        op_norm,
        positivity_margin,
        interior: ok && op_norm < 1.0 - 1e-12,
        in_closure: ok && op_norm <= 1.0 + 1e-12,
        issues,
    }
}

/// `T = (id + D)^{1/2}`.
pub fn build_t(pt: &ModuliPoint) -> Result<SymEndo> {
    let (vals, _) = sym_eigen(&(pt.d.matrix() + DMatrix::identity(2 * pt.complex_dim(), 2 * pt.complex_dim())));
    if vals[0] < -1e-10 {
        return Err(Error::Domain(format!("id + D has negative eigenvalue {:.3e}", vals[0])));
    }
    let id = DMatrix::identity(2 * pt.complex_dim(), 2 * pt.complex_dim());
    // round-off eigenvalues near the kernel would otherwise become ~1e-8
    SymEndo::new(pt.n(), sym_fn(&(pt.d.matrix() + id), |x| if x < KERNEL_TOL { 0.0 } else { x.sqrt() }))
}

/// One of the two affine charts of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    /// `z`, centered at the reference point.
    Finite,
    /// `w = 1/z`, centered at infinity.
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint {
    pub chart: Chart,
    pub coord: Complex64,
}

impl ChartPoint {
    pub fn finite(z: Complex64) -> Self {
        Self { chart: Chart::Finite, coord: z }
    }

    pub fn infinite(w: Complex64) -> Self {
        Self { chart: Chart::Infinite, coord: w }
    }

    pub fn infinity() -> Self {
        Self::infinite(c(0.0, 0.0))
    }

    /// Chart point for `z`, preferring the chart in which `|coord| <= 1`.
    pub fn from_z(z: Complex64) -> Self {
        if z.norm() <= 1.0 {
            Self::finite(z)
        } else {
            Self::infinite(z.inv())
        }
    }

    /// Stereographic image of a unit vector, projecting from `(0, 0, 1)`.
    pub fn from_sphere(x: f64, y: f64, h: f64) -> Self {
        if h <= 0.0 {
            Self::finite(c(x, y) / (1.0 - h))
        } else {
            // w = 1/z = (x - iy) / (1 + h)
            Self::infinite(c(x, -y) / (1.0 + h))
        }
    }

    /// `z` in the finite chart, `None` at infinity.
    pub fn z(&self) -> Option<Complex64> {
        match self.chart {
            Chart::Finite => Some(self.coord),
            Chart::Infinite if self.coord.norm() == 0.0 => None,
            Chart::Infinite => Some(self.coord.inv()),
        }
    }

    /// The same point in the other chart, if it lies in the overlap.
    pub fn switch(&self) -> Option<Self> {
        if self.coord.norm() == 0.0 {
            return None;
        }
        Some(match self.chart {
            Chart::Finite => Self::infinite(self.coord.inv()),
            Chart::Infinite => Self::finite(self.coord.inv()),
        })
    }

    /// Homogeneous coordinates of the line.
    fn homogeneous(&self) -> [Complex64; 2] {
        match self.chart {
            Chart::Finite => [c(1.0, 0.0), self.coord],
            Chart::Infinite => [self.coord, c(1.0, 0.0)],
        }
    }

    /// Image under the linear action of `g` on lines.
    pub fn act(&self, g: &GroupElement) -> Self {
        let [a, b] = self.homogeneous();
        let m = g.matrix();
        let x = m[(0, 0)] * a + m[(0, 1)] * b;
        let y = m[(1, 0)] * a + m[(1, 1)] * b;
        if y.norm() <= x.norm() {
            Self::finite(y / x)
        } else {
            Self::infinite(x / y)
        }
    }

    /// Fubini-Study conformal factor `1 + |coord|^2`.
    pub fn conformal(&self) -> f64 {
        1.0 + self.coord.norm_sqr()
    }

    pub fn shifted(&self, dx: f64, dy: f64) -> Self {
        Self { chart: self.chart, coord: self.coord + c(dx, dy) }
    }
}

/// Section of `SU(2) -> CP^1` over a chart with its first and second
/// derivatives in the chart's real coordinates.
#[derive(Debug, Clone)]
pub struct SectionJet {
    pub g: Matrix2<Complex64>,
    pub d1: [Matrix2<Complex64>; 2],
    pub d2: [[Matrix2<Complex64>; 2]; 2],
}

pub fn section_jet(p: &ChartPoint) -> SectionJet {
    let z0 = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    let w = p.coord;
    let (m, mx, my) = match p.chart {
        Chart::Finite => (
            Matrix2::new(one, -w.conj(), w, one),
            Matrix2::new(z0, -one, one, z0),
            Matrix2::new(z0, i, i, z0),
        ),
        Chart::Infinite => (
            Matrix2::new(w, -one, one, w.conj()),
            Matrix2::new(one, z0, z0, one),
            Matrix2::new(i, z0, z0, -i),
        ),
    };
    let x = [w.re, w.im];
    let s2 = 1.0 + w.norm_sqr();
    let s = s2.sqrt();
    let s3 = s * s2;
    let s5 = s3 * s2;
    let mi = [mx, my];
    let r = |t: f64| c(t, 0.0);
    let g = m * r(1.0 / s);
    let d1 = [0, 1].map(|a| mi[a] * r(1.0 / s) - m * r(x[a] / s3));
    let d2 = [0, 1].map(|a| {
        [0, 1].map(|b| {
            let delta = if a == b { 1.0 } else { 0.0 };
            -(mi[a] * r(x[b] / s3)) - mi[b] * r(x[a] / s3) - m * r(delta / s3 - 3.0 * x[a] * x[b] / s5)
        })
    });
    SectionJet { g, d1, d2 }
}

/// Smooth local section, the identity at the center of the finite chart.
pub fn local_section(p: &ChartPoint) -> GroupElement {
    GroupElement::new_unchecked(section_jet(p).g)
}

/// Real orthogonal representation: realified `S^n C^2`, optionally restricted
/// to an invariant real subspace, plus trivial summands.
#[derive(Debug, Clone)]
pub struct RealRep {
    n: usize,
    restrict: Option<DMatrix<f64>>,
    trivial: usize,
}

impl RealRep {
    pub fn complex(n: usize) -> Self {
        Self { n, restrict: None, trivial: 0 }
    }

    pub fn real_form(n: usize, trivial: usize) -> Result<Self> {
        Ok(Self { n, restrict: Some(real_form_basis(n)?), trivial })
    }

    pub fn dim(&self) -> usize {
        let base = match &self.restrict {
            Some(b) => b.ncols(),
            None => 2 * (self.n + 1),
        };
        base + self.trivial
    }

    fn embed(&self, full: DMatrix<f64>, unit: f64) -> DMatrix<f64> {
        let base = match &self.restrict {
            Some(b) => b.transpose() * full * b,
            None => full,
        };
        let d = self.dim();
        let mut out = DMatrix::zeros(d, d);
        out.view_mut((0, 0), (base.nrows(), base.ncols())).copy_from(&base);
        for i in base.nrows()..d {
            out[(i, i)] = unit;
        }
        out
    }

    pub fn group(&self, g: &Matrix2<Complex64>) -> DMatrix<f64> {
        self.embed(realify_mat(&group_matrix_unitary(self.n, g)), 1.0)
    }

    pub fn algebra(&self, x: &Matrix2<Complex64>) -> DMatrix<f64> {
        self.embed(realify_mat(&algebra_matrix_unitary(self.n, x)), 0.0)
    }

    pub fn restriction(&self) -> Option<&DMatrix<f64>> {
        self.restrict.as_ref()
    }
}

/// Spanning pair of a quotient fiber and its chart derivatives.
#[derive(Debug, Clone)]
pub struct FiberJet {
    pub span: DMatrix<f64>,
    pub d1: [DMatrix<f64>; 2],
}

/// A smooth field of oriented real planes over the sphere.
pub trait ProjectorField {
    fn ambient_dim(&self) -> usize;

    /// Oriented spanning pair and its exact first derivatives.
    fn fiber_jet(&self, p: &ChartPoint) -> Result<FiberJet>;

    fn fiber_span(&self, p: &ChartPoint) -> Result<DMatrix<f64>> {
        Ok(self.fiber_jet(p)?.span)
    }

    fn projector(&self, p: &ChartPoint) -> Result<QuotientProjector> {
        QuotientProjector::from_span(*p, &self.fiber_span(p)?)
    }
}

impl<F: ProjectorField + ?Sized> ProjectorField for &F {
    fn ambient_dim(&self) -> usize {
        (**self).ambient_dim()
    }
    fn fiber_jet(&self, p: &ChartPoint) -> Result<FiberJet> {
        (**self).fiber_jet(p)
    }
    fn fiber_span(&self, p: &ChartPoint) -> Result<DMatrix<f64>> {
        (**self).fiber_span(p)
    }
}

/// The same field with the fiber orientation reversed.
pub struct Reversed<F>(pub F);

impl<F: ProjectorField> ProjectorField for Reversed<F> {
    fn ambient_dim(&self) -> usize {
        self.0.ambient_dim()
    }

    fn fiber_jet(&self, p: &ChartPoint) -> Result<FiberJet> {
        let j = self.0.fiber_jet(p)?;
        let swap = |m: &DMatrix<f64>| DMatrix::from_columns(&[m.column(1), m.column(0)]);
        Ok(FiberJet { span: swap(&j.span), d1: [swap(&j.d1[0]), swap(&j.d1[1])] })
    }
}

/// Rank-2 orthogonal projector onto a quotient fiber.
#[derive(Debug, Clone)]
pub struct QuotientProjector {
    pub point: ChartPoint,
    pub matrix: DMatrix<f64>,
    /// Oriented orthonormal basis of the fiber (columns).
    pub frame: DMatrix<f64>,
}

impl QuotientProjector {
    pub fn from_span(point: ChartPoint, span: &DMatrix<f64>) -> Result<Self> {
        let frame = oriented_frame(span).ok_or_else(|| {
            Error::Degenerate(format!("{:?}: fiber spanning pair is rank deficient", point.coord))
        })?;
        Ok(Self { point, matrix: &frame * frame.transpose(), frame })
    }

    pub fn rank(&self) -> usize {
        self.matrix.trace().round() as usize
    }

    pub fn idempotency_defect(&self) -> f64 {
        (&self.matrix * &self.matrix - &self.matrix).amax()
    }

    pub fn symmetry_defect(&self) -> f64 {
        (&self.matrix - self.matrix.transpose()).amax()
    }

    /// Spectral distance between the two planes.
    pub fn distance(&self, other: &Self) -> f64 {
        subspace_distance(&self.frame.transpose(), &other.frame.transpose())
    }
}

/// Gram-Schmidt of a spanning pair; `None` when nearly dependent.
pub(crate) fn oriented_frame(span: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let a = span.column(0);
    let b = span.column(1);
    let na = a.norm();
    if na == 0.0 {
        return None;
    }
    let s1 = a / na;
    let b_perp = b - &s1 * s1.dot(&b);
    let nb = b_perp.norm();
    if nb < 1e-10 * b.norm().max(na) {
        return None;
    }
    Some(DMatrix::from_columns(&[s1, b_perp / nb]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Moduli,
    Standard,
    RealStandard,
    Totally,
}

/// Plane field `p -> L R(g(p)) V` for a fixed linear map `L` and reference
/// plane `V`.
#[derive(Debug, Clone)]
pub struct EquivariantField {
    kind: FieldKind,
    rep: RealRep,
    lift: Option<DMatrix<f64>>,
    reference: DMatrix<f64>,
}

impl EquivariantField {
    /// Field of a moduli point. Boundary points are accepted as long as the
    /// deformed fibers stay two-dimensional.
    pub fn moduli(pt: &ModuliPoint) -> Result<Self> {
        let t = build_t(pt)?;
        let mut f = Self::standard(pt.k, pt.l);
        f.kind = FieldKind::Moduli;
        f.lift = Some(t.into_matrix());
        Ok(f)
    }

    pub fn standard(k: i64, l: usize) -> Self {
        let n = eigenspace_label(k, l);
        let d = n + 1;
        let p = fiber_index(k, l);
        let mut reference = DMatrix::zeros(2 * d, 2);
        reference[(p, 0)] = 1.0;
        reference[(d + p, 1)] = 1.0;
        Self { kind: FieldKind::Standard, rep: RealRep::complex(n), lift: None, reference }
    }

    /// Field on the real form of `S^{2|k|+2l} C^2` whose reference plane is
    /// the realified weight pair `-2k, 2k`.
    pub fn real_standard(k: i64, l: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Argument("the real standard map needs k != 0".into()));
        }
        let n = 2 * (k.unsigned_abs() as usize + l);
        let rep = RealRep::real_form(n, 0)?;
        let reference = weight_pair(n, rep.restriction().unwrap(), -2 * k)?;
        Ok(Self { kind: FieldKind::RealStandard, rep, lift: None, reference })
    }

    /// Degree-zero field in `R^{2m+1} + R`: the orbit of the invariant line of
    /// the real form of `S^{2m} C^2` together with the trivial summand.
    pub fn totally_real(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Argument("needs m >= 1".into()));
        }
        let n = 2 * m;
        let rep = RealRep::real_form(n, 1)?;
        let line = weight_pair(n, rep.restriction().unwrap(), 0)?;
        let dim = rep.dim();
        let mut reference = DMatrix::zeros(dim, 2);
        reference.view_mut((0, 0), (dim - 1, 1)).copy_from(&line);
        reference[(dim - 1, 1)] = 1.0;
        Ok(Self { kind: FieldKind::Totally, rep, lift: None, reference })
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn rep(&self) -> &RealRep {
        &self.rep
    }

    pub fn lift(&self) -> Option<&DMatrix<f64>> {
        self.lift.as_ref()
    }

    pub fn reference(&self) -> &DMatrix<f64> {
        &self.reference
    }

    fn lifted(&self, m: DMatrix<f64>) -> DMatrix<f64> {
        match &self.lift {
            Some(t) => t * m,
            None => m,
        }
    }
}

impl ProjectorField for EquivariantField {
    fn ambient_dim(&self) -> usize {
        self.rep.dim()
    }

    fn fiber_jet(&self, p: &ChartPoint) -> Result<FiberJet> {
        let jet = section_jet(p);
        let r = self.rep.group(&jet.g);
        let base = &r * &self.reference;
        let gi = jet.g.adjoint();
        let d1 = [0, 1].map(|i| self.lifted(&r * self.rep.algebra(&(gi * jet.d1[i])) * &self.reference));
        let span = self.lifted(base);
        if oriented_frame(&span).is_none() {
            return Err(Error::Boundary(format!("fiber at {:?} meets ker T", p.coord)));
        }
        Ok(FiberJet { span, d1 })
    }

    fn fiber_span(&self, p: &ChartPoint) -> Result<DMatrix<f64>> {
        let g = local_section(p);
        let span = self.lifted(self.rep.group(g.matrix()) * &self.reference);
        if oriented_frame(&span).is_none() {
            return Err(Error::Boundary(format!("fiber at {:?} meets ker T", p.coord)));
        }
        Ok(span)
    }
}

pub fn map_projector(pt: &ModuliPoint, p: &ChartPoint) -> Result<QuotientProjector> {
    EquivariantField::moduli(pt)?.projector(p)
}

pub fn standard_map_projector(k: i64, l: usize, p: &ChartPoint) -> Result<QuotientProjector> {
    EquivariantField::standard(k, l).projector(p)
}

pub fn real_standard_projector(k: i64, l: usize, p: &ChartPoint) -> Result<QuotientProjector> {
    EquivariantField::real_standard(k, l)?.projector(p)
}

pub fn f1_projector(m: usize, p: &ChartPoint) -> Result<QuotientProjector> {
    EquivariantField::totally_real(m)?.projector(p)
}

/// Weight index of the reference fiber, exposed for callers building
/// sections by hand.
pub fn reference_index(k: i64, l: usize) -> Result<usize> {
    weight_index(eigenspace_label(k, l), -k)
}

#[derive(Debug, Clone)]
pub struct BoundaryReport {
    /// Eigenvalues of `id + D`, ascending.
    pub eigenvalues: Vec<f64>,
    pub kernel_dim: usize,
    /// The image lies in a totally geodesic `Gr_p(R^{p+2})`.
    pub p: usize,
    /// Orthonormal kernel vectors of `T` (columns); each is a section of the
    /// quotient bundle vanishing identically after projection.
    pub kernel: DMatrix<f64>,
    /// Largest overlap between a grid fiber and the kernel.
    pub max_fiber_overlap: f64,
    pub grid_size: usize,
}

impl BoundaryReport {
    pub fn on_boundary(&self) -> bool {
        self.kernel_dim > 0
    }
}

pub fn boundary_analysis(pt: &ModuliPoint, grid: &[ChartPoint]) -> Result<BoundaryReport> {
    let dim = 2 * pt.complex_dim();
    let (vals, vecs) = sym_eigen(&(pt.d.matrix() + DMatrix::identity(dim, dim)));
    let kernel_cols: Vec<DVector<f64>> =
        (0..dim).filter(|&i| vals[i] < KERNEL_TOL).map(|i| vecs.column(i).into_owned()).collect();
    let kernel_dim = kernel_cols.len();
    let kernel = if kernel_cols.is_empty() { DMatrix::zeros(dim, 0) } else { DMatrix::from_columns(&kernel_cols) };
    let field = EquivariantField::moduli(pt)?;
    let mut overlap: f64 = 0.0;
    for p in grid {
        let q = field.projector(p)?;
        if kernel_dim > 0 {
            overlap = overlap.max((kernel.transpose() * &q.frame).amax());
        }
    }
    Ok(BoundaryReport {
        eigenvalues: vals.iter().copied().collect(),
        kernel_dim,
        p: dim - 2 - kernel_dim,
        kernel,
        max_fiber_overlap: overlap,
        grid_size: grid.len(),
    })
}
