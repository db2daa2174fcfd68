//! Acceptance suite. Each test covers one numbered criterion and writes a
//! single PASS/FAIL line to stdout (bypassing the harness capture) before
//! asserting.

use std::io::Write;

use ehmoduli_core::contraction::{contract_coeffs, contract_power_coeffs, correspond, Direction};
use ehmoduli_core::endo::SymEndo;
use ehmoduli_core::exact::{contraction_kernel_dim, is_zero, rational, Rational};
use ehmoduli_core::gauss::{gauss_map, FdImmersion, GaussMapField, OrbitImmersion};
use ehmoduli_core::geometry::{
    degree_estimate, eh_verify, expected_energy_ratio, mean_curvature_gradient, sample, takahashi_residual,
};
use ehmoduli_core::linalg::sym_dim;
use ehmoduli_core::moduli::{boundary_analysis, validate, ChartPoint, EquivariantField, ModuliPoint};
use ehmoduli_core::quadrature::fibonacci_grid;
use ehmoduli_core::rep::weight_vector;
use ehmoduli_core::span::{gs_span_real_standard, moduli_ambient, moduli_ambient_isotypic, moduli_ambient_orbit};
use nalgebra::DMatrix;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GRID: usize = 50;
const RADIAL: usize = 24;
const ANGULAR: usize = 48;

struct Criterion {
    id: u32,
    title: &'static str,
    checks: Vec<(String, bool)>,
}

impl Criterion {
    fn new(id: u32, title: &'static str) -> Self {
        Self { id, title, checks: Vec::new() }
    }

    fn check(&mut self, what: impl Into<String>, pass: bool) {
        self.checks.push((what.into(), pass));
    }

    /// `measured < tol`
    fn below(&mut self, what: &str, measured: f64, tol: f64) {
        self.check(format!("{what} {measured:.3e} < {tol:.0e}"), measured < tol);
    }

    fn close(&mut self, what: &str, measured: f64, expected: f64, tol: f64) {
        let ok = (measured - expected).abs() < tol;
        self.check(format!("{what} {measured:.9} vs {expected} (tol {tol:.0e})"), ok);
    }

    fn finish(self) {
        let failed: Vec<&str> = self.checks.iter().filter(|(_, p)| !p).map(|(w, _)| w.as_str()).collect();
        let status = if failed.is_empty() { "PASS" } else { "FAIL" };
        let detail = if failed.is_empty() {
            format!("{} checks", self.checks.len())
        } else {
            format!("failed: {}", failed.join("; "))
        };
        let line = format!("acceptance criterion {:>2} [{status}] {}: {detail}\n", self.id, self.title);
        let _ = std::io::stdout().lock().write_all(line.as_bytes());
        assert!(failed.is_empty(), "criterion {} failed: {}", self.id, failed.join("; "));
    }
}

fn grid() -> Vec<ChartPoint> {
    fibonacci_grid(GRID)
}

#[test]
fn criterion_01_contraction_kernel() {
    let mut c = Criterion::new(1, "contraction kernel dimension");
    for n in 1..=6 {
        let dim = contraction_kernel_dim(n);
        c.check(format!("n={n}: dim ker {dim}, expected {}", 2 * n + 1), dim == 2 * n + 1);
    }
    c.finish();
}

fn random_symmetric_monomial(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<Rational> {
    let mut t = DMatrix::from_element(n + 1, n + 1, Rational::zero());
    let (p, q) = (rng.random_range(0..=n), rng.random_range(0..=n));
    let a = rational(rng.random_range(-9..=9i64));
    t[(p, q)] += a.clone();
    t[(q, p)] += a;
    t
}

#[test]
fn criterion_02_closed_form_iterate() {
    let mut c = Criterion::new(2, "closed-form iterate equals iterated contraction");
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut cases = 0;
    for _ in 0..30 {
        let n = rng.random_range(1..=8usize);
        let t = random_symmetric_monomial(n, &mut rng);
        let mut iterated = t.clone();
        for j in 1..=n {
            iterated = contract_coeffs(&iterated);
            let closed = contract_power_coeffs(&t, j);
            cases += 1;
            if closed != iterated {
                c.check(format!("n={n} j={j}: closed form differs"), false);
            }
        }
    }
    c.check(format!("{cases} exact comparisons"), true);
    c.finish();
}

#[test]
fn criterion_03_vanishing_threshold() {
    let mut c = Criterion::new(3, "contraction vanishing threshold");
    for (k, l) in [(1usize, 1usize), (2, 1), (2, 2)] {
        let n = k + 2 * l;
        // e1^{k+l-1} e2^{l+1} (x) e1^{k+l} e2^l + swap
        let mut x = DMatrix::from_element(n + 1, n + 1, Rational::zero());
        x[(l + 1, l)] = rational(1);
        x[(l, l + 1)] = rational(1);
        for r in 0..=n / 2 {
            let vanishes = is_zero(&contract_power_coeffs(&x, 2 * r));
            c.check(format!("({k},{l}) r={r}: vanishes={vanishes}"), vanishes == (r >= l + 1));
        }
    }
    c.finish();
}

#[test]
fn criterion_04_moduli_dimensions() {
    let mut c = Criterion::new(4, "moduli ambient dimensions");
    for ((k, l), expected) in [((1, 0), 0), ((2, 0), 2), ((3, 0), 6), ((2, 1), 2), ((3, 1), 6)] {
        let orbit = moduli_ambient_orbit(k, l, 7).unwrap();
        let iso = moduli_ambient_isotypic(k, l).unwrap();
        c.check(format!("({k},{l}) dim {} expected {expected}", iso.dim()), iso.dim() == expected);
        c.check(format!("({k},{l}) orbit dim {}", orbit.dim()), orbit.dim() == expected);
        c.below(&format!("({k},{l}) method distance"), orbit.distance(&iso), 1e-8);
    }
    for k in 1..=3i64 {
        let dims: Vec<usize> = (0..=2).map(|l| moduli_ambient(k, l).unwrap().dim()).collect();
        c.check(format!("k={k} dims over l=0..2 {dims:?}"), dims.iter().all(|&d| d == dims[0]));
    }
    c.finish();
}

/// Criterion 5 checks for one point, shared with criterion 7.
fn eh_checks(c: &mut Criterion, pt: &ModuliPoint, tag: &str) {
    let r = eh_verify(pt, &grid()).unwrap();
    let (k, l) = (pt.k(), pt.l());
    c.below(&format!("{tag} |A+mu|/mu"), r.max_a_deviation, 1e-6);
    c.below(&format!("{tag} conformality"), r.max_conformality_defect, 1e-6);
    c.below(&format!("{tag} cos std"), r.cos_std, 1e-6);
    let expected_cos = k as f64 / expected_energy_ratio(k, l);
    let tol = if l == 0 { 1e-8 } else { 1e-6 };
    c.close(&format!("{tag} cos"), r.cos_mean, expected_cos, tol);
    c.close(&format!("{tag} energy ratio"), r.energy_ratio, expected_energy_ratio(k, l), 1e-3);
}

#[test]
fn criterion_05_eh_verification() {
    let mut c = Criterion::new(5, "EH verification on seeded interior points");
    for (k, l) in [(1, 0), (2, 0), (2, 1)] {
        for seed in 1..=5u64 {
            let pt = ModuliPoint::random(k, l, 0.15 * seed as f64, seed).unwrap();
            c.check(format!("({k},{l}) seed {seed} interior"), validate(&pt).interior);
            eh_checks(&mut c, &pt, &format!("({k},{l}) seed {seed}"));
        }
    }
    // literal closed-form values
    let cos21 = eh_verify(&ModuliPoint::random(2, 1, 0.5, 9).unwrap(), &grid()).unwrap().cos_mean;
    c.close("(2,1) cos", cos21, 0.2, 1e-6);
    for (k, l, ratio) in [(2, 0, 2.0), (2, 1, 10.0)] {
        let r = eh_verify(&ModuliPoint::standard(k, l), &grid()).unwrap();
        c.close(&format!("mu({k},{l})/mu(1,0)"), r.energy_ratio, ratio, 1e-3);
    }
    c.finish();
}

#[test]
fn criterion_06_degree() {
    let mut c = Criterion::new(6, "curvature-integral degree");
    for (k, l, seed) in [(1, 0, 0), (2, 0, 1), (3, 0, 2), (2, 1, 3), (-1, 0, 4), (-2, 1, 5)] {
        let pt = ModuliPoint::random(k, l, 0.6, seed).unwrap();
        let d = degree_estimate(&EquivariantField::moduli(&pt).unwrap(), RADIAL, ANGULAR).unwrap();
        c.close(&format!("moduli ({k},{l})"), d.value, k as f64, 1e-2);
    }
    for (k, l) in [(1, 0), (2, 0), (1, 1)] {
        let d = degree_estimate(&EquivariantField::real_standard(k, l).unwrap(), RADIAL, ANGULAR).unwrap();
        c.close(&format!("real standard ({k},{l})"), d.value, 2.0 * k as f64, 1e-2);
    }
    for m in [1, 2] {
        let d = degree_estimate(&EquivariantField::totally_real(m).unwrap(), RADIAL, ANGULAR).unwrap();
        c.close(&format!("f1 m={m}"), d.value, 0.0, 1e-2);
    }
    c.finish();
}

#[test]
fn criterion_07_correspondence() {
    let mut c = Criterion::new(7, "correspondence roundtrip and endpoints");
    for (k, l) in [(2i64, 1usize), (3, 1)] {
        let mut worst_roundtrip: f64 = 0.0;
        let mut worst_norm: f64 = 0.0;
        for seed in 0..20u64 {
            let pt = ModuliPoint::random(k, l, 0.05 + 0.045 * seed as f64, 100 + seed).unwrap();
            let down = correspond(pt.d(), k, l, Direction::Down).unwrap();
            let back = correspond(&down, k, l - 1, Direction::Up).unwrap();
            worst_roundtrip = worst_roundtrip.max((back.matrix() - pt.d().matrix()).norm());
            worst_norm = worst_norm.max((down.op_norm() - pt.d().op_norm()).abs());
            if seed % 5 == 0 {
                let lower = ModuliPoint::new(k, l - 1, down).unwrap();
                c.check(format!("({k},{}) image seed {seed} interior", l - 1), validate(&lower).interior);
                eh_checks(&mut c, &pt, &format!("({k},{l}) seed {seed}"));
                eh_checks(&mut c, &lower, &format!("({k},{}) image of seed {seed}", l - 1));
            }
        }
        c.below(&format!("({k},{l}) roundtrip"), worst_roundtrip, 1e-8);
        c.below(&format!("({k},{l}) op-norm change"), worst_norm, 1e-12);
    }
    c.finish();
}

/// Ambient direction rescaled so that its smallest eigenvalue is `-1`.
fn boundary_point(k: i64, l: usize, seed: u64) -> ModuliPoint {
    let pt = ModuliPoint::random(k, l, 0.5, seed).unwrap();
    let lowest = pt.d().eigenvalues()[0];
    pt.with_d(pt.d().scale(-1.0 / lowest)).unwrap()
}

#[test]
fn criterion_08_boundary() {
    let mut c = Criterion::new(8, "boundary points");
    for (k, l) in [(3i64, 0usize), (4, 0), (3, 1)] {
        let pt = boundary_point(k, l, 11);
        let n_complex = pt.complex_dim();
        let report = boundary_analysis(&pt, &grid()).unwrap();
        c.check(format!("({k},{l}) kernel dim {}", report.kernel_dim), report.kernel_dim == 1);
        c.below(&format!("({k},{l}) fiber overlap with ker T"), report.max_fiber_overlap, 1e-8);
        let bound = 2 * (k.unsigned_abs() as usize + 2 * l);
        c.check(
            format!("({k},{l}) p = {} = 2N-3 = {} < {bound}", report.p, 2 * n_complex - 3),
            report.p == 2 * n_complex - 3 && report.p < bound,
        );
    }
    c.finish();
}

#[test]
fn criterion_09_rigidity() {
    let mut c = Criterion::new(9, "rigidity of the real standard map and k = 0");
    for (k, l) in [(1i64, 0usize), (1, 1)] {
        let span = gs_span_real_standard(k, l, 3).unwrap();
        let full = sym_dim(2 * (k as usize + l) + 1);
        c.check(format!("({k},{l}) span dim {} of {full}", span.dim()), span.dim() == full);
        c.check(format!("({k},{l}) deformation dim {}", span.complement().dim()), span.complement().dim() == 0);
    }
    for l in 0..=3 {
        let dim = moduli_ambient(0, l).unwrap().dim();
        c.check(format!("(0,{l}) ambient dim {dim}"), dim == 0);
    }
    c.finish();
}

#[test]
fn criterion_10_f1() {
    let mut c = Criterion::new(10, "degree-zero totally real map");
    let field = EquivariantField::totally_real(1).unwrap();
    let mut worst_det: f64 = 0.0;
    let mut worst_grad: f64 = 0.0;
    let mut least_defect = f64::INFINITY;
    for p in grid() {
        let s = sample(&field, &p).unwrap();
        worst_det = worst_det.max(s.a.determinant().abs() / s.a.norm_squared());
        least_defect = least_defect.min(s.proportionality_defect());
        worst_grad = worst_grad.max(mean_curvature_gradient(&field, &p, 1e-4).unwrap());
    }
    c.below("|det A| / |A|^2", worst_det, 1e-10);
    c.below("FD |grad A|", worst_grad, 1e-4);
    c.check(format!("min |A+mu|/mu {least_defect:.3} > 0.5 (not proportional)"), least_defect > 0.5);
    c.finish();
}

#[test]
fn criterion_11_gauss_map() {
    let mut c = Criterion::new(11, "Gauss map of the Veronese surface");
    let veronese = OrbitImmersion::veronese(2).unwrap();
    let fd = FdImmersion::new(veronese.clone());
    let points = fibonacci_grid(10);
    let (mut prop, mut literal, mut corrected, mut literal_fd, mut shape) = (0f64, 0f64, 0f64, 0f64, 0f64);
    for p in &points {
        let s = gauss_map(&veronese, p).unwrap();
        prop = prop.max(s.proportionality_defect);
        literal = literal.max(s.literal_residual);
        corrected = corrected.max(s.corrected_residual);
        shape = shape.max((s.shape_n + nalgebra::Matrix2::identity() * 2.0).norm());
        literal_fd = literal_fd.max(gauss_map(&fd, p).unwrap().literal_residual);
    }
    c.below("A proportional to id", prop, 1e-6);
    c.below("K*n = -2 id", shape, 1e-6);
    c.below("identity A = K*n - Ric (exact)", literal, 1e-6);
    c.below("identity A = K*n - Ric (finite differences)", literal_fd, 1e-4);
    let degree = degree_estimate(&GaussMapField(&veronese), RADIAL, ANGULAR).unwrap();
    c.close("Gauss map degree", degree.value, 2.0, 1e-2);
    // reported for diagnosis; the sign of the Ricci term fixed by the Gauss equation
    let _ = std::io::stdout()
        .lock()
        .write_all(format!("acceptance criterion 11 note: A = K*n + Ric residual {corrected:.3e}\n").as_bytes());
    c.finish();
}

#[test]
fn criterion_12_takahashi() {
    let mut c = Criterion::new(12, "eigen-equation of induced sections");
    let pt = ModuliPoint::standard(1, 0);
    let w = weight_vector(1, 1).unwrap();
    let r = takahashi_residual(&pt, &w, &grid(), 1e-3).unwrap();
    c.below("residual at step 1e-3", r.residual, 1e-3);
    c.below("relative mu mismatch", r.mu_mismatch(), 1e-3);
    c.finish();
}

#[test]
fn interior_points_are_not_boundary() {
    let pt = ModuliPoint::random(2, 1, 0.9, 4).unwrap();
    assert!(!boundary_analysis(&pt, &grid()).unwrap().on_boundary());
    assert_eq!(SymEndo::zero(pt.n()).op_norm(), 0.0);
}
