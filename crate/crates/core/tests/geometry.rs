use std::f64::consts::PI;

use ehmoduli_core::gauss::{gauss_map, gaussian_curvature, FdImmersion, GaussMapField, Immersion, OrbitImmersion};
use ehmoduli_core::geometry::{
    calibration_mu, degree_estimate, degree_integral, eh_verify, kahler_angle, kappa, mean_curvature_gradient,
    mean_curvature_operator, projector_derivative, projector_jet, projector_jet_fd, pullback_metric, sample,
    takahashi_residual, tangent_frame, FD_STEP,
};
use ehmoduli_core::moduli::{ChartPoint, EquivariantField, ModuliPoint, Reversed};
use ehmoduli_core::quadrature::fibonacci_grid;
use ehmoduli_core::rep::{weight_vector, IrrepVector};
use ehmoduli_core::Error;
use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn z(re: f64, im: f64) -> ChartPoint {
    ChartPoint::from_z(Complex64::new(re, im))
}

#[test]
fn tangent_frame_is_orthonormal_for_scaled_fubini_study() {
    for p in fibonacci_grid(20) {
        let [e, je] = tangent_frame(&p);
        // kappa * g_FS = kappa * |dz|^2 / (1 + |z|^2)^2
        let g = kappa() / p.conformal().powi(2);
        assert!((g * e.norm_squared() - 1.0).abs() < 1e-12);
        assert!((g * je.norm_squared() - 1.0).abs() < 1e-12);
        assert!(e.dot(&je).abs() < 1e-12);
        // J e is the counterclockwise rotation of e
        assert!((je - Matrix2::new(0.0, -1.0, 1.0, 0.0) * e).norm() < 1e-12);
    }
}

#[test]
fn frame_norm_scales_with_conformal_factor() {
    let a = tangent_frame(&ChartPoint::finite(Complex64::new(0.0, 0.0)))[0].norm();
    let b = tangent_frame(&ChartPoint::finite(Complex64::new(0.6, 0.0)))[0].norm();
    assert!((b / a - 1.36).abs() < 1e-12);
}

#[test]
fn projector_derivative_is_tangent_to_the_grassmannian() {
    let pt = ModuliPoint::random(2, 1, 0.8, 3).unwrap();
    let field = EquivariantField::moduli(&pt).unwrap();
    for p in fibonacci_grid(12) {
        let jet = projector_jet(&field, &p).unwrap();
        let id = DMatrix::identity(jet.projector.nrows(), jet.projector.nrows());
        let comp = &id - &jet.projector;
        for d in &jet.d1 {
            assert!((d - d.transpose()).norm() < 1e-12);
            assert!((&jet.projector * d * &jet.projector).norm() < 1e-9);
            assert!((&comp * d * &comp).norm() < 1e-9);
        }
        let x = [0.3, -1.2];
        let lin = projector_derivative(&field, &p, x).unwrap();
        assert!((lin - (&jet.d1[0] * x[0] + &jet.d1[1] * x[1])).norm() < 1e-12);
    }
}

#[test]
fn exact_and_finite_difference_derivatives_agree() {
    let fields = [
        EquivariantField::moduli(&ModuliPoint::random(3, 1, 0.9, 1).unwrap()).unwrap(),
        EquivariantField::real_standard(1, 1).unwrap(),
        EquivariantField::totally_real(2).unwrap(),
    ];
    for field in &fields {
        for p in fibonacci_grid(12) {
            let exact = projector_jet(field, &p).unwrap();
            let fd = projector_jet_fd(field, &p, FD_STEP).unwrap();
            for i in 0..2 {
                let scale = 1.0 + exact.d1[i].norm();
                assert!((&exact.d1[i] - &fd.d1[i]).norm() < 1e-5 * scale, "{:?}", field.kind());
            }
        }
    }
}

#[test]
fn standard_map_metric_is_constant() {
    let field = EquivariantField::standard(1, 0);
    let ms: Vec<f64> = fibonacci_grid(50).iter().map(|p| pullback_metric(&field, p).unwrap().1).collect();
    let (lo, hi) = ms.iter().fold((f64::MAX, f64::MIN), |(a, b), &m| (a.min(m), b.max(m)));
    assert!((hi - lo) / hi < 1e-6);
    assert!((hi - 2.0 * PI).abs() < 1e-10);
}

#[test]
fn metric_ratio_matches_energy_formula() {
    let p = z(0.4, 0.2);
    let m21 = pullback_metric(&EquivariantField::moduli(&ModuliPoint::random(2, 1, 0.6, 2).unwrap()).unwrap(), &p)
        .unwrap()
        .1;
    let m10 = pullback_metric(&EquivariantField::standard(1, 0), &p).unwrap().1;
    assert!((m21 / m10 - 10.0).abs() < 1e-3);
}

#[test]
fn reversing_the_fiber_negates_the_cosine() {
    let field = EquivariantField::moduli(&ModuliPoint::random(2, 1, 0.5, 7).unwrap()).unwrap();
    for p in fibonacci_grid(6) {
        let a = kahler_angle(&field, &p).unwrap();
        let b = kahler_angle(&Reversed(&field), &p).unwrap();
        assert!((a + b).abs() < 1e-12);
        assert!((a - 0.2).abs() < 1e-6);
    }
}

#[test]
fn negative_k_reverses_orientation() {
    let pos = eh_verify(&ModuliPoint::standard(2, 1), &fibonacci_grid(10)).unwrap();
    let neg = eh_verify(&ModuliPoint::standard(-2, 1), &fibonacci_grid(10)).unwrap();
    assert!((pos.cos_mean + neg.cos_mean).abs() < 1e-10);
    assert!((pos.mu - neg.mu).abs() < 1e-9);
}

#[test]
fn f1_operator_is_degenerate_and_parallel() {
    let field = EquivariantField::totally_real(1).unwrap();
    for p in fibonacci_grid(10) {
        let a = mean_curvature_operator(&field, &p).unwrap();
        assert!(a.determinant().abs() < 1e-10 * a.norm_squared());
        assert!(a.trace() < 0.0);
        assert!(mean_curvature_gradient(&field, &p, 1e-4).unwrap() < 1e-4);
    }
}

#[test]
fn degree_of_real_standard_doubles() {
    for k in [1i64, 2, -1] {
        let d = degree_estimate(&EquivariantField::real_standard(k, 0).unwrap(), 24, 48).unwrap();
        assert_eq!(d.nearest, 2 * k);
    }
}

#[test]
fn coarse_degree_is_a_resolution_error() {
    let field = EquivariantField::moduli(&ModuliPoint::random(3, 1, 0.9, 1).unwrap()).unwrap();
    let raw = degree_integral(&field, 2, 3).unwrap();
    if (raw - raw.round()).abs() > 1e-2 {
        assert!(matches!(degree_estimate(&field, 2, 3), Err(Error::Resolution(_))));
    }
    assert_eq!(degree_estimate(&field, 24, 48).unwrap().nearest, 3);
}

#[test]
fn takahashi_error_is_second_order() {
    let pt = ModuliPoint::standard(1, 0);
    let w = weight_vector(1, 1).unwrap();
    let grid = fibonacci_grid(20);
    let a = takahashi_residual(&pt, &w, &grid, 2e-3).unwrap().residual;
    let b = takahashi_residual(&pt, &w, &grid, 4e-3).unwrap().residual;
    assert!((b / a - 4.0).abs() < 0.2, "ratio {}", b / a);
}

#[test]
fn takahashi_holds_on_deformed_points() {
    let pt = ModuliPoint::random(2, 1, 0.7, 3).unwrap();
    let w = IrrepVector::random(4, &mut ChaCha8Rng::seed_from_u64(1));
    let r = takahashi_residual(&pt, &w, &fibonacci_grid(20), 1e-3).unwrap();
    assert!(r.residual < 1e-3);
    assert!(r.mu_mismatch() < 1e-3);
    assert!(matches!(
        takahashi_residual(&pt, &weight_vector(1, 1).unwrap(), &fibonacci_grid(2), 1e-3),
        Err(Error::Mismatch { .. })
    ));
}

#[test]
fn calibration_mu_is_two_pi() {
    assert!((calibration_mu() - 2.0 * PI).abs() < 1e-10);
    assert!((kappa() * PI - 1.0).abs() < 1e-12);
}

#[test]
fn round_sphere_gauss_map() {
    let sphere = OrbitImmersion::veronese(1).unwrap();
    for p in fibonacci_grid(5) {
        let s = gauss_map(&sphere, &p).unwrap();
        assert!((s.a + Matrix2::identity()).norm() < 1e-9);
        assert!((s.gaussian_curvature - 1.0).abs() < 1e-7);
        assert!(s.corrected_residual < 1e-7);
        assert!((s.mean_curvature.clone() + sphere.value(&p).unwrap() * 2.0).norm() < 1e-10);
    }
}

#[test]
fn veronese_curvature_and_gauss_degree() {
    let v = OrbitImmersion::veronese(2).unwrap();
    for p in fibonacci_grid(5) {
        assert!((gaussian_curvature(&v, &p).unwrap() - 1.0 / 3.0).abs() < 1e-7);
    }
    assert_eq!(degree_estimate(&GaussMapField(&v), 24, 48).unwrap().nearest, 2);
}

#[test]
fn finite_difference_immersion_agrees() {
    let v = OrbitImmersion::veronese(2).unwrap();
    let fd = FdImmersion::new(v.clone());
    for p in fibonacci_grid(10) {
        let a = gauss_map(&v, &p).unwrap();
        let b = gauss_map(&fd, &p).unwrap();
        assert!(b.corrected_residual < 1e-4);
        assert!((a.a - b.a).norm() < 1e-4 * a.a.norm());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn mean_curvature_operator_is_symmetric_nonpositive(seed in any::<u64>(), norm in 0.0f64..0.95, re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let pt = ModuliPoint::random(3, 1, norm, seed).unwrap();
        let s = sample(&EquivariantField::moduli(&pt).unwrap(), &z(re, im)).unwrap();
        prop_assert!((s.a - s.a.transpose()).norm() < 1e-10 * s.a.norm());
        let eig = s.a.symmetric_eigen().eigenvalues;
        prop_assert!(eig.max() < 1e-9 * s.a.norm());
        prop_assert!((s.e + s.a.trace()).abs() < 1e-10 * s.e);
        prop_assert!(s.proportionality_defect() < 1e-6);
    }
}
