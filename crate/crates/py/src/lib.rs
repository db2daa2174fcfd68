//! Python bindings: moduli points, EH verification, degree, correspondence
//! and the Gauss map of the orbit immersions.

use ehmoduli_core::contraction::{correspond as core_correspond, Direction};
use ehmoduli_core::gauss::{gauss_map as core_gauss_map, OrbitImmersion};
use ehmoduli_core::geometry::{self, degree_estimate};
use ehmoduli_core::moduli::{self, map_projector, ChartPoint, EquivariantField};
use ehmoduli_core::quadrature::fibonacci_grid;
use ehmoduli_core::span::moduli_ambient;
use ehmoduli_core::Error;
use nalgebra::DMatrix;
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn grid(n: usize) -> PyResult<Vec<ChartPoint>> {
    if n < 8 {
        return Err(PyValueError::new_err("grid size must be at least 8"));
    }
    Ok(fibonacci_grid(n))
}

/// A point `D` of the moduli space for the label `(k, l)`.
#[pyclass(name = "ModuliPoint", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyModuliPoint(moduli::ModuliPoint);

#[pymethods]
impl PyModuliPoint {
    #[staticmethod]
    fn standard(k: i64, l: usize) -> Self {
        Self(moduli::ModuliPoint::standard(k, l))
    }

    #[staticmethod]
    #[pyo3(signature = (k, l, op_norm, seed = 0))]
    fn random(k: i64, l: usize, op_norm: f64, seed: u64) -> PyResult<Self> {
        moduli::ModuliPoint::random(k, l, op_norm, seed).map(Self).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (k, l, coords, op_norm = None))]
    fn from_coords(k: i64, l: usize, coords: Vec<f64>, op_norm: Option<f64>) -> PyResult<Self> {
        moduli::ModuliPoint::from_coords(k, l, &coords, op_norm).map(Self).map_err(err)
    }

    #[getter]
    fn k(&self) -> i64 {
        self.0.k()
    }

    #[getter]
    fn l(&self) -> usize {
        self.0.l()
    }

    #[getter]
    fn complex_dim(&self) -> usize {
        self.0.complex_dim()
    }

    #[getter]
    fn op_norm(&self) -> f64 {
        self.0.d().op_norm()
    }

    /// `D` as a real symmetric matrix in realified unitary coordinates.
    #[getter]
    fn d(&self) -> Vec<Vec<f64>> {
        rows(self.0.d().matrix())
    }

    /// Coordinates of `D` in the orthonormal ambient basis.
    fn coords(&self) -> PyResult<Vec<f64>> {
        let ambient = moduli_ambient(self.0.k(), self.0.l()).map_err(err)?;
        Ok(ambient.coords(self.0.d().matrix()).iter().copied().collect())
    }

    fn validate<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = moduli::validate(&self.0);
        let out = PyDict::new(py);
        out.set_item("interior", d.interior)?;
        out.set_item("in_closure", d.in_closure)?;
        out.set_item("op_norm", d.op_norm)?;
        out.set_item("ambient_residual", d.ambient_residual)?;
        out.set_item("issues", d.issues)?;
        Ok(out)
    }

    /// Orthogonal projector onto the fiber at `z` (`None` is the point at infinity).
    #[pyo3(signature = (z = None))]
    fn projector(&self, z: Option<Complex64>) -> PyResult<Vec<Vec<f64>>> {
        let p = z.map(ChartPoint::from_z).unwrap_or_else(ChartPoint::infinity);
        Ok(rows(&map_projector(&self.0, &p).map_err(err)?.matrix))
    }

    #[pyo3(signature = (grid_size = 50))]
    fn eh_verify<'py>(&self, py: Python<'py>, grid_size: usize) -> PyResult<Bound<'py, PyDict>> {
        let r = geometry::eh_verify(&self.0, &grid(grid_size)?).map_err(err)?;
        let out = PyDict::new(py);
        out.set_item("mu", r.mu)?;
        out.set_item("max_a_deviation", r.max_a_deviation)?;
        out.set_item("max_conformality_defect", r.max_conformality_defect)?;
        out.set_item("cos_mean", r.cos_mean)?;
        out.set_item("cos_std", r.cos_std)?;
        out.set_item("energy_ratio", r.energy_ratio)?;
        out.set_item("expected_ratio", r.expected_ratio)?;
        Ok(out)
    }

    /// Degree by integrating the pulled-back curvature.
    fn degree(&self) -> PyResult<f64> {
        let field = EquivariantField::moduli(&self.0).map_err(err)?;
        Ok(degree_estimate(&field, 24, 48).map_err(err)?.value)
    }

    #[pyo3(signature = (grid_size = 50))]
    fn boundary<'py>(&self, py: Python<'py>, grid_size: usize) -> PyResult<Bound<'py, PyDict>> {
        let r = moduli::boundary_analysis(&self.0, &grid(grid_size)?).map_err(err)?;
        let out = PyDict::new(py);
        out.set_item("on_boundary", r.on_boundary())?;
        out.set_item("kernel_dim", r.kernel_dim)?;
        out.set_item("p", r.p)?;
        out.set_item("max_fiber_overlap", r.max_fiber_overlap)?;
        out.set_item("eigenvalues", r.eigenvalues)?;
        Ok(out)
    }

    /// Image under the correspondence to label `l - 1` ("down") or `l + 1` ("up").
    fn correspond(&self, direction: &str) -> PyResult<Self> {
        let (dir, l) = match direction {
            "down" if self.0.l() >= 1 => (Direction::Down, self.0.l() - 1),
            "down" => return Err(PyValueError::new_err("l = 0 has no lower label")),
            "up" => (Direction::Up, self.0.l() + 1),
            other => return Err(PyValueError::new_err(format!("unknown direction {other:?}"))),
        };
        let d = core_correspond(self.0.d(), self.0.k(), self.0.l(), dir).map_err(err)?;
        moduli::ModuliPoint::new(self.0.k(), l, d).map(Self).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("ModuliPoint(k={}, l={}, op_norm={:.6})", self.0.k(), self.0.l(), self.0.d().op_norm())
    }
}

#[pyfunction]
fn moduli_ambient_dim(k: i64, l: usize) -> PyResult<usize> {
    Ok(moduli_ambient(k, l).map_err(err)?.dim())
}

#[pyfunction]
fn expected_energy_ratio(k: i64, l: usize) -> f64 {
    geometry::expected_energy_ratio(k, l)
}

#[pyfunction]
fn kappa() -> f64 {
    geometry::kappa()
}

/// Gauss map data of the orbit immersion of the real form of `S^{2m}`.
#[pyfunction]
#[pyo3(signature = (m, z = None))]
fn gauss_map<'py>(py: Python<'py>, m: usize, z: Option<Complex64>) -> PyResult<Bound<'py, PyDict>> {
    let imm = OrbitImmersion::veronese(m).map_err(err)?;
    let p = z.map(ChartPoint::from_z).unwrap_or_else(ChartPoint::infinity);
    let s = core_gauss_map(&imm, &p).map_err(err)?;
    let mat = |a: &nalgebra::Matrix2<f64>| vec![vec![a[(0, 0)], a[(0, 1)]], vec![a[(1, 0)], a[(1, 1)]]];
    let out = PyDict::new(py);
    out.set_item("a", mat(&s.a))?;
    out.set_item("shape_n", mat(&s.shape_n))?;
    out.set_item("ricci", mat(&s.ricci))?;
    out.set_item("gaussian_curvature", s.gaussian_curvature)?;
    out.set_item("literal_residual", s.literal_residual)?;
    out.set_item("corrected_residual", s.corrected_residual)?;
    out.set_item("proportionality_defect", s.proportionality_defect)?;
    Ok(out)
}

#[pymodule]
fn ehmoduli(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModuliPoint>()?;
    m.add_function(wrap_pyfunction!(moduli_ambient_dim, m)?)?;
    m.add_function(wrap_pyfunction!(expected_energy_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(kappa, m)?)?;
    m.add_function(wrap_pyfunction!(gauss_map, m)?)?;
    Ok(())
}
