//! Python bindings. Lengths are SI unless a name says otherwise; energies in
//! the result dictionaries are reported in meV.

use num_complex::Complex64;
use pyo3::exceptions::{PyIOError, PyNotImplementedError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use setrap::depth::{find_saddle as core_find_saddle, intrinsic_depth, special_saddle as core_special_saddle};
use setrap::effpot::{optimize_bias as core_optimize_bias, ueff_contours as core_ueff_contours, BiasSearchOptions};
use setrap::multipole::{self, MultipoleSpec};
use setrap::ring::{ring_depth, ring_strength, RingDepthOptions, RingDesign};
use setrap::surface_field::{self, Vec3};
use setrap::units::{self, ELEMENTARY_CHARGE};
use setrap::Error;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io(e) => PyIOError::new_err(e.to_string()),
        Error::Unsupported(m) => PyNotImplementedError::new_err(m),
        Error::Search(m) => PyRuntimeError::new_err(m),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn mev(joule: f64) -> f64 {
    joule / ELEMENTARY_CHARGE * 1e3
}

#[pyclass(name = "TrapParams", frozen)]
struct PyTrapParams {
    inner: units::TrapParams,
}

#[pymethods]
impl PyTrapParams {
    #[new]
    #[pyo3(signature = (rf_frequency_hz, rf_voltage_v, ion_mass_amu, ion_charge_e, height_um))]
    fn new(
        rf_frequency_hz: f64,
        rf_voltage_v: f64,
        ion_mass_amu: f64,
        ion_charge_e: f64,
        height_um: f64,
    ) -> PyResult<Self> {
        units::TrapParams::from_lab_units(rf_frequency_hz, rf_voltage_v, ion_mass_amu, ion_charge_e, height_um)
            .map(|inner| PyTrapParams { inner })
            .map_err(py_err)
    }

    /// 100 MHz, 100 V, 10 amu, charge +e, 100 µm.
    #[staticmethod]
    fn reference() -> Self {
        PyTrapParams { inner: units::TrapParams::reference() }
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        let inner = units::TrapConfig::load(path).and_then(|c| c.into_params()).map_err(py_err)?;
        Ok(PyTrapParams { inner })
    }

    /// Ion height in meter.
    #[getter]
    fn d(&self) -> f64 {
        self.inner.ion_plane_distance
    }

    #[getter]
    fn q0(&self) -> PyResult<f64> {
        Ok(units::scale_factors(&self.inner).map_err(py_err)?.q0)
    }

    #[getter]
    fn u0_ev(&self) -> PyResult<f64> {
        Ok(units::scale_factors(&self.inner).map_err(py_err)?.u0_ev())
    }

    fn __repr__(&self) -> String {
        let c = self.inner.to_config();
        // hide unit-conversion round-off
        let r = |x: f64| format!("{x:.9e}").parse::<f64>().unwrap_or(x);
        format!(
            "TrapParams(rf_frequency_hz={}, rf_voltage_v={}, ion_mass_amu={}, ion_charge_e={}, height_um={})",
            r(c.rf_frequency_hz),
            r(c.rf_voltage_v),
            r(c.ion_mass_amu),
            r(c.ion_charge_e),
            r(c.height_um)
        )
    }
}

/// Planar electrode set loaded from a geometry JSON file.
#[pyclass(name = "Geometry", frozen)]
struct PyGeometry {
    inner: surface_field::Geometry,
}

#[pymethods]
impl PyGeometry {
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        surface_field::Geometry::load(path).map(|inner| PyGeometry { inner }).map_err(py_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        surface_field::Geometry::from_json_str(text).map(|inner| PyGeometry { inner }).map_err(py_err)
    }

    fn __len__(&self) -> usize {
        self.inner.regions.len()
    }

    /// `(potential, (Ex, Ey, Ez))` at a point above the plane, SI units.
    fn field(&self, x: f64, y: f64, z: f64) -> PyResult<(f64, (f64, f64, f64))> {
        let s = self.inner.sample(&Vec3::new(x, y, z)).map_err(py_err)?;
        Ok((s.potential, (s.field.x, s.field.y, s.field.z)))
    }
}

/// `n` equidistant strips of angular width `theta_w` on the mapped cylinder.
#[pyclass(name = "MultipoleSpec", frozen)]
struct PyMultipoleSpec {
    inner: MultipoleSpec,
}

#[pymethods]
impl PyMultipoleSpec {
    #[new]
    #[pyo3(signature = (n, theta0, theta_w, d=1.0, voltage=1.0))]
    fn new(n: u32, theta0: f64, theta_w: f64, d: f64, voltage: f64) -> PyResult<Self> {
        MultipoleSpec::new(n, theta0, theta_w, d, voltage).map(|inner| PyMultipoleSpec { inner }).map_err(py_err)
    }

    #[getter]
    fn n(&self) -> u32 {
        self.inner.n
    }

    /// Leading plane-picture coefficient `α_p`.
    fn strength(&self) -> Complex64 {
        multipole::strength(&self.inner)
    }

    /// Potential at plane coordinate `p` (trap at 0, electrodes at `Re p = d`).
    fn potential(&self, p: Complex64) -> PyResult<f64> {
        multipole::physical_potential_p(p, &self.inner).map_err(py_err)
    }

    /// Field `E_x + iE_y` at plane coordinate `p`.
    fn field(&self, p: Complex64) -> PyResult<Complex64> {
        multipole::field_p(p, &self.inner).map_err(py_err)
    }

    /// Planar strips as `(y_lo, y_hi)`; `None` marks an edge at infinity.
    fn layout(&self) -> PyResult<Vec<(Option<f64>, Option<f64>)>> {
        let l = multipole::electrode_layout(&self.inner).map_err(py_err)?;
        Ok(l.strips.iter().map(|s| (s.y_lo, s.y_hi)).collect())
    }

    fn q(&self, params: &PyTrapParams) -> PyResult<f64> {
        multipole::q_parameter(&self.inner, &params.inner).map_err(py_err)
    }
}

/// Escape saddle of the unbiased guide.
#[pyfunction]
fn find_saddle(py: Python<'_>, n: u32, theta0: f64, theta_w: f64) -> PyResult<Bound<'_, PyDict>> {
    let r = core_find_saddle(n, theta0, theta_w).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("u_saddle", r.u_saddle)?;
    d.set_item("p_saddle_over_d", r.p_saddle_over_d)?;
    d.set_item("depth_over_u0", r.depth_over_u0)?;
    d.set_item("estimates", r.estimate_chain)?;
    d.set_item("is_special", r.is_special)?;
    Ok(d)
}

/// `(ū_n, A_n)`.
#[pyfunction]
fn special_saddle(n: u32) -> PyResult<(f64, f64)> {
    let s = core_special_saddle(n).map_err(py_err)?;
    Ok((s.u_bar, s.a_n))
}

#[pyfunction]
fn depth_mev(n: u32, theta0: f64, theta_w: f64, params: &PyTrapParams) -> PyResult<f64> {
    Ok(mev(intrinsic_depth(n, theta0, theta_w, &params.inner).map_err(py_err)?.depth))
}

/// `(R1, R2, q_z, secular_hz, depth_mev)` of the ring trap with parameter `theta`.
#[pyfunction]
#[pyo3(signature = (theta, params, grid=200))]
fn ring_trap(theta: f64, params: &PyTrapParams, grid: usize) -> PyResult<(f64, f64, f64, f64, f64)> {
    let p = &params.inner;
    let design = RingDesign::new(theta, p.ion_plane_distance).map_err(py_err)?;
    let s = ring_strength(theta, p).map_err(py_err)?;
    let opts = RingDepthOptions { grid, ..Default::default() };
    let depth = ring_depth(&design, p, opts).map_err(py_err)?;
    Ok((design.r_inner, design.r_outer, s.qz, s.secular.frequency_hz, depth.depth_mev()))
}

#[pyfunction]
#[pyo3(signature = (spec, params, grid=256, v_lo=-1.0, v_hi=1.0))]
fn optimize_bias<'py>(
    py: Python<'py>,
    spec: &PyMultipoleSpec,
    params: &PyTrapParams,
    grid: usize,
    v_lo: f64,
    v_hi: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let opts = BiasSearchOptions { grid, v_lo, v_hi, ..Default::default() };
    let o = core_optimize_bias(&spec.inner, &params.inner, opts).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("vc_opt", o.v_c_opt)?;
    d.set_item("depth_ratio", o.depth_ratio)?;
    d.set_item("depth_over_max_quadrupole", o.depth_over_max_quadrupole)?;
    d.set_item("a_over_q2", o.a_over_q2)?;
    d.set_item("bias_voltage_v", o.bias_voltage_v)?;
    d.set_item("stable", o.stability.map(|s| s.stable))?;
    Ok(d)
}

/// Rows `(Re c, Im c, U_eff/U0)` over the cylinder disk.
#[pyfunction]
#[pyo3(signature = (spec, v_c, grid=128, max_radius=0.999))]
fn ueff_contours(spec: &PyMultipoleSpec, v_c: f64, grid: usize, max_radius: f64) -> PyResult<Vec<(f64, f64, f64)>> {
    let rows = core_ueff_contours(&spec.inner, v_c, grid, max_radius).map_err(py_err)?;
    Ok(rows.into_iter().map(|r| (r[0], r[1], r[2])).collect())
}

#[pymodule]
#[pyo3(name = "setrap")]
fn setrap_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTrapParams>()?;
    m.add_class::<PyGeometry>()?;
    m.add_class::<PyMultipoleSpec>()?;
    m.add_function(wrap_pyfunction!(find_saddle, m)?)?;
    m.add_function(wrap_pyfunction!(special_saddle, m)?)?;
    m.add_function(wrap_pyfunction!(depth_mev, m)?)?;
    m.add_function(wrap_pyfunction!(ring_trap, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_bias, m)?)?;
    m.add_function(wrap_pyfunction!(ueff_contours, m)?)?;
    Ok(())
}
