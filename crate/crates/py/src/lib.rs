//! Python bindings: the dyadic partition, spectral fields and their norms,
//! the semigroup symbol, and the ill-posedness experiments.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use micropolar::field::{LatticeGrid, SpectralField};
use micropolar::illposed::{
    build_initial_data, data_norm_scaling, grid_cross_check, inflation_experiment,
    kernel_sign_check, second_iterate, IllposedDatum, InflationConfig, InflationSpace,
    IterateQuadrature, KernelKind,
};
use micropolar::norms::{besov_norm, fb_norm, PhysicalGrid};
use micropolar::partition::{make_partition, DyadicPartition};
use micropolar::solver::{MildSolver, SolverConfig};
use micropolar::symbol::{build_symbol, SemigroupPoint};

fn core_err(e: micropolar::Error) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

/// Dyadic Littlewood-Paley partition over scales `j_min..=j_max`.
#[pyclass(name = "Partition")]
struct PyPartition {
    inner: DyadicPartition,
}

#[pymethods]
impl PyPartition {
    #[new]
    fn new(j_min: i32, j_max: i32) -> PyResult<Self> {
        Ok(PyPartition {
            inner: make_partition(j_min, j_max).map_err(core_err)?,
        })
    }

    /// Block multiplier psi(2^-j xi).
    fn psi(&self, j: i32, xi: (f64, f64, f64)) -> f64 {
        self.inner.psi_block(j, [xi.0, xi.1, xi.2])
    }

    /// Sum of the retained blocks at xi.
    fn partition_sum(&self, xi: (f64, f64, f64)) -> f64 {
        self.inner.partition_sum([xi.0, xi.1, xi.2])
    }

    /// |xi| band on which the truncated partition sums to one.
    fn resolved_band(&self) -> (f64, f64) {
        self.inner.resolved_band()
    }

    fn __repr__(&self) -> String {
        format!(
            "Partition(j_min={}, j_max={})",
            self.inner.j_min(),
            self.inner.j_max()
        )
    }
}

/// Frequency-space field with six complex components per sample.
#[pyclass(name = "Field")]
struct PyField {
    inner: SpectralField,
}

#[pymethods]
impl PyField {
    /// The ill-posedness datum f^N as a cube-quadrature field.
    #[staticmethod]
    #[pyo3(signature = (n, delta, gauss_order = 6))]
    fn initial_data(n: u32, delta: f64, gauss_order: usize) -> PyResult<Self> {
        let (_, field) = build_initial_data(n, delta, gauss_order, 1).map_err(core_err)?;
        Ok(PyField { inner: field })
    }

    /// Zero lattice field with `n` points per axis and spacing `h`.
    #[staticmethod]
    fn zeros_lattice(n: usize, h: f64) -> PyResult<Self> {
        if n < 2 || h <= 0.0 {
            return Err(PyValueError::new_err("need n >= 2 and h > 0"));
        }
        Ok(PyField {
            inner: SpectralField::zeros_lattice(LatticeGrid::new(n, h)),
        })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn max_amp(&self) -> f64 {
        self.inner.max_amp()
    }

    fn divergence_residual(&self) -> f64 {
        self.inner.divergence_residual()
    }

    fn hermitian_residual(&self) -> Option<f64> {
        self.inner.hermitian_residual()
    }

    /// Fourier-Besov norm over the partition.
    fn fb_norm(&self, s: f64, p: f64, r: f64, part: &PyPartition) -> PyResult<f64> {
        fb_norm(&self.inner, s, p, r, &part.inner).map_err(core_err)
    }

    /// Besov norm (p = inf) evaluated on a physical grid of `nx` points per
    /// axis over [-extent, extent].
    fn besov_norm(
        &self,
        s: f64,
        r: f64,
        part: &PyPartition,
        nx: usize,
        extent: f64,
    ) -> PyResult<f64> {
        let grid = PhysicalGrid {
            n: nx,
            half_extent: extent,
        };
        besov_norm(&self.inner, s, f64::INFINITY, r, &part.inner, &grid).map_err(core_err)
    }

    /// Dyadic dilation f(xi) -> f(2^-k xi) 2^{-3k}.
    fn dilate(&self, k: i32) -> Self {
        PyField {
            inner: self.inner.dilate(k),
        }
    }

    fn save(&self, path: &str) -> PyResult<()> {
        micropolar::io::save_field(std::path::Path::new(path), &self.inner).map_err(core_err)
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(PyField {
            inner: micropolar::io::load_field(std::path::Path::new(path)).map_err(core_err)?,
        })
    }
}

/// Closed-form eigenvalues of the symbol at xi, canonical order.
#[pyfunction]
fn symbol_eigenvalues(xi: (f64, f64, f64)) -> PyResult<[f64; 6]> {
    Ok(build_symbol([xi.0, xi.1, xi.2]).map_err(core_err)?.eigenvalues)
}

/// exp(-tA(xi)) v for a 6-vector of complex amplitudes.
#[pyfunction]
fn semigroup_apply(xi: (f64, f64, f64), t: f64, v: [Complex64; 6]) -> PyResult<[Complex64; 6]> {
    if t < 0.0 {
        return Err(PyValueError::new_err("t must be nonnegative"));
    }
    Ok(SemigroupPoint::new([xi.0, xi.1, xi.2]).apply_exp(t, &v))
}

/// Sampled (min, max) of a convolution kernel over admissible pairs.
#[pyfunction]
#[pyo3(signature = (kind, j, samples = 100_000, seed = 42))]
fn kernel_range(kind: &str, j: i32, samples: usize, seed: u64) -> PyResult<(f64, f64)> {
    let kind = match kind {
        "J1" | "j1" => KernelKind::J1,
        "K11" | "k11" => KernelKind::K11,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown kernel {other:?}; expected J1 or K11"
            )))
        }
    };
    kernel_sign_check(kind, j, samples, seed).map_err(core_err)
}

/// Least-squares slope of ln ||f^N|| against ln N.
#[pyfunction]
fn data_scaling_slope(n_list: Vec<u32>, delta: f64, r: f64) -> PyResult<f64> {
    let part = make_partition(-6, 40).map_err(core_err)?;
    data_norm_scaling(&n_list, delta, r, &part, 5).map_err(core_err)
}

/// Full second-iterate transform and named terms at one frequency.
#[pyfunction]
#[pyo3(signature = (n, delta, xi, t_factor = 1.0))]
fn second_iterate_at(
    py: Python<'_>,
    n: u32,
    delta: f64,
    xi: (f64, f64, f64),
    t_factor: f64,
) -> PyResult<Py<PyDict>> {
    let datum = IllposedDatum::new(n, delta).map_err(core_err)?;
    let samples = second_iterate(
        &datum,
        datum.t_n(t_factor),
        &[[xi.0, xi.1, xi.2]],
        IterateQuadrature::default(),
    )
    .map_err(core_err)?;
    let s = &samples[0];
    let out = PyDict::new(py);
    out.set_item("value", s.value.to_vec())?;
    out.set_item("j", s.terms.j.to_vec())?;
    out.set_item("k", s.terms.k.to_vec())?;
    out.set_item("k1", s.terms.k1.to_vec())?;
    out.set_item("canonical_u", -s.value[0].im)?;
    out.set_item("canonical_omega", -s.value[3].im)?;
    Ok(out.into())
}

/// One inflation experiment; returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (n, delta, r, space = "fb", seed = 42))]
fn inflation(
    py: Python<'_>,
    n: u32,
    delta: f64,
    r: f64,
    space: &str,
    seed: u64,
) -> PyResult<Py<PyDict>> {
    let part = make_partition(-6, 22).map_err(core_err)?;
    let space = match space {
        "fb" => InflationSpace::FourierBesov,
        "besov" => InflationSpace::BesovInfinity,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown space {other:?}; expected fb or besov"
            )))
        }
    };
    let cfg = InflationConfig {
        seed,
        ..InflationConfig::default()
    };
    let rep = inflation_experiment(n, delta, r, space, &part, &cfg).map_err(core_err)?;
    let out = PyDict::new(py);
    out.set_item("t_n", rep.t_n)?;
    out.set_item("data_norm", rep.data_norm)?;
    out.set_item("a1_norm", rep.a1_norm)?;
    out.set_item("u2_surrogate", rep.u2_surrogate)?;
    out.set_item("omega2_surrogate", rep.omega2_surrogate)?;
    out.set_item("inflation_ratio_u", rep.inflation_ratio_u)?;
    out.set_item("inflation_ratio_omega", rep.inflation_ratio_omega)?;
    out.set_item("leading_kernel_max", rep.leading_kernel_max)?;
    out.set_item("perturbative", rep.perturbative)?;
    Ok(out.into())
}

/// Cube-quadrature versus lattice cross-check; returns the deviation.
#[pyfunction]
#[pyo3(signature = (n = 2, delta = 0.05, lattice = 64))]
fn cross_check(n: u32, delta: f64, lattice: usize) -> PyResult<f64> {
    grid_cross_check(n, delta, lattice).map_err(core_err)
}

/// Short nonlinear run; returns structure diagnostics.
#[pyfunction]
#[pyo3(signature = (n_grid = 16, h = 0.5, dt = 0.01, t_end = 0.1, amplitude = 0.2, seed = 42))]
fn simulate_diagnostics(
    py: Python<'_>,
    n_grid: usize,
    h: f64,
    dt: f64,
    t_end: f64,
    amplitude: f64,
    seed: u64,
) -> PyResult<Py<PyDict>> {
    let grid = LatticeGrid::new(n_grid, h);
    let cfg = SolverConfig::new(grid, dt, t_end);
    let mut solver = MildSolver::new(cfg).map_err(core_err)?;
    let mut rng = micropolar::rng::stream(seed, 0x9);
    let u0 = micropolar::calibration::corpus_field(grid, &mut rng, amplitude);
    let traj = solver.solve_mild(&u0).map_err(core_err)?;
    let out = PyDict::new(py);
    out.set_item("steps", traj.times.len() - 1)?;
    out.set_item(
        "max_divergence_residual",
        traj.diagnostics
            .iter()
            .map(|d| d.divergence_residual)
            .fold(0.0f64, f64::max),
    )?;
    out.set_item(
        "max_hermitian_residual",
        traj.diagnostics
            .iter()
            .map(|d| d.hermitian_residual)
            .fold(0.0f64, f64::max),
    )?;
    Ok(out.into())
}

#[pymodule]
fn micropolar_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPartition>()?;
    m.add_class::<PyField>()?;
    m.add_function(wrap_pyfunction!(symbol_eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(semigroup_apply, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_range, m)?)?;
    m.add_function(wrap_pyfunction!(data_scaling_slope, m)?)?;
    m.add_function(wrap_pyfunction!(second_iterate_at, m)?)?;
    m.add_function(wrap_pyfunction!(inflation, m)?)?;
    m.add_function(wrap_pyfunction!(cross_check, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_diagnostics, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
