//! Python bindings for the analysis engine and simulator.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use crsense::config::parse_config;
use crsense::optimizer::{self, Grids};
use crsense::schemes::{self, AccessPolicy, NetworkEnv as CoreEnv, Scheme};
use crsense::sim::{self, SecondaryArrivals, SimConfig};

fn to_py_err(e: crsense::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_scheme(s: &str) -> PyResult<Scheme> {
    Scheme::parse(s).map_err(to_py_err)
}

/// Network environment handle, constructed from the same TOML config text
/// the CLI consumes.
#[pyclass(name = "NetworkEnv", skip_from_py_object)]
#[derive(Clone)]
struct PyNetworkEnv {
    env: CoreEnv,
    default_scheme: Scheme,
    grids: Grids,
}

#[pymethods]
impl PyNetworkEnv {
    /// Parse a TOML config document (see the README config reference).
    #[staticmethod]
    fn from_config(text: &str) -> PyResult<Self> {
        let cfg = parse_config(text).map_err(to_py_err)?;
        Ok(Self { env: cfg.env, default_scheme: cfg.scheme, grids: cfg.grids })
    }

    #[getter]
    fn scheme(&self) -> String {
        self.default_scheme.to_string()
    }

    fn digest(&self) -> String {
        self.env.digest()
    }

    /// Analytic (mu_p, mu_s, feasible) for a policy.
    #[pyo3(signature = (scheme, lambda_p, tau=0.0, a_s=1.0, b_s=0.0))]
    fn service_rates(
        &self,
        scheme: &str,
        lambda_p: f64,
        tau: f64,
        a_s: f64,
        b_s: f64,
    ) -> PyResult<(f64, f64, bool)> {
        let scheme = parse_scheme(scheme)?;
        let policy = match scheme {
            Scheme::Conventional => AccessPolicy::conventional(tau),
            Scheme::IdleOnly => AccessPolicy::idle_only(tau, a_s),
            Scheme::IdleBusy => AccessPolicy::idle_busy(tau, a_s, b_s),
            Scheme::NoSensing => AccessPolicy::no_sensing(a_s),
        };
        let r = schemes::service_rates(&self.env, &policy, lambda_p).map_err(to_py_err)?;
        Ok((r.mu_p, r.mu_s, r.feasible))
    }

    /// Maximized secondary throughput of one scheme at lambda_p; returns
    /// (lambda_s_max, tau, a_s, b_s, feasible).
    fn maximize(&self, scheme: &str, lambda_p: f64) -> PyResult<(f64, f64, f64, f64, bool)> {
        let scheme = parse_scheme(scheme)?;
        let opt = optimizer::maximize_scheme(scheme, &self.env, lambda_p, &self.grids)
            .map_err(to_py_err)?;
        Ok((
            opt.lambda_s_max,
            opt.policy.tau,
            opt.policy.idle_access,
            opt.policy.busy_access,
            opt.feasible,
        ))
    }

    /// Best scheme at lambda_p; returns (scheme, lambda_s_max).
    fn best_scheme(&self, lambda_p: f64) -> PyResult<(String, f64)> {
        let (scheme, opt) =
            optimizer::best_scheme(&self.env, lambda_p, &self.grids).map_err(to_py_err)?;
        Ok((scheme.to_string(), opt.lambda_s_max))
    }

    /// Sampled boundary rows: list of (lambda_p, lambda_s_max, tau, a_s, b_s).
    fn region_curve(
        &self,
        scheme: &str,
        lambda_p_samples: usize,
    ) -> PyResult<Vec<(f64, f64, f64, f64, f64)>> {
        let scheme = parse_scheme(scheme)?;
        let curve = optimizer::region_curve(scheme, &self.env, lambda_p_samples, &self.grids)
            .map_err(to_py_err)?;
        Ok(curve
            .rows
            .iter()
            .map(|r| {
                (
                    r.lambda_p,
                    r.lambda_s_max,
                    r.policy.tau,
                    r.policy.idle_access,
                    r.policy.busy_access,
                )
            })
            .collect())
    }

    /// Seeded slot simulation; returns a dict of the report fields.
    /// `lambda_s = None` simulates a backlogged secondary.
    #[pyo3(signature = (scheme, lambda_p, tau=0.0, a_s=1.0, b_s=0.0, lambda_s=None, slots=100_000, seed=42))]
    #[allow(clippy::too_many_arguments)]
    fn simulate<'py>(
        &self,
        py: Python<'py>,
        scheme: &str,
        lambda_p: f64,
        tau: f64,
        a_s: f64,
        b_s: f64,
        lambda_s: Option<f64>,
        slots: u64,
        seed: u64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let scheme = parse_scheme(scheme)?;
        let policy = match scheme {
            Scheme::Conventional => AccessPolicy::conventional(tau),
            Scheme::IdleOnly => AccessPolicy::idle_only(tau, a_s),
            Scheme::IdleBusy => AccessPolicy::idle_busy(tau, a_s, b_s),
            Scheme::NoSensing => AccessPolicy::no_sensing(a_s),
        };
        let arrivals = match lambda_s {
            Some(l) => SecondaryArrivals::Bernoulli(l),
            None => SecondaryArrivals::Backlogged,
        };
        let cfg = SimConfig::new(slots, seed, lambda_p, arrivals);
        let report = sim::simulate(&self.env, &policy, &cfg).map_err(to_py_err)?;
        let d = PyDict::new(py);
        d.set_item("empirical_mu_p", report.empirical_mu_p)?;
        d.set_item("empirical_mu_s", report.empirical_mu_s)?;
        d.set_item("empirical_mu_s_uncond", report.empirical_mu_s_uncond)?;
        d.set_item("mean_qp", report.mean_qp)?;
        d.set_item("final_qp_trend", report.final_qp_trend)?;
        d.set_item("final_qs_trend", report.final_qs_trend)?;
        d.set_item("stability_verdict", report.stability_verdict.to_string())?;
        d.set_item("seed_used", report.seed_used)?;
        Ok(d)
    }
}

/// Standard normal complementary CDF.
#[pyfunction]
fn gaussian_tail(x: f64) -> f64 {
    crsense::phy::gaussian_tail(x)
}

/// Inverse of gaussian_tail on (0, 1).
#[pyfunction]
fn gaussian_tail_inverse(p: f64) -> PyResult<f64> {
    crsense::phy::gaussian_tail_inverse(p).map_err(to_py_err)
}

/// First `n` 64-bit draws of the slot RNG for a seed.
#[pyfunction]
fn rng_reference_draws(seed: u64, n: usize) -> Vec<u64> {
    sim::rng_reference_draws(seed, n)
}

#[pymodule]
fn crsense_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyNetworkEnv>()?;
    m.add_function(wrap_pyfunction!(gaussian_tail, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian_tail_inverse, m)?)?;
    m.add_function(wrap_pyfunction!(rng_reference_draws, m)?)?;
    Ok(())
}
