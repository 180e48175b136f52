//! Python bindings for `gridnls`.
//!
//! Functions take plain numbers and return dicts or lists of tuples; grids are
//! rebuilt per call from `(half_width, mesh)`.

use std::sync::Arc;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use gridnls::functionals::{check_inequality, inequality_battery};
use gridnls::minimize::{
    estimate_critical_mass, maximize_quotient, minimize_energy, BisectionConfig, CriticalMassMethod, Init,
    MinimizeConfig, QuotientConfig,
};
use gridnls::sampling::{random_function, SampleKind};
use gridnls::sweep::{run_sweep, ParamRange, SweepSpec};
use gridnls::testfuncs::{u_eps_closed_forms, ExpFamilyParams};
use gridnls::{build_grid, Error, GridGraph, GridSpec};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidParameter(msg) | Error::InvalidGrid(msg) => PyValueError::new_err(msg),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn grid(half_width: usize, mesh: usize) -> PyResult<Arc<GridGraph>> {
    build_grid(GridSpec::new(half_width, mesh).map_err(to_py)?).map_err(to_py)
}

/// Minimizes the energy at mass `mass`; returns a dict with status, energy, iters and grad_norm.
#[pyfunction]
#[pyo3(signature = (p, mass, half_width=20, mesh=16, init=None, seed=0, max_iters=None, grad_tol=None))]
#[allow(clippy::too_many_arguments)]
fn minimize<'py>(
    py: Python<'py>,
    p: f64,
    mass: f64,
    half_width: usize,
    mesh: usize,
    init: Option<&str>,
    seed: u64,
    max_iters: Option<usize>,
    grad_tol: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let g = grid(half_width, mesh)?;
    let mut cfg = MinimizeConfig::new(p, mass);
    cfg.seed = seed;
    if let Some(s) = init {
        cfg.init = Init::parse(s).map_err(to_py)?;
    }
    if let Some(v) = max_iters {
        cfg.max_iters = v;
    }
    if let Some(v) = grad_tol {
        cfg.grad_tol = v;
    }
    let r = py.detach(|| minimize_energy(&g, &cfg)).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("p", p)?;
    d.set_item("mu", mass)?;
    d.set_item("status", r.status.as_str())?;
    d.set_item("energy", r.energy)?;
    d.set_item("iters", r.iterations)?;
    d.set_item("grad_norm", r.grad_norm)?;
    d.set_item("L", half_width)?;
    d.set_item("m", mesh)?;
    d.set_item("init", cfg.init.label())?;
    d.set_item("seed", seed)?;
    Ok(d)
}

/// Estimates `K_p`, returning `(estimate, lower, upper)`.
#[pyfunction]
#[pyo3(signature = (p, half_width=3, mesh=128, seed=0))]
fn kp(py: Python<'_>, p: f64, half_width: usize, mesh: usize, seed: u64) -> PyResult<(f64, f64, f64)> {
    let g = grid(half_width, mesh)?;
    let cfg = QuotientConfig { seed, ..QuotientConfig::default() };
    let k = py.detach(|| maximize_quotient(&g, p, &cfg)).map_err(to_py)?;
    Ok((k.value, k.bracket.0, k.bracket.1))
}

/// Estimates `μ_p` by `"formula"` or `"bisection"` over `[lo, hi]`; returns `(estimate, lower, upper)`.
#[pyfunction]
#[pyo3(signature = (p, method="formula", lo=None, hi=None, half_width=6, mesh=8))]
fn critical_mass(
    py: Python<'_>,
    p: f64,
    method: &str,
    lo: Option<f64>,
    hi: Option<f64>,
    half_width: usize,
    mesh: usize,
) -> PyResult<(f64, f64, f64)> {
    let g = grid(half_width, mesh)?;
    let m = match (method, lo, hi) {
        ("formula", _, _) => CriticalMassMethod::Formula(QuotientConfig::default()),
        ("bisection", Some(lo), Some(hi)) => CriticalMassMethod::EnergyBisection(BisectionConfig::new(p, lo, hi)),
        ("bisection", _, _) => return Err(PyValueError::new_err("bisection needs lo and hi")),
        (other, _, _) => return Err(PyValueError::new_err(format!("unknown method {other:?}"))),
    };
    let e = py.detach(|| estimate_critical_mass(&g, p, &m)).map_err(to_py)?;
    Ok((e.value, e.bracket.0, e.bracket.1))
}

/// Runs the inequality battery on random functions; rows are `(sample_id, name, p, alpha, lhs, rhs, slack)`.
#[pyfunction]
#[pyo3(signature = (samples=100, seed=0, half_width=3, mesh=8, alpha_steps=5))]
#[allow(clippy::type_complexity)]
fn check(
    samples: usize,
    seed: u64,
    half_width: usize,
    mesh: usize,
    alpha_steps: usize,
) -> PyResult<Vec<(usize, &'static str, Option<f64>, Option<f64>, f64, f64, f64)>> {
    let g = grid(half_width, mesh)?;
    let battery = inequality_battery(alpha_steps);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    for id in 0..samples {
        let kind = if id % 2 == 0 { SampleKind::MixedSign } else { SampleKind::NonNegative };
        let u = random_function(&g, &mut rng, kind);
        for &ineq in &battery {
            let r = check_inequality(&u, ineq).map_err(to_py)?;
            rows.push((id, r.name(), ineq.p(), ineq.alpha(), r.lhs, r.rhs, r.slack));
        }
    }
    Ok(rows)
}

/// Sweeps `(p, μ)`; ranges use the CLI syntax. Rows are `(p, mu, status, energy, iters, grad_norm)`.
#[pyfunction]
#[pyo3(signature = (p_range, mu_range, half_width=6, mesh=8, seed=0, threads=None))]
#[allow(clippy::type_complexity)]
fn sweep(
    py: Python<'_>,
    p_range: &str,
    mu_range: &str,
    half_width: usize,
    mesh: usize,
    seed: u64,
    threads: Option<usize>,
) -> PyResult<Vec<(f64, f64, &'static str, f64, usize, f64)>> {
    let mut spec = SweepSpec::new(
        ParamRange::parse(p_range).map_err(to_py)?,
        ParamRange::parse(mu_range).map_err(to_py)?,
        GridSpec::new(half_width, mesh).map_err(to_py)?,
    );
    spec.seed = seed;
    spec.threads = threads;
    let rows = py.detach(|| run_sweep(&spec)).map_err(to_py)?;
    Ok(rows.iter().map(|r| (r.p, r.mu, r.status.as_str(), r.energy, r.iters, r.grad_norm)).collect())
}

/// Closed-form `(mass, kinetic, ∫|u|^p)` of the exponential family on the infinite grid.
#[pyfunction]
fn exp_closed_forms(eps: f64, mass: f64, p: f64) -> PyResult<(f64, f64, f64)> {
    let c = u_eps_closed_forms(ExpFamilyParams::new(eps, mass).map_err(to_py)?, p);
    Ok((c.mass, c.kinetic, c.lp_power))
}

#[pymodule]
fn gridnls_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(minimize, m)?)?;
    m.add_function(wrap_pyfunction!(kp, m)?)?;
    m.add_function(wrap_pyfunction!(critical_mass, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(exp_closed_forms, m)?)?;
    Ok(())
}
