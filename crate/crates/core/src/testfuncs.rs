//! Explicit function families with closed-form norms.
//!
//! * the exponential family `u_ε(x, y) = κ_ε e^{−ε(|x|+|y|)}` restricted to the
//!   grid, which has mass `μ` and kinetic energy `ε²μ` exactly;
//! * the real-line soliton `φ(x) = sech(2x/√3)^{1/2}`, its rescalings
//!   `√λ φ(λx)` and its squeezed copy supported on a single edge.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::energy_unchecked;
use crate::graph::{build_grid, embed_edge_function, GraphFunction, GridGraph, GridSpec};

/// Parameters of the exponential family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpFamilyParams {
    pub eps: f64,
    pub mu: f64,
    /// Amplitude `κ_ε`, fixed by `eps` and `mu`.
    pub kappa: f64,
}

impl ExpFamilyParams {
    pub fn new(eps: f64, mu: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
        }
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::InvalidParameter(format!("mass must be positive, got {mu}")));
        }
        Ok(ExpFamilyParams { eps, mu, kappa: Self::amplitude(eps, mu) })
    }

    /// `κ_ε = ((εμ/2)(1 − e^{−2ε})/(1 + e^{−2ε}))^{1/2}`.
    pub fn amplitude(eps: f64, mu: f64) -> f64 {
        (0.5 * eps * mu * eps.tanh()).sqrt()
    }
}

/// Default truncation tolerance: `e^{−2εL}` must stay below this.
pub const DEFAULT_TRUNCATION_TOL: f64 = 1e-12;

/// Smallest half-width with `e^{−2εL} < tol`.
pub fn half_width_for(eps: f64, tol: f64) -> usize {
    ((-tol.ln()) / (2.0 * eps)).floor() as usize + 1
}

/// Nodal interpolant of `κ_ε e^{−ε(|x|+|y|)}` centred at the origin vertex.
///
/// With `truncation_tol = Some(t)`, fails unless `e^{−2εL} < t`.
pub fn u_eps(graph: &Arc<GridGraph>, params: ExpFamilyParams, truncation_tol: Option<f64>) -> Result<GraphFunction> {
    if let Some(tol) = truncation_tol {
        let tail = (-2.0 * params.eps * graph.half_width() as f64).exp();
        if tail >= tol {
            return Err(Error::InvalidParameter(format!(
                "grid too small for eps = {}: e^(-2 eps L) = {tail:.3e} >= {tol:.1e}; need L >= {}",
                params.eps,
                half_width_for(params.eps, tol)
            )));
        }
    }
    let ExpFamilyParams { eps, kappa, .. } = params;
    GraphFunction::from_fn(graph.clone(), |x, y| kappa * (-eps * (x.abs() + y.abs())).exp())
}

/// Analytic mass, kinetic energy and `∫|u_ε|^p` on the infinite grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedForms {
    pub mass: f64,
    pub kinetic: f64,
    pub lp_power: f64,
}

/// `∫|u_ε|^p = 2κ^p (2/(εp)) (1 + e^{−εp})/(1 − e^{−εp})`.
pub fn u_eps_closed_forms(params: ExpFamilyParams, p: f64) -> ClosedForms {
    let ExpFamilyParams { eps, mu, kappa } = params;
    let x = eps * p;
    let lp_power = 2.0 * kappa.powf(p) * (2.0 / x) / (0.5 * x).tanh();
    ClosedForms { mass: mu, kinetic: eps * eps * mu, lp_power }
}

/// One row of the small-ε energy table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticRow {
    pub eps: f64,
    pub energy: f64,
    pub kinetic: f64,
    /// `∫|u_ε|^p`
    pub potential: f64,
}

/// Tail tolerance used when sizing grids for the asymptotic probe.
pub const PROBE_TRUNCATION_TOL: f64 = 1e-8;

/// Discrete energies of `u_ε` for each `ε` in `eps_list`, each on a grid of
/// mesh `mesh` just large enough for the exponential tail.
pub fn energy_asymptotic_probe(p: f64, mu: f64, eps_list: &[f64], mesh: usize) -> Result<Vec<AsymptoticRow>> {
    crate::functionals::check_energy_exponent(p)?;
    eps_list
        .iter()
        .map(|&eps| {
            if !(eps > 0.0 && eps <= 0.5) {
                return Err(Error::InvalidParameter(format!("probe eps must lie in (0, 0.5], got {eps}")));
            }
            let params = ExpFamilyParams::new(eps, mu)?;
            let graph = build_grid(GridSpec::new(half_width_for(eps, PROBE_TRUNCATION_TOL), mesh)?)?;
            let u = u_eps(&graph, params, None)?;
            let b = energy_unchecked(&u, p);
            Ok(AsymptoticRow { eps, energy: b.energy, kinetic: b.kinetic, potential: b.potential_p })
        })
        .collect()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Critical mass of the real line, `π√3/2`.
pub const MU_R: f64 = PI * 1.732_050_807_568_877_2 / 2.0;
/// Sharp `p = 6` Gagliardo–Nirenberg constant of the real line, `4/π²`.
pub const K_R: f64 = 4.0 / (PI * PI);

/// `(μ_ℝ, K_ℝ)`.
pub fn soliton_constants() -> (f64, f64) {
    (MU_R, K_R)
}

const SOLITON_RATE: f64 = 1.154_700_538_379_251_5; // 2/√3

/// `φ(x) = sech(2x/√3)^{1/2}`.
pub fn soliton(x: f64) -> f64 {
    // sech(y)^{1/2} = (2 e^{−|y|} / (1 + e^{−2|y|}))^{1/2}, stable for large |y|
    let y = (SOLITON_RATE * x).abs();
    let e = (-y).exp();
    (2.0 * e / (1.0 + e * e)).sqrt()
}

/// `φ'(x) = −(1/√3) sech(2x/√3)^{1/2} tanh(2x/√3)`.
pub fn soliton_derivative(x: f64) -> f64 {
    let y = SOLITON_RATE * x;
    -0.5 * SOLITON_RATE * soliton(x) * y.tanh()
}

/// Samples of the mass-preserving rescaling `φ_λ(x) = √λ φ(λx)`.
pub fn soliton_profile(lambda: f64, xs: &[f64]) -> Result<Vec<f64>> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
    }
    Ok(xs.iter().map(|&x| lambda.sqrt() * soliton(lambda * x)).collect())
}

/// `n` equally spaced nodes on `[lo, hi]`.
pub fn uniform_nodes(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let dx = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| lo + i as f64 * dx).collect()
}

/// Composite trapezoid rule on equally spaced samples.
pub fn trapezoid(samples: &[f64], dx: f64) -> f64 {
    let n = samples.len();
    if n < 2 {
        return 0.0;
    }
    let inner: f64 = samples[1..n - 1].iter().sum();
    dx * (inner + 0.5 * (samples[0] + samples[n - 1]))
}

/// `Q_6(φ_λ)` on the real line by trapezoid quadrature on `[−half, half]`.
pub fn soliton_quotient6(lambda: f64, half: f64, n: usize) -> f64 {
    let xs = uniform_nodes(-half, half, n);
    let dx = xs[1] - xs[0];
    let f: Vec<f64> = xs.iter().map(|&x| lambda.sqrt() * soliton(lambda * x)).collect();
    let df: Vec<f64> = xs.iter().map(|&x| lambda.powf(1.5) * soliton_derivative(lambda * x)).collect();
    let mass = trapezoid(&f.iter().map(|v| v * v).collect::<Vec<_>>(), dx);
    let l6 = trapezoid(&f.iter().map(|v| v.powi(6)).collect::<Vec<_>>(), dx);
    let kin = trapezoid(&df.iter().map(|v| v * v).collect::<Vec<_>>(), dx);
    l6 / (mass * mass * kin)
}

/// Amplitude floor (relative to the peak) below which the squeezed soliton is cut to 0.
pub const DEFAULT_SOLITON_FLOOR: f64 = 1e-10;

/// Squeezes the soliton into one edge by `w(x) ↦ w(x/ε²)/ε`, centred at the
/// edge midpoint, clips values below `floor · peak` to 0 and rescales to mass `μ_ℝ`.
pub fn compact_edge_soliton(graph: &Arc<GridGraph>, eps_scale: f64, edge: usize, floor: f64) -> Result<GraphFunction> {
    if !(eps_scale > 0.0) {
        return Err(Error::InvalidParameter(format!("eps_scale must be positive, got {eps_scale}")));
    }
    let squeeze = eps_scale * eps_scale;
    // value at the edge endpoints relative to the peak φ(0) = 1
    let end_ratio = soliton(0.5 / squeeze);
    if end_ratio >= floor {
        return Err(Error::InvalidParameter(format!(
            "eps_scale = {eps_scale} too large: endpoint amplitude {end_ratio:.3e} of peak is above the floor {floor:.1e}"
        )));
    }
    let m = graph.mesh();
    let profile: Vec<f64> = (0..=m)
        .map(|i| {
            let x = i as f64 / m as f64 - 0.5;
            let v = soliton(x / squeeze);
            if v < floor {
                0.0
            } else {
                v / eps_scale
            }
        })
        .collect();
    let u = embed_edge_function(graph, edge, &profile)?;
    let mass = u.mass();
    if mass == 0.0 {
        return Err(Error::Degenerate("squeezed soliton is not resolved by the mesh".into()));
    }
    Ok(u.scaled((MU_R / mass).sqrt()))
}
