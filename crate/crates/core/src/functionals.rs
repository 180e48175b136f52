//! NLS energy, its gradient, the Gagliardo–Nirenberg quotient and the
//! family of grid inequalities as checkable predicates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::GraphFunction;
use crate::operators::stiffness_apply;
use crate::segment;

/// Constant of the two-dimensional Gagliardo–Nirenberg inequality.
pub const GN2D_CONSTANT: f64 = 1.5;
/// Constant used for the interdimensional family; the larger of the two
/// endpoint constants (1 and 3/2).
pub const INTERDIMENSIONAL_CONSTANT: f64 = 1.5;
/// Sharp constant of the critical inequality at `p = 6` (equal to the real-line one).
pub const K6: f64 = 4.0 / (std::f64::consts::PI * std::f64::consts::PI);

/// Mass, kinetic and potential parts of the energy of one function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub mass: f64,
    pub kinetic: f64,
    pub potential_p: f64,
    pub p: f64,
    pub energy: f64,
}

impl EnergyBreakdown {
    fn from_parts(mass: f64, kinetic: f64, potential_p: f64, p: f64) -> Self {
        EnergyBreakdown { mass, kinetic, potential_p, p, energy: 0.5 * kinetic - potential_p / p }
    }
}

pub(crate) fn check_energy_exponent(p: f64) -> Result<()> {
    if !(p > 2.0 && p <= 6.0) {
        let why = if p > 6.0 { " (the energy is unbounded below for every mass when p > 6)" } else { "" };
        return Err(Error::InvalidParameter(format!("energy exponent must lie in (2, 6], got {p}{why}")));
    }
    Ok(())
}

/// `E_p(u) = ½∫|u'|² − (1/p)∫|u|^p` with its parts.
pub fn energy(u: &GraphFunction, p: f64) -> Result<EnergyBreakdown> {
    check_energy_exponent(p)?;
    Ok(energy_unchecked(u, p))
}

pub(crate) fn energy_unchecked(u: &GraphFunction, p: f64) -> EnergyBreakdown {
    let g = u.graph();
    let h = g.step();
    let (mut mass, mut kin, mut pot) = (0.0, 0.0, 0.0);
    g.for_each_segment(u.values(), |_, _, a, b| {
        mass += segment::mass(a, b, h);
        kin += segment::kinetic(a, b, h);
        pot += segment::power(a, b, h, p);
    });
    EnergyBreakdown::from_parts(mass, kin, pot, p)
}

/// Coordinate gradient of `∫|u|^p` with respect to the nodal values.
pub(crate) fn potential_coordinate_gradient(u: &GraphFunction, p: f64) -> Vec<f64> {
    let g = u.graph();
    let h = g.step();
    let mut out = vec![0.0; g.dof_count()];
    g.accumulate_segments(u.values(), &mut out, |a, b| {
        let (ga, gb) = segment::mean_abs_pow_grad(a, b, p);
        (h * ga, h * gb)
    });
    out
}

/// Coordinate gradient `∂E/∂u_i` of the energy.
pub(crate) fn energy_coordinate_gradient(u: &GraphFunction, p: f64) -> Vec<f64> {
    let mut grad = stiffness_apply(u.graph(), u.values());
    let pot = potential_coordinate_gradient(u, p);
    for (g, q) in grad.iter_mut().zip(&pot) {
        *g -= q / p;
    }
    grad
}

fn to_weighted(u: &GraphFunction, coord: Vec<f64>) -> GraphFunction {
    let w = u.graph().lumped_weights();
    let values = coord.iter().zip(&w).map(|(c, w)| c / w).collect();
    u.with_values(values).expect("gradient values are finite")
}

/// Discrete inner product `Σ w_i f_i g_i` with lumped quadrature weights.
pub fn inner_product(f: &GraphFunction, g: &GraphFunction) -> f64 {
    let w = f.graph().lumped_weights();
    f.values().iter().zip(g.values()).zip(&w).map(|((a, b), w)| w * a * b).sum()
}

/// Gradient of the energy with respect to [`inner_product`]: the returned `g`
/// satisfies `E(u + t v) = E(u) + t⟨g, v⟩ + O(t²)`.
pub fn energy_gradient(u: &GraphFunction, p: f64) -> Result<GraphFunction> {
    check_energy_exponent(p)?;
    Ok(to_weighted(u, energy_coordinate_gradient(u, p)))
}

/// Gradient of `½∫|u'|²` with respect to [`inner_product`].
pub fn kinetic_gradient(u: &GraphFunction) -> GraphFunction {
    to_weighted(u, stiffness_apply(u.graph(), u.values()))
}

/// Value of `Q_p(u) = ‖u‖_p^p / (‖u‖_2^{p−2} ‖u'‖_2²)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuotientValue {
    pub p: f64,
    pub value: f64,
}

pub(crate) fn check_quotient_exponent(p: f64) -> Result<()> {
    if !(4.0..=6.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("quotient exponent must lie in [4, 6], got {p}")));
    }
    Ok(())
}

pub(crate) fn quotient_from_parts(mass: f64, kinetic: f64, lp_power: f64, p: f64) -> f64 {
    lp_power / (mass.powf(0.5 * (p - 2.0)) * kinetic)
}

/// Gagliardo–Nirenberg quotient. Rejects `u ≡ 0` and `u' ≡ 0`.
pub fn gn_quotient(u: &GraphFunction, p: f64) -> Result<QuotientValue> {
    check_quotient_exponent(p)?;
    let b = energy_unchecked(u, p);
    if b.mass == 0.0 {
        return Err(Error::Degenerate("quotient undefined for u ≡ 0".into()));
    }
    if b.kinetic == 0.0 {
        return Err(Error::Degenerate("quotient undefined for u' ≡ 0".into()));
    }
    Ok(QuotientValue { p, value: quotient_from_parts(b.mass, b.kinetic, b.potential_p, p) })
}

/// The inequalities that can be checked on a function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Inequality {
    /// `‖u‖_p ≤ ‖u‖_2^{1/2+1/p} ‖u'‖_2^{1/2−1/p}`
    Gn1d { p: f64 },
    /// `‖u‖_∞ ≤ ‖u‖_2^{1/2} ‖u'‖_2^{1/2}`
    GnInfty,
    /// `‖u‖_2 ≤ ½ ‖u'‖_1`
    Sobolev2d,
    /// `‖u‖_p ≤ (3/2) ‖u‖_2^{2/p} ‖u'‖_2^{1−2/p}`
    Gn2d { p: f64 },
    /// `‖u‖_p ≤ C ‖u‖_2^{1−α} ‖u'‖_2^α` for `α ∈ [(p−2)/(2p), (p−2)/p]`
    Interdimensional { p: f64, alpha: f64 },
    /// `‖u‖_p^p ≤ K_p ‖u‖_2^{p−2} ‖u'‖_2²` for `p ∈ [4, 6]`
    GnCritical { p: f64 },
}

impl Inequality {
    pub fn name(&self) -> &'static str {
        match self {
            Inequality::Gn1d { .. } => "GN1D",
            Inequality::GnInfty => "GNInfty",
            Inequality::Sobolev2d => "Sobolev2D",
            Inequality::Gn2d { .. } => "GN2D",
            Inequality::Interdimensional { .. } => "Interdimensional",
            Inequality::GnCritical { .. } => "GNCritical",
        }
    }

    pub fn p(&self) -> Option<f64> {
        match *self {
            Inequality::Gn1d { p } | Inequality::Gn2d { p } | Inequality::GnCritical { p } => Some(p),
            Inequality::Interdimensional { p, .. } => Some(p),
            _ => None,
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match *self {
            Inequality::Interdimensional { alpha, .. } => Some(alpha),
            _ => None,
        }
    }
}

/// Admissible interval of the interdimensional exponent.
pub fn alpha_range(p: f64) -> (f64, f64) {
    ((p - 2.0) / (2.0 * p), (p - 2.0) / p)
}

/// Constant used in the critical inequality: exact at `p = 6`, otherwise
/// `(3/2)^p`, which follows from the interdimensional bound at `α = 2/p`.
pub fn critical_constant(p: f64) -> f64 {
    if p == 6.0 {
        K6
    } else {
        INTERDIMENSIONAL_CONSTANT.powf(p)
    }
}

/// Outcome of one inequality check; `slack < 0` marks a violation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub inequality: Inequality,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    /// Multiplicative constant on the right-hand side.
    pub constant: f64,
}

impl InequalityReport {
    pub fn name(&self) -> &'static str {
        self.inequality.name()
    }

    pub fn holds(&self) -> bool {
        self.slack >= 0.0
    }
}

fn check_p(p: f64, lo: f64) -> Result<()> {
    if !(p >= lo) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!("exponent must be finite and >= {lo}, got {p}")));
    }
    Ok(())
}

/// Evaluates both sides of `inequality` on `u`.
pub fn check_inequality(u: &GraphFunction, inequality: Inequality) -> Result<InequalityReport> {
    if u.is_zero() {
        return Err(Error::Degenerate("inequality check needs u ≢ 0".into()));
    }
    let l2 = u.mass().sqrt();
    let grad2 = u.kinetic().sqrt();
    let (lhs, rhs, constant) = match inequality {
        Inequality::Gn1d { p } => {
            check_p(p, 2.0)?;
            let lhs = u.norm_lp(p)?;
            (lhs, l2.powf(0.5 + 1.0 / p) * grad2.powf(0.5 - 1.0 / p), 1.0)
        }
        Inequality::GnInfty => (u.norm_linf(), (l2 * grad2).sqrt(), 1.0),
        Inequality::Sobolev2d => (l2, 0.5 * u.grad_l1(), 0.5),
        Inequality::Gn2d { p } => {
            check_p(p, 2.0)?;
            let c = GN2D_CONSTANT;
            (u.norm_lp(p)?, c * l2.powf(2.0 / p) * grad2.powf(1.0 - 2.0 / p), c)
        }
        Inequality::Interdimensional { p, alpha } => {
            check_p(p, 2.0)?;
            let (lo, hi) = alpha_range(p);
            if !(alpha >= lo && alpha <= hi) {
                return Err(Error::InvalidParameter(format!(
                    "alpha = {alpha} outside the admissible interval [{lo}, {hi}] for p = {p}"
                )));
            }
            let c = INTERDIMENSIONAL_CONSTANT;
            (u.norm_lp(p)?, c * l2.powf(1.0 - alpha) * grad2.powf(alpha), c)
        }
        Inequality::GnCritical { p } => {
            check_quotient_exponent(p)?;
            let k = critical_constant(p);
            (u.lp_power(p), k * l2.powf(p - 2.0) * grad2 * grad2, k)
        }
    };
    Ok(InequalityReport { inequality, lhs, rhs, slack: rhs - lhs, constant })
}

/// The standard battery: every inequality at `p ∈ {4, 5, 6}`, with
/// `alpha_steps` equally spaced interdimensional exponents.
pub fn inequality_battery(alpha_steps: usize) -> Vec<Inequality> {
    let mut out = vec![Inequality::GnInfty, Inequality::Sobolev2d];
    for p in [4.0, 5.0, 6.0] {
        out.push(Inequality::Gn1d { p });
        out.push(Inequality::Gn2d { p });
        let (lo, hi) = alpha_range(p);
        for i in 0..alpha_steps {
            let t = if alpha_steps == 1 { 0.0 } else { i as f64 / (alpha_steps - 1) as f64 };
            let alpha = if i + 1 == alpha_steps { hi } else { lo + t * (hi - lo) };
            out.push(Inequality::Interdimensional { p, alpha });
        }
        out.push(Inequality::GnCritical { p });
    }
    out
}

/// Energy computed two ways, plus the lower bound when a constant is supplied.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyIdentity {
    /// `½‖u'‖² − (1/p)‖u‖_p^p`
    pub direct: f64,
    /// `½‖u'‖² (1 − (2/p) Q_p(u) μ^{(p−2)/2})`
    pub via_quotient: f64,
    /// `½‖u'‖² (1 − (μ/μ_p)^{(p−2)/2})` with `μ_p = (p / (2K))^{2/(p−2)}`.
    pub lower_bound: Option<f64>,
}

/// Relative mass tolerance accepted by [`energy_identity_check`].
pub const IDENTITY_MASS_TOL: f64 = 1e-8;

/// Evaluates the energy directly and through the quotient identity for a
/// function of mass `mu`. With `k_p`, also evaluates the lower bound.
pub fn energy_identity_check(u: &GraphFunction, p: f64, mu: f64, k_p: Option<f64>) -> Result<EnergyIdentity> {
    check_energy_exponent(p)?;
    let b = energy_unchecked(u, p);
    if (b.mass - mu).abs() > IDENTITY_MASS_TOL * mu.max(1e-300) {
        return Err(Error::MassMismatch { expected: mu, got: b.mass });
    }
    if b.kinetic == 0.0 {
        return Err(Error::Degenerate("identity needs u' ≢ 0".into()));
    }
    let q = quotient_from_parts(b.mass, b.kinetic, b.potential_p, p);
    let via_quotient = 0.5 * b.kinetic * (1.0 - 2.0 / p * q * mu.powf(0.5 * (p - 2.0)));
    let lower_bound = k_p.map(|k| {
        let mu_p = critical_mass_from_constant(p, k);
        0.5 * b.kinetic * (1.0 - (mu / mu_p).powf(0.5 * (p - 2.0)))
    });
    Ok(EnergyIdentity { direct: b.energy, via_quotient, lower_bound })
}

/// `μ_p = (p / (2 K_p))^{2/(p−2)}`.
pub fn critical_mass_from_constant(p: f64, k_p: f64) -> f64 {
    (p / (2.0 * k_p)).powf(2.0 / (p - 2.0))
}
