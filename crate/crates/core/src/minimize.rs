//! Mass-constrained energy minimization, maximization of the
//! Gagliardo–Nirenberg quotient and critical-mass estimation.
//!
//! Both optimizations run the same Riemannian descent on the mass sphere
//! `{u : ∫|u|² = μ}`. Gradients are taken in the `H¹`-type metric
//! `⟨v, w⟩ = vᵀ(K + σM)w`, which keeps the step size independent of the
//! mesh, and iterates are retracted onto the sphere by rescaling. Steps are
//! accepted by Armijo backtracking, so the objective never increases.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{
    check_energy_exponent, check_quotient_exponent, critical_mass_from_constant, energy_coordinate_gradient,
    energy_unchecked, potential_coordinate_gradient, quotient_from_parts,
};
use crate::graph::{central_edge, GraphFunction, GridGraph};
use crate::operators::{dot, mass_apply, stiffness_apply, ShiftedLaplacian};
use crate::sampling::{random_function, SampleKind};
use crate::testfuncs::{compact_edge_soliton, u_eps, ExpFamilyParams, DEFAULT_SOLITON_FLOOR};

/// Starting point of a descent.
#[derive(Clone, Debug, PartialEq)]
pub enum Init {
    /// `u_ε` centred at the origin vertex.
    ExpFamily { eps: f64 },
    /// Squeezed soliton on the central edge.
    EdgeSoliton { eps_scale: f64 },
    Provided(GraphFunction),
}

impl Init {
    /// Short label used in result records, e.g. `exp:0.5`.
    pub fn label(&self) -> String {
        match self {
            Init::ExpFamily { eps } => format!("exp:{eps}"),
            Init::EdgeSoliton { eps_scale } => format!("soliton:{eps_scale}"),
            Init::Provided(_) => "provided".to_string(),
        }
    }

    /// Parses the labels produced by [`label`](Self::label) (except `provided`).
    pub fn parse(s: &str) -> Result<Self> {
        let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
        let value = |default: f64| -> Result<f64> {
            if arg.is_empty() {
                Ok(default)
            } else {
                arg.parse().map_err(|_| Error::InvalidParameter(format!("bad init parameter in {s:?}")))
            }
        };
        match kind {
            "exp" => Ok(Init::ExpFamily { eps: value(0.5)? }),
            "soliton" => Ok(Init::EdgeSoliton { eps_scale: value(0.2)? }),
            _ => Err(Error::InvalidParameter(format!("unknown init {s:?}; expected exp[:eps] or soliton[:scale]"))),
        }
    }

    fn build(&self, graph: &Arc<GridGraph>) -> Result<GraphFunction> {
        match self {
            Init::ExpFamily { eps } => u_eps(graph, ExpFamilyParams::new(*eps, 1.0)?, None),
            Init::EdgeSoliton { eps_scale } => {
                compact_edge_soliton(graph, *eps_scale, central_edge(graph), DEFAULT_SOLITON_FLOOR)
            }
            Init::Provided(u) => {
                if u.graph().spec() != graph.spec() {
                    return Err(Error::InvalidParameter("provided start lives on a different grid".into()));
                }
                Ok(u.clone())
            }
        }
    }
}

/// Settings of [`minimize_energy`].
#[derive(Clone, Debug, PartialEq)]
pub struct MinimizeConfig {
    pub p: f64,
    pub mu: f64,
    pub max_iters: usize,
    /// Stationarity tolerance on the projected gradient norm.
    pub grad_tol: f64,
    /// First trial step of the line search.
    pub step0: f64,
    /// Step reduction factor of the backtracking search.
    pub backtrack: f64,
    /// Shift `σ` of the metric `K + σM` (initial value when adaptive).
    pub shift: f64,
    /// Retune `σ` to the current Lagrange multiplier every few iterations.
    pub adaptive_shift: bool,
    /// Polak–Ribière conjugate directions instead of plain gradient steps.
    pub conjugate: bool,
    pub init: Init,
    /// Largest admissible share of the mass held by one node cell.
    pub concentration_threshold: f64,
    /// Relative amplitude of a seeded random perturbation of the start.
    pub perturbation: f64,
    pub seed: u64,
}

impl MinimizeConfig {
    pub fn new(p: f64, mu: f64) -> Self {
        MinimizeConfig {
            p,
            mu,
            max_iters: 5000,
            grad_tol: 1e-6,
            step0: 1.0,
            backtrack: 0.5,
            shift: 1.0,
            adaptive_shift: true,
            conjugate: true,
            init: Init::ExpFamily { eps: 0.5 },
            concentration_threshold: 0.5,
            perturbation: 0.0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_energy_exponent(self.p)?;
        let positive = [
            ("mass", self.mu),
            ("grad_tol", self.grad_tol),
            ("step0", self.step0),
            ("shift", self.shift),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return Err(Error::InvalidParameter(format!("backtrack must lie in (0, 1), got {}", self.backtrack)));
        }
        if !(self.concentration_threshold > 0.0 && self.concentration_threshold < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "concentration_threshold must lie in (0, 1), got {}",
                self.concentration_threshold
            )));
        }
        if !(self.perturbation >= 0.0) {
            return Err(Error::InvalidParameter("perturbation must be nonnegative".into()));
        }
        Ok(())
    }
}

/// How a minimization ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    /// Stationary point with negative energy.
    Converged,
    /// Stationary point with energy `≥ −grad_tol`: the iterates spread out
    /// and the infimum is zero (not attained).
    NonNegativeInfimum,
    /// One node cell holds more than the threshold share of the mass: the
    /// discrete trace of an energy unbounded below.
    ConcentrationDetected,
    MaxItersReached,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Converged => "Converged",
            Status::NonNegativeInfimum => "NonNegativeInfimum",
            Status::ConcentrationDetected => "ConcentrationDetected",
            Status::MaxItersReached => "MaxItersReached",
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Status {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Converged" => Ok(Status::Converged),
            "NonNegativeInfimum" => Ok(Status::NonNegativeInfimum),
            "ConcentrationDetected" => Ok(Status::ConcentrationDetected),
            "MaxItersReached" => Ok(Status::MaxItersReached),
            _ => Err(Error::InvalidParameter(format!("unknown status {s:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct MinimizeResult {
    pub state: GraphFunction,
    pub energy: f64,
    pub status: Status,
    pub iterations: usize,
    /// Norm of the projected gradient at the final state.
    pub grad_norm: f64,
    /// Energy after every accepted step, starting with the initial state.
    pub history: Vec<f64>,
    /// Largest share of the mass held by one node cell.
    pub max_cell_fraction: f64,
}

/// Share of the (lumped) mass carried by the heaviest node cell.
pub fn max_cell_fraction(u: &GraphFunction) -> f64 {
    let w = u.graph().lumped_weights();
    let cells: Vec<f64> = u.values().iter().zip(&w).map(|(v, w)| w * v * v).collect();
    let total: f64 = cells.iter().sum();
    if total == 0.0 {
        return 0.0;
    }
    cells.iter().fold(0.0_f64, |a, &c| a.max(c)) / total
}

trait Objective {
    fn value(&self, u: &GraphFunction) -> f64;
    fn coordinate_gradient(&self, u: &GraphFunction) -> Vec<f64>;
    /// Metric shift `σ` matched to the curvature at `u`, given the gradient `e`.
    fn shift_hint(&self, u: &GraphFunction, e: &[f64]) -> f64;
}

struct Energy {
    p: f64,
}

impl Objective for Energy {
    fn value(&self, u: &GraphFunction) -> f64 {
        energy_unchecked(u, self.p).energy
    }

    fn coordinate_gradient(&self, u: &GraphFunction) -> Vec<f64> {
        energy_coordinate_gradient(u, self.p)
    }

    fn shift_hint(&self, u: &GraphFunction, e: &[f64]) -> f64 {
        // the Hessian on the sphere is roughly K − ωM with multiplier
        // ω = eᵀu / μ; the kinetic scale keeps σ away from 0 for spread states
        let omega = dot(e, u.values()) / u.mass();
        (-omega).max(0.0) + u.kinetic() / u.mass()
    }
}

/// `−ln Q_p`, scale invariant.
struct NegLogQuotient {
    p: f64,
}

impl Objective for NegLogQuotient {
    fn value(&self, u: &GraphFunction) -> f64 {
        let b = energy_unchecked(u, self.p);
        if b.kinetic == 0.0 || b.potential_p == 0.0 {
            return f64::INFINITY;
        }
        -quotient_from_parts(b.mass, b.kinetic, b.potential_p, self.p).ln()
    }

    fn coordinate_gradient(&self, u: &GraphFunction) -> Vec<f64> {
        let g = u.graph();
        let b = energy_unchecked(u, self.p);
        let ku = stiffness_apply(g, u.values());
        let mu = mass_apply(g, u.values());
        let pot = potential_coordinate_gradient(u, self.p);
        let (cm, ck, cp) = ((self.p - 2.0) / b.mass, 2.0 / b.kinetic, 1.0 / b.potential_p);
        (0..g.dof_count()).map(|i| cm * mu[i] + ck * ku[i] - cp * pot[i]).collect()
    }

    fn shift_hint(&self, u: &GraphFunction, _e: &[f64]) -> f64 {
        // natural length scale of u
        u.kinetic() / u.mass()
    }
}

struct DescentOptions {
    max_iters: usize,
    grad_tol: f64,
    step0: f64,
    backtrack: f64,
    shift: f64,
    adaptive_shift: bool,
    conjugate: bool,
}

/// Bounds and cadence of the adaptive metric shift.
const SHIFT_MIN: f64 = 1e-2;
const SHIFT_MAX: f64 = 1e4;
const SHIFT_EVERY: usize = 25;

struct Trace {
    state: GraphFunction,
    value: f64,
    iterations: usize,
    grad_norm: f64,
    history: Vec<f64>,
    converged: bool,
}

fn retract(u: &GraphFunction, mass: f64) -> Result<GraphFunction> {
    let m = u.mass();
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::Degenerate("iterate collapsed to zero".into()));
    }
    Ok(u.scaled((mass / m).sqrt()))
}

const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-14;

fn descend<O: Objective>(start: &GraphFunction, mass: f64, obj: &O, opts: &DescentOptions) -> Result<Trace> {
    let graph = start.graph().clone();
    let mut solver = ShiftedLaplacian::new(graph.clone(), opts.shift)?;
    let weights = graph.lumped_weights();
    let mut u = retract(start, mass)?;
    let mut f = obj.value(&u);
    let mut history = vec![f];
    let mut step = opts.step0;
    // previous direction, gradient and preconditioned tangent gradient
    let mut prev: Option<(Vec<f64>, Vec<f64>, Vec<f64>)> = None;
    let mut grad_norm = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < opts.max_iters {
        let e = obj.coordinate_gradient(&u);
        let mu = mass_apply(&graph, u.values());
        if opts.adaptive_shift && iterations % SHIFT_EVERY == 0 {
            let target = obj.shift_hint(&u, &e).clamp(SHIFT_MIN, SHIFT_MAX);
            let ratio = target / solver.sigma();
            if !(0.5..=2.0).contains(&ratio) {
                solver = ShiftedLaplacian::new(graph.clone(), target)?;
                prev = None;
            }
        }
        let g = solver.solve(&e);
        let n = solver.solve(&mu);
        let mun = dot(&mu, &n);
        let lam = dot(&mu, &g) / mun;
        let gt: Vec<f64> = g.iter().zip(&n).map(|(a, b)| a - lam * b).collect();
        // stationarity in the lumped L² metric, independent of σ
        let omega = dot(&e, u.values()) / mass;
        grad_norm = e.iter().zip(&mu).zip(&weights).map(|((a, b), w)| (a - omega * b).powi(2) / w).sum::<f64>().sqrt();
        if grad_norm < opts.grad_tol {
            converged = true;
            break;
        }

        let mut dir: Vec<f64> = gt.iter().map(|v| -v).collect();
        if opts.conjugate {
            if let Some((d_old, e_old, gt_old)) = &prev {
                let num: f64 = e.iter().zip(&gt).zip(gt_old).map(|((ei, a), b)| ei * (a - b)).sum();
                let beta = (num / dot(e_old, gt_old)).max(0.0);
                if beta > 0.0 && beta.is_finite() {
                    // carry the old direction into the new tangent space
                    let c = dot(&mu, d_old) / mun;
                    for i in 0..dir.len() {
                        dir[i] += beta * (d_old[i] - c * n[i]);
                    }
                }
            }
        }
        let mut slope = dot(&e, &dir);
        if !(slope < 0.0) {
            dir = gt.iter().map(|v| -v).collect();
            slope = -dot(&e, &gt);
        }
        if !(slope < 0.0) {
            // no descent direction left at working precision
            break;
        }

        let mut tau = step;
        let accepted = loop {
            let trial: Vec<f64> = u.values().iter().zip(&dir).map(|(a, d)| a + tau * d).collect();
            let cand = retract(&u.with_values(trial)?, mass)?;
            let fc = obj.value(&cand);
            if fc < f && fc <= f + ARMIJO * tau * slope {
                break Some((cand, fc));
            }
            tau *= opts.backtrack;
            if tau < MIN_STEP * opts.step0 {
                break None;
            }
        };
        iterations += 1;
        let Some((cand, fc)) = accepted else {
            // no decrease possible at working precision
            break;
        };
        u = cand;
        f = fc;
        history.push(f);
        step = (2.0 * tau).min(1e6 * opts.step0);
        prev = Some((dir, e, gt));
    }

    Ok(Trace { state: u, value: f, iterations, grad_norm, history, converged })
}

fn perturbed_start(graph: &Arc<GridGraph>, cfg: &MinimizeConfig) -> Result<GraphFunction> {
    let mut u = cfg.init.build(graph)?;
    if cfg.perturbation > 0.0 {
        let amp = cfg.perturbation * u.norm_linf();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        u.values_mut().iter_mut().for_each(|v| *v += amp * rng.random_range(-1.0..1.0));
    }
    if u.is_zero() {
        return Err(Error::Degenerate("initial state is identically zero".into()));
    }
    Ok(u)
}

/// Minimizes the energy over functions of mass `cfg.mu` on `graph`.
pub fn minimize_energy(graph: &Arc<GridGraph>, cfg: &MinimizeConfig) -> Result<MinimizeResult> {
    cfg.validate()?;
    let start = perturbed_start(graph, cfg)?;
    let opts = DescentOptions {
        max_iters: cfg.max_iters,
        grad_tol: cfg.grad_tol,
        step0: cfg.step0,
        backtrack: cfg.backtrack,
        shift: cfg.shift,
        adaptive_shift: cfg.adaptive_shift,
        conjugate: cfg.conjugate,
    };
    let trace = descend(&start, cfg.mu, &Energy { p: cfg.p }, &opts)?;
    let fraction = max_cell_fraction(&trace.state);
    let status = if fraction > cfg.concentration_threshold {
        Status::ConcentrationDetected
    } else if trace.converged && trace.value >= -cfg.grad_tol {
        Status::NonNegativeInfimum
    } else if trace.converged {
        Status::Converged
    } else {
        Status::MaxItersReached
    };
    Ok(MinimizeResult {
        state: trace.state,
        energy: trace.value,
        status,
        iterations: trace.iterations,
        grad_norm: trace.grad_norm,
        history: trace.history,
        max_cell_fraction: fraction,
    })
}

/// Settings of [`maximize_quotient`].
#[derive(Clone, Debug, PartialEq)]
pub struct QuotientConfig {
    pub max_iters: usize,
    pub grad_tol: f64,
    pub shift: f64,
    /// Starting points; each runs an independent ascent.
    pub starts: Vec<Init>,
    /// Number of seeded random functions used to certify the estimate.
    pub samples: usize,
    /// Relative width of the reported bracket above the best value.
    pub safety: f64,
    /// Estimate of `K₄` for the non-degeneracy diagnostic; `(3/2)⁴` if absent.
    pub k4: Option<f64>,
    pub seed: u64,
}

impl Default for QuotientConfig {
    fn default() -> Self {
        QuotientConfig {
            max_iters: 3000,
            grad_tol: 1e-7,
            shift: 1.0,
            // vertex-centred starts keep their 4-fold symmetry; edge starts break it
            starts: vec![
                Init::ExpFamily { eps: 0.5 },
                Init::ExpFamily { eps: 2.0 },
                Init::EdgeSoliton { eps_scale: 0.1 },
            ],
            samples: 200,
            safety: 1e-3,
            k4: None,
            seed: 0,
        }
    }
}

/// How a [`ConstantEstimate`] was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EstimateMethod {
    QuotientAscent,
    EnergyBisection,
    Formula,
}

/// The two upper bounds on `Q_p` evaluated at the maximizer rescaled to mass `μ_p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuotientDiagnostics {
    /// `μ_p^{(6−p)/4} / ‖u'‖₂^{(6−p)/2}`
    pub compactness_bound: f64,
    /// `‖u‖_∞^{p−4} K₄ / μ_p^{(p−4)/2}`
    pub nondegeneracy_bound: f64,
    pub kinetic: f64,
    pub sup_norm: f64,
    pub k4: f64,
    /// Best value reached by ascent, before certification.
    pub ascent_best: f64,
    /// Largest quotient among the random certification samples.
    pub sample_best: f64,
}

/// Estimated `K_p` or `μ_p`, with a bracket `lo ≤ value ≤ hi`.
#[derive(Clone, Debug)]
pub struct ConstantEstimate {
    pub p: f64,
    pub value: f64,
    pub bracket: (f64, f64),
    pub method: EstimateMethod,
    pub diagnostics: Option<QuotientDiagnostics>,
    /// Maximizing function (quotient ascent) or the negative-energy state
    /// found at the upper end of the bracket (bisection).
    pub witness: Option<GraphFunction>,
}

/// Estimates `K_p = sup Q_p` on `graph` by multi-start ascent on `ln Q_p`.
pub fn maximize_quotient(graph: &Arc<GridGraph>, p: f64, cfg: &QuotientConfig) -> Result<ConstantEstimate> {
    check_quotient_exponent(p)?;
    if cfg.starts.is_empty() {
        return Err(Error::InvalidParameter("quotient ascent needs at least one start".into()));
    }
    if !(cfg.safety >= 0.0) {
        return Err(Error::InvalidParameter("safety must be nonnegative".into()));
    }
    let opts = DescentOptions {
        max_iters: cfg.max_iters,
        grad_tol: cfg.grad_tol,
        step0: 1.0,
        backtrack: 0.5,
        shift: cfg.shift,
        adaptive_shift: true,
        conjugate: true,
    };
    let obj = NegLogQuotient { p };
    let mut best: Option<(f64, GraphFunction)> = None;
    for init in &cfg.starts {
        // unresolvable starts (e.g. a soliton too wide for the grid) are skipped
        let Ok(start) = init.build(graph) else { continue };
        let trace = descend(&start, 1.0, &obj, &opts)?;
        let q = (-trace.value).exp();
        if best.as_ref().is_none_or(|(b, _)| q > *b) {
            best = Some((q, trace.state));
        }
    }
    let (ascent_best, state) = best.ok_or_else(|| Error::InvalidParameter("no usable start for quotient ascent".into()))?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut sample_best = 0.0_f64;
    for _ in 0..cfg.samples {
        let u = random_function(graph, &mut rng, SampleKind::MixedSign);
        let b = energy_unchecked(&u, p);
        if b.kinetic > 0.0 {
            sample_best = sample_best.max(quotient_from_parts(b.mass, b.kinetic, b.potential_p, p));
        }
    }
    let value = ascent_best.max(sample_best);

    let k4 = cfg.k4.unwrap_or(1.5_f64.powi(4));
    let mu_p = critical_mass_from_constant(p, value);
    let at_mu_p = retract(&state, mu_p)?;
    let kinetic = at_mu_p.kinetic();
    let sup_norm = at_mu_p.norm_linf();
    let diagnostics = QuotientDiagnostics {
        compactness_bound: mu_p.powf((6.0 - p) / 4.0) / kinetic.sqrt().powf((6.0 - p) / 2.0),
        nondegeneracy_bound: sup_norm.powf(p - 4.0) * k4 / mu_p.powf((p - 4.0) / 2.0),
        kinetic,
        sup_norm,
        k4,
        ascent_best,
        sample_best,
    };
    Ok(ConstantEstimate {
        p,
        value,
        bracket: (value, value * (1.0 + cfg.safety)),
        method: EstimateMethod::QuotientAscent,
        diagnostics: Some(diagnostics),
        witness: Some(state),
    })
}

/// Settings of the energy-sign bisection.
#[derive(Clone, Debug, PartialEq)]
pub struct BisectionConfig {
    pub lo: f64,
    pub hi: f64,
    /// Stop once `hi − lo` falls below this.
    pub width: f64,
    /// A mass counts as supercritical when some start reaches energy `< −energy_tol`.
    pub energy_tol: f64,
    /// Template for the probes; `p`, `mu` and `init` are overwritten.
    pub minimize: MinimizeConfig,
    pub starts: Vec<Init>,
}

impl BisectionConfig {
    pub fn new(p: f64, lo: f64, hi: f64) -> Self {
        BisectionConfig {
            lo,
            hi,
            width: 5e-3,
            energy_tol: 1e-6,
            // the energy sign settles long before full convergence
            minimize: MinimizeConfig { max_iters: 2000, ..MinimizeConfig::new(p, 1.0) },
            starts: vec![Init::EdgeSoliton { eps_scale: 0.1 }, Init::ExpFamily { eps: 0.5 }],
        }
    }
}

/// How [`estimate_critical_mass`] computes `μ_p`.
#[derive(Clone, Debug, PartialEq)]
pub enum CriticalMassMethod {
    /// `(p/(2K̂_p))^{2/(p−2)}` with `K̂_p` from [`maximize_quotient`].
    Formula(QuotientConfig),
    /// The same formula with a known constant.
    FormulaWithConstant(f64),
    EnergyBisection(BisectionConfig),
}

/// Lowest energy over the starts at mass `mu`, with the state reaching it.
/// Later starts are skipped once one of them is certifiably negative.
fn lowest_energy(graph: &Arc<GridGraph>, p: f64, mu: f64, cfg: &BisectionConfig) -> Result<(f64, GraphFunction)> {
    let mut best: Option<(f64, GraphFunction)> = None;
    for init in &cfg.starts {
        let run = MinimizeConfig { p, mu, init: init.clone(), ..cfg.minimize.clone() };
        let res = minimize_energy(graph, &run)?;
        if best.as_ref().is_none_or(|(e, _)| res.energy < *e) {
            best = Some((res.energy, res.state));
        }
        if res.energy < -cfg.energy_tol {
            break;
        }
    }
    best.ok_or_else(|| Error::InvalidParameter("bisection needs at least one start".into()))
}

/// Estimates the critical mass `μ_p` on `graph`.
pub fn estimate_critical_mass(graph: &Arc<GridGraph>, p: f64, method: &CriticalMassMethod) -> Result<ConstantEstimate> {
    if p < 4.0 {
        return Err(Error::InvalidParameter(format!(
            "no critical mass for p = {p} < 4: ground states exist for every mass"
        )));
    }
    check_quotient_exponent(p)?;
    match method {
        CriticalMassMethod::FormulaWithConstant(k) => {
            if !(*k > 0.0) {
                return Err(Error::InvalidParameter(format!("constant must be positive, got {k}")));
            }
            let mu = critical_mass_from_constant(p, *k);
            Ok(ConstantEstimate {
                p,
                value: mu,
                bracket: (mu, mu),
                method: EstimateMethod::Formula,
                diagnostics: None,
                witness: None,
            })
        }
        CriticalMassMethod::Formula(qcfg) => {
            let k = maximize_quotient(graph, p, qcfg)?;
            // μ_p decreases in K_p, so the K bracket maps to a reversed μ bracket
            let mu = critical_mass_from_constant(p, k.value);
            let lo = critical_mass_from_constant(p, k.bracket.1);
            Ok(ConstantEstimate {
                p,
                value: mu,
                bracket: (lo, mu),
                method: EstimateMethod::Formula,
                diagnostics: k.diagnostics,
                witness: k.witness,
            })
        }
        CriticalMassMethod::EnergyBisection(b) => {
            if p >= 6.0 {
                return Err(Error::InvalidParameter(
                    "energy bisection needs p < 6; the energy is unbounded below above the critical mass at p = 6"
                        .into(),
                ));
            }
            if !(b.lo > 0.0 && b.lo < b.hi && b.width > 0.0 && b.energy_tol >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "bad bisection settings: lo = {}, hi = {}, width = {}",
                    b.lo, b.hi, b.width
                )));
            }
            let (e_lo, _) = lowest_energy(graph, p, b.lo, b)?;
            let (e_hi, mut witness) = lowest_energy(graph, p, b.hi, b)?;
            if e_lo < -b.energy_tol || e_hi >= -b.energy_tol {
                return Err(Error::BadBracket { lo: b.lo, hi: b.hi });
            }
            let (mut lo, mut hi) = (b.lo, b.hi);
            while hi - lo > b.width {
                let mid = 0.5 * (lo + hi);
                let (e, state) = lowest_energy(graph, p, mid, b)?;
                if e < -b.energy_tol {
                    hi = mid;
                    witness = state;
                } else {
                    lo = mid;
                }
            }
            Ok(ConstantEstimate {
                p,
                value: 0.5 * (lo + hi),
                bracket: (lo, hi),
                method: EstimateMethod::EnergyBisection,
                diagnostics: None,
                witness: Some(witness),
            })
        }
    }
}

/// Translates `u` so that the vertex nearest to its largest value `|u|`
/// sits at the origin. Ties go to the lexicographically smallest `(j, k)`;
/// a node halfway along an edge belongs to the lower vertex.
pub fn center_state(u: &GraphFunction) -> Result<GraphFunction> {
    if u.is_zero() {
        return Err(Error::Degenerate("cannot centre the zero function".into()));
    }
    let top = u.norm_linf();
    let g = u.graph();
    let target = u
        .values()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.abs() == top)
        .map(|(d, _)| {
            let (x, y) = g.dof_position(d);
            ((x - 0.5).ceil() as i64, (y - 0.5).ceil() as i64)
        })
        .min()
        .expect("a nonzero function attains its maximum");
    Ok(u.translate(-target.0, -target.1))
}
