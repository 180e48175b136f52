//! `gridnls` command-line driver.
//!
//! Every subcommand accepts `--config file.json`, a JSON object whose keys are
//! the snake_case flag names; flags given on the command line win. Results
//! are printed to stdout and, with `--out`, also written to a file.
//!
//! Exit codes: 0 success, 1 computation error, 2 usage error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use gridnls::functionals::{check_inequality, energy, gn_quotient, inequality_battery};
use gridnls::graph::central_edge;
use gridnls::io::{dump, fmt_f64};
use gridnls::minimize::{
    estimate_critical_mass, maximize_quotient, minimize_energy, BisectionConfig, CriticalMassMethod, Init,
    MinimizeConfig, QuotientConfig,
};
use gridnls::sampling::{random_function, SampleKind};
use gridnls::sweep::{run_sweep, write_sweep_csv, ParamRange, SweepSpec};
use gridnls::testfuncs::{
    compact_edge_soliton, u_eps, u_eps_closed_forms, ExpFamilyParams, DEFAULT_SOLITON_FLOOR, K_R, MU_R,
};
use gridnls::{build_grid, GridGraph, GridSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "gridnls", version, about = "NLS ground states and Gagliardo-Nirenberg constants on the square grid")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimize the energy at fixed mass
    Minimize(Common<MinimizeArgs>),
    /// Estimate the Gagliardo-Nirenberg constant K_p, p in [4, 6]
    Kp(Common<KpArgs>),
    /// Estimate the critical mass mu_p, p in [4, 6]
    CriticalMass(Common<CriticalMassArgs>),
    /// Minimize over a (p, mu) grid; CSV p,mu,status,energy,iters,grad_norm
    Sweep(Common<SweepArgs>),
    /// Check the inequality battery on random functions; CSV sample_id,name,p,alpha,lhs,rhs,slack
    Check(Common<CheckArgs>),
    /// Dump a test function and compare its norms with the closed forms
    Testfn(Common<TestfnArgs>),
}

#[derive(Args)]
struct Common<T: Args> {
    /// JSON file with default values for the flags below
    #[arg(long)]
    config: Option<PathBuf>,
    /// Also write the result to this file
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    args: T,
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct MinimizeArgs {
    #[arg(long)]
    p: Option<f64>,
    /// Mass constraint
    #[arg(long)]
    mass: Option<f64>,
    /// Grid half-width L [default: 20]
    #[arg(long)]
    half_width: Option<usize>,
    /// Subintervals per edge m [default: 16]
    #[arg(long)]
    mesh: Option<usize>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    grad_tol: Option<f64>,
    /// `exp:<eps>` or `soliton:<eps_scale>` [default: exp:0.5]
    #[arg(long)]
    init: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Relative size of the seeded random perturbation of the start
    #[arg(long)]
    perturbation: Option<f64>,
    #[arg(long)]
    concentration_threshold: Option<f64>,
    /// Write the final state here (CSV plus JSON sidecar)
    #[arg(long)]
    state: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct KpArgs {
    #[arg(long)]
    p: Option<f64>,
    /// [default: 3 for p = 6, else 6]
    #[arg(long)]
    half_width: Option<usize>,
    /// [default: 128 for p = 6, else 16]
    #[arg(long)]
    mesh: Option<usize>,
    /// Random functions used to certify the estimate [default: 200]
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct CriticalMassArgs {
    #[arg(long)]
    p: Option<f64>,
    /// `formula` or `bisection` [default: formula]
    #[arg(long)]
    method: Option<String>,
    /// Bisection bracket [default: 0.5 and 1.5 times the formula estimate]
    #[arg(long)]
    lo: Option<f64>,
    #[arg(long)]
    hi: Option<f64>,
    /// Bisection stops below this bracket width [default: 5e-3]
    #[arg(long)]
    width: Option<f64>,
    /// [default: 6]
    #[arg(long)]
    half_width: Option<usize>,
    /// [default: 8]
    #[arg(long)]
    mesh: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct SweepArgs {
    /// `lo:hi:step` or a comma-separated list
    #[arg(long)]
    p_range: Option<String>,
    /// `lo:hi:step` or a comma-separated list
    #[arg(long)]
    mu_range: Option<String>,
    /// [default: 6]
    #[arg(long)]
    half_width: Option<usize>,
    /// [default: 8]
    #[arg(long)]
    mesh: Option<usize>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    grad_tol: Option<f64>,
    #[arg(long)]
    init: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    perturbation: Option<f64>,
    /// Worker threads (overrides GRIDNLS_THREADS)
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct CheckArgs {
    /// [default: 1000]
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// [default: 3]
    #[arg(long)]
    half_width: Option<usize>,
    /// [default: 8]
    #[arg(long)]
    mesh: Option<usize>,
    /// Interdimensional exponents per p [default: 5]
    #[arg(long)]
    alpha_steps: Option<usize>,
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct TestfnArgs {
    /// `exp` or `soliton` [default: exp]
    #[arg(long)]
    family: Option<String>,
    /// Decay rate of the exponential family [default: 0.5]
    #[arg(long)]
    eps: Option<f64>,
    /// Mass of the exponential family [default: 1]
    #[arg(long)]
    mass: Option<f64>,
    /// Squeeze of the edge soliton [default: 0.1]
    #[arg(long)]
    eps_scale: Option<f64>,
    /// [default: smallest with e^(-2 eps L) < 1e-12 for exp, 1 for soliton]
    #[arg(long)]
    half_width: Option<usize>,
    /// [default: 32 for exp, 1000 for soliton]
    #[arg(long)]
    mesh: Option<usize>,
    /// Exponents compared [default: 3,4,5,6]
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<f64>>,
    /// Write the function here (CSV plus JSON sidecar)
    #[arg(long)]
    dump: Option<PathBuf>,
}

/// Failure classes mapped to exit codes.
enum Failure {
    Usage(anyhow::Error),
    Compute(anyhow::Error),
}

impl From<gridnls::Error> for Failure {
    fn from(e: gridnls::Error) -> Self {
        Failure::Compute(e.into())
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Compute(e)
    }
}

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

/// Overlays the flags that were given onto the config file.
fn resolve<T: Serialize + DeserializeOwned>(flags: &T, config: Option<&Path>) -> Result<T, Failure> {
    let mut merged = match config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(usage)?;
            let v: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display())).map_err(usage)?;
            if !v.is_object() {
                return Err(usage(anyhow!("{} must hold a JSON object", path.display())));
            }
            v
        }
        None => json!({}),
    };
    let given = serde_json::to_value(flags).map_err(usage)?;
    let target = merged.as_object_mut().unwrap();
    for (k, v) in given.as_object().unwrap() {
        if !v.is_null() {
            target.insert(k.clone(), v.clone());
        }
    }
    serde_json::from_value(merged).context("invalid config").map_err(usage)
}

fn required<T>(v: Option<T>, name: &str) -> Result<T, Failure> {
    v.ok_or_else(|| usage(anyhow!("missing required --{name}")))
}

fn parse_init(s: Option<&str>) -> Result<Option<Init>, Failure> {
    s.map(Init::parse).transpose().map_err(usage)
}

fn grid(l: usize, m: usize) -> Result<Arc<GridGraph>, Failure> {
    let spec = GridSpec::new(l, m).map_err(usage)?;
    Ok(build_grid(spec)?)
}

/// Prints `text` and writes it to `out` when given.
fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    print!("{text}");
    if let Some(path) = out {
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn emit_json(v: &Value, out: Option<&Path>) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(v).map_err(anyhow::Error::from)?;
    text.push('\n');
    emit(&text, out)
}

fn cmd_minimize(c: Common<MinimizeArgs>) -> Result<(), Failure> {
    let a = resolve(&c.args, c.config.as_deref())?;
    let p = required(a.p, "p")?;
    let mu = required(a.mass, "mass")?;
    let (l, m) = (a.half_width.unwrap_or(20), a.mesh.unwrap_or(16));
    let mut cfg = MinimizeConfig::new(p, mu);
    if let Some(v) = a.max_iters {
        cfg.max_iters = v;
    }
    if let Some(v) = a.grad_tol {
        cfg.grad_tol = v;
    }
    if let Some(v) = parse_init(a.init.as_deref())? {
        cfg.init = v;
    }
    if let Some(v) = a.seed {
        cfg.seed = v;
    }
    if let Some(v) = a.perturbation {
        cfg.perturbation = v;
    }
    if let Some(v) = a.concentration_threshold {
        cfg.concentration_threshold = v;
    }
    cfg.validate().map_err(usage)?;
    let g = grid(l, m)?;
    let r = minimize_energy(&g, &cfg)?;
    if let Some(path) = &a.state {
        dump(&r.state, path)?;
    }
    emit_json(
        &json!({
            "p": p,
            "mu": mu,
            "status": r.status.as_str(),
            "energy": r.energy,
            "iters": r.iterations,
            "grad_norm": r.grad_norm,
            "L": l,
            "m": m,
            "init": cfg.init.label(),
            "seed": cfg.seed,
        }),
        c.out.as_deref(),
    )
}

fn cmd_kp(c: Common<KpArgs>) -> Result<(), Failure> {
    let a = resolve(&c.args, c.config.as_deref())?;
    let p = required(a.p, "p")?;
    // the p = 6 maximizer concentrates on one edge and needs a fine mesh
    let critical = p == 6.0;
    let l = a.half_width.unwrap_or(if critical { 3 } else { 6 });
    let m = a.mesh.unwrap_or(if critical { 128 } else { 16 });
    let mut q = QuotientConfig::default();
    if let Some(v) = a.samples {
        q.samples = v;
    }
    if let Some(v) = a.max_iters {
        q.max_iters = v;
    }
    if let Some(v) = a.seed {
        q.seed = v;
    }
    let g = grid(l, m)?;
    let k = maximize_quotient(&g, p, &q)?;
    let mut out = json!({
        "p": p,
        "estimate": k.value,
        "bracket": [k.bracket.0, k.bracket.1],
        "method": format!("{:?}", k.method),
        "L": l,
        "m": m,
        "seed": q.seed,
    });
    if let Some(d) = k.diagnostics {
        out["diagnostics"] = serde_json::to_value(d).map_err(anyhow::Error::from)?;
    }
    emit_json(&out, c.out.as_deref())
}

fn cmd_critical_mass(c: Common<CriticalMassArgs>) -> Result<(), Failure> {
    let a = resolve(&c.args, c.config.as_deref())?;
    let p = required(a.p, "p")?;
    let (l, m) = (a.half_width.unwrap_or(6), a.mesh.unwrap_or(8));
    let q = QuotientConfig { seed: a.seed.unwrap_or(0), ..QuotientConfig::default() };
    let g = grid(l, m)?;
    let method = a.method.as_deref().unwrap_or("formula");
    let est = match method {
        "formula" => estimate_critical_mass(&g, p, &CriticalMassMethod::Formula(q))?,
        "bisection" => {
            let (lo, hi) = match (a.lo, a.hi) {
                (Some(lo), Some(hi)) => (lo, hi),
                (lo, hi) => {
                    let guess = estimate_critical_mass(&g, p, &CriticalMassMethod::Formula(q))?.value;
                    (lo.unwrap_or(0.5 * guess), hi.unwrap_or(1.5 * guess))
                }
            };
            let mut b = BisectionConfig::new(p, lo, hi);
            if let Some(w) = a.width {
                b.width = w;
            }
            b.minimize.seed = a.seed.unwrap_or(0);
            estimate_critical_mass(&g, p, &CriticalMassMethod::EnergyBisection(b))?
        }
        other => return Err(usage(anyhow!("unknown method {other:?}; expected formula or bisection"))),
    };
    emit_json(
        &json!({
            "p": p,
            "estimate": est.value,
            "bracket": [est.bracket.0, est.bracket.1],
            "method": format!("{:?}", est.method),
            "L": l,
            "m": m,
            "seed": a.seed.unwrap_or(0),
        }),
        c.out.as_deref(),
    )
}

fn cmd_sweep(c: Common<SweepArgs>) -> Result<(), Failure> {
    let a = resolve(&c.args, c.config.as_deref())?;
    let p_range = ParamRange::parse(&required(a.p_range, "p-range")?).map_err(usage)?;
    let mu_range = ParamRange::parse(&required(a.mu_range, "mu-range")?).map_err(usage)?;
    let spec_grid = GridSpec::new(a.half_width.unwrap_or(6), a.mesh.unwrap_or(8)).map_err(usage)?;
    let mut spec = SweepSpec::new(p_range, mu_range, spec_grid);
    if let Some(v) = a.max_iters {
        spec.template.max_iters = v;
    }
    if let Some(v) = a.grad_tol {
        spec.template.grad_tol = v;
    }
    if let Some(v) = parse_init(a.init.as_deref())? {
        spec.template.init = v;
    }
    if let Some(v) = a.perturbation {
        spec.template.perturbation = v;
    }
    spec.seed = a.seed.unwrap_or(0);
    spec.threads = a.threads;
    let rows = run_sweep(&spec)?;
    let mut buf = Vec::new();
    write_sweep_csv(&rows, &mut buf)?;
    for r in rows.iter().filter(|r| r.error.is_some()) {
        eprintln!("p={} mu={}: {}", r.p, r.mu, r.error.as_deref().unwrap_or_default());
    }
    emit(&String::from_utf8(buf).map_err(anyhow::Error::from)?, c.out.as_deref())
}

fn cmd_check(c: Common<CheckArgs>) -> Result<(), Failure> {
    let a = resolve(&c.args, c.config.as_deref())?;
    let g = grid(a.half_width.unwrap_or(3), a.mesh.unwrap_or(8))?;
    let battery = inequality_battery(a.alpha_steps.unwrap_or(5));
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed.unwrap_or(0));
    let mut text = String::from("sample_id,name,p,alpha,lhs,rhs,slack\n");
    let mut violations = 0usize;
    for id in 0..a.samples.unwrap_or(1000) {
        let kind = if id % 2 == 0 { SampleKind::MixedSign } else { SampleKind::NonNegative };
        let u = random_function(&g, &mut rng, kind);
        for &ineq in &battery {
            let r = check_inequality(&u, ineq)?;
            violations += usize::from(!r.holds());
            let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
            text.push_str(&format!(
                "{id},{},{},{},{},{},{}\n",
                r.name(),
                opt(ineq.p()),
                opt(ineq.alpha()),
                fmt_f64(r.lhs),
                fmt_f64(r.rhs),
                fmt_f64(r.slack)
            ));
        }
    }
    emit(&text, c.out.as_deref())?;
    if violations > 0 {
        return Err(Failure::Compute(anyhow!("{violations} inequality reports with negative slack")));
    }
    Ok(())
}

fn cmd_testfn(c: Common<TestfnArgs>) -> Result<(), Failure> {
    let a = resolve(&c.args, c.config.as_deref())?;
    let ps = a.p.clone().unwrap_or_else(|| vec![3.0, 4.0, 5.0, 6.0]);
    let family = a.family.as_deref().unwrap_or("exp");
    let (u, mut out) = match family {
        "exp" => {
            let params = ExpFamilyParams::new(a.eps.unwrap_or(0.5), a.mass.unwrap_or(1.0)).map_err(usage)?;
            let l = a.half_width.unwrap_or_else(|| gridnls::testfuncs::half_width_for(params.eps, 1e-12));
            let m = a.mesh.unwrap_or(32);
            let u = u_eps(&grid(l, m)?, params, None)?;
            let mut rows = Vec::new();
            for &p in &ps {
                let exact = u_eps_closed_forms(params, p);
                let b = energy(&u, p)?;
                rows.push(json!({
                    "p": p,
                    "lp_power": {"discrete": b.potential_p, "closed_form": exact.lp_power},
                }));
            }
            let exact = u_eps_closed_forms(params, 2.0);
            let out = json!({
                "family": "exp",
                "eps": params.eps,
                "mu": params.mu,
                "kappa": params.kappa,
                "L": l,
                "m": m,
                "mass": {"discrete": u.mass(), "closed_form": exact.mass},
                "kinetic": {"discrete": u.kinetic(), "closed_form": exact.kinetic},
                "lp": rows,
            });
            (u, out)
        }
        "soliton" => {
            let scale = a.eps_scale.unwrap_or(0.1);
            let (l, m) = (a.half_width.unwrap_or(1), a.mesh.unwrap_or(1000));
            let g = grid(l, m)?;
            let u = compact_edge_soliton(&g, scale, central_edge(&g), DEFAULT_SOLITON_FLOOR)?;
            let q6 = gn_quotient(&u, 6.0)?.value;
            let out = json!({
                "family": "soliton",
                "eps_scale": scale,
                "L": l,
                "m": m,
                "mass": {"discrete": u.mass(), "closed_form": MU_R},
                "q6": {"discrete": q6, "closed_form": K_R},
            });
            (u, out)
        }
        other => return Err(usage(anyhow!("unknown family {other:?}; expected exp or soliton"))),
    };
    if let Some(path) = &a.dump {
        dump(&u, path)?;
        out["dump"] = json!(path.display().to_string());
    }
    emit_json(&out, c.out.as_deref())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Minimize(c) => cmd_minimize(c),
        Command::Kp(c) => cmd_kp(c),
        Command::CriticalMass(c) => cmd_critical_mass(c),
        Command::Sweep(c) => cmd_sweep(c),
        Command::Check(c) => cmd_check(c),
        Command::Testfn(c) => cmd_testfn(c),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            e.print().ok();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_config_values() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        fs::write(&path, r#"{"p": 4.0, "mass": 2.0, "mesh": 4}"#).unwrap();
        let flags = MinimizeArgs { p: Some(3.0), ..Default::default() };
        let a = resolve(&flags, Some(&path)).ok().unwrap();
        assert_eq!(a.p, Some(3.0));
        assert_eq!(a.mass, Some(2.0));
        assert_eq!(a.mesh, Some(4));
        assert_eq!(a.half_width, None);
    }

    #[test]
    fn unknown_config_keys_are_usage_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        fs::write(&path, r#"{"p": 4.0, "bogus": 1}"#).unwrap();
        assert!(matches!(resolve(&MinimizeArgs::default(), Some(&path)), Err(Failure::Usage(_))));
        fs::write(&path, "[1, 2]").unwrap();
        assert!(matches!(resolve(&MinimizeArgs::default(), Some(&path)), Err(Failure::Usage(_))));
    }
}
