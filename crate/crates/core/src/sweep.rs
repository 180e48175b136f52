//! `(p, μ)` phase-diagram sweeps.
//!
//! Every point is an independent [`minimize_energy`] run with the same
//! template configuration, so a row can be reproduced on its own. Points run
//! on a rayon pool whose width is capped by `GRIDNLS_THREADS`; rows are sorted
//! by `(p, μ)` afterwards, so the pool width never shows in the output.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{build_grid, GridSpec};
use crate::io::fmt_f64;
use crate::minimize::{estimate_critical_mass, minimize_energy, CriticalMassMethod, MinimizeConfig, QuotientConfig, Status};

/// Environment variable capping the sweep worker pool.
pub const THREADS_ENV: &str = "GRIDNLS_THREADS";

/// Header of the sweep CSV.
pub const SWEEP_HEADER: &str = "p,mu,status,energy,iters,grad_norm";

/// A set of parameter values: an inclusive arithmetic range or an explicit list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamRange {
    Linear { lo: f64, hi: f64, step: f64 },
    List(Vec<f64>),
}

impl ParamRange {
    /// Parses `lo:hi:step` or a comma-separated list (a single value is a list of one).
    pub fn parse(s: &str) -> Result<Self> {
        let bad = |e: std::num::ParseFloatError| Error::InvalidParameter(format!("bad range {s:?}: {e}"));
        let parts: Vec<&str> = s.split(':').collect();
        match parts.len() {
            3 => Ok(ParamRange::Linear {
                lo: parts[0].trim().parse().map_err(bad)?,
                hi: parts[1].trim().parse().map_err(bad)?,
                step: parts[2].trim().parse().map_err(bad)?,
            }),
            1 => Ok(ParamRange::List(
                s.split(',').filter(|t| !t.trim().is_empty()).map(|t| t.trim().parse().map_err(bad)).collect::<Result<_>>()?,
            )),
            _ => Err(Error::InvalidParameter(format!("bad range {s:?}: expected lo:hi:step or a list"))),
        }
    }

    /// The values, in increasing order. Empty ranges and nonpositive steps are errors.
    pub fn values(&self) -> Result<Vec<f64>> {
        let mut v = match self {
            ParamRange::Linear { lo, hi, step } => {
                if !(*step > 0.0) || !lo.is_finite() || !hi.is_finite() {
                    return Err(Error::InvalidParameter(format!("range step must be positive, got {step}")));
                }
                if hi < lo {
                    return Err(Error::InvalidParameter(format!("empty range {lo}..{hi}")));
                }
                // tolerate rounding at the upper end
                let n = ((hi - lo) / step + 1e-9).floor() as usize;
                (0..=n).map(|i| lo + i as f64 * step).collect()
            }
            ParamRange::List(v) => v.clone(),
        };
        if v.is_empty() {
            return Err(Error::InvalidParameter("empty parameter range".into()));
        }
        if let Some(x) = v.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite range value {x}")));
        }
        v.sort_by(f64::total_cmp);
        v.dedup();
        Ok(v)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub p_range: ParamRange,
    pub mu_range: ParamRange,
    pub grid: GridSpec,
    /// Per-point configuration; `p` and `mu` are overwritten and `seed` replaced by [`SweepSpec::seed`].
    pub template: MinimizeConfig,
    pub seed: u64,
    /// Also estimate `μ_p` by the quotient formula for each `p ∈ [4, 6]`.
    pub critical_masses: bool,
    /// Pool width; `None` uses `GRIDNLS_THREADS`, then rayon's default.
    pub threads: Option<usize>,
}

impl SweepSpec {
    pub fn new(p_range: ParamRange, mu_range: ParamRange, grid: GridSpec) -> Self {
        SweepSpec {
            p_range,
            mu_range,
            grid,
            template: MinimizeConfig::new(3.0, 1.0),
            seed: 0,
            critical_masses: false,
            threads: None,
        }
    }

    /// The configuration used at one point.
    pub fn point_config(&self, p: f64, mu: f64) -> MinimizeConfig {
        MinimizeConfig { p, mu, seed: self.seed, ..self.template.clone() }
    }
}

/// Outcome of one sweep point: a solver status or a failure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointStatus {
    Solved(Status),
    Failed,
}

impl PointStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            PointStatus::Solved(s) => s.as_str(),
            PointStatus::Failed => "Failed",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub p: f64,
    pub mu: f64,
    pub status: PointStatus,
    pub energy: f64,
    pub iters: usize,
    pub grad_norm: f64,
    pub mu_p_estimate: Option<f64>,
    pub error: Option<String>,
}

fn thread_count(spec: &SweepSpec) -> Option<usize> {
    spec.threads.or_else(|| std::env::var(THREADS_ENV).ok()?.trim().parse().ok()).filter(|&n| n > 0)
}

fn solve_point(spec: &SweepSpec, graph: &std::sync::Arc<crate::GridGraph>, p: f64, mu: f64, mu_p: Option<f64>) -> PhasePoint {
    match minimize_energy(graph, &spec.point_config(p, mu)) {
        Ok(r) => PhasePoint {
            p,
            mu,
            status: PointStatus::Solved(r.status),
            energy: r.energy,
            iters: r.iterations,
            grad_norm: r.grad_norm,
            mu_p_estimate: mu_p,
            error: None,
        },
        Err(e) => PhasePoint {
            p,
            mu,
            status: PointStatus::Failed,
            energy: f64::NAN,
            iters: 0,
            grad_norm: f64::NAN,
            mu_p_estimate: mu_p,
            error: Some(e.to_string()),
        },
    }
}

/// Runs every `(p, μ)` point and returns the rows sorted by `(p, μ)`.
/// Invalid ranges or grids are errors; a failing point becomes a `Failed` row.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<PhasePoint>> {
    let ps = spec.p_range.values()?;
    let mus = spec.mu_range.values()?;
    let graph = build_grid(spec.grid)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count(spec) {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;

    pool.install(|| {
        let mu_ps: Vec<Option<f64>> = ps
            .par_iter()
            .map(|&p| {
                if !spec.critical_masses || !(4.0..=6.0).contains(&p) {
                    return None;
                }
                let qcfg = QuotientConfig { seed: spec.seed, ..QuotientConfig::default() };
                estimate_critical_mass(&graph, p, &CriticalMassMethod::Formula(qcfg)).ok().map(|e| e.value)
            })
            .collect();
        let jobs: Vec<(f64, f64, Option<f64>)> =
            ps.iter().zip(&mu_ps).flat_map(|(&p, &mp)| mus.iter().map(move |&mu| (p, mu, mp))).collect();
        let mut rows: Vec<PhasePoint> = jobs.par_iter().map(|&(p, mu, mp)| solve_point(spec, &graph, p, mu, mp)).collect();
        rows.sort_by(|a, b| a.p.total_cmp(&b.p).then(a.mu.total_cmp(&b.mu)));
        Ok(rows)
    })
}

/// Writes the rows as CSV with header [`SWEEP_HEADER`].
pub fn write_sweep_csv<W: Write>(rows: &[PhasePoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER.split(','))?;
    for r in rows {
        w.write_record([
            fmt_f64(r.p),
            fmt_f64(r.mu),
            r.status.as_str().to_string(),
            fmt_f64(r.energy),
            r.iters.to_string(),
            fmt_f64(r.grad_norm),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_expand_inclusively() {
        let r = ParamRange::Linear { lo: 0.5, hi: 1.0, step: 0.1 };
        let v = r.values().unwrap();
        assert_eq!(v.len(), 6);
        assert!((v[5] - 1.0).abs() < 1e-12);
        assert_eq!(ParamRange::parse("2,0.5,1").unwrap().values().unwrap(), vec![0.5, 1.0, 2.0]);
        assert_eq!(ParamRange::parse("3").unwrap().values().unwrap(), vec![3.0]);
        assert_eq!(ParamRange::parse("1:2:0.5").unwrap().values().unwrap(), vec![1.0, 1.5, 2.0]);
    }

    #[test]
    fn empty_or_bad_ranges_are_errors() {
        assert!(ParamRange::List(vec![]).values().is_err());
        assert!(ParamRange::Linear { lo: 2.0, hi: 1.0, step: 0.1 }.values().is_err());
        assert!(ParamRange::Linear { lo: 1.0, hi: 2.0, step: 0.0 }.values().is_err());
        assert!(ParamRange::parse("1:2").is_err());
        assert!(ParamRange::parse("a,b").is_err());
    }

    #[test]
    fn empty_mu_range_fails_the_sweep() {
        let spec = SweepSpec::new(ParamRange::List(vec![3.0]), ParamRange::List(vec![]), GridSpec::new(2, 2).unwrap());
        assert!(run_sweep(&spec).is_err());
    }

    #[test]
    fn failing_points_become_rows() {
        // p = 7 is rejected by the minimizer but must not abort the sweep
        let mut spec =
            SweepSpec::new(ParamRange::List(vec![7.0, 3.0]), ParamRange::List(vec![1.0]), GridSpec::new(3, 2).unwrap());
        spec.template.max_iters = 200;
        let rows = run_sweep(&spec).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].p, 3.0);
        assert!(matches!(rows[0].status, PointStatus::Solved(_)));
        assert_eq!(rows[1].status, PointStatus::Failed);
        assert!(rows[1].error.as_deref().unwrap().contains("p"));
        let mut out = Vec::new();
        write_sweep_csv(&rows, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("p,mu,status,energy,iters,grad_norm\n"));
        assert!(text.lines().nth(2).unwrap().contains(",Failed,NaN,0,NaN"));
    }
}
