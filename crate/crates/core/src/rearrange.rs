//! Symmetric decreasing rearrangement onto the real line and level-set
//! preimage counting.
//!
//! For a piecewise-linear `u ≥ 0` the distribution function
//! `t ↦ |{u > t}|` is itself piecewise linear in `t` with breakpoints at the
//! nodal values, so its inverse is piecewise linear in `x`. The rearrangement
//! is therefore computed exactly: the result is a piecewise-linear function
//! on `ℝ` whose breakpoints are generally not uniformly spaced.

use crate::error::{Error, Result};
use crate::graph::GraphFunction;
use crate::segment;

/// Even, nonincreasing-in-`|x|` piecewise-linear function on `ℝ`.
///
/// Only the half `x ≥ 0` is stored; the function vanishes beyond the last
/// breakpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct LineFunction {
    xs: Vec<f64>,
    values: Vec<f64>,
}

impl LineFunction {
    /// Builds a line function from its right half. `xs` must start at 0 and be
    /// nondecreasing, `values` must be nonincreasing, nonnegative and end at 0.
    pub fn from_half(xs: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if xs.len() != values.len() {
            return Err(Error::DimensionMismatch { expected: xs.len(), got: values.len() });
        }
        if xs.len() < 2 || xs[0] != 0.0 || *values.last().unwrap() != 0.0 {
            return Err(Error::InvalidParameter("half profile must start at x=0 and end at value 0".into()));
        }
        if let Some(i) = xs.iter().chain(&values).position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        let monotone = xs.windows(2).all(|w| w[0] <= w[1]) && values.windows(2).all(|w| w[0] >= w[1]);
        if !monotone || values.iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidParameter("half profile must be monotone and nonnegative".into()));
        }
        Ok(LineFunction { xs, values })
    }

    /// Breakpoint abscissae on `x ≥ 0`.
    pub fn breakpoints(&self) -> &[f64] {
        &self.xs
    }

    /// Values at [`breakpoints`](Self::breakpoints).
    pub fn breakpoint_values(&self) -> &[f64] {
        &self.values
    }

    /// Half-length of the support.
    pub fn support_radius(&self) -> f64 {
        *self.xs.last().unwrap()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let x = x.abs();
        if x >= self.support_radius() {
            return 0.0;
        }
        // first breakpoint strictly beyond x
        let i = self.xs.partition_point(|&b| b <= x);
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        let (v0, v1) = (self.values[i - 1], self.values[i]);
        v0 + (v1 - v0) * (x - x0) / (x1 - x0)
    }

    /// Symmetric samples `(x, û(x))` at `n` uniform nodes spanning the support.
    pub fn sample_uniform(&self, n: usize) -> Vec<(f64, f64)> {
        let r = self.support_radius();
        if n < 2 {
            return vec![(0.0, self.eval(0.0))];
        }
        (0..n)
            .map(|i| {
                let x = -r + 2.0 * r * i as f64 / (n - 1) as f64;
                (x, self.eval(x))
            })
            .collect()
    }

    fn half_segments(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.xs
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, v)| (x[1] - x[0], v[0], v[1]))
            .filter(|&(dx, _, _)| dx > 0.0)
    }

    /// `∫_ℝ |û|^r`.
    pub fn lp_power(&self, r: f64) -> f64 {
        2.0 * self.half_segments().map(|(dx, a, b)| dx * segment::mean_abs_pow(a, b, r)).sum::<f64>()
    }

    pub fn mass(&self) -> f64 {
        2.0 * self.half_segments().map(|(dx, a, b)| segment::mass(a, b, dx)).sum::<f64>()
    }

    pub fn norm_lp(&self, r: f64) -> Result<f64> {
        if !(r >= 1.0) {
            return Err(Error::InvalidParameter(format!("norm exponent must be >= 1, got {r}")));
        }
        Ok(self.lp_power(r).powf(1.0 / r))
    }

    /// `∫_ℝ |û'|²`.
    pub fn kinetic(&self) -> f64 {
        2.0 * self.half_segments().map(|(dx, a, b)| segment::kinetic(a, b, dx)).sum::<f64>()
    }

    /// `½∫|û'|² − (1/p)∫|û|^p`.
    pub fn energy(&self, p: f64) -> f64 {
        0.5 * self.kinetic() - self.lp_power(p) / p
    }
}

/// Neumaier summation.
#[derive(Default)]
struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn add_scaled(&mut self, other: &CompensatedSum, sign: f64) {
        self.add(sign * other.sum);
        self.add(sign * other.comp);
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Symmetric decreasing rearrangement of a nonnegative graph function.
pub fn symmetric_rearrangement(u: &GraphFunction) -> Result<LineFunction> {
    if !u.is_nonnegative() {
        return Err(Error::InvalidParameter("rearrangement needs a nonnegative function; take |u| first".into()));
    }
    if u.is_zero() {
        return Err(Error::Degenerate("cannot rearrange the zero function".into()));
    }
    let h = u.graph().step();

    // (lo, hi) per segment
    let mut segs = Vec::with_capacity(u.graph().edges().len() * u.graph().mesh());
    u.graph().for_each_segment(u.values(), |_, _, a, b| segs.push((a.min(b), a.max(b))));

    let mut levels: Vec<f64> = segs.iter().flat_map(|&(lo, hi)| [lo, hi]).collect();
    levels.sort_by(|a, b| b.total_cmp(a));
    levels.dedup();
    let idx = |t: f64| levels.partition_point(|&l| l > t);

    // per level (descending): slope dμ/d(−t) switched on at hi, off at lo,
    // and the measure of plateaus sitting exactly at that level. A segment
    // spanning a single gap between consecutive levels adds its whole length
    // over that gap instead.
    let n = levels.len();
    let mut rate_on: Vec<CompensatedSum> = (0..n).map(|_| CompensatedSum::default()).collect();
    let mut rate_off: Vec<CompensatedSum> = (0..n).map(|_| CompensatedSum::default()).collect();
    let mut plateau = vec![0.0; n];
    let mut gap_length = vec![0.0; n];
    for &(lo, hi) in &segs {
        let (i_lo, i_hi) = (idx(lo), idx(hi));
        if lo == hi {
            plateau[i_lo] += h;
        } else if i_lo == i_hi + 1 {
            gap_length[i_lo] += h;
        } else {
            let r = h / (hi - lo);
            rate_on[i_hi].add(r);
            rate_off[i_lo].add(r);
        }
    }

    // μ(t+) and μ(t−) at each level, swept from the top. Nearly flat segments
    // switch huge rates on and off again, so rates are summed with compensation.
    let mut xs = Vec::with_capacity(2 * n);
    let mut values = Vec::with_capacity(2 * n);
    let mut measure = 0.0;
    let mut rate = CompensatedSum::default();
    for i in 0..n {
        let t = levels[i];
        if i > 0 {
            measure += rate.value() * (levels[i - 1] - t) + gap_length[i];
        }
        rate.add_scaled(&rate_off[i], -1.0);
        if t == 0.0 {
            xs.push(0.5 * measure);
            values.push(0.0);
            break;
        }
        xs.push(0.5 * measure);
        values.push(t);
        if plateau[i] > 0.0 {
            measure += plateau[i];
            xs.push(0.5 * measure);
            values.push(t);
        }
        rate.add_scaled(&rate_on[i], 1.0);
    }
    if *values.last().unwrap() != 0.0 {
        // every segment has a zero endpoint on the boundary, so 0 is always a level
        return Err(Error::Degenerate("function does not vanish on the boundary".into()));
    }
    Ok(LineFunction { xs, values })
}

/// Number of transversal crossings of level `t` by `u`.
///
/// A level equal to a nodal value is first nudged upward by `1e-12·‖u‖_∞`.
pub fn count_preimages(u: &GraphFunction, t: f64) -> Result<usize> {
    let top = u.norm_linf();
    if !(t > 0.0 && t < top) {
        return Err(Error::InvalidParameter(format!("level {t} outside (0, {top})")));
    }
    let mut level = t;
    if u.values().contains(&level) {
        level += 1e-12 * top;
        if level >= top {
            return Err(Error::InvalidParameter(format!("level {t} too close to the maximum")));
        }
    }
    let mut count = 0;
    u.graph().for_each_segment(u.values(), |_, _, a, b| {
        if (a - level) * (b - level) < 0.0 {
            count += 1;
        }
    });
    Ok(count)
}
