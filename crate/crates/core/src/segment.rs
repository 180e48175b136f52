//! Exact integrals over one linear segment.
//!
//! Every quantity on the graph is a sum of per-segment contributions of a
//! linear function running from `a` to `b` over a subinterval of length `h`.
//! All integrals here are exact for that linear function, including the
//! non-integer powers `|u|^p`.

/// `∫ u²` over the segment.
#[inline]
pub fn mass(a: f64, b: f64, h: f64) -> f64 {
    h * (a * a + a * b + b * b) / 3.0
}

/// `∫ |u'|²` over the segment.
#[inline]
pub fn kinetic(a: f64, b: f64, h: f64) -> f64 {
    let d = b - a;
    d * d / h
}

/// Below this ratio `|b - a| / |a + b|` the closed form loses digits and the
/// binomial series is used instead.
const SERIES_RATIO: f64 = 0.25;
const SERIES_TERMS: usize = 24;

#[inline]
fn signed_pow(x: f64, p: f64) -> f64 {
    // antiderivative of |x|^p, up to the 1/(p+1) factor
    x.abs().powf(p) * x
}

/// Series `S(q) = Σ_k C(p, 2k) q^k / (2k+1)` and its derivative in `q`.
fn series(p: f64, q: f64) -> (f64, f64) {
    let mut binom = 1.0; // C(p, n) with n = 2k
    let mut qk = 1.0;
    let mut qk_prev = 0.0;
    let mut s = 0.0;
    let mut ds = 0.0;
    for k in 0..SERIES_TERMS {
        let n = (2 * k) as f64;
        let term = binom / (n + 1.0);
        s += term * qk;
        if k > 0 {
            ds += term * k as f64 * qk_prev;
        }
        if (term * qk).abs() < 1e-18 * s.abs() && k > 2 {
            break;
        }
        binom *= (p - n) / (n + 1.0);
        binom *= (p - n - 1.0) / (n + 2.0);
        qk_prev = qk;
        qk *= q;
    }
    (s, ds)
}

/// Mean of `|u|^p` over the segment, i.e. `∫_0^1 |a + (b-a)s|^p ds`.
pub fn mean_abs_pow(a: f64, b: f64, p: f64) -> f64 {
    if a == b {
        return a.abs().powf(p);
    }
    let c = 0.5 * (a + b);
    let d = 0.5 * (b - a);
    if a * b > 0.0 && d.abs() <= SERIES_RATIO * c.abs() {
        let r = d / c;
        let (s, _) = series(p, r * r);
        c.abs().powf(p) * s
    } else {
        (signed_pow(b, p) - signed_pow(a, p)) / ((p + 1.0) * (b - a))
    }
}

/// Partial derivatives of [`mean_abs_pow`] with respect to `a` and `b`.
pub fn mean_abs_pow_grad(a: f64, b: f64, p: f64) -> (f64, f64) {
    if a == b {
        // both partials equal half the derivative of |a|^p
        let g = 0.5 * p * a.abs().powf(p - 1.0) * a.signum();
        return (g, g);
    }
    let c = 0.5 * (a + b);
    let d = 0.5 * (b - a);
    if a * b > 0.0 && d.abs() <= SERIES_RATIO * c.abs() {
        let r = d / c;
        let q = r * r;
        let (s, ds) = series(p, q);
        let scale = c.abs().powf(p) / c;
        let dc = scale * (p * s - 2.0 * q * ds);
        let dd = scale * 2.0 * r * ds;
        (0.5 * (dc - dd), 0.5 * (dc + dd))
    } else {
        let g = (signed_pow(b, p) - signed_pow(a, p)) / ((p + 1.0) * (b - a));
        let ga = (g - a.abs().powf(p)) / (b - a);
        let gb = (b.abs().powf(p) - g) / (b - a);
        (ga, gb)
    }
}

/// `∫ |u|^p` over the segment.
#[inline]
pub fn power(a: f64, b: f64, h: f64, p: f64) -> f64 {
    h * mean_abs_pow(a, b, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Composite Simpson on a fine mesh, split at the zero crossing so the
    // integrand is smooth on each piece.
    fn simpson_oracle(a: f64, b: f64, p: f64) -> f64 {
        let f = |s: f64| (a + (b - a) * s).abs().powf(p);
        let mut cuts = vec![0.0, 1.0];
        if a * b < 0.0 {
            cuts.insert(1, a / (a - b));
        }
        let n = 20_000;
        let mut total = 0.0;
        for w in cuts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let h = (hi - lo) / n as f64;
            let mut acc = f(lo) + f(hi);
            for i in 1..n {
                let x = lo + i as f64 * h;
                acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
            }
            total += acc * h / 3.0;
        }
        total
    }

    #[test]
    fn mean_abs_pow_matches_quadrature() {
        let cases = [
            (1.0, 1.1, 3.0),
            (1.0, 1.4, 4.5),
            (0.3, 2.0, 5.0),
            (-1.0, 0.7, 6.0),
            (-0.2, -0.25, 2.5),
            (0.0, 1.0, 3.7),
            (2.0, -2.0, 4.0),
        ];
        for &(a, b, p) in &cases {
            let exact = mean_abs_pow(a, b, p);
            let oracle = simpson_oracle(a, b, p);
            assert!(
                (exact - oracle).abs() <= 1e-10 * oracle.max(1e-12),
                "a={a} b={b} p={p}: {exact} vs {oracle}"
            );
        }
    }

    #[test]
    fn p_two_is_mass() {
        for &(a, b) in &[(0.3, -0.8), (1.0, 1.01), (2.0, 0.0)] {
            assert!((mean_abs_pow(a, b, 2.0) - mass(a, b, 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn gradient_matches_central_differences() {
        let step = 1e-6;
        for &(a, b, p) in &[
            (1.0, 1.05, 3.0),
            (1.0, 1.3, 5.0),
            (-0.4, 0.9, 6.0),
            (0.5, 0.5, 4.0),
            (0.0, 0.8, 2.5),
            (-1.2, -1.1, 4.2),
        ] {
            let (ga, gb) = mean_abs_pow_grad(a, b, p);
            let fa = (mean_abs_pow(a + step, b, p) - mean_abs_pow(a - step, b, p)) / (2.0 * step);
            let fb = (mean_abs_pow(a, b + step, p) - mean_abs_pow(a, b - step, p)) / (2.0 * step);
            assert!((ga - fa).abs() < 1e-7 * (1.0 + fa.abs()), "da at {a},{b},{p}");
            assert!((gb - fb).abs() < 1e-7 * (1.0 + fb.abs()), "db at {a},{b},{p}");
        }
    }

    #[test]
    fn series_matches_closed_form() {
        // inside the series region the closed form is still accurate to ~1e-14
        for &p in &[3.0, 4.5, 6.0] {
            for &(a, b) in &[(0.8, 1.2), (1.0, 1.3), (-2.0, -2.5)] {
                let closed = (signed_pow(b, p) - signed_pow(a, p)) / ((p + 1.0) * (b - a));
                let s = mean_abs_pow(a, b, p);
                assert!((s - closed).abs() < 1e-13 * closed, "p={p} a={a} b={b}");
            }
        }
    }
}
