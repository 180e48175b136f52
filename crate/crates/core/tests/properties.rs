//! Randomized invariants of the functionals, inequalities and dumps.

use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use gridnls::functionals::{check_inequality, energy, energy_identity_check, gn_quotient, inequality_battery};
use gridnls::io::{read_csv, write_csv};
use gridnls::minimize::{maximize_quotient, QuotientConfig};
use gridnls::sampling::{random_function, SampleKind};
use gridnls::{build_grid, GraphFunction, GridGraph, GridSpec};

fn grid(l: usize, m: usize) -> Arc<GridGraph> {
    build_grid(GridSpec::new(l, m).unwrap()).unwrap()
}

fn sample(g: &Arc<GridGraph>, seed: u64, nonneg: bool) -> GraphFunction {
    let kind = if nonneg { SampleKind::NonNegative } else { SampleKind::MixedSign };
    random_function(g, &mut ChaCha8Rng::seed_from_u64(seed), kind)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

/// `K_5` on the (3, 4) grid, computed once for the lower-bound checks.
fn k5() -> f64 {
    static K: OnceLock<f64> = OnceLock::new();
    *K.get_or_init(|| maximize_quotient(&grid(3, 4), 5.0, &QuotientConfig::default()).unwrap().value)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quotient_is_scale_invariant(seed in any::<u64>(), nonneg in any::<bool>(), c in 1e-3f64..1e3, p in 4.0f64..=6.0) {
        let u = sample(&grid(3, 4), seed, nonneg);
        let q = gn_quotient(&u, p).unwrap().value;
        let qc = gn_quotient(&u.scaled(c), p).unwrap().value;
        prop_assert!(rel(q, qc) < 1e-12, "{q} vs {qc}");
        let qn = gn_quotient(&u.scaled(-c), p).unwrap().value;
        prop_assert!(rel(q, qn) < 1e-12);
    }

    #[test]
    fn norms_scale_homogeneously(seed in any::<u64>(), c in 0.1f64..10.0) {
        let u = sample(&grid(2, 5), seed, false);
        let v = u.scaled(c);
        prop_assert!(rel(v.mass(), c * c * u.mass()) < 1e-12);
        prop_assert!(rel(v.kinetic(), c * c * u.kinetic()) < 1e-12);
        prop_assert!(rel(v.lp_power(5.0), c.powi(5) * u.lp_power(5.0)) < 1e-12);
        prop_assert!(u.mass() > 0.0 && u.kinetic() > 0.0);
    }

    #[test]
    fn quotient_is_invariant_under_interior_translation(
        a in 0.1f64..1.0, b in 0.1f64..1.0, dj in -2i64..=2, dk in -2i64..=2, p in 4.0f64..=6.0,
    ) {
        // bump supported in the unit cross around the origin, moved inside L = 4
        let g = grid(4, 6);
        let u = GraphFunction::from_fn(g, |x, y| {
            let r = x.abs() + y.abs();
            if r < 1.0 { (1.0 - r).powf(1.0 + a) * (1.0 + b * x) } else { 0.0 }
        }).unwrap();
        let v = u.translate(dj, dk);
        prop_assert!(rel(u.mass(), v.mass()) < 1e-12);
        let (qu, qv) = (gn_quotient(&u, p).unwrap().value, gn_quotient(&v, p).unwrap().value);
        prop_assert!(rel(qu, qv) < 1e-12, "{qu} vs {qv}");
    }

    #[test]
    fn energy_identity_holds(seed in any::<u64>(), nonneg in any::<bool>(), mu in 0.1f64..8.0, p in 2.5f64..=6.0) {
        let u = sample(&grid(3, 4), seed, nonneg);
        let u = u.scaled((mu / u.mass()).sqrt());
        let id = energy_identity_check(&u, p, mu, None).unwrap();
        prop_assert!((id.direct - id.via_quotient).abs() <= 1e-12 * (0.5 * u.kinetic() + u.lp_power(p) / p));
        prop_assert!((id.direct - energy(&u, p).unwrap().energy).abs() <= 1e-12 * id.direct.abs().max(1.0));
    }

    #[test]
    fn energy_dominates_lower_bound_below_critical_mass(seed in any::<u64>(), frac in 0.05f64..0.999) {
        let k = k5();
        let mu = frac * gridnls::functionals::critical_mass_from_constant(5.0, k);
        let u = sample(&grid(3, 4), seed, false);
        let u = u.scaled((mu / u.mass()).sqrt());
        let id = energy_identity_check(&u, 5.0, mu, Some(k)).unwrap();
        let lb = id.lower_bound.unwrap();
        prop_assert!(lb >= 0.0);
        prop_assert!(id.direct >= lb - 1e-12 * id.direct.abs().max(1.0), "{} < {lb}", id.direct);
    }

    #[test]
    fn random_samples_satisfy_the_battery(seed in any::<u64>(), nonneg in any::<bool>(), l in 1usize..5, m in 1usize..9) {
        let u = sample(&grid(l, m), seed, nonneg);
        for ineq in inequality_battery(5) {
            let r = check_inequality(&u, ineq).unwrap();
            prop_assert!(r.slack >= 0.0, "{} violated: lhs {} rhs {}", r.name(), r.lhs, r.rhs);
        }
    }

    #[test]
    fn dumps_round_trip_exactly(seed in any::<u64>(), nonneg in any::<bool>(), l in 1usize..4, m in 1usize..6) {
        let g = grid(l, m);
        let u = sample(&g, seed, nonneg);
        let mut first = Vec::new();
        write_csv(&u, &mut first).unwrap();
        let v = read_csv(&g, first.as_slice()).unwrap();
        prop_assert_eq!(&u, &v);
        let mut second = Vec::new();
        write_csv(&v, &mut second).unwrap();
        prop_assert_eq!(first, second);
    }
}

#[test]
fn near_maximizer_above_critical_mass_has_negative_identity() {
    let g = grid(3, 4);
    let est = maximize_quotient(&g, 5.0, &QuotientConfig::default()).unwrap();
    let mu_p = gridnls::functionals::critical_mass_from_constant(5.0, est.value);
    let w = est.witness.expect("ascent returns its maximizer");
    for factor in [1.01, 1.2, 2.0] {
        let mu = factor * mu_p;
        let u = w.scaled((mu / w.mass()).sqrt());
        let id = energy_identity_check(&u, 5.0, mu, Some(est.value)).unwrap();
        assert!(id.via_quotient < 0.0, "mu = {mu}: {}", id.via_quotient);
        assert!(id.lower_bound.unwrap() < 0.0);
    }
}
