//! Ground-state regimes, critical-mass estimators and phase sweeps.

use std::sync::Arc;

use gridnls::minimize::{
    estimate_critical_mass, minimize_energy, BisectionConfig, CriticalMassMethod, Init, MinimizeConfig,
    QuotientConfig, Status,
};
use gridnls::sweep::{run_sweep, ParamRange, PointStatus, SweepSpec};
use gridnls::{build_grid, GridGraph, GridSpec};

fn grid(l: usize, m: usize) -> Arc<GridGraph> {
    build_grid(GridSpec::new(l, m).unwrap()).unwrap()
}

fn formula(g: &Arc<GridGraph>, p: f64) -> f64 {
    estimate_critical_mass(g, p, &CriticalMassMethod::Formula(QuotientConfig::default())).unwrap().value
}

#[test]
fn subcritical_ground_states_have_negative_energy() {
    let g = grid(20, 8);
    // near p = 4 the grid looks two-dimensional at large scales and small
    // masses spread beyond any window, so take larger ones there
    for (p, masses) in [(2.5, [0.5, 2.0]), (3.5, [4.0, 16.0])] {
        for mu in masses {
            let r = minimize_energy(&g, &MinimizeConfig::new(p, mu)).unwrap();
            assert_eq!(r.status, Status::Converged, "p = {p}, mu = {mu}");
            assert!(r.energy < 0.0, "p = {p}, mu = {mu}: {}", r.energy);
            assert!((r.state.mass() - mu).abs() < 1e-10 * mu);
            assert!(r.history.windows(2).all(|w| w[1] <= w[0] + 1e-12 * w[0].abs().max(1.0)));
        }
    }
}

#[test]
fn ground_state_energy_decreases_with_mass() {
    // E(μ) is nonincreasing: mass can always be spread thin at no cost
    let g = grid(20, 8);
    let energies: Vec<f64> =
        [0.5, 1.0, 2.0].iter().map(|&mu| minimize_energy(&g, &MinimizeConfig::new(3.0, mu)).unwrap().energy).collect();
    assert!(energies.windows(2).all(|w| w[1] < w[0]), "{energies:?}");
}

#[test]
fn below_critical_mass_the_infimum_is_not_attained() {
    let g = grid(6, 8);
    for p in [4.5, 5.0] {
        let mu = 0.5 * formula(&g, p);
        let r = minimize_energy(&g, &MinimizeConfig::new(p, mu)).unwrap();
        assert_eq!(r.status, Status::NonNegativeInfimum, "p = {p}");
        assert!(r.energy >= 0.0);
    }
}

#[test]
fn formula_and_bisection_agree() {
    let g = grid(6, 8);
    for p in [4.5, 5.5] {
        let guess = formula(&g, p);
        let b = BisectionConfig::new(p, 0.6 * guess, 1.4 * guess);
        let e = estimate_critical_mass(&g, p, &CriticalMassMethod::EnergyBisection(b)).unwrap();
        assert!(e.bracket.0 <= e.value && e.value <= e.bracket.1);
        let gap = (e.value - guess).abs() / guess;
        assert!(gap < 0.05, "p = {p}: formula {guess}, bisection {}", e.value);
    }
}

#[test]
fn critical_mass_decreases_towards_six() {
    let g = grid(6, 8);
    let mus: Vec<f64> = [4.5, 5.0, 5.5].iter().map(|&p| formula(&g, p)).collect();
    assert!(mus.iter().all(|&m| m > gridnls::testfuncs::MU_R), "{mus:?}");
    assert!(mus.windows(2).all(|w| w[1] < w[0]), "{mus:?}");
}

#[test]
fn subcritical_sweep_rows_are_negative_and_converged() {
    let spec = SweepSpec::new(ParamRange::List(vec![3.0]), ParamRange::List(vec![0.5, 1.0, 2.0]), GridSpec::new(20, 8).unwrap());
    let rows = run_sweep(&spec).unwrap();
    assert_eq!(rows.len(), 3);
    for r in &rows {
        assert_eq!(r.status, PointStatus::Solved(Status::Converged), "mu = {}", r.mu);
        assert!(r.energy < 0.0);
    }
}

#[test]
fn sweep_across_critical_mass_changes_sign() {
    let g = GridSpec::new(6, 8).unwrap();
    let mu5 = formula(&build_grid(g).unwrap(), 5.0);
    let mut spec = SweepSpec::new(ParamRange::List(vec![5.0]), ParamRange::List(vec![0.9 * mu5, 1.1 * mu5]), g);
    // an edge start escapes the 4-fold symmetric saddle
    spec.template.init = Init::EdgeSoliton { eps_scale: 0.1 };
    spec.critical_masses = true;
    let rows = run_sweep(&spec).unwrap();
    assert!(rows[0].energy >= 0.0 && rows[1].energy < 0.0, "{rows:?}");
    assert_eq!(rows[0].status, PointStatus::Solved(Status::NonNegativeInfimum));
    assert_eq!(rows[1].status, PointStatus::Solved(Status::Converged));
    assert!(rows.iter().all(|r| r.mu_p_estimate == Some(mu5)));
}

#[test]
fn sweep_points_match_standalone_runs() {
    let mut spec =
        SweepSpec::new(ParamRange::parse("3,4.5").unwrap(), ParamRange::parse("1:2:1").unwrap(), GridSpec::new(4, 4).unwrap());
    spec.seed = 21;
    spec.template.perturbation = 1e-2;
    spec.template.max_iters = 500;
    let g = build_grid(spec.grid).unwrap();
    for row in run_sweep(&spec).unwrap() {
        let r = minimize_energy(&g, &spec.point_config(row.p, row.mu)).unwrap();
        assert_eq!(row.energy.to_bits(), r.energy.to_bits());
        assert_eq!(row.iters, r.iterations);
        assert_eq!(row.status, PointStatus::Solved(r.status));
    }
}
