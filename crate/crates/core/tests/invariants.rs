//! Properties of the solvers checked through the public API on random
//! smooth data.

use std::f64::consts::PI;

use hcns_core::grid::Grid1D;
use hcns_core::parabolic::{stable_dt_parabolic, step_parabolic};
use hcns_core::{
    energy_snapshot, run, run_parabolic, stable_dt, step, FluidParams, ParabolicState, RunStatus,
    SchemeConfig, State,
};
use proptest::prelude::*;

/// Smooth state with `u = 0` at both ends built from a few sine/cosine modes.
fn smooth_state(grid: &Grid1D, cv: [f64; 2], cu: [f64; 2], cs: [f64; 2]) -> State {
    let mut s = State::equilibrium(grid.n());
    for (i, &x) in grid.x().iter().enumerate() {
        s.v[i] = 1.0 + cv[0] * (PI * x).cos() + cv[1] * (2.0 * PI * x).cos();
        s.u[i] = cu[0] * (PI * x).sin() + cu[1] * (3.0 * PI * x).sin();
        s.s[i] = cs[0] * (PI * x).cos() + cs[1] * (2.0 * PI * x).sin();
    }
    s
}

fn amp() -> impl Strategy<Value = [f64; 2]> {
    [-0.05f64..0.05, -0.05f64..0.05]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn relaxed_step_conserves_mass(cv in amp(), cu in amp(), cs in amp(),
                                   tau in 0.01f64..1.0, eps in 0.0f64..0.25) {
        let grid = Grid1D::new(41).unwrap();
        let p = FluidParams::new(1.0, 2.0, 1.0, tau, eps).unwrap();
        let cfg = SchemeConfig::default();
        let mut s = smooth_state(&grid, cv, cu, cs);
        let m0 = grid.trapz(&s.v);
        for _ in 0..20 {
            let dt = stable_dt(&s, &p, &grid, &cfg).unwrap();
            s = step(&s, dt, &p, &grid, &cfg).unwrap();
        }
        prop_assert!((grid.trapz(&s.v) - m0).abs() <= 1e-13);
        prop_assert_eq!(s.u[0], 0.0);
        prop_assert_eq!(s.u[grid.n() - 1], 0.0);
    }

    #[test]
    fn relaxed_step_commutes_with_reflection(cv in amp(), cu in amp(), cs in amp(),
                                            eps in 0.0f64..0.25) {
        let grid = Grid1D::new(33).unwrap();
        let p = FluidParams::new(1.0, 1.4, 0.5, 0.1, eps).unwrap();
        let cfg = SchemeConfig::default();
        let s = smooth_state(&grid, cv, cu, cs);
        let dt = stable_dt(&s, &p, &grid, &cfg).unwrap();
        let a = step(&s, dt, &p, &grid, &cfg).unwrap().mirrored();
        let b = step(&s.mirrored(), dt, &p, &grid, &cfg).unwrap();
        prop_assert!(a.max_deviation(&b) <= 1e-14);
    }

    #[test]
    fn relaxed_energy_does_not_grow(cv in amp(), cu in amp(), cs in amp(), tau in 0.01f64..1.0) {
        let grid = Grid1D::new(41).unwrap();
        let p = FluidParams::new(1.0, 2.0, 1.0, tau, 0.0).unwrap();
        let cfg = SchemeConfig { cfl: 0.2, ..SchemeConfig::default() };
        let mut s = smooth_state(&grid, cv, cu, cs);
        let mut e = energy_snapshot(&s, &p, &grid).unwrap().e_phys;
        for _ in 0..30 {
            let dt = stable_dt(&s, &p, &grid, &cfg).unwrap();
            s = step(&s, dt, &p, &grid, &cfg).unwrap();
            let next = energy_snapshot(&s, &p, &grid).unwrap().e_phys;
            prop_assert!(next <= e * (1.0 + 1e-12) + 1e-18, "{next} > {e}");
            e = next;
        }
    }

    #[test]
    fn parabolic_step_conserves_mass(cv in amp(), cu in amp()) {
        let grid = Grid1D::new(41).unwrap();
        let p = FluidParams::new(1.0, 2.0, 1.0, 0.0, 0.0).unwrap();
        let cfg = SchemeConfig::default();
        let mut s = ParabolicState::from(&smooth_state(&grid, cv, cu, [0.0; 2]));
        let m0 = grid.trapz(&s.v);
        for _ in 0..20 {
            let dt = stable_dt_parabolic(&s, &p, &grid, &cfg).unwrap();
            s = step_parabolic(&s, dt, &p, &grid, &cfg).unwrap();
        }
        prop_assert!((grid.trapz(&s.v) - m0).abs() <= 1e-13);
    }
}

#[test]
fn run_lands_on_sample_times_and_t_end() {
    let grid = Grid1D::new(51).unwrap();
    let p = FluidParams::default();
    let cfg = SchemeConfig {
        record_every: usize::MAX,
        energy_every: usize::MAX,
        sample_times: vec![0.3, 0.1, 0.2, 0.2, 5.0],
        ..SchemeConfig::default()
    };
    let init = smooth_state(&grid, [0.01, 0.0], [0.01, 0.0], [0.0; 2]);
    let art = run(&init, 0.35, &p, &grid, &cfg);
    assert_eq!(art.status, RunStatus::Completed);
    let times: Vec<f64> = art.snapshots.iter().map(|s| s.t).collect();
    assert_eq!(times, vec![0.0, 0.1, 0.2, 0.3, 0.35]);
    let etimes: Vec<f64> = art.energy.iter().map(|e| e.t).collect();
    assert_eq!(etimes, times);
    assert!(art.snapshot_at(0.2).is_some());
}

#[test]
fn snapshot_times_strictly_increase() {
    let grid = Grid1D::new(31).unwrap();
    let p = FluidParams::default();
    let cfg = SchemeConfig {
        record_every: 3,
        ..SchemeConfig::default()
    };
    let init = smooth_state(&grid, [0.02, 0.0], [0.0, 0.01], [0.0; 2]);
    for art in [
        run(&init, 0.25, &p, &grid, &cfg),
        run_parabolic(&ParabolicState::from(&init), 0.25, &p, &grid, &cfg),
    ] {
        assert!(art.is_completed());
        assert!(art.snapshots.windows(2).all(|w| w[1].t > w[0].t));
        assert_eq!(art.snapshots.last().unwrap().t, 0.25);
    }
}

#[test]
fn positivity_breach_aborts_with_last_accepted_state() {
    let grid = Grid1D::new(41).unwrap();
    let p = FluidParams::default();
    let cfg = SchemeConfig {
        v_floor: 0.97,
        record_every: 1000,
        energy_every: 1000,
        ..SchemeConfig::default()
    };
    // compressive velocity drives v below the raised floor near x = 0
    let mut init = State::equilibrium(grid.n());
    for (i, &x) in grid.x().iter().enumerate() {
        init.u[i] = -0.2 * (PI * x).sin();
    }
    let art = run(&init, 1.0, &p, &grid, &cfg);
    let RunStatus::Aborted(reason) = &art.status else {
        panic!("expected abort, got {:?}", art.status);
    };
    assert!(reason.contains("positivity") || reason.contains("floor"), "{reason}");
    let last = art.snapshots.last().unwrap();
    assert!(last.t > 0.0 && last.t < 1.0);
    assert!(last.v.iter().all(|&v| v >= 0.97));
}

#[test]
fn relaxed_run_requires_positive_tau() {
    let grid = Grid1D::new(17).unwrap();
    let p = FluidParams::new(1.0, 2.0, 1.0, 0.0, 0.0).unwrap();
    let art = run(&State::equilibrium(17), 1.0, &p, &grid, &SchemeConfig::default());
    assert!(matches!(art.status, RunStatus::Aborted(_)));
    assert!(art.snapshots.is_empty());
}
