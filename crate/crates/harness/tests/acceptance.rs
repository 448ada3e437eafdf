//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::sync::Mutex;

use hcns_core::diagnostics::{dissipation_residual, regularization_bound};
use hcns_core::grid::Grid1D;
use hcns_core::model::max_char_speed;
use hcns_core::parabolic::{stable_dt_parabolic, step_parabolic};
use hcns_core::{
    run, run_parabolic, stable_dt, step, EnergySnapshot, FluidParams, ParabolicState, RunArtifact,
    SchemeConfig, SolverKind, State,
};
use hcns_harness::config::{execute, ForcingKind, RunConfig};
use hcns_harness::experiments::{
    apriori_family, boundedness_proxy, eps_sweep, tau_sweep, SweepBase, LAYER_LIMIT_IN_TAU,
};
use hcns_harness::initial::{make_initial_data, IcConfig, IcFamily};
use hcns_harness::io::{energy_csv, snapshot_csv};
use hcns_harness::mms::{mms_convergence, Manufactured, ORDER_RANGE};
use hcns_harness::verdict::strictly_decreasing;
use hcns_harness::Verdict;
use nalgebra::Matrix3;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Mass drifts of every run in criteria 1-4 (14 runs), checked by criterion 5.
static MASS: Mutex<Vec<(String, f64)>> = Mutex::new(Vec::new());

fn record_mass(label: impl Into<String>, drift: f64) {
    MASS.lock().unwrap().push((label.into(), drift));
}

fn series_mass_drift(series: &[EnergySnapshot]) -> f64 {
    let m0 = series[0].mass;
    series
        .iter()
        .map(|e| (e.mass - m0).abs())
        .fold(0.0, f64::max)
}

fn relaxed(tau: f64, eps: f64) -> FluidParams {
    FluidParams::new(1.0, 2.0, 1.0, tau, eps).unwrap()
}

fn well_prepared(delta: f64) -> IcConfig {
    IcConfig::new(IcFamily::WellPreparedSine, delta)
}

fn every_step() -> SchemeConfig {
    SchemeConfig {
        record_every: usize::MAX,
        energy_every: 1,
        ..SchemeConfig::default()
    }
}

fn c1_equilibrium() -> Outcome {
    let grid = Grid1D::new(101).unwrap();
    let cfg = SchemeConfig::default();
    let eq = State::equilibrium(grid.n());
    let mut worst: f64 = 0.0;
    for eps in [0.0, 0.2] {
        let p = relaxed(0.1, eps);
        let mut s = eq.clone();
        for _ in 0..1000 {
            let dt = stable_dt(&s, &p, &grid, &cfg).unwrap();
            s = step(&s, dt, &p, &grid, &cfg).unwrap();
            worst = worst.max(s.max_deviation(&State {
                t: s.t,
                ..eq.clone()
            }));
        }
        record_mass(
            format!("equilibrium relaxed eps={eps}"),
            (grid.trapz(&s.v) - 1.0).abs(),
        );
    }
    let p = relaxed(0.1, 0.0);
    let mut s = ParabolicState::equilibrium(grid.n());
    for _ in 0..1000 {
        let dt = stable_dt_parabolic(&s, &p, &grid, &cfg).unwrap();
        s = step_parabolic(&s, dt, &p, &grid, &cfg).unwrap();
        let dev =
            s.v.iter()
                .map(|v| (v - 1.0).abs())
                .chain(s.u.iter().map(|u| u.abs()))
                .fold(0.0, f64::max);
        worst = worst.max(dev);
    }
    record_mass("equilibrium parabolic", (grid.trapz(&s.v) - 1.0).abs());
    outcome(
        worst <= 1e-13,
        format!("max deviation {worst:.2e} over 1000 steps"),
    )
}

/// Central-difference residual of the manufactured fields against their
/// sources, using only the pressure law itself.
fn mms_source_consistency(p: &FluidParams) -> f64 {
    let m = Manufactured::new(*p);
    let pr = |v: f64| p.a * v.powf(-p.gamma);
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for &(t, x) in &[(0.1, 0.2), (0.3, 0.5), (0.45, 0.85), (0.0, 0.05)] {
        let dt = |f: &dyn Fn(f64, f64) -> f64| (f(t + h, x) - f(t - h, x)) / (2.0 * h);
        let dx = |f: &dyn Fn(f64, f64) -> f64| (f(t, x + h) - f(t, x - h)) / (2.0 * h);
        let v = |t, x| m.v(t, x);
        let u = |t, x| m.u(t, x);
        let s = |t, x| m.s(t, x);
        let b = 2.0 * x - 1.0;
        let fv = dt(&v) - dx(&u);
        let fu = dt(&u) + dx(&|t, x| pr(m.v(t, x))) - dx(&s);
        let fs = dt(&s) + p.epsilon * b * dx(&s) + (v(t, x) * s(t, x) - p.mu * dx(&u)) / p.tau;
        let src = m.relaxed_source(t, x);
        let par = m.parabolic_source(t, x);
        let flux = |t: f64, x: f64| p.mu * (u(t, x + h) - u(t, x - h)) / (2.0 * h) / v(t, x);
        let fpu =
            dt(&u) + dx(&|t, x| pr(m.v(t, x))) - (flux(t, x + h) - flux(t, x - h)) / (2.0 * h);
        for (a, e) in [
            (fv, src[0]),
            (fu, src[1]),
            (fs, src[2]),
            (fv, par[0]),
            (fpu, par[1]),
        ] {
            worst = worst.max((a - e).abs());
        }
    }
    worst
}

fn c2_mms() -> Outcome {
    let p = relaxed(0.1, 0.0);
    let consistency = mms_source_consistency(&p);
    let mut pass = consistency < 1e-4;
    let mut detail = format!("source check {consistency:.1e};");
    for solver in [SolverKind::Relaxed, SolverKind::Parabolic] {
        let r = mms_convergence(solver, 65, 4, &p, 0.5, 0.4).unwrap();
        let ns: Vec<usize> = r.rows.iter().map(|r| r.n).collect();
        pass &= ns == [65, 129, 257, 513];
        pass &= (ORDER_RANGE.0..=ORDER_RANGE.1).contains(&r.order);
        pass &= r.verdict == Verdict::Pass;
        for row in &r.rows {
            record_mass(format!("mms {solver:?} n={}", row.n), row.mass_drift);
        }
        detail.push_str(&format!(" {solver:?} order {:.4}", r.order).to_lowercase());
    }
    outcome(pass, detail)
}

/// Test-side quadrature of the physical energy.
fn energy_oracle(s: &State, p: &FluidParams, grid: &Grid1D) -> f64 {
    let dens: Vec<f64> = (0..grid.n())
        .map(|i| {
            let v = s.v[i];
            let h = p.a * (v.powf(1.0 - p.gamma) - 1.0) / (1.0 - p.gamma);
            p.a * (v - 1.0) - h + 0.5 * s.u[i] * s.u[i] + p.tau * s.s[i] * s.s[i] / (2.0 * p.mu)
        })
        .collect();
    let w = grid.dx();
    w * (dens.iter().sum::<f64>() - 0.5 * (dens[0] + dens[grid.n() - 1]))
}

struct DissRun {
    art: RunArtifact,
    max_r: f64,
}

fn diss_run(n: usize, eps: f64) -> DissRun {
    let grid = Grid1D::new(n).unwrap();
    let p = relaxed(0.1, eps);
    let init = make_initial_data(&well_prepared(0.01), &grid, &p).unwrap();
    let art = run(&init, 2.0, &p, &grid, &every_step());
    assert!(art.is_completed(), "{:?}", art.status);
    let r = dissipation_residual(&art.energy).unwrap();
    let max_r = r.iter().map(|x| x.1.abs()).fold(0.0, f64::max);
    record_mass(
        format!("dissipation n={n} eps={eps}"),
        series_mass_drift(&art.energy),
    );
    DissRun { art, max_r }
}

static BASE_RESIDUAL: Mutex<Option<f64>> = Mutex::new(None);

fn c3_dissipation() -> Outcome {
    let (coarse, fine) = rayon::join(|| diss_run(201, 0.0), || diss_run(401, 0.0));
    *BASE_RESIDUAL.lock().unwrap() = Some(coarse.max_r);
    let monotone = [&coarse, &fine]
        .iter()
        .all(|d| d.art.energy.windows(2).all(|w| w[1].e_phys <= w[0].e_phys));
    let ratio = coarse.max_r / fine.max_r;
    let grid = Grid1D::new(201).unwrap();
    let fin = coarse.art.final_state().unwrap();
    let last = coarse.art.energy.last().unwrap();
    let oracle_gap = (energy_oracle(fin, &relaxed(0.1, 0.0), &grid) - last.e_phys).abs();
    outcome(
        monotone && (3.0..=5.0).contains(&ratio) && oracle_gap <= 1e-15,
        format!(
            "monotone {monotone}; max|r| {:.3e} -> {:.3e}, ratio {ratio:.3}; energy oracle gap {oracle_gap:.1e}",
            coarse.max_r, fine.max_r
        ),
    )
}

fn c4_regularized(base_r: f64) -> Outcome {
    let d = diss_run(201, 0.2);
    let p = relaxed(0.1, 0.2);
    let r = dissipation_residual(&d.art.energy).unwrap();
    let mut slack = f64::INFINITY;
    for (t, rt) in &r {
        let snap = d.art.energy.iter().find(|e| e.t == *t).unwrap();
        let bound = regularization_bound(snap, &p) + 10.0 * base_r;
        slack = slack.min(bound - rt);
    }
    outcome(
        slack >= 0.0,
        format!("min(bound - r) = {slack:.3e} over {} times", r.len()),
    )
}

fn c5_mass() -> Outcome {
    let mass = MASS.lock().unwrap();
    let (label, worst) =
        mass.iter().cloned().fold(
            (String::new(), 0.0),
            |acc, m| if m.1 >= acc.1 { m } else { acc },
        );
    outcome(
        mass.len() == 14 && worst <= 1e-11,
        format!("{} runs, worst drift {worst:.2e} ({label})", mass.len()),
    )
}

fn sweep_base() -> SweepBase {
    SweepBase::new(relaxed(0.1, 0.0), 401, 2.0, well_prepared(0.01))
}

fn c6_relaxation_limit() -> Outcome {
    let taus = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3];
    let s = tau_sweep(&taus, &sweep_base(), true).unwrap();
    let d: Vec<f64> = s.rows.iter().map(|r| r.distance).collect();
    let r: Vec<f64> = s.rows.iter().map(|r| r.residual).collect();
    let a = strictly_decreasing(&d) && s.rows.iter().all(|r| r.aborted.is_none());
    let b = strictly_decreasing(&r);
    let worst_layer = s
        .layer
        .iter()
        .map(|l| l.collapse_in_tau.unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max);
    let c = s.layer.len() == taus.len() && worst_layer < LAYER_LIMIT_IN_TAU;
    outcome(
        a && b && c,
        format!(
            "(a) {a} slope {:.3}; (b) {b} slope {:.3}; (c) {c} slowest collapse {worst_layer:.2} tau",
            s.slope.unwrap(),
            s.residual_slope.unwrap()
        ),
    )
}

fn c7_boundary_limit() -> Outcome {
    let s = eps_sweep(&[0.2, 0.1, 0.05, 0.025, 0.0], &sweep_base()).unwrap();
    let d: Vec<f64> = s
        .rows
        .iter()
        .filter(|r| r.epsilon > 0.0)
        .map(|r| r.distance)
        .collect();
    let pass = d.len() == 4 && strictly_decreasing(&d) && s.verdict == Verdict::Pass;
    outcome(
        pass,
        format!(
            "distances {}; slope {:.3}",
            d.iter()
                .map(|x| format!("{x:.3e}"))
                .collect::<Vec<_>>()
                .join(" > "),
            s.slope.unwrap()
        ),
    )
}

/// Largest eigenvalue modulus of the 3x3 system matrix at one node.
fn spectral_radius(v: f64, p: &FluidParams, b: f64) -> f64 {
    let dp = -p.a * p.gamma * v.powf(-p.gamma - 1.0);
    let m = Matrix3::new(
        0.0,
        -1.0,
        0.0,
        dp,
        0.0,
        -1.0,
        0.0,
        -p.mu / p.tau,
        p.epsilon * b,
    );
    let schur = m.try_schur(f64::EPSILON, 100_000).or_else(|| {
        let q = Matrix3::from_fn(|i, j| {
            ((3 * i + j) as f64 * 0.7).sin() + if i == j { 2.0 } else { 0.0 }
        })
        .qr()
        .q();
        (q.transpose() * m * q).try_schur(f64::EPSILON, 100_000)
    });
    schur
        .expect("Schur iteration converged")
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

fn c8_char_speed() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let grid = Grid1D::new(17).unwrap();
    let mut worst: f64 = 0.0;
    let mut bound_ok = true;
    for _ in 0..100 {
        let p = FluidParams::new(
            rng.gen_range(0.5..2.0),
            rng.gen_range(1.1..3.0),
            rng.gen_range(0.1..2.0),
            rng.gen_range(1e-3..1.0),
            0.0,
        )
        .unwrap();
        let v: Vec<f64> = (0..grid.n()).map(|_| rng.gen_range(0.5..2.0)).collect();
        let oracle = v
            .iter()
            .map(|&vi| spectral_radius(vi, &p, 0.0))
            .fold(0.0, f64::max);
        worst = worst.max((max_char_speed(&v, &p).unwrap() - oracle).abs());
        // with the boundary term the closed form bounds the spectrum from above
        let q = p.with_epsilon(rng.gen_range(0.0..0.25)).unwrap();
        let rho = grid
            .x()
            .iter()
            .zip(&v)
            .map(|(&x, &vi)| spectral_radius(vi, &q, 2.0 * x - 1.0))
            .fold(0.0, f64::max);
        let closed = max_char_speed(&v, &q).unwrap();
        bound_ok &= rho <= closed + 1e-10 && closed - q.epsilon <= rho + 1e-10;
    }
    outcome(
        worst <= 1e-10 && bound_ok,
        format!("max |closed - eigen| {worst:.2e} on 100 states; eps bound holds: {bound_ok}"),
    )
}

fn c9_boundedness() -> Outcome {
    let base = SweepBase::new(relaxed(0.1, 0.0), 201, 50.0, well_prepared(0.01));
    let (b, fam) = rayon::join(
        || boundedness_proxy(&base).unwrap(),
        || apriori_family(&[0.005, 0.01, 0.02], &base).unwrap(),
    );
    let growth = b.sup_h2 / b.initial_h2;
    let pass = b.verdict == Verdict::Pass
        && growth <= 10.0
        && b.tail_fraction <= 0.1
        && fam.verdict == Verdict::Pass;
    let ratios = match &fam.check {
        hcns_core::AprioriVerdict::Pass { ratios, spread }
        | hcns_core::AprioriVerdict::Fail { ratios, spread } => {
            format!("ratios {ratios:.4?} spread {:.2}%", 100.0 * spread)
        }
        other => format!("{other:?}"),
    };
    outcome(
        pass,
        format!(
            "H2 sup/initial {growth:.3}; tail {:.2e}; {ratios}",
            b.tail_fraction
        ),
    )
}

fn c10_symmetry_determinism() -> Outcome {
    let grid = Grid1D::new(201).unwrap();
    let ic = IcConfig {
        mode: 2,
        ..well_prepared(0.01)
    };
    let cfg = SchemeConfig {
        record_every: 10,
        energy_every: usize::MAX,
        ..SchemeConfig::default()
    };
    let mut asym: f64 = 0.0;
    for eps in [0.0, 0.2] {
        let p = relaxed(0.1, eps);
        let init = make_initial_data(&ic, &grid, &p).unwrap();
        let art = run(&init, 1.0, &p, &grid, &cfg);
        asym = art
            .snapshots
            .iter()
            .map(|s| s.max_deviation(&s.mirrored()))
            .fold(asym, f64::max);
    }
    let p = relaxed(0.1, 0.0);
    let init = make_initial_data(&ic, &grid, &p).unwrap();
    let art = run_parabolic(&ParabolicState::from(&init), 1.0, &p, &grid, &cfg);
    asym = art
        .snapshots
        .iter()
        .map(|s| s.max_deviation(&s.mirrored()))
        .fold(asym, f64::max);

    let config = RunConfig {
        solver: SolverKind::Relaxed,
        params: relaxed(0.1, 0.2),
        n: 101,
        t_end: 0.5,
        cfl: 0.4,
        record_every: 7,
        energy_every: 1,
        v_floor: 1e-6,
        ic: IcConfig::new(IcFamily::UnpreparedSine, 0.02),
        forcing: ForcingKind::None,
        seed: 7,
        output_dir: "unused".into(),
    };
    let csvs = |c: &RunConfig| {
        let a = execute(c).unwrap();
        (
            snapshot_csv(&Grid1D::new(c.n).unwrap(), &a.snapshots),
            energy_csv(&a.energy),
        )
    };
    let first = csvs(&config);
    let identical = (0..3).into_par_iter().all(|_| csvs(&config) == first);
    outcome(
        asym <= 1e-12 && identical,
        format!("max asymmetry {asym:.2e}; repeated runs bit-identical: {identical}"),
    )
}

fn main() -> ExitCode {
    let start = std::time::Instant::now();
    // criteria 1-4 feed criterion 5, and 4 needs the residual from 3
    let (mut early, late): (Vec<Outcome>, Vec<Outcome>) = rayon::join(
        || {
            let (c1, c2) = rayon::join(c1_equilibrium, c2_mms);
            let c3 = c3_dissipation();
            let base = BASE_RESIDUAL.lock().unwrap().expect("criterion 3 ran");
            let c4 = c4_regularized(base);
            let c5 = c5_mass();
            vec![c1, c2, c3, c4, c5]
        },
        || {
            let jobs: Vec<fn() -> Outcome> = vec![
                c6_relaxation_limit,
                c7_boundary_limit,
                c8_char_speed,
                c9_boundedness,
                c10_symmetry_determinism,
            ];
            jobs.into_par_iter().map(|f| f()).collect()
        },
    );
    early.extend(late);
    let names = [
        "equilibrium fixed point",
        "manufactured-solution order",
        "discrete dissipation",
        "regularized energy inequality",
        "mass conservation",
        "relaxation limit",
        "boundary-regularization limit",
        "characteristic-speed oracle",
        "uniform-boundedness proxy",
        "symmetry and determinism",
    ];
    let mut failed = 0;
    for (k, (name, o)) in names.iter().zip(&early).enumerate() {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        failed += usize::from(!o.pass);
        println!("criterion {:>2} {tag}: {name}: {}", k + 1, o.detail);
    }
    println!(
        "acceptance: {} of {} passed in {:.1} s",
        names.len() - failed,
        names.len(),
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
