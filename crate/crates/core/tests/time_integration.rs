//! Integrator accuracy and conservation on short runs.

mod common;

use std::f64::consts::PI;

use mhdb::diagnostics::{energy_balance_residual, theta_conservation};
use mhdb::dynamics::{Params, State};
use mhdb::experiments::{make_initial_condition, run_simulation, InitialCondition, Preset, RunConfig};
use mhdb::timestepper::Stepper;
use num_complex::Complex64;

fn advance(params: &Params, s0: &State) -> State {
    let stepper = Stepper::new(params).unwrap();
    let steps = (params.t_end / params.dt).round() as usize;
    let mut s = s0.clone();
    for _ in 0..steps {
        s = stepper.step(&s).unwrap().0;
    }
    s
}

#[test]
fn shear_mode_decays_at_the_viscous_rate() {
    // u1 = sin(2 pi x2) is an exact Navier-Stokes solution with zero nonlinearity
    let mut p = Params::new(16);
    p.nu = 0.02;
    p.dt = 0.01;
    p.t_end = 0.2;
    let mut s = State::zeros(16);
    s.u[0].set_hermitian([0, 1, 0], Complex64::new(0.0, -0.5));
    let out = advance(&p, &s);
    let factor = (-4.0 * PI * PI * p.nu * p.t_end).exp();
    let got = out.u[0].get([0, 1, 0]).im / -0.5;
    assert!((got - factor).abs() < 1e-13, "{got} vs {factor}");
    assert!(out.u[1].norm_sq() + out.u[2].norm_sq() < 1e-30);
}

#[test]
fn lawson_rk4_is_fourth_order() {
    let mut p = Params::new(12);
    p.nu = 0.01;
    p.eta = 0.02;
    p.kappa = 0.005;
    p.g = 1.0;
    p.t_end = 0.2;
    let d = p.domain().unwrap();
    let spec = InitialCondition::new(Preset::RandomSobolev, 1.0).with_theta(0.5).with_sigma(2.0);
    let s0 = make_initial_condition(&d, &spec, 3).unwrap();
    let sols: Vec<State> = [0.02, 0.01, 0.005]
        .iter()
        .map(|&dt| {
            let mut q = p.clone();
            q.dt = dt;
            advance(&q, &s0)
        })
        .collect();
    let e1 = sols[0].l2_distance(&sols[1]);
    let e2 = sols[1].l2_distance(&sols[2]);
    let order = (e1 / e2).log2();
    assert!((order - 4.0).abs() < 0.5, "observed order {order} ({e1:e}, {e2:e})");
}

fn config(n: usize, preset: Preset) -> RunConfig {
    let mut p = Params::new(n);
    p.dt = 0.005;
    p.t_end = 0.25;
    RunConfig {
        diagnostics_every: 5,
        ..RunConfig::new(p, InitialCondition::new(preset, 0.8).with_theta(0.4))
    }
}

#[test]
fn diffusive_energy_balance_closes_under_refinement() {
    let mut c = config(12, Preset::MhdVortex);
    c.params.nu = 0.01;
    c.params.eta = 0.01;
    c.params.kappa = 0.01;
    c.params.g = 1.0;
    c.diagnostics_every = 1;
    let coarse = run_simulation(&c).unwrap();
    c.params.dt /= 2.0;
    let fine = run_simulation(&c).unwrap();
    let rc = energy_balance_residual(&coarse.records).unwrap();
    let rf = energy_balance_residual(&fine.records).unwrap();
    // coarse residual i sits at t = (i + 1) dt, fine residual 2i + 1 at the same time
    let rf: Vec<f64> = rc.iter().enumerate().map(|(i, _)| rf[2 * i + 1]).collect();
    let worst = |r: &[f64]| r.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let diff = rc.iter().zip(&rf).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    // second order in the sample spacing
    let ratio = worst(&rc) / worst(&rf);
    assert!((ratio - 4.0).abs() < 0.5, "refinement ratio {ratio}");
    assert!(worst(&rc) <= 1.1 * diff * 4.0 / 3.0, "{:e} vs {:e}", worst(&rc), diff);
    let dissipation = coarse.records.iter().map(|r| r.dissipation).fold(0.0, f64::max);
    assert!(worst(&rc) < 1e-3 * dissipation);
}

#[test]
fn theta_norm_is_conserved_without_diffusion_and_decays_with_it() {
    let mut c = config(12, Preset::RandomSobolev);
    c.params.g = 2.0;
    let tr = run_simulation(&c).unwrap();
    let drift = theta_conservation(&tr.records).unwrap();
    assert!(drift.l2_relative_drift < 1e-8, "{drift:?}");
    c.params.kappa = 0.05;
    let tr = run_simulation(&c).unwrap();
    assert!(theta_conservation(&tr.records).unwrap().l2_nonincreasing);
}

#[test]
fn divergence_stays_at_roundoff() {
    let tr = run_simulation(&config(12, Preset::RandomSobolev)).unwrap();
    for r in &tr.records {
        assert!(r.div_u < 1e-14 && r.div_b < 1e-14);
    }
}

#[test]
fn runs_are_deterministic() {
    let c = config(12, Preset::RandomSobolev);
    let a = run_simulation(&c).unwrap();
    let b = run_simulation(&c).unwrap();
    assert_eq!(a.final_state, b.final_state);
    assert_eq!(a.records, b.records);
}
