//! Scalar diagnostics of a state or trajectory: norms, the energy budget,
//! anisotropic regularity monitors and integration-by-parts identity residuals.

mod identities;
mod monitors;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dynamics::{Params, State};
use crate::error::{MhdError, Result};
use crate::spectral::{divergence_residual, gradient_norm_sq, Domain, SpectralField, VectorField};

pub use identities::{lemma_identity_residual_h, lemma_identity_residual_pair, IdentityResidual};
pub use monitors::{
    prodi_serrin_r, update_monitors, MonitorAccumulators, MonitorValues, DEFAULT_SERRIN_S,
};

/// `sqrt(sum_k |fhat(k)|^2 (1 + |k|^2)^s)` with integer-lattice weights (no `2 pi`).
pub fn sobolev_norm(f: &SpectralField, s: f64) -> f64 {
    sobolev_norm_sq(f, s).sqrt()
}

fn sobolev_norm_sq(f: &SpectralField, s: f64) -> f64 {
    f.weighted_norm_sq(|k| (1.0 + (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64).powf(s))
}

/// Component-wise sum of squared [`sobolev_norm`]s, square-rooted.
pub fn sobolev_norm_vector(v: &VectorField, s: f64) -> f64 {
    v.iter().map(|c| sobolev_norm_sq(c, s)).sum::<f64>().sqrt()
}

/// `(sum_j |f(x_j)|^p / N^3)^(1/p)`; `p = inf` gives the grid maximum.
pub fn lp_norm(domain: &Domain, f: &SpectralField, p: f64) -> Result<f64> {
    domain.check_field(f)?;
    lp_norm_grid(&domain.to_grid(f), p)
}

pub fn lp_norm_grid(grid: &[f64], p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(MhdError::OutOfRange(format!("Lebesgue exponent must be >= 1, got {p}")));
    }
    if grid.is_empty() {
        return Ok(0.0);
    }
    if p.is_infinite() {
        return Ok(grid.iter().fold(0.0f64, |m, x| m.max(x.abs())));
    }
    let sum = compensated_sum(grid.iter().map(|x| x.abs().powf(p)));
    Ok((sum / grid.len() as f64).powf(1.0 / p))
}

/// Neumaier summation.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for x in values {
        let t = sum + x;
        c += if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
        sum = t;
    }
    sum + c
}

/// One time-sample of every monitored scalar.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    /// `(|u|^2 + |b|^2 + |theta|^2) / 2`.
    pub energy: f64,
    /// `nu |grad u|^2 + eta |grad b|^2 + kappa |grad theta|^2`.
    pub dissipation: f64,
    /// `g <theta, u3>`.
    pub buoyancy_flux: f64,
    /// `|grad u|^2 + |grad b|^2 + |grad theta|^2`.
    pub gradient_sum: f64,
    pub h1_u: f64,
    pub h2_u: f64,
    pub h3_u: f64,
    pub h1_b: f64,
    pub h2_b: f64,
    pub h3_b: f64,
    pub h1_theta: f64,
    pub h2_theta: f64,
    pub h3_theta: f64,
    pub theta_min: f64,
    pub theta_max: f64,
    pub theta_l2: f64,
    pub div_u: f64,
    pub div_b: f64,
    pub monitors: MonitorValues,
}

impl DiagnosticsRecord {
    /// Column names in CSV order.
    pub const COLUMNS: [&'static str; 25] = [
        "t",
        "energy",
        "dissipation",
        "buoyancy_flux",
        "gradient_sum",
        "h1_u",
        "h2_u",
        "h3_u",
        "h1_b",
        "h2_b",
        "h3_b",
        "h1_theta",
        "h2_theta",
        "h3_theta",
        "theta_min",
        "theta_max",
        "theta_l2",
        "div_u",
        "div_b",
        "J2",
        "L2",
        "ps_u2",
        "ps_u3",
        "ps_b2",
        "ps_b3",
    ];

    pub fn values(&self) -> [f64; 25] {
        let m = &self.monitors;
        [
            self.t,
            self.energy,
            self.dissipation,
            self.buoyancy_flux,
            self.gradient_sum,
            self.h1_u,
            self.h2_u,
            self.h3_u,
            self.h1_b,
            self.h2_b,
            self.h3_b,
            self.h1_theta,
            self.h2_theta,
            self.h3_theta,
            self.theta_min,
            self.theta_max,
            self.theta_l2,
            self.div_u,
            self.div_b,
            m.j2,
            m.l2,
            m.ps_u2,
            m.ps_u3,
            m.ps_b2,
            m.ps_b3,
        ]
    }

    pub fn from_values(v: &[f64; 25]) -> Self {
        DiagnosticsRecord {
            t: v[0],
            energy: v[1],
            dissipation: v[2],
            buoyancy_flux: v[3],
            gradient_sum: v[4],
            h1_u: v[5],
            h2_u: v[6],
            h3_u: v[7],
            h1_b: v[8],
            h2_b: v[9],
            h3_b: v[10],
            h1_theta: v[11],
            h2_theta: v[12],
            h3_theta: v[13],
            theta_min: v[14],
            theta_max: v[15],
            theta_l2: v[16],
            div_u: v[17],
            div_b: v[18],
            monitors: MonitorValues {
                j2: v[19],
                l2: v[20],
                ps_u2: v[21],
                ps_u3: v[22],
                ps_b2: v[23],
                ps_b3: v[24],
            },
        }
    }
}

fn vector_gradient_sq(v: &VectorField) -> f64 {
    v.iter().map(gradient_norm_sq).sum()
}

/// Evaluate all state diagnostics at `state.t`. Monitor columns are left at zero.
pub fn record(domain: &Domain, state: &State, params: &Params) -> Result<DiagnosticsRecord> {
    domain.check_vector(&state.u)?;
    domain.check_vector(&state.b)?;
    domain.check_field(&state.theta)?;
    let (u, b, th) = (&state.u, &state.b, &state.theta);
    let gu = vector_gradient_sq(u);
    let gb = vector_gradient_sq(b);
    let gt = gradient_norm_sq(th);
    let theta_grid = domain.to_grid(th);
    let (theta_min, theta_max) = theta_grid
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    Ok(DiagnosticsRecord {
        t: state.t,
        energy: 0.5 * (u.norm_sq() + b.norm_sq() + th.norm_sq()),
        dissipation: params.nu * gu + params.eta * gb + params.kappa * gt,
        buoyancy_flux: params.g * th.inner(&u[2]),
        gradient_sum: gu + gb + gt,
        h1_u: sobolev_norm_vector(u, 1.0),
        h2_u: sobolev_norm_vector(u, 2.0),
        h3_u: sobolev_norm_vector(u, 3.0),
        h1_b: sobolev_norm_vector(b, 1.0),
        h2_b: sobolev_norm_vector(b, 2.0),
        h3_b: sobolev_norm_vector(b, 3.0),
        h1_theta: sobolev_norm(th, 1.0),
        h2_theta: sobolev_norm(th, 2.0),
        h3_theta: sobolev_norm(th, 3.0),
        theta_min,
        theta_max,
        theta_l2: th.norm_sq().sqrt(),
        div_u: divergence_residual(u),
        div_b: divergence_residual(b),
        monitors: MonitorValues::default(),
    })
}

fn uniform_spacing(history: &[DiagnosticsRecord]) -> Result<f64> {
    let dt = history[1].t - history[0].t;
    if !(dt > 0.0) {
        return Err(MhdError::config("history", "sample times must increase"));
    }
    for w in history.windows(2) {
        let d = w[1].t - w[0].t;
        if (d - dt).abs() > 1e-9 * dt.max(1.0) {
            return Err(MhdError::config(
                "history",
                format!("non-uniform sample spacing ({d} vs {dt})"),
            ));
        }
    }
    Ok(dt)
}

/// `dE/dt - (buoyancy_flux - dissipation)` at each interior sample, with `dE/dt`
/// by central differences.
pub fn energy_balance_residual(history: &[DiagnosticsRecord]) -> Result<Vec<f64>> {
    if history.len() < 3 {
        return Err(MhdError::config("history", "need at least 3 records"));
    }
    let dt = uniform_spacing(history)?;
    Ok(history
        .windows(3)
        .map(|w| {
            let de = (w[2].energy - w[0].energy) / (2.0 * dt);
            de - (w[1].buoyancy_flux - w[1].dissipation)
        })
        .collect())
}

/// Drift of the temperature over a trajectory window.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThetaDrift {
    /// `max_t | |theta(t)|_2 - |theta(0)|_2 | / |theta(0)|_2`.
    pub l2_relative_drift: f64,
    /// `max_t |theta_min(t) - theta_min(0)|`, relative to `max |theta(0)|`.
    pub min_relative_drift: f64,
    pub max_relative_drift: f64,
    /// Whether `|theta|_2` never increased by more than round-off between samples.
    pub l2_nonincreasing: bool,
}

pub fn theta_conservation(history: &[DiagnosticsRecord]) -> Result<ThetaDrift> {
    let first = history
        .first()
        .ok_or_else(|| MhdError::Precondition("empty history".into()))?;
    let rel = |x: f64, scale: f64| if scale > 0.0 { x / scale } else { x };
    let amp = first.theta_min.abs().max(first.theta_max.abs());
    let mut drift = ThetaDrift {
        l2_relative_drift: 0.0,
        min_relative_drift: 0.0,
        max_relative_drift: 0.0,
        l2_nonincreasing: true,
    };
    for r in history {
        drift.l2_relative_drift = drift
            .l2_relative_drift
            .max(rel((r.theta_l2 - first.theta_l2).abs(), first.theta_l2));
        drift.min_relative_drift = drift
            .min_relative_drift
            .max(rel((r.theta_min - first.theta_min).abs(), amp));
        drift.max_relative_drift = drift
            .max_relative_drift
            .max(rel((r.theta_max - first.theta_max).abs(), amp));
    }
    drift.l2_nonincreasing = history
        .windows(2)
        .all(|w| w[1].theta_l2 <= w[0].theta_l2 * (1.0 + 1e-12) + 1e-300);
    Ok(drift)
}

/// `4 pi^2` times the given integer weight: helper for anisotropic norms.
pub(crate) fn derivative_weight(k: [i64; 3], axes: &[usize]) -> f64 {
    axes.iter().map(|&a| (k[a] * k[a]) as f64).sum::<f64>() * 4.0 * PI * PI
}
