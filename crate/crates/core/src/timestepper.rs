//! Fourth-order integrating-factor Runge-Kutta (Lawson RK4).
//!
//! Diffusion `-4 pi^2 |k|^2 (nu, eta, kappa)` is integrated exactly through the
//! factors `exp(L h)`; classical RK4 is applied to the transformed variables.

use std::f64::consts::PI;

use crate::dynamics::{rhs_with_speed, Params, State, Tendency};
use crate::error::{MhdError, Result};
use crate::spectral::{
    divergence_residual, gradient_norm_sq, leray_project, wavevector_at, Domain, SpectralField,
    VectorField,
};

/// Per-step health figures.
#[derive(Clone, Debug, PartialEq)]
pub struct StepReport {
    pub t_new: f64,
    /// Advective Courant number `dt * max(|u| + |b|) * N` at the start of the step.
    pub cfl_number: f64,
    /// Largest of the relative divergence residuals of `u` and `b` after re-projection.
    pub max_divergence_residual: f64,
    /// Set when the new state is non-finite or `|grad u|_2` exceeds the ceiling.
    pub blowup_flag: bool,
}

/// `exp(-4 pi^2 |k|^2 c h)` for the three diffusivities at one step length.
#[derive(Clone, Debug)]
struct Factors {
    u: Vec<f64>,
    b: Vec<f64>,
    theta: Vec<f64>,
}

impl Factors {
    fn new(n: usize, params: &Params, h: f64) -> Self {
        let len = n * n * n;
        let table = |c: f64| -> Vec<f64> {
            (0..len)
                .map(|idx| {
                    let k = wavevector_at(idx, n);
                    let k2 = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
                    (-4.0 * PI * PI * k2 * c * h).exp()
                })
                .collect()
        };
        Factors {
            u: table(params.nu),
            b: table(params.eta),
            theta: table(params.kappa),
        }
    }
}

fn apply_scalar(f: &mut SpectralField, e: &[f64]) {
    f.coeffs_mut().iter_mut().zip(e).for_each(|(c, &w)| *c *= w);
}

fn apply_vector(v: &mut VectorField, e: &[f64]) {
    v.components.iter_mut().for_each(|c| apply_scalar(c, e));
}

/// Fields of a state or tendency, manipulated together.
#[derive(Clone)]
struct Bundle {
    u: VectorField,
    b: VectorField,
    theta: SpectralField,
}

impl Bundle {
    fn of_state(s: &State) -> Self {
        Bundle {
            u: s.u.clone(),
            b: s.b.clone(),
            theta: s.theta.clone(),
        }
    }

    fn of_tendency(t: Tendency) -> Self {
        Bundle {
            u: t.du,
            b: t.db,
            theta: t.dtheta,
        }
    }

    fn axpy(&mut self, a: f64, x: &Bundle) {
        self.u.axpy(a, &x.u);
        self.b.axpy(a, &x.b);
        self.theta.axpy(a, &x.theta);
    }

    fn apply(&mut self, e: &Factors) {
        apply_vector(&mut self.u, &e.u);
        apply_vector(&mut self.b, &e.b);
        apply_scalar(&mut self.theta, &e.theta);
    }

    fn into_state(self, t: f64) -> State {
        State {
            u: self.u,
            b: self.b,
            theta: self.theta,
            t,
        }
    }
}

/// Fixed-step integrator with cached integrating factors.
#[derive(Clone, Debug)]
pub struct Stepper {
    domain: Domain,
    params: Params,
    half: Factors,
    full: Factors,
}

impl Stepper {
    pub fn new(params: &Params) -> Result<Self> {
        let domain = params.domain()?;
        Ok(Self::with_domain(domain, params.clone()))
    }

    pub fn with_domain(domain: Domain, params: Params) -> Self {
        let n = domain.n();
        Stepper {
            half: Factors::new(n, &params, 0.5 * params.dt),
            full: Factors::new(n, &params, params.dt),
            domain,
            params,
        }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn step(&self, state: &State) -> Result<(State, StepReport)> {
        let h = self.params.dt;
        if !(h > 0.0) {
            return Err(MhdError::config("dt", format!("must be > 0, got {h}")));
        }
        let (d, p) = (&self.domain, &self.params);
        let x = Bundle::of_state(state);
        let t = state.t;
        let eval = |b: &Bundle, tt: f64| -> Result<(Bundle, f64)> {
            let s = b.clone().into_state(tt);
            let (k, speed) = rhs_with_speed(d, &s, p)?;
            Ok((Bundle::of_tendency(k), speed))
        };

        let (k1, speed) = eval(&x, t)?;

        let mut x2 = x.clone();
        x2.axpy(0.5 * h, &k1);
        x2.apply(&self.half);
        let (k2, _) = eval(&x2, t + 0.5 * h)?;

        let mut x3 = x.clone();
        x3.apply(&self.half);
        x3.axpy(0.5 * h, &k2);
        let (k3, _) = eval(&x3, t + 0.5 * h)?;

        let mut x4 = x.clone();
        x4.apply(&self.full);
        let mut c = k3.clone();
        c.apply(&self.half);
        x4.axpy(h, &c);
        let (k4, _) = eval(&x4, t + h)?;

        // E_h (x + h/6 k1) + E_{h/2} (h/3 (k2 + k3)) + h/6 k4
        let mut next = x;
        next.axpy(h / 6.0, &k1);
        next.apply(&self.full);
        let mut mid = k2;
        mid.axpy(1.0, &k3);
        mid.apply(&self.half);
        next.axpy(h / 3.0, &mid);
        next.axpy(h / 6.0, &k4);

        next.u = leray_project(&next.u);
        next.b = leray_project(&next.b);
        let t_new = t + h;
        let state = next.into_state(t_new);

        let grad_u = state.u.iter().map(gradient_norm_sq).sum::<f64>().sqrt();
        let report = StepReport {
            t_new,
            cfl_number: h * speed * d.n() as f64,
            max_divergence_residual: divergence_residual(&state.u).max(divergence_residual(&state.b)),
            blowup_flag: !state.is_finite() || !(grad_u <= p.blowup_ceiling),
        };
        Ok((state, report))
    }
}

/// Advance `state` by one step of `params.dt`.
pub fn step(state: &State, params: &Params) -> Result<(State, StepReport)> {
    if !(params.dt > 0.0) {
        return Err(MhdError::config("dt", format!("must be > 0, got {}", params.dt)));
    }
    Stepper::new(params)?.step(state)
}

/// Advective time step `safety * (1/N) / max_x(|u| + |b|)`, capped by the time
/// remaining until `t_end`. Quiescent fields get the remaining time.
pub fn cfl_dt(domain: &Domain, state: &State, params: &Params, safety: f64) -> Result<f64> {
    if !(safety > 0.0 && safety <= 1.0) {
        return Err(MhdError::config("safety", format!("must lie in (0, 1], got {safety}")));
    }
    let remaining = (params.t_end - state.t).max(0.0);
    let u = domain.vector_to_grid(&state.u);
    let b = domain.vector_to_grid(&state.b);
    let mut max_speed = 0.0f64;
    for i in 0..domain.grid_len() {
        let su = (u[0][i] * u[0][i] + u[1][i] * u[1][i] + u[2][i] * u[2][i]).sqrt();
        let sb = (b[0][i] * b[0][i] + b[1][i] * b[1][i] + b[2][i] * b[2][i]).sqrt();
        max_speed = max_speed.max(su + sb);
    }
    if max_speed == 0.0 {
        return Ok(remaining);
    }
    Ok((safety * domain.spacing() / max_speed).min(remaining))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn pure_diffusion_decays_exactly() {
        let mut p = Params::new(8);
        p.nu = 0.1;
        p.kappa = 0.05;
        p.dt = 0.01;
        let mut s = State::zeros(8);
        s.theta.set_hermitian([1, 0, 0], Complex64::new(0.5, 0.0));
        let (next, report) = step(&s, &p).unwrap();
        let expected = 0.5 * (-4.0 * PI * PI * 0.05 * 0.01f64).exp();
        assert!((next.theta.get([1, 0, 0]).re - expected).abs() < 1e-15);
        assert_eq!(report.cfl_number, 0.0);
        assert!(!report.blowup_flag);
    }

    #[test]
    fn zero_state_is_a_fixed_point() {
        let p = Params::new(8);
        let (next, _) = step(&State::zeros(8), &p).unwrap();
        assert_eq!(next.u, VectorField::zeros(8));
        assert_eq!(next.theta, SpectralField::zeros(8));
        assert!((next.t - p.dt).abs() < 1e-18);
    }

    #[test]
    fn non_positive_dt_is_rejected() {
        let mut p = Params::new(8);
        p.dt = 0.0;
        assert!(step(&State::zeros(8), &p).is_err());
    }

    #[test]
    fn cfl_examples() {
        let d = Domain::new(16).unwrap();
        let mut p = Params::new(16);
        p.t_end = 10.0;
        assert_eq!(cfl_dt(&d, &State::zeros(16), &p, 0.5).unwrap(), 10.0);
        let mut s = State::zeros(16);
        // u1 = 2 cos(2 pi x2): max speed 2
        s.u[0].set_hermitian([0, 1, 0], Complex64::new(1.0, 0.0));
        let dt = cfl_dt(&d, &s, &p, 0.5).unwrap();
        assert!((dt - 0.5 / 16.0 / 2.0).abs() < 1e-15);
        assert!(cfl_dt(&d, &s, &p, 0.0).is_err());
        assert!(cfl_dt(&d, &s, &p, 1.5).is_err());
    }
}
