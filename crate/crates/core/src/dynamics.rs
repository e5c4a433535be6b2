//! Right-hand side of the Galerkin-truncated MHD-Boussinesq system.
//!
//! ```text
//! du/dt = nu Lap u - P(u.grad u) + P(b.grad b) + g P(theta e3)
//! db/dt = eta Lap b - P(u.grad b) + P(b.grad u)
//! dtheta/dt = kappa Lap theta - u.grad theta
//! ```
//!
//! `P` is the Leray projection composed with the cutoff `M`. The diffusion
//! terms are not part of [`Tendency`]; the time stepper applies them exactly.
//! Setting `kappa = 0` gives the non-diffusive system and `nu = eta = kappa = 0`
//! the inviscid one.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{MhdError, Result};
use crate::par;
use crate::spectral::{
    conjugate_slot, cube_norm, dealias_cutoff, divergence_residual, gradient, gradient_norm_sq,
    leray_project, project_mode, split_at, wavevector_at, Domain, SpectralField, VectorField,
};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Default `|grad u|_2` above which a run is declared blown up.
pub const DEFAULT_BLOWUP_CEILING: f64 = 1e6;

/// Physical and numerical constants of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    /// Kinematic viscosity.
    pub nu: f64,
    /// Magnetic diffusivity.
    pub eta: f64,
    /// Thermal diffusivity.
    pub kappa: f64,
    /// Buoyancy constant.
    pub g: f64,
    /// Grid points per axis.
    pub n: usize,
    /// Galerkin cutoff `M`, at most `dealias_cutoff(n)`.
    pub cutoff: usize,
    pub dt: f64,
    pub t_end: f64,
    pub seed: u64,
    pub blowup_ceiling: f64,
}

impl Params {
    /// Inviscid, non-buoyant defaults on an `n`-point grid with the largest cutoff.
    pub fn new(n: usize) -> Self {
        Params {
            nu: 0.0,
            eta: 0.0,
            kappa: 0.0,
            g: 0.0,
            n,
            cutoff: dealias_cutoff(n),
            dt: 1e-3,
            t_end: 1.0,
            seed: 0,
            blowup_ceiling: DEFAULT_BLOWUP_CEILING,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (key, v) in [("nu", self.nu), ("eta", self.eta), ("kappa", self.kappa), ("g", self.g)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(MhdError::config(key, format!("must be finite and >= 0, got {v}")));
            }
        }
        if self.n < 2 || self.n % 2 != 0 {
            return Err(MhdError::config("n", format!("must be an even positive integer, got {}", self.n)));
        }
        let max = dealias_cutoff(self.n);
        if self.cutoff > max {
            return Err(MhdError::config(
                "cutoff",
                format!("{} exceeds the dealiased limit {max} for n = {}", self.cutoff, self.n),
            ));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(MhdError::config("dt", format!("must be > 0, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(MhdError::config("t_end", format!("must be >= 0, got {}", self.t_end)));
        }
        if !(self.blowup_ceiling > 0.0) {
            return Err(MhdError::config("blowup_ceiling", "must be > 0"));
        }
        Ok(())
    }

    pub fn domain(&self) -> Result<Domain> {
        self.validate()?;
        Domain::with_cutoff(self.n, self.cutoff)
    }
}

/// Velocity, magnetic field, temperature fluctuation and clock.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    pub u: VectorField,
    pub b: VectorField,
    pub theta: SpectralField,
    pub t: f64,
}

impl State {
    pub fn zeros(n: usize) -> Self {
        State {
            u: VectorField::zeros(n),
            b: VectorField::zeros(n),
            theta: SpectralField::zeros(n),
            t: 0.0,
        }
    }

    pub fn n(&self) -> usize {
        self.theta.n()
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.b.is_finite() && self.theta.is_finite() && self.t.is_finite()
    }

    /// Check resolution, support inside the cutoff, zero mean and solenoidality
    /// of `u` and `b`, and Hermitian symmetry.
    pub fn validate(&self, domain: &Domain) -> Result<()> {
        domain.check_vector(&self.u)?;
        domain.check_vector(&self.b)?;
        domain.check_field(&self.theta)?;
        let m = domain.cutoff() as i64;
        let fields = self.u.iter().chain(self.b.iter()).chain(std::iter::once(&self.theta));
        for (i, f) in fields.enumerate() {
            if f.support_radius().is_some_and(|r| r > m) {
                return Err(MhdError::Precondition(format!("field {i} has modes beyond the cutoff {m}")));
            }
            if f.hermitian_defect() > crate::spectral::HERMITIAN_TOLERANCE {
                return Err(MhdError::DataCorruption(format!("field {i} is not Hermitian")));
            }
            if i < 6 && f.coeffs()[0].norm() > 1e-12 * f.max_abs().max(f64::MIN_POSITIVE) {
                return Err(MhdError::Precondition(format!("vector component {i} has nonzero mean")));
            }
        }
        for (name, v) in [("u", &self.u), ("b", &self.b)] {
            let r = divergence_residual(v);
            if r > 1e-10 {
                return Err(MhdError::Precondition(format!("{name} is not divergence-free (residual {r:e})")));
            }
        }
        Ok(())
    }

    /// `sqrt(|u - v|^2 + |b - c|^2 + |theta - phi|^2)` in L2.
    pub fn l2_distance(&self, other: &State) -> f64 {
        let du = self.u.sub(&other.u).norm_sq();
        let db = self.b.sub(&other.b).norm_sq();
        let dth = self.theta.sub(&other.theta).norm_sq();
        (du + db + dth).sqrt()
    }

    pub(crate) fn blowup(&self) -> MhdError {
        MhdError::BlowUp {
            t: self.t,
            grad_u_norm: self.u.iter().map(gradient_norm_sq).sum::<f64>().sqrt(),
            grad_b_norm: self.b.iter().map(gradient_norm_sq).sum::<f64>().sqrt(),
        }
    }
}

/// Nonlinear and buoyancy part of the time derivative.
#[derive(Clone, Debug, PartialEq)]
pub struct Tendency {
    pub du: VectorField,
    pub db: VectorField,
    pub dtheta: SpectralField,
}

fn check_pair(domain: &Domain, u: &VectorField, v: &VectorField) -> Result<()> {
    domain.check_vector(u)?;
    domain.check_vector(v)
}

fn restrict(domain: &Domain, v: &VectorField) -> VectorField {
    v.map(|c| domain.truncate(c))
}

/// `P_sigma P_M ((u . grad) v)` evaluated pseudo-spectrally.
///
/// Both inputs are first restricted to the cutoff; the product is then an exact
/// truncated convolution because the cutoff is alias-free.
pub fn advect(domain: &Domain, u: &VectorField, v: &VectorField) -> Result<VectorField> {
    check_pair(domain, u, v)?;
    let ug = domain.vector_to_grid(&restrict(domain, u));
    let v = restrict(domain, v);
    let len = domain.grid_len();
    let sums: Vec<Vec<f64>> = (0..3)
        .map(|k| {
            let dg = domain.vector_to_grid(&gradient(&v[k]));
            let mut s = vec![0.0; len];
            par::fill(&mut s, |i| ug[0][i] * dg[0][i] + ug[1][i] * dg[1][i] + ug[2][i] * dg[2][i]);
            s
        })
        .collect();
    let (a, b) = domain.from_grid_pair(&sums[0], &sums[1]);
    let c = domain.from_grid(&sums[2]);
    let out = VectorField {
        components: [domain.truncate(&a), domain.truncate(&b), domain.truncate(&c)],
    };
    Ok(leray_project(&out))
}

/// `P_M (u . grad theta)`; no projection since `theta` is a scalar.
pub fn scalar_advect(domain: &Domain, u: &VectorField, theta: &SpectralField) -> Result<SpectralField> {
    domain.check_vector(u)?;
    domain.check_field(theta)?;
    let ug = domain.vector_to_grid(&restrict(domain, u));
    let dg = domain.vector_to_grid(&gradient(&domain.truncate(theta)));
    let mut s = vec![0.0; domain.grid_len()];
    par::fill(&mut s, |i| ug[0][i] * dg[0][i] + ug[1][i] * dg[1][i] + ug[2][i] * dg[2][i]);
    Ok(domain.truncate(&domain.from_grid(&s)))
}

/// Spectra of the quadratic fluxes, packed two real fields per array:
/// `(T11,T22) (T33,T12) (T13,T23) (W12,W13) (W23,q1) (q2,q3)` with
/// `T = u u - b b`, `W_jk = u_j b_k - b_j u_k` and `q = u theta`.
struct Fluxes {
    packed: [Vec<Complex64>; 6],
    max_speed: f64,
}

fn fluxes(domain: &Domain, state: &State) -> Fluxes {
    let (u0, u1) = domain.to_grid_pair(&state.u[0], &state.u[1]);
    let (u2, b0) = domain.to_grid_pair(&state.u[2], &state.b[0]);
    let (b1, b2) = domain.to_grid_pair(&state.b[1], &state.b[2]);
    let th = domain.to_grid(&state.theta);
    let u = [&u0, &u1, &u2];
    let b = [&b0, &b1, &b2];
    let len = domain.grid_len();

    let tt = |j: usize, k: usize, i: usize| u[j][i] * u[k][i] - b[j][i] * b[k][i];
    let ww = |j: usize, k: usize, i: usize| u[j][i] * b[k][i] - b[j][i] * u[k][i];
    let qq = |j: usize, i: usize| u[j][i] * th[i];

    let pack = |f: &(dyn Fn(usize) -> Complex64 + Sync)| {
        let mut z = vec![ZERO; len];
        par::fill(&mut z, f);
        domain.forward_band(z, Some(domain.cutoff()))
    };
    let packed = [
        pack(&|i| Complex64::new(tt(0, 0, i), tt(1, 1, i))),
        pack(&|i| Complex64::new(tt(2, 2, i), tt(0, 1, i))),
        pack(&|i| Complex64::new(tt(0, 2, i), tt(1, 2, i))),
        pack(&|i| Complex64::new(ww(0, 1, i), ww(0, 2, i))),
        pack(&|i| Complex64::new(ww(1, 2, i), qq(0, i))),
        pack(&|i| Complex64::new(qq(1, i), qq(2, i))),
    ];

    let mut max_speed = 0.0f64;
    for i in 0..len {
        let su = (u0[i] * u0[i] + u1[i] * u1[i] + u2[i] * u2[i]).sqrt();
        let sb = (b0[i] * b0[i] + b1[i] * b1[i] + b2[i] * b2[i]).sqrt();
        max_speed = max_speed.max(su + sb);
    }
    Fluxes { packed, max_speed }
}

/// Unpacked flux spectra at one wavevector: `[T (3x3), W (3x3), q (3)]`.
struct LocalFlux {
    t: [[Complex64; 3]; 3],
    w: [[Complex64; 3]; 3],
    q: [Complex64; 3],
}

impl Fluxes {
    fn at(&self, idx: usize, n: usize) -> LocalFlux {
        let c = conjugate_slot(idx, n);
        let [t11, t22] = split_at(&self.packed[0], idx, c);
        let [t33, t12] = split_at(&self.packed[1], idx, c);
        let [t13, t23] = split_at(&self.packed[2], idx, c);
        let [w12, w13] = split_at(&self.packed[3], idx, c);
        let [w23, q1] = split_at(&self.packed[4], idx, c);
        let [q2, q3] = split_at(&self.packed[5], idx, c);
        LocalFlux {
            t: [[t11, t12, t13], [t12, t22, t23], [t13, t23, t33]],
            w: [[ZERO, w12, w13], [-w12, ZERO, w23], [-w13, -w23, ZERO]],
            q: [q1, q2, q3],
        }
    }
}

#[inline]
fn ik(k: [i64; 3]) -> [Complex64; 3] {
    k.map(|kj| Complex64::new(0.0, 2.0 * PI * kj as f64))
}

/// Unprojected momentum forcing `-div(T) + g theta e3` at one wavevector.
#[inline]
fn momentum_forcing(f: &LocalFlux, k: [i64; 3], theta: Complex64, g: f64) -> [Complex64; 3] {
    let d = ik(k);
    let mut out = [ZERO; 3];
    for (c, o) in out.iter_mut().enumerate() {
        *o = -(d[0] * f.t[0][c] + d[1] * f.t[1][c] + d[2] * f.t[2][c]);
    }
    out[2] += theta * g;
    out
}

/// Evaluate the tendency, also returning `max_x (|u| + |b|)` from the grid pass.
pub(crate) fn rhs_with_speed(domain: &Domain, state: &State, params: &Params) -> Result<(Tendency, f64)> {
    domain.check_vector(&state.u)?;
    domain.check_vector(&state.b)?;
    domain.check_field(&state.theta)?;
    if !state.is_finite() {
        return Err(state.blowup());
    }
    let n = domain.n();
    let m = domain.cutoff() as i64;
    let fl = fluxes(domain, state);
    let th = state.theta.coeffs();
    let g = params.g;

    let mut buf = vec![[ZERO; 7]; domain.grid_len()];
    par::fill(&mut buf, |idx| {
        let k = wavevector_at(idx, n);
        if cube_norm(k) > m || k == [0, 0, 0] {
            // the mean modes of u and b stay zero; the mean of theta is conserved
            return [ZERO; 7];
        }
        let f = fl.at(idx, n);
        let d = ik(k);
        let du = project_mode(k, momentum_forcing(&f, k, th[idx], g));
        let mut ind = [ZERO; 3];
        for (c, o) in ind.iter_mut().enumerate() {
            *o = -(d[0] * f.w[0][c] + d[1] * f.w[1][c] + d[2] * f.w[2][c]);
        }
        let db = project_mode(k, ind);
        let dth = -(d[0] * f.q[0] + d[1] * f.q[1] + d[2] * f.q[2]);
        [du[0], du[1], du[2], db[0], db[1], db[2], dth]
    });

    let mut out = Tendency {
        du: VectorField::zeros(n),
        db: VectorField::zeros(n),
        dtheta: SpectralField::zeros(n),
    };
    for (idx, w) in buf.into_iter().enumerate() {
        for c in 0..3 {
            out.du[c].coeffs_mut()[idx] = w[c];
            out.db[c].coeffs_mut()[idx] = w[3 + c];
        }
        out.dtheta.coeffs_mut()[idx] = w[6];
    }
    if !(out.du.is_finite() && out.db.is_finite() && out.dtheta.is_finite()) {
        return Err(state.blowup());
    }
    Ok((out, fl.max_speed))
}

/// Time derivative of `(u, b, theta)` excluding diffusion.
///
/// Returns [`MhdError::BlowUp`] if the state or the tendency is not finite.
pub fn rhs(domain: &Domain, state: &State, params: &Params) -> Result<Tendency> {
    rhs_with_speed(domain, state, params).map(|(t, _)| t)
}

/// Pressure `p` with `grad p = F - P_sigma F` where
/// `F = -(u.grad)u + (b.grad)b + g theta e3` is the truncated, unprojected forcing.
/// The mean of `p` is zero.
pub fn pressure_recover(domain: &Domain, state: &State, params: &Params) -> Result<SpectralField> {
    let n = domain.n();
    let m = domain.cutoff() as i64;
    let fl = fluxes(domain, state);
    let th = state.theta.coeffs();
    let mut p = SpectralField::zeros(n);
    par::fill(p.coeffs_mut(), |idx| {
        let k = wavevector_at(idx, n);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if cube_norm(k) > m || k2 == 0 {
            return ZERO;
        }
        let f = momentum_forcing(&fl.at(idx, n), k, th[idx], params.g);
        let kf = f[0] * k[0] as f64 + f[1] * k[1] as f64 + f[2] * k[2] as f64;
        // 2 pi i k p = k (k.F) / |k|^2
        kf * Complex64::new(0.0, -1.0 / (2.0 * PI * k2 as f64))
    });
    Ok(p)
}

/// Truncated, unprojected momentum forcing `F`; exposed for residual checks.
pub fn momentum_forcing_field(domain: &Domain, state: &State, params: &Params) -> VectorField {
    let n = domain.n();
    let m = domain.cutoff() as i64;
    let fl = fluxes(domain, state);
    let th = state.theta.coeffs();
    let mut buf = vec![[ZERO; 3]; domain.grid_len()];
    par::fill(&mut buf, |idx| {
        let k = wavevector_at(idx, n);
        if cube_norm(k) > m {
            return [ZERO; 3];
        }
        momentum_forcing(&fl.at(idx, n), k, th[idx], params.g)
    });
    crate::spectral::scatter(n, buf)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theta_state(d: &Domain, f: impl Fn([f64; 3]) -> f64 + Sync) -> State {
        let mut s = State::zeros(d.n());
        s.theta = d.truncate(&d.forward_transform(&d.sample(f)).unwrap());
        s
    }

    fn buoyant(n: usize) -> Params {
        let mut p = Params::new(n);
        p.g = 2.0;
        p
    }

    #[test]
    fn vertical_stratification_is_a_pressure_gradient() {
        let d = Domain::new(16).unwrap();
        let s = theta_state(&d, |x| (2.0 * PI * x[2]).cos());
        let t = rhs(&d, &s, &buoyant(16)).unwrap();
        assert!(t.du.norm_sq() < 1e-28);
        let p = pressure_recover(&d, &s, &buoyant(16)).unwrap();
        let expected = d.forward_transform(&d.sample(|x| (2.0 / (2.0 * PI)) * (2.0 * PI * x[2]).sin())).unwrap();
        assert!(p.sub(&expected).norm_sq() < 1e-28);
    }

    #[test]
    fn horizontal_gradient_drives_vertical_flow() {
        let d = Domain::new(16).unwrap();
        let s = theta_state(&d, |x| (2.0 * PI * x[0]).cos());
        let t = rhs(&d, &s, &buoyant(16)).unwrap();
        assert!(t.du[0].norm_sq() + t.du[1].norm_sq() < 1e-28);
        assert!(t.du[2].sub(&s.theta.scaled(2.0)).norm_sq() < 1e-28);
        assert!(t.db.norm_sq() == 0.0 && t.dtheta.norm_sq() < 1e-28);
    }

    #[test]
    fn tendency_is_hermitian_and_inside_cutoff() {
        let d = Domain::new(12).unwrap();
        let mut s = State::zeros(12);
        let c = Complex64::new(0.3, -0.7);
        s.u[0].set_hermitian([0, 1, 2], c);
        s.u[1].set_hermitian([1, 0, -1], c);
        s.b[2].set_hermitian([2, -1, 0], c * 0.5);
        s.theta.set_hermitian([1, 1, 1], c);
        s.u = leray_project(&s.u);
        s.b = leray_project(&s.b);
        let t = rhs(&d, &s, &buoyant(12)).unwrap();
        for f in t.du.iter().chain(t.db.iter()).chain(std::iter::once(&t.dtheta)) {
            assert!(f.hermitian_defect() <= 1e-13);
            assert!(f.support_radius().unwrap_or(0) <= d.cutoff() as i64);
        }
        assert!(divergence_residual(&t.du) < 1e-13 && divergence_residual(&t.db) < 1e-13);
    }

    #[test]
    fn non_finite_input_is_blowup() {
        let d = Domain::new(8).unwrap();
        let mut s = State::zeros(8);
        s.theta.coeffs_mut()[1] = Complex64::new(f64::NAN, 0.0);
        assert!(rhs(&d, &s, &Params::new(8)).unwrap_err().is_blowup());
    }
}
