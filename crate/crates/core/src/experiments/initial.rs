use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::State;
use crate::error::{MhdError, Result};
use crate::spectral::{cube_norm, leray_project, Domain, SpectralField, VectorField, Wavevector};

/// Named initial-data families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// `u = A (sin x cos y cos z, -cos x sin y cos z, 0)`, `b = 0`.
    TaylorGreen,
    /// `u = A (-sin y, sin z, sin x)`, `b = A (cos z, cos x, cos y)`, arguments scaled by `2 pi`.
    MhdVortex,
    /// Random phases with amplitudes `(1 + |k|^2)^(-sigma/2)`, projected and normalized.
    RandomSobolev,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::TaylorGreen => "taylor-green",
            Preset::MhdVortex => "mhd-vortex",
            Preset::RandomSobolev => "random-sobolev",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = MhdError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "taylor-green" => Ok(Preset::TaylorGreen),
            "mhd-vortex" => Ok(Preset::MhdVortex),
            "random-sobolev" => Ok(Preset::RandomSobolev),
            other => Err(MhdError::config(
                "preset",
                format!("unknown preset `{other}` (expected taylor-green, mhd-vortex or random-sobolev)"),
            )),
        }
    }
}

/// Initial-condition recipe.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialCondition {
    pub preset: Preset,
    /// Velocity (and magnetic) amplitude. For `random-sobolev` it is the L2 norm.
    pub amplitude: f64,
    /// Decay exponent of `random-sobolev` spectra.
    pub sigma: f64,
    /// Temperature amplitude: `theta = a sin(2 pi x1) cos(2 pi x2)` for the analytic
    /// presets, L2 norm of a random field for `random-sobolev`.
    pub theta_amplitude: f64,
}

impl InitialCondition {
    pub fn new(preset: Preset, amplitude: f64) -> Self {
        InitialCondition {
            preset,
            amplitude,
            sigma: 4.0,
            theta_amplitude: 0.0,
        }
    }

    pub fn with_theta(mut self, theta_amplitude: f64) -> Self {
        self.theta_amplitude = theta_amplitude;
        self
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = sigma;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.amplitude.is_finite() {
            return Err(MhdError::config("amplitude", "must be finite"));
        }
        if !self.theta_amplitude.is_finite() {
            return Err(MhdError::config("theta_amplitude", "must be finite"));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(MhdError::config("sigma", "must be finite and >= 0"));
        }
        Ok(())
    }
}

/// Build a state satisfying every invariant: inside the cutoff, solenoidal,
/// zero-mean `u` and `b`, Hermitian. `random-sobolev` depends only on `seed`.
pub fn make_initial_condition(domain: &Domain, spec: &InitialCondition, seed: u64) -> Result<State> {
    spec.validate()?;
    let a = spec.amplitude;
    let ta = spec.theta_amplitude;
    let tp = 2.0 * PI;
    let (u, b, theta) = match spec.preset {
        Preset::TaylorGreen => {
            let u = sample_vector(
                domain,
                |x| a * (tp * x[0]).sin() * (tp * x[1]).cos() * (tp * x[2]).cos(),
                |x| -a * (tp * x[0]).cos() * (tp * x[1]).sin() * (tp * x[2]).cos(),
                |_| 0.0,
            );
            (u, VectorField::zeros(domain.n()), analytic_theta(domain, ta))
        }
        Preset::MhdVortex => {
            let u = sample_vector(
                domain,
                |x| -a * (tp * x[1]).sin(),
                |x| a * (tp * x[2]).sin(),
                |x| a * (tp * x[0]).sin(),
            );
            let b = sample_vector(
                domain,
                |x| a * (tp * x[2]).cos(),
                |x| a * (tp * x[0]).cos(),
                |x| a * (tp * x[1]).cos(),
            );
            (u, b, analytic_theta(domain, ta))
        }
        Preset::RandomSobolev => {
            let u = random_solenoidal(domain, spec.sigma, seed, 0, a);
            let b = random_solenoidal(domain, spec.sigma, seed, 3, a);
            let mut th = random_scalar(domain, spec.sigma, seed, 6);
            normalize(&mut th, ta);
            (u, b, th)
        }
    };
    Ok(State {
        u: finish_vector(domain, u),
        b: finish_vector(domain, b),
        theta: domain.truncate(&theta),
        t: 0.0,
    })
}

fn sample_vector(
    domain: &Domain,
    f1: impl Fn([f64; 3]) -> f64 + Sync,
    f2: impl Fn([f64; 3]) -> f64 + Sync,
    f3: impl Fn([f64; 3]) -> f64 + Sync,
) -> VectorField {
    VectorField {
        components: [
            domain.from_grid(&domain.sample(f1)),
            domain.from_grid(&domain.sample(f2)),
            domain.from_grid(&domain.sample(f3)),
        ],
    }
}

fn analytic_theta(domain: &Domain, ta: f64) -> SpectralField {
    let tp = 2.0 * PI;
    domain.from_grid(&domain.sample(|x| ta * (tp * x[0]).sin() * (tp * x[1]).cos()))
}

/// Truncate, zero the mean, project.
fn finish_vector(domain: &Domain, v: VectorField) -> VectorField {
    let mut v = v.map(|c| domain.truncate(c));
    for c in v.components.iter_mut() {
        c.coeffs_mut()[0] = Complex64::new(0.0, 0.0);
    }
    leray_project(&v)
}

/// Whether `k` is the representative of the pair `{k, -k}` (first nonzero entry positive).
fn canonical(k: Wavevector) -> bool {
    k.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0)
}

fn mode_seed(seed: u64, field: u64, k: Wavevector) -> u64 {
    // splitmix64 over the packed inputs
    let mut z = seed ^ field.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    for ki in k {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_add(ki as u64);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    z
}

/// Random-phase scalar inside the cutoff with `|fhat(k)| = (1 + |k|^2)^(-sigma/2)`.
/// The phase at `k` depends only on `(seed, field, k)`, not on the grid.
pub(crate) fn random_scalar(domain: &Domain, sigma: f64, seed: u64, field: u64) -> SpectralField {
    let m = domain.cutoff() as i64;
    let mut f = SpectralField::zeros(domain.n());
    for k1 in -m..=m {
        for k2 in -m..=m {
            for k3 in -m..=m {
                let k = [k1, k2, k3];
                if !canonical(k) || cube_norm(k) > m {
                    continue;
                }
                let mut rng = ChaCha8Rng::seed_from_u64(mode_seed(seed, field, k));
                let phase: f64 = rng.gen_range(0.0..(2.0 * PI));
                let k2n = (k1 * k1 + k2 * k2 + k3 * k3) as f64;
                let mag = (1.0 + k2n).powf(-0.5 * sigma);
                f.set_hermitian(k, Complex64::from_polar(mag, phase));
            }
        }
    }
    f
}

fn normalize(f: &mut SpectralField, target: f64) {
    let norm = f.norm_sq().sqrt();
    if norm > 0.0 {
        f.scale(target / norm);
    }
}

/// Projected random vector field with L2 norm `amplitude`.
pub(crate) fn random_solenoidal(domain: &Domain, sigma: f64, seed: u64, first_field: u64, amplitude: f64) -> VectorField {
    let v = VectorField {
        components: [0, 1, 2].map(|i| random_scalar(domain, sigma, seed, first_field + i)),
    };
    let mut v = leray_project(&v);
    let norm = v.norm_sq().sqrt();
    if norm > 0.0 {
        v.scale(amplitude / norm);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::divergence_residual;

    #[test]
    fn zero_amplitude_taylor_green_is_zero() {
        let d = Domain::new(16).unwrap();
        let s = make_initial_condition(&d, &InitialCondition::new(Preset::TaylorGreen, 0.0), 1).unwrap();
        assert_eq!(s, State::zeros(16));
    }

    #[test]
    fn presets_satisfy_invariants() {
        let d = Domain::new(16).unwrap();
        for p in [Preset::TaylorGreen, Preset::MhdVortex, Preset::RandomSobolev] {
            let spec = InitialCondition::new(p, 0.7).with_theta(0.3);
            let s = make_initial_condition(&d, &spec, 42).unwrap();
            s.validate(&d).unwrap();
            assert!(divergence_residual(&s.u) <= 1e-12);
            assert!(divergence_residual(&s.b) <= 1e-12);
            for c in s.u.iter().chain(s.b.iter()) {
                assert_eq!(c.coeffs()[0], Complex64::new(0.0, 0.0));
            }
            assert!(s.u.norm_sq() > 0.0 && s.theta.norm_sq() > 0.0);
        }
    }

    #[test]
    fn random_preset_is_deterministic_and_grid_independent() {
        let spec = InitialCondition::new(Preset::RandomSobolev, 1.0).with_theta(0.5);
        let d = Domain::with_cutoff(16, 4).unwrap();
        let a = make_initial_condition(&d, &spec, 7).unwrap();
        let b = make_initial_condition(&d, &spec, 7).unwrap();
        let bits = |s: &State| -> Vec<u64> {
            s.u.iter()
                .chain(s.b.iter())
                .chain(std::iter::once(&s.theta))
                .flat_map(|f| f.coeffs().iter().flat_map(|c| [c.re.to_bits(), c.im.to_bits()]))
                .collect()
        };
        assert_eq!(bits(&a), bits(&b));
        let other = make_initial_condition(&d, &spec, 8).unwrap();
        assert_ne!(bits(&a), bits(&other));
        let wide = make_initial_condition(&Domain::with_cutoff(32, 4).unwrap(), &spec, 7).unwrap();
        assert_eq!(wide.u.resampled(16), a.u);
        assert!((a.u.norm_sq().sqrt() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn unknown_preset_names_the_key() {
        match "lorenz".parse::<Preset>() {
            Err(MhdError::Config { key, .. }) => assert_eq!(key, "preset"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
