#![allow(dead_code)]

use mhdb::dynamics::State;
use mhdb::spectral::{leray_project, Domain, SpectralField, VectorField};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random real field with independent uniform coefficients inside `|k_i| <= m`.
pub fn random_scalar(n: usize, m: i64, rng: &mut ChaCha8Rng) -> SpectralField {
    let mut f = SpectralField::zeros(n);
    for k1 in -m..=m {
        for k2 in -m..=m {
            for k3 in -m..=m {
                let k = [k1, k2, k3];
                let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                f.set(k, c);
            }
        }
    }
    // Hermitian part
    let mut g = f.clone();
    for k1 in -m..=m {
        for k2 in -m..=m {
            for k3 in -m..=m {
                let k = [k1, k2, k3];
                g.set(k, (f.get(k) + f.get([-k1, -k2, -k3]).conj()) * 0.5);
            }
        }
    }
    g
}

/// Random zero-mean divergence-free field inside `|k_i| <= m`.
pub fn random_solenoidal(n: usize, m: i64, rng: &mut ChaCha8Rng) -> VectorField {
    let mut v = VectorField {
        components: [0, 1, 2].map(|_| random_scalar(n, m, rng)),
    };
    for c in v.components.iter_mut() {
        c.set([0, 0, 0], Complex64::new(0.0, 0.0));
    }
    leray_project(&v)
}

pub fn random_state(domain: &Domain, rng: &mut ChaCha8Rng) -> State {
    let (n, m) = (domain.n(), domain.cutoff() as i64);
    State {
        u: random_solenoidal(n, m, rng),
        b: random_solenoidal(n, m, rng),
        theta: random_scalar(n, m, rng),
        t: 0.0,
    }
}

pub fn grad_norm(v: &VectorField) -> f64 {
    v.iter().map(mhdb::spectral::gradient_norm_sq).sum::<f64>().sqrt()
}

pub fn norm(v: &VectorField) -> f64 {
    v.norm_sq().sqrt()
}
