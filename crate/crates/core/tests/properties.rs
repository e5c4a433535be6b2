//! Algebraic properties of the discrete operators on random inputs.

mod common;

use mhdb::dynamics::{advect, rhs, scalar_advect, Params};
use mhdb::spectral::{divergence, divergence_residual, leray_project, Domain};
use proptest::prelude::*;

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 12,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn trilinear_form_is_skew(seed in any::<u64>()) {
        let d = Domain::new(8).unwrap();
        let m = d.cutoff() as i64;
        let mut rng = common::rng(seed);
        let u = common::random_solenoidal(8, m, &mut rng);
        let v = common::random_solenoidal(8, m, &mut rng);
        let w = common::random_solenoidal(8, m, &mut rng);
        let scale = common::norm(&u) * common::grad_norm(&v) * common::norm(&w);
        let a = advect(&d, &u, &v).unwrap().inner(&w);
        let b = advect(&d, &u, &w).unwrap().inner(&v);
        prop_assert!((a + b).abs() <= 1e-12 * scale);
        let self_pair = advect(&d, &u, &v).unwrap().inner(&v);
        prop_assert!(self_pair.abs() <= 1e-12 * common::norm(&u) * common::grad_norm(&v) * common::norm(&v));
    }

    #[test]
    fn scalar_transport_is_skew(seed in any::<u64>()) {
        let d = Domain::new(8).unwrap();
        let m = d.cutoff() as i64;
        let mut rng = common::rng(seed);
        let u = common::random_solenoidal(8, m, &mut rng);
        let th = common::random_scalar(8, m, &mut rng);
        let pairing = scalar_advect(&d, &u, &th).unwrap().inner(&th);
        let scale = common::norm(&u) * mhdb::spectral::gradient_norm_sq(&th).sqrt() * th.norm_sq().sqrt();
        prop_assert!(pairing.abs() <= 1e-12 * scale);
    }

    /// Inviscid energy budget of the semi-discrete system: only buoyancy does work.
    #[test]
    fn tendency_conserves_energy_up_to_buoyancy(seed in any::<u64>(), g in 0.0f64..3.0) {
        let d = Domain::new(8).unwrap();
        let mut rng = common::rng(seed);
        let s = common::random_state(&d, &mut rng);
        let mut p = Params::new(8);
        p.g = g;
        let t = rhs(&d, &s, &p).unwrap();
        let de = t.du.inner(&s.u) + t.db.inner(&s.b) + t.dtheta.inner(&s.theta);
        let work = g * s.theta.inner(&s.u[2]);
        let scale = common::norm(&s.u) * common::grad_norm(&s.u) * (common::norm(&s.u) + common::norm(&s.b) + s.theta.norm_sq().sqrt());
        prop_assert!((de - work).abs() <= 1e-12 * scale, "{} vs {}", de, work);
        // theta alone is transported
        prop_assert!(t.dtheta.inner(&s.theta).abs() <= 1e-12 * scale);
    }

    #[test]
    fn leray_is_an_idempotent_projection(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let n = 8;
        let v = mhdb::spectral::VectorField {
            components: [0, 1, 2].map(|_| common::random_scalar(n, 3, &mut rng)),
        };
        let p = leray_project(&v);
        let pp = leray_project(&p);
        prop_assert!(pp.sub(&p).norm_sq().sqrt() <= 1e-15 * p.norm_sq().sqrt());
        prop_assert!(divergence_residual(&p) <= 1e-14);
        prop_assert!(divergence(&p).norm_sq().sqrt() <= 1e-13 * common::grad_norm(&p));
        // orthogonal: (v - Pv) is perpendicular to Pv
        prop_assert!(v.sub(&p).inner(&p).abs() <= 1e-14 * v.norm_sq());
    }
}
