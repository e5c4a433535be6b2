//! Running sup-and-integral monitors over a window `[T1, t]`:
//!
//! ```text
//! J^2 = sup |grad_h u|^2 + |grad_h b|^2  +  int |grad grad_h u|^2 + |grad grad_h b|^2
//! L^2 = sup |d3 u|^2 + |d3 b|^2          +  int |grad d3 u|^2 + |grad d3 b|^2
//! ```
//!
//! plus the space-time integrals `int |f|_{L^s}^r` for `f` in `{u2, u3, b2, b3}`.
//! Time integrals use the trapezoid rule at the sampling cadence.

use serde::{Deserialize, Serialize};

use super::{derivative_weight, lp_norm_grid};
use crate::dynamics::State;
use crate::error::{MhdError, Result};
use crate::spectral::{Domain, VectorField};

/// Spatial Lebesgue exponent used when none is given.
pub const DEFAULT_SERRIN_S: f64 = 4.0;

/// Time exponent `r` paired with `s` by `2/r + 3/s = 3/4 + 1/(2s)`, i.e.
/// `r = 2 / (3/4 - 5/(2s))`. Defined for `s > 10/3`; `s = inf` gives `8/3`.
pub fn prodi_serrin_r(s: f64) -> Result<f64> {
    let denom = 0.75 - 2.5 / s;
    if s.is_nan() || !(denom > 0.0) {
        return Err(MhdError::OutOfRange(format!(
            "Serrin exponent requires s > 10/3, got {s}"
        )));
    }
    Ok(2.0 / denom)
}

/// Current values of the monitored functionals.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MonitorValues {
    pub j2: f64,
    pub l2: f64,
    pub ps_u2: f64,
    pub ps_u3: f64,
    pub ps_b2: f64,
    pub ps_b3: f64,
}

/// Instantaneous integrands at one sample.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Sample {
    t: f64,
    /// `|grad grad_h u|^2 + |grad grad_h b|^2`
    grad_horizontal: f64,
    /// `|grad d3 u|^2 + |grad d3 b|^2`
    grad_vertical: f64,
    /// `|f|_{L^s}^r` for `u2, u3, b2, b3`
    serrin: [f64; 4],
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonitorAccumulators {
    window_start: f64,
    s: f64,
    r: f64,
    sup_horizontal: f64,
    sup_vertical: f64,
    int_horizontal: f64,
    int_vertical: f64,
    serrin: [f64; 4],
    last: Option<Sample>,
}

fn k2(k: [i64; 3]) -> f64 {
    (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64
}

/// `sum |d_axes v|^2` over components.
fn first_order(v: &VectorField, axes: &[usize]) -> f64 {
    v.weighted_norm_sq(|k| derivative_weight(k, axes))
}

/// `|grad d_axes v|^2 = sum 16 pi^4 |k|^2 (sum_axes k_a^2) |vhat|^2`.
fn second_order(v: &VectorField, axes: &[usize]) -> f64 {
    let four_pi2 = 4.0 * std::f64::consts::PI.powi(2);
    v.weighted_norm_sq(|k| derivative_weight(k, axes) * four_pi2 * k2(k))
}

impl MonitorAccumulators {
    /// Open a window at `window_start` with spatial exponent `s > 10/3`.
    pub fn new(window_start: f64, s: f64) -> Result<Self> {
        Ok(MonitorAccumulators {
            window_start,
            s,
            r: prodi_serrin_r(s)?,
            sup_horizontal: 0.0,
            sup_vertical: 0.0,
            int_horizontal: 0.0,
            int_vertical: 0.0,
            serrin: [0.0; 4],
            last: None,
        })
    }

    pub fn window_start(&self) -> f64 {
        self.window_start
    }

    /// `(r, s)`.
    pub fn exponents(&self) -> (f64, f64) {
        (self.r, self.s)
    }

    /// Fold in the state at time `state.t`, which must not precede the window
    /// start or the previous sample.
    pub fn update(&mut self, domain: &Domain, state: &State) -> Result<()> {
        let t = state.t;
        if t < self.window_start || self.last.is_some_and(|l| t < l.t) {
            return Err(MhdError::Precondition(format!(
                "monitor sample at t = {t} precedes the window or the previous sample"
            )));
        }
        const H: [usize; 2] = [0, 1];
        const V: [usize; 1] = [2];
        let (u, b) = (&state.u, &state.b);
        let (u2, u3) = domain.to_grid_pair(&u[1], &u[2]);
        let (b2, b3) = domain.to_grid_pair(&b[1], &b[2]);
        let mut serrin = [0.0; 4];
        for (out, g) in serrin.iter_mut().zip([&u2, &u3, &b2, &b3]) {
            *out = lp_norm_grid(g, self.s)?.powf(self.r);
        }
        let sample = Sample {
            t,
            grad_horizontal: second_order(u, &H) + second_order(b, &H),
            grad_vertical: second_order(u, &V) + second_order(b, &V),
            serrin,
        };
        self.sup_horizontal = self.sup_horizontal.max(first_order(u, &H) + first_order(b, &H));
        self.sup_vertical = self.sup_vertical.max(first_order(u, &V) + first_order(b, &V));
        if let Some(prev) = self.last {
            let w = 0.5 * (t - prev.t);
            self.int_horizontal += w * (prev.grad_horizontal + sample.grad_horizontal);
            self.int_vertical += w * (prev.grad_vertical + sample.grad_vertical);
            for i in 0..4 {
                self.serrin[i] += w * (prev.serrin[i] + sample.serrin[i]);
            }
        }
        self.last = Some(sample);
        Ok(())
    }

    pub fn values(&self) -> MonitorValues {
        MonitorValues {
            j2: self.sup_horizontal + self.int_horizontal,
            l2: self.sup_vertical + self.int_vertical,
            ps_u2: self.serrin[0],
            ps_u3: self.serrin[1],
            ps_b2: self.serrin[2],
            ps_b3: self.serrin[3],
        }
    }

    /// Sup parts `(J^2, L^2)` alone.
    pub fn sup_parts(&self) -> (f64, f64) {
        (self.sup_horizontal, self.sup_vertical)
    }

    /// Integral parts `(J^2, L^2)` alone.
    pub fn integral_parts(&self) -> (f64, f64) {
        (self.int_horizontal, self.int_vertical)
    }
}

/// Functional form of [`MonitorAccumulators::update`].
pub fn update_monitors(
    mut acc: MonitorAccumulators,
    domain: &Domain,
    state: &State,
) -> Result<MonitorAccumulators> {
    acc.update(domain, state)?;
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use num_complex::Complex64;

    use super::*;

    #[test]
    fn serrin_exponent_relation() {
        assert_eq!(prodi_serrin_r(4.0).unwrap(), 16.0);
        assert!(prodi_serrin_r(10.0 / 3.0).is_err());
        assert!(prodi_serrin_r(3.0).is_err());
        assert!(prodi_serrin_r(f64::NAN).is_err());
        assert_eq!(prodi_serrin_r(f64::INFINITY).unwrap(), 8.0 / 3.0);
        // stated relation holds
        for s in [3.5, 4.0, 6.0, 12.0, 100.0] {
            let r = prodi_serrin_r(s).unwrap();
            assert!((2.0 / r + 3.0 / s - 0.75 - 0.5 / s).abs() < 1e-14);
        }
    }

    fn shear(n: usize) -> State {
        let mut s = State::zeros(n);
        s.u[0].set_hermitian([0, 1, 0], Complex64::new(0.5, 0.0));
        s
    }

    #[test]
    fn zero_state_keeps_zero_monitors() {
        let d = Domain::new(8).unwrap();
        let mut acc = MonitorAccumulators::new(0.0, 4.0).unwrap();
        let mut s = State::zeros(8);
        for i in 0..4 {
            s.t = 0.1 * i as f64;
            acc.update(&d, &s).unwrap();
        }
        assert_eq!(acc.values(), MonitorValues::default());
    }

    #[test]
    fn steady_mode_grows_integrals_linearly() {
        let d = Domain::new(8).unwrap();
        let mut acc = MonitorAccumulators::new(0.0, 4.0).unwrap();
        let mut s = shear(8);
        let mut ints = vec![];
        for i in 0..5 {
            s.t = 0.25 * i as f64;
            acc = update_monitors(acc, &d, &s).unwrap();
            ints.push(acc.integral_parts().0);
        }
        // |grad_h u|^2 = 4 pi^2 * (1/2)
        assert!((acc.sup_parts().0 - 2.0 * PI * PI).abs() < 1e-12);
        assert_eq!(acc.sup_parts().1, 0.0);
        // |grad grad_h u|^2 = 16 pi^4 * (1/2), integrated over t = 1
        assert!((ints[4] - 8.0 * PI.powi(4)).abs() < 1e-9);
        for w in ints.windows(2) {
            assert!((w[1] - w[0] - 2.0 * PI.powi(4)).abs() < 1e-9);
        }
        assert_eq!(acc.values().ps_u2, 0.0);
    }

    #[test]
    fn rejects_samples_before_window() {
        let d = Domain::new(8).unwrap();
        let mut acc = MonitorAccumulators::new(1.0, 4.0).unwrap();
        assert!(acc.update(&d, &State::zeros(8)).is_err());
    }
}
