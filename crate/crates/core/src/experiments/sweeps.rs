use std::time::Instant;

use serde::Serialize;

use crate::dynamics::State;
use crate::error::{MhdError, Result};
use crate::par;
use crate::spectral::{dealias_cutoff, leray_project, Domain, VectorField};

use super::initial::{make_initial_condition, random_solenoidal};
use super::run::{integrate, RunConfig};

/// Least-squares fit of `log y = c + slope log x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PowerFit {
    pub slope: f64,
    /// Standard error of the slope; `None` with only two points.
    pub stderr: Option<f64>,
    pub points: usize,
}

/// Fit a power law through the points with positive finite coordinates.
/// `None` if fewer than two remain.
pub fn fit_power_law(x: &[f64], y: &[f64]) -> Option<PowerFit> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0 && a.is_finite() && b.is_finite())
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    let n = pts.len();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let stderr = (n > 2).then(|| {
        let ss: f64 = pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
        (ss / (nf - 2.0) / sxx).sqrt()
    });
    Some(PowerFit { slope, stderr, points: n })
}

/// One case of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepCase {
    /// The swept value (`kappa`, `M` or `delta`).
    pub label: f64,
    /// Case error; its meaning depends on the sweep kind.
    pub error: f64,
    /// `max_t X(t) / X(0)` for continuous-dependence runs.
    pub growth: Option<f64>,
    pub blew_up: bool,
    pub wall_time_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    pub kind: String,
    /// What `error` measures.
    pub metric: String,
    pub cases: Vec<SweepCase>,
    /// Power-law fit; see `fit_description`.
    pub fit: Option<PowerFit>,
    pub fit_description: String,
    /// Whether the error decreases strictly as the sweep approaches its limit.
    pub monotone: Option<bool>,
    pub execution_mode: String,
}

impl SweepResult {
    /// Order reported by the fit (positive means convergence).
    pub fn fitted_order(&self) -> Option<f64> {
        self.fit.map(|f| f.slope * self.order_sign())
    }

    fn order_sign(&self) -> f64 {
        if self.kind == "convergence" {
            -1.0
        } else {
            1.0
        }
    }
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

/// Run `config` from `initial`, keeping the state at every diagnostics sample.
fn sampled_states(config: &RunConfig, initial: State) -> Result<(Vec<State>, bool)> {
    let mut states = Vec::new();
    let tr = integrate(config, initial, |_, s| {
        states.push(s.clone());
        Ok(())
    })?;
    Ok((states, tr.blew_up()))
}

/// `e(kappa) = max_t |X_kappa(t) - X_0(t)|_L2` against the non-diffusive run
/// from the same initial data. `kappa = 0` cases give exactly zero.
pub fn kappa_sweep(config: &RunConfig, kappas: &[f64]) -> Result<SweepResult> {
    if kappas.is_empty() {
        return Err(MhdError::config("kappas", "need at least one value"));
    }
    if let Some(k) = kappas.iter().find(|k| !(**k >= 0.0 && k.is_finite())) {
        return Err(MhdError::config("kappas", format!("must be finite and >= 0, got {k}")));
    }
    config.validate()?;
    let domain = config.params.domain()?;
    let initial = make_initial_condition(&domain, &config.initial, config.params.seed)?;
    let mut reference_config = config.clone();
    reference_config.params.kappa = 0.0;
    let (reference, ref_blew_up) = sampled_states(&reference_config, initial.clone())?;
    if ref_blew_up {
        return Err(MhdError::Precondition("the kappa = 0 reference run blew up".into()));
    }

    let cases = par::map_jobs(kappas.to_vec(), |kappa| -> Result<SweepCase> {
        let start = Instant::now();
        let mut c = config.clone();
        c.params.kappa = kappa;
        let mut err = 0.0f64;
        let tr = integrate(&c, initial.clone(), |k, s| {
            err = err.max(s.l2_distance(&reference[k]));
            Ok(())
        })?;
        Ok(SweepCase {
            label: kappa,
            error: err,
            growth: None,
            blew_up: tr.blew_up(),
            wall_time_s: start.elapsed().as_secs_f64(),
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let mut by_kappa: Vec<&SweepCase> = cases.iter().filter(|c| !c.blew_up).collect();
    by_kappa.sort_by(|a, b| b.label.total_cmp(&a.label));
    let errors: Vec<f64> = by_kappa.iter().map(|c| c.error).collect();
    let xs: Vec<f64> = by_kappa.iter().map(|c| c.label).collect();
    Ok(SweepResult {
        kind: "kappa".into(),
        metric: "max over samples of the L2 distance to the kappa = 0 run".into(),
        fit: fit_power_law(&xs, &errors),
        fit_description: "slope of log error against log kappa".into(),
        monotone: (errors.len() >= 2).then(|| strictly_decreasing(&errors)),
        cases,
        execution_mode: par::execution_mode().into(),
    })
}

/// Smallest even 5-smooth grid that resolves cutoff `m` without aliasing.
pub fn grid_for_cutoff(m: usize) -> usize {
    let smooth = |mut n: usize| {
        for p in [2, 3, 5] {
            while n % p == 0 {
                n /= p;
            }
        }
        n == 1
    };
    (2..)
        .step_by(2)
        .find(|&n| dealias_cutoff(n) >= m && smooth(n))
        .expect("unbounded search")
}

/// `e(M) = |X_M(T) - X_ref(T)|_L2` against the run at the largest cutoff.
/// Every case starts from the reference initial data truncated to its cutoff
/// and runs on the smallest grid that dealiases it. The fit is of `e(M)^2`.
pub fn galerkin_convergence(config: &RunConfig, cutoffs: &[usize]) -> Result<SweepResult> {
    if cutoffs.len() < 3 {
        return Err(MhdError::config("cutoffs", "need at least 3 cutoffs to fit an order"));
    }
    let mut sorted = cutoffs.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != cutoffs.len() || sorted[0] == 0 {
        return Err(MhdError::config("cutoffs", "must be distinct and positive"));
    }
    config.validate()?;
    let m_ref = *sorted.last().unwrap();
    let n_ref = grid_for_cutoff(m_ref);
    let ref_domain = Domain::with_cutoff(n_ref, m_ref)?;
    let initial = make_initial_condition(&ref_domain, &config.initial, config.params.seed)?;

    let jobs: Vec<usize> = cutoffs.to_vec();
    let finals = par::map_jobs(jobs, |m| -> Result<(usize, State, bool, f64)> {
        let start = Instant::now();
        let n = grid_for_cutoff(m);
        let domain = Domain::with_cutoff(n, m)?;
        let mut c = config.clone();
        c.params.n = n;
        c.params.cutoff = m;
        let s0 = State {
            u: leray_project(&initial.u.resampled(n).map(|f| domain.truncate(f))),
            b: leray_project(&initial.b.resampled(n).map(|f| domain.truncate(f))),
            theta: domain.truncate(&initial.theta.resampled(n)),
            t: initial.t,
        };
        let tr = integrate(&c, s0, |_, _| Ok(()))?;
        let blew = tr.blew_up();
        Ok((m, tr.final_state, blew, start.elapsed().as_secs_f64()))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let reference = finals
        .iter()
        .find(|f| f.0 == m_ref)
        .expect("reference case present");
    if reference.2 {
        return Err(MhdError::Precondition(format!("the reference run at M = {m_ref} blew up")));
    }
    let ref_state = &reference.1;
    let cases: Vec<SweepCase> = finals
        .iter()
        .map(|(m, s, blew, wall)| SweepCase {
            label: *m as f64,
            error: if *m == m_ref { 0.0 } else { resample_state(s, n_ref).l2_distance(ref_state) },
            growth: None,
            blew_up: *blew,
            wall_time_s: *wall,
        })
        .collect();

    let mut fitted: Vec<&SweepCase> = cases
        .iter()
        .filter(|c| c.label < m_ref as f64 && !c.blew_up)
        .collect();
    fitted.sort_by(|a, b| a.label.total_cmp(&b.label));
    let xs: Vec<f64> = fitted.iter().map(|c| c.label).collect();
    let e2: Vec<f64> = fitted.iter().map(|c| c.error * c.error).collect();
    let errors: Vec<f64> = fitted.iter().map(|c| c.error).collect();
    Ok(SweepResult {
        kind: "convergence".into(),
        metric: format!("L2 distance at t_end to the M = {m_ref} run"),
        fit: fit_power_law(&xs, &e2),
        fit_description: "slope of log error^2 against log M (order = -slope)".into(),
        monotone: (errors.len() >= 2).then(|| strictly_decreasing(&errors)),
        cases,
        execution_mode: par::execution_mode().into(),
    })
}

fn resample_state(s: &State, n: usize) -> State {
    State {
        u: s.u.resampled(n),
        b: s.b.resampled(n),
        theta: s.theta.resampled(n),
        t: s.t,
    }
}

/// Unit-L2 solenoidal velocity perturbation used by [`continuous_dependence`].
pub fn perturbation_direction(domain: &Domain, config: &RunConfig) -> VectorField {
    random_solenoidal(domain, config.initial.sigma, config.params.seed ^ 0x5eed_0001, 10, 1.0)
}

/// Run the base state and `u0 + delta w` for each `delta`, with `w` a fixed
/// unit perturbation. `error` is `max_t sqrt(X(t))` where `X` is the squared
/// L2 distance of the two solutions and `growth` is `max_t sqrt(X(t) / X(0))`.
pub fn continuous_dependence(config: &RunConfig, deltas: &[f64]) -> Result<SweepResult> {
    if deltas.is_empty() {
        return Err(MhdError::config("deltas", "need at least one value"));
    }
    if let Some(d) = deltas.iter().find(|d| !(**d >= 0.0 && d.is_finite())) {
        return Err(MhdError::config("deltas", format!("must be finite and >= 0, got {d}")));
    }
    config.validate()?;
    let domain = config.params.domain()?;
    let initial = make_initial_condition(&domain, &config.initial, config.params.seed)?;
    let w = perturbation_direction(&domain, config);
    if w.norm_sq() == 0.0 {
        return Err(MhdError::config("cutoff", "no modes available for a perturbation"));
    }
    // the base run goes through the same perturb-and-project path with delta = 0,
    // so a zero perturbation reproduces it bit for bit
    let perturbed = |delta: f64| {
        let mut s0 = initial.clone();
        s0.u.axpy(delta, &w);
        s0.u = leray_project(&s0.u);
        s0
    };
    let (base, base_blew_up) = sampled_states(config, perturbed(0.0))?;
    if base_blew_up {
        return Err(MhdError::Precondition("the unperturbed run blew up".into()));
    }

    let cases = par::map_jobs(deltas.to_vec(), |delta| -> Result<SweepCase> {
        let start = Instant::now();
        let s0 = perturbed(delta);
        let mut x0 = 0.0f64;
        let mut xmax = 0.0f64;
        let tr = integrate(config, s0, |k, s| {
            let x = s.l2_distance(&base[k]).powi(2);
            if k == 0 {
                x0 = x;
            }
            xmax = xmax.max(x);
            Ok(())
        })?;
        if delta > 0.0 && x0 == 0.0 {
            return Err(MhdError::config("deltas", format!("delta = {delta} gives a zero initial separation")));
        }
        Ok(SweepCase {
            label: delta,
            error: xmax.sqrt(),
            growth: (x0 > 0.0).then(|| (xmax / x0).sqrt()),
            blew_up: tr.blew_up(),
            wall_time_s: start.elapsed().as_secs_f64(),
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let ok: Vec<&SweepCase> = cases.iter().filter(|c| !c.blew_up).collect();
    let xs: Vec<f64> = ok.iter().map(|c| c.label).collect();
    let ys: Vec<f64> = ok.iter().map(|c| c.error).collect();
    Ok(SweepResult {
        kind: "dependence".into(),
        metric: "max over samples of the L2 distance to the unperturbed run".into(),
        fit: fit_power_law(&xs, &ys),
        fit_description: "slope of log error against log delta (1 = linear dependence)".into(),
        monotone: None,
        cases,
        execution_mode: par::execution_mode().into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_law_fit_recovers_exponent() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(-2.5)).collect();
        let f = fit_power_law(&x, &y).unwrap();
        assert!((f.slope + 2.5).abs() < 1e-12);
        assert!(f.stderr.unwrap() < 1e-12);
        assert!(fit_power_law(&[1.0], &[1.0]).is_none());
    }

    #[test]
    fn grids_for_cutoffs() {
        assert_eq!(grid_for_cutoff(4), 16);
        assert_eq!(grid_for_cutoff(8), 30);
        assert_eq!(grid_for_cutoff(16), 50);
        assert_eq!(grid_for_cutoff(32), 100);
        assert_eq!(grid_for_cutoff(5), 16);
    }

    #[test]
    fn convergence_refuses_two_cutoffs() {
        let c = RunConfig::new(
            crate::dynamics::Params::new(16),
            crate::experiments::InitialCondition::new(crate::experiments::Preset::TaylorGreen, 1.0),
        );
        match galerkin_convergence(&c, &[2, 4]) {
            Err(MhdError::Config { key, .. }) => assert_eq!(key, "cutoffs"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
