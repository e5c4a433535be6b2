use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{record, DiagnosticsRecord, MonitorAccumulators, DEFAULT_SERRIN_S};
use crate::dynamics::{Params, State};
use crate::error::{MhdError, Result};
use crate::timestepper::Stepper;

use super::initial::{make_initial_condition, InitialCondition};

/// Everything needed to reproduce a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub params: Params,
    pub initial: InitialCondition,
    /// Record diagnostics every this many steps.
    pub diagnostics_every: usize,
    /// Keep a snapshot every this many steps; 0 keeps none.
    pub snapshot_every: usize,
    /// Integrability exponent `s` of the Prodi-Serrin monitors.
    pub serrin_s: f64,
    pub output_dir: PathBuf,
}

impl RunConfig {
    pub fn new(params: Params, initial: InitialCondition) -> Self {
        RunConfig {
            params,
            initial,
            diagnostics_every: 1,
            snapshot_every: 0,
            serrin_s: DEFAULT_SERRIN_S,
            output_dir: PathBuf::from("output"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.initial.validate()?;
        if self.diagnostics_every == 0 {
            return Err(MhdError::config("diagnostics_every", "must be >= 1"));
        }
        let steps = self.step_count()?;
        if steps % self.diagnostics_every != 0 {
            return Err(MhdError::config(
                "diagnostics_every",
                format!("{} does not divide the step count {steps}", self.diagnostics_every),
            ));
        }
        if self.snapshot_every > 0 && steps % self.snapshot_every != 0 {
            return Err(MhdError::config(
                "snapshot_every",
                format!("{} does not divide the step count {steps}", self.snapshot_every),
            ));
        }
        Ok(())
    }

    /// Number of steps of size `dt` reaching `t_end`; `t_end` must be a whole
    /// multiple of `dt`.
    pub fn step_count(&self) -> Result<usize> {
        let p = &self.params;
        if !(p.dt > 0.0) {
            return Err(MhdError::config("dt", format!("must be > 0, got {}", p.dt)));
        }
        if !(p.t_end >= 0.0) || !p.t_end.is_finite() {
            return Err(MhdError::config("t_end", format!("must be finite and >= 0, got {}", p.t_end)));
        }
        let steps = (p.t_end / p.dt).round();
        if (steps * p.dt - p.t_end).abs() > 1e-9 * p.t_end.max(p.dt) {
            return Err(MhdError::config(
                "t_end",
                format!("{} is not a whole number of steps of {}", p.t_end, p.dt),
            ));
        }
        Ok(steps as usize)
    }
}

/// Where and why a run stopped early.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlowupInfo {
    pub t: f64,
    pub step: usize,
    pub message: String,
}

/// Output of [`run_simulation`]. On blow-up it holds everything up to the last
/// finite state.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub records: Vec<DiagnosticsRecord>,
    pub snapshots: Vec<State>,
    pub final_state: State,
    pub steps_taken: usize,
    pub blowup: Option<BlowupInfo>,
}

impl Trajectory {
    pub fn blew_up(&self) -> bool {
        self.blowup.is_some()
    }
}

/// Build the initial state and integrate to `t_end`.
///
/// Configuration problems are errors; blow-up is not, it is reported through
/// [`Trajectory::blowup`].
pub fn run_simulation(config: &RunConfig) -> Result<Trajectory> {
    config.validate()?;
    let domain = config.params.domain()?;
    let initial = make_initial_condition(&domain, &config.initial, config.params.seed)?;
    integrate(config, initial, |_, _| Ok(()))
}

/// Integrate from `initial`, calling `on_sample(k, state)` at every diagnostics
/// sample (`k = 0` is the initial state).
pub(crate) fn integrate(
    config: &RunConfig,
    initial: State,
    mut on_sample: impl FnMut(usize, &State) -> Result<()>,
) -> Result<Trajectory> {
    config.validate()?;
    let steps = config.step_count()?;
    let stepper = Stepper::new(&config.params)?;
    let domain = stepper.domain().clone();
    initial.validate(&domain)?;

    let mut monitors = MonitorAccumulators::new(initial.t, config.serrin_s)?;
    let mut records = Vec::new();
    let mut snapshots = Vec::new();
    let mut sample = 0usize;
    let mut observe = |state: &State, records: &mut Vec<DiagnosticsRecord>| -> Result<()> {
        monitors.update(&domain, state)?;
        let mut rec = record(&domain, state, &config.params)?;
        rec.monitors = monitors.values();
        records.push(rec);
        on_sample(sample, state)?;
        sample += 1;
        Ok(())
    };

    let mut state = initial;
    observe(&state, &mut records)?;
    if config.snapshot_every > 0 {
        snapshots.push(state.clone());
    }
    let mut blowup = None;
    let mut taken = 0;
    for n in 1..=steps {
        match stepper.step(&state) {
            Ok((next, report)) => {
                if report.blowup_flag {
                    blowup = Some(BlowupInfo {
                        t: report.t_new,
                        step: n,
                        message: next.blowup().to_string(),
                    });
                    if next.is_finite() {
                        state = next;
                        taken = n;
                    }
                    break;
                }
                state = next;
                taken = n;
            }
            Err(e) if e.is_blowup() => {
                blowup = Some(BlowupInfo {
                    t: state.t + config.params.dt,
                    step: n,
                    message: e.to_string(),
                });
                break;
            }
            Err(e) => return Err(e),
        }
        // keep the clock exact on long runs
        state.t = n as f64 * config.params.dt;
        if n % config.diagnostics_every == 0 {
            observe(&state, &mut records)?;
        }
        if config.snapshot_every > 0 && n % config.snapshot_every == 0 {
            snapshots.push(state.clone());
        }
    }
    Ok(Trajectory {
        records,
        snapshots,
        final_state: state,
        steps_taken: taken,
        blowup,
    })
}
