//! Initial data, single runs and parameter sweeps.

mod initial;
mod run;
mod sweeps;

pub use initial::{make_initial_condition, InitialCondition, Preset};
pub use run::{run_simulation, BlowupInfo, RunConfig, Trajectory};
pub use sweeps::{
    continuous_dependence, fit_power_law, galerkin_convergence, grid_for_cutoff, kappa_sweep,
    perturbation_direction, PowerFit, SweepCase, SweepResult,
};
