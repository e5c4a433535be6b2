//! `mhdb` command-line interface.
//!
//! Exit status: 0 on success, 1 when a run blows up or `check` fails,
//! 2 on configuration or usage errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::diagnostics::{lemma_identity_residual_h, lemma_identity_residual_pair, DiagnosticsRecord};
use crate::dynamics::advect;
use crate::error::{MhdError, Result};
use crate::par::with_threads;
use crate::experiments::{
    continuous_dependence, galerkin_convergence, kappa_sweep, run_simulation, BlowupInfo, RunConfig, SweepResult,
};
use crate::io::{config_to_toml, load_config, write_json, write_snapshot, write_sweep_csv, write_timeseries};
use crate::spectral::{gradient_norm_sq, leray_project, Domain, SpectralField, VectorField};

#[derive(Parser, Debug)]
#[command(name = "mhdb", version, about = "Galerkin-truncated 3D MHD-Boussinesq solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate one configuration and write diagnostics, snapshots and a summary.
    Run(Common),
    /// Compare runs at several thermal diffusivities against kappa = 0.
    SweepKappa {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', required = true)]
        kappas: Vec<f64>,
    },
    /// Galerkin convergence in the cutoff; the largest cutoff is the reference.
    Convergence {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', required = true)]
        cutoffs: Vec<usize>,
    },
    /// Growth of velocity perturbations of the given sizes.
    Depend {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', required = true)]
        deltas: Vec<f64>,
    },
    /// Operator identity self-tests at N = 16.
    Check,
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the configured output directory.
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

/// Parse `argv` (including the program name), run, and return the exit status.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                MhdError::Config { .. } | MhdError::OutOfRange(_) => 2,
                _ => 1,
            }
        }
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Check => Ok(if run_checks() { 0 } else { 1 }),
        Command::Run(c) => with_threads(c.threads, || run(&c)),
        Command::SweepKappa { common, kappas } => with_threads(common.threads, || {
            sweep(&common, "sweep_kappa", |cfg| kappa_sweep(cfg, &kappas))
        }),
        Command::Convergence { common, cutoffs } => with_threads(common.threads, || {
            sweep(&common, "convergence", |cfg| galerkin_convergence(cfg, &cutoffs))
        }),
        Command::Depend { common, deltas } => with_threads(common.threads, || {
            sweep(&common, "depend", |cfg| continuous_dependence(cfg, &deltas))
        }),
    }
}

fn prepare(common: &Common) -> Result<RunConfig> {
    let mut config = load_config(&common.config)?;
    if let Some(dir) = &common.output_dir {
        config.output_dir = dir.clone();
    }
    fs::create_dir_all(&config.output_dir)?;
    Ok(config)
}

#[derive(Serialize)]
struct RunSummary<'a> {
    config: String,
    steps_taken: usize,
    blowup: &'a Option<BlowupInfo>,
    final_record: Option<&'a DiagnosticsRecord>,
    snapshots: Vec<String>,
    execution_mode: &'static str,
    threads: usize,
    wall_time_s: f64,
}

fn run(common: &Common) -> Result<i32> {
    let config = prepare(common)?;
    let start = Instant::now();
    let tr = run_simulation(&config)?;
    let dir = &config.output_dir;
    write_timeseries(&tr.records, &dir.join("timeseries.csv"))?;
    let mut names = Vec::new();
    for s in &tr.snapshots {
        let step = (s.t / config.params.dt).round() as u64;
        let name = format!("snapshot_{step:08}.mhdb");
        write_snapshot(s, &config.params, &dir.join(&name))?;
        names.push(name);
    }
    write_snapshot(&tr.final_state, &config.params, &dir.join("final.mhdb"))?;
    let summary = RunSummary {
        config: config_to_toml(&config),
        steps_taken: tr.steps_taken,
        blowup: &tr.blowup,
        final_record: tr.records.last(),
        snapshots: names,
        execution_mode: crate::execution_mode(),
        threads: crate::thread_count(),
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    write_json(&summary, &dir.join("summary.json"))?;
    match &tr.blowup {
        Some(info) => {
            eprintln!("blow-up at t = {} (step {}): {}", info.t, info.step, info.message);
            Ok(1)
        }
        None => {
            println!("completed {} steps; output in {}", tr.steps_taken, dir.display());
            Ok(0)
        }
    }
}

#[derive(Serialize)]
struct SweepSummary<'a> {
    config: String,
    result: &'a SweepResult,
    fitted_order: Option<f64>,
    threads: usize,
    wall_time_s: f64,
}

fn sweep(common: &Common, name: &str, f: impl FnOnce(&RunConfig) -> Result<SweepResult>) -> Result<i32> {
    let config = prepare(common)?;
    let start = Instant::now();
    let result = f(&config)?;
    let dir: &Path = &config.output_dir;
    write_sweep_csv(&result, &dir.join(format!("{name}.csv")))?;
    let summary = SweepSummary {
        config: config_to_toml(&config),
        result: &result,
        fitted_order: result.fitted_order(),
        threads: crate::thread_count(),
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    write_json(&summary, &dir.join(format!("{name}.json")))?;
    for c in &result.cases {
        println!(
            "{:>12.4e}  error {:.6e}{}",
            c.label,
            c.error,
            if c.blew_up { "  (blew up)" } else { "" }
        );
    }
    if let Some(order) = result.fitted_order() {
        println!("fitted order {order:.3}");
    }
    Ok(if result.cases.iter().any(|c| c.blew_up) { 1 } else { 0 })
}

/// Outcome of one self-test.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub worst: f64,
    pub tolerance: f64,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.worst <= self.tolerance
    }
}

/// Random divergence-free field with unit-variance Gaussian-like modes inside the cutoff.
fn random_solenoidal(domain: &Domain, rng: &mut ChaCha8Rng) -> VectorField {
    let m = domain.cutoff() as i64;
    let mut comp = || {
        let mut f = SpectralField::zeros(domain.n());
        for k1 in -m..=m {
            for k2 in -m..=m {
                for k3 in 0..=m {
                    if k3 == 0 && (k2 < 0 || (k2 == 0 && k1 <= 0)) {
                        continue;
                    }
                    let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    f.set_hermitian([k1, k2, k3], c);
                }
            }
        }
        f
    };
    let v = VectorField {
        components: [comp(), comp(), comp()],
    };
    leray_project(&v)
}

/// Leray idempotence, trilinear skew-symmetry and the two quadrature identities
/// on random fields at `N = 16`.
pub fn self_checks(seed: u64, samples: usize) -> Result<Vec<CheckOutcome>> {
    let domain = Domain::new(16)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut leray = 0.0f64;
    let mut skew = 0.0f64;
    let mut lemma_h = 0.0f64;
    let mut lemma_pair = 0.0f64;
    for _ in 0..samples {
        let u = random_solenoidal(&domain, &mut rng);
        let v = random_solenoidal(&domain, &mut rng);
        let w = random_solenoidal(&domain, &mut rng);
        let pv = leray_project(&v);
        leray = leray.max((leray_project(&pv).sub(&pv).norm_sq() / pv.norm_sq()).sqrt());

        let grad = |x: &VectorField| x.iter().map(gradient_norm_sq).sum::<f64>().sqrt();
        let scale = u.norm_sq().sqrt() * grad(&v) * w.norm_sq().sqrt();
        let a = advect(&domain, &u, &v)?.inner(&w);
        let b = advect(&domain, &u, &w)?.inner(&v);
        skew = skew.max((a + b).abs() / scale);

        lemma_h = lemma_h.max(lemma_identity_residual_h(&domain, &u)?.relative());
        for axis in 0..3 {
            lemma_pair = lemma_pair.max(lemma_identity_residual_pair(&domain, &u, &v, axis)?.relative());
        }
    }
    let outcome = |name: &str, worst: f64, tolerance: f64| CheckOutcome {
        name: name.into(),
        worst,
        tolerance,
    };
    Ok(vec![
        outcome("leray idempotence", leray, 1e-14),
        outcome("trilinear skew-symmetry", skew, 1e-12),
        outcome("quadrature identity (single field)", lemma_h, 1e-11),
        outcome("quadrature identity (pair)", lemma_pair, 1e-11),
    ])
}

fn run_checks() -> bool {
    match self_checks(2024, 10) {
        Ok(results) => {
            let mut ok = true;
            for r in &results {
                println!(
                    "{} {:<36} worst {:.3e} (tolerance {:.0e})",
                    if r.passed() { "PASS" } else { "FAIL" },
                    r.name,
                    r.worst,
                    r.tolerance
                );
                ok &= r.passed();
            }
            ok
        }
        Err(e) => {
            eprintln!("error: {e}");
            false
        }
    }
}
