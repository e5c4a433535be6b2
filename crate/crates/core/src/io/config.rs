use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::diagnostics::DEFAULT_SERRIN_S;
use crate::dynamics::{Params, DEFAULT_BLOWUP_CEILING};
use crate::error::{MhdError, Result};
use crate::experiments::{InitialCondition, Preset, RunConfig};
use crate::spectral::dealias_cutoff;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    physics: Physics,
    numerics: Numerics,
    initial: Initial,
    #[serde(default)]
    output: Output,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Physics {
    #[serde(default)]
    nu: f64,
    #[serde(default)]
    eta: f64,
    #[serde(default)]
    kappa: f64,
    #[serde(default)]
    g: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Numerics {
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cutoff: Option<usize>,
    #[serde(default = "default_dt")]
    dt: f64,
    #[serde(default = "default_t_end")]
    t_end: f64,
    #[serde(default)]
    seed: u64,
    #[serde(default = "default_ceiling")]
    blowup_ceiling: f64,
    #[serde(default = "default_serrin")]
    serrin_s: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Initial {
    preset: String,
    amplitude: f64,
    #[serde(default = "default_sigma")]
    sigma: f64,
    #[serde(default)]
    theta_amplitude: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Output {
    #[serde(default = "default_dir")]
    dir: PathBuf,
    #[serde(default = "one")]
    diagnostics_every: usize,
    #[serde(default)]
    snapshot_every: usize,
}

impl Default for Output {
    fn default() -> Self {
        Output {
            dir: default_dir(),
            diagnostics_every: 1,
            snapshot_every: 0,
        }
    }
}

fn default_dt() -> f64 {
    1e-3
}
fn default_t_end() -> f64 {
    1.0
}
fn default_ceiling() -> f64 {
    DEFAULT_BLOWUP_CEILING
}
fn default_serrin() -> f64 {
    DEFAULT_SERRIN_S
}
fn default_sigma() -> f64 {
    4.0
}
fn default_dir() -> PathBuf {
    PathBuf::from("output")
}
fn one() -> usize {
    1
}

/// Key named in a serde message such as "unknown field `foo`, expected ...".
fn offending_key(message: &str) -> String {
    message
        .split('`')
        .nth(1)
        .map(str::to_owned)
        .unwrap_or_else(|| "config".to_owned())
}

/// Parse and validate a TOML run configuration.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| {
        let msg = e.message().to_owned();
        MhdError::Config {
            key: offending_key(&msg),
            message: msg,
        }
    })?;
    let n = file.numerics.n;
    let params = Params {
        nu: file.physics.nu,
        eta: file.physics.eta,
        kappa: file.physics.kappa,
        g: file.physics.g,
        n,
        cutoff: file.numerics.cutoff.unwrap_or_else(|| dealias_cutoff(n)),
        dt: file.numerics.dt,
        t_end: file.numerics.t_end,
        seed: file.numerics.seed,
        blowup_ceiling: file.numerics.blowup_ceiling,
    };
    let config = RunConfig {
        params,
        initial: InitialCondition {
            preset: file.initial.preset.parse::<Preset>()?,
            amplitude: file.initial.amplitude,
            sigma: file.initial.sigma,
            theta_amplitude: file.initial.theta_amplitude,
        },
        diagnostics_every: file.output.diagnostics_every,
        snapshot_every: file.output.snapshot_every,
        serrin_s: file.numerics.serrin_s,
        output_dir: file.output.dir,
    };
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path)?;
    parse_config(&text)
}

/// Serialize so that [`parse_config`] gives back an equal configuration.
pub fn config_to_toml(config: &RunConfig) -> String {
    let p = &config.params;
    let file = ConfigFile {
        physics: Physics {
            nu: p.nu,
            eta: p.eta,
            kappa: p.kappa,
            g: p.g,
        },
        numerics: Numerics {
            n: p.n,
            cutoff: Some(p.cutoff),
            dt: p.dt,
            t_end: p.t_end,
            seed: p.seed,
            blowup_ceiling: p.blowup_ceiling,
            serrin_s: config.serrin_s,
        },
        initial: Initial {
            preset: config.initial.preset.name().to_owned(),
            amplitude: config.initial.amplitude,
            sigma: config.initial.sigma,
            theta_amplitude: config.initial.theta_amplitude,
        },
        output: Output {
            dir: config.output_dir.clone(),
            diagnostics_every: config.diagnostics_every,
            snapshot_every: config.snapshot_every,
        },
    };
    toml::to_string(&file).expect("config is always representable in TOML")
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[physics]
g = 1.0

[numerics]
n = 16
dt = 0.01
t_end = 0.1

[initial]
preset = "mhd-vortex"
amplitude = 0.5
"#;

    fn key_of(r: Result<RunConfig>) -> String {
        match r {
            Err(MhdError::Config { key, .. }) => key,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn defaults_fill_in() {
        let bare = MINIMAL.replace("dt = 0.01\nt_end = 0.1\n", "");
        let d = parse_config(&bare).unwrap();
        assert_eq!((d.params.dt, d.params.t_end), (1e-3, 1.0));
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.params.cutoff, 5);
        assert_eq!(c.params.nu, 0.0);
        assert_eq!(c.initial.sigma, 4.0);
        assert_eq!(c.diagnostics_every, 1);
    }

    #[test]
    fn round_trip() {
        let mut c = parse_config(MINIMAL).unwrap();
        c.params.kappa = 1e-3;
        c.params.seed = 99;
        c.snapshot_every = 5;
        assert_eq!(parse_config(&config_to_toml(&c)).unwrap(), c);
    }

    #[test]
    fn errors_name_the_key() {
        assert_eq!(key_of(parse_config(&MINIMAL.replace("n = 16", "n = 15"))), "n");
        assert_eq!(key_of(parse_config(&MINIMAL.replace("g = 1.0", "g = 1.0\nmu = 2"))), "mu");
        assert_eq!(key_of(parse_config(&MINIMAL.replace("n = 16\n", ""))), "n");
        assert_eq!(key_of(parse_config(&MINIMAL.replace("dt = 0.01", "dt = 0.03"))), "t_end");
        assert_eq!(key_of(parse_config(&MINIMAL.replace("g = 1.0", "g = 1.0\nkappa = -0.1"))), "kappa");
        assert_eq!(key_of(parse_config(&MINIMAL.replace("mhd-vortex", "abc"))), "preset");
        assert_eq!(key_of(parse_config(&MINIMAL.replace("g = 1.0", "g = 1.0\nnu = -1.0"))), "nu");
        assert_eq!(key_of(parse_config(&MINIMAL.replace("n = 16", "n = 16\ncutoff = 9"))), "cutoff");
    }
}
