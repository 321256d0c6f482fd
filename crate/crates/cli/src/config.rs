//! Scenario presets and the TOML configuration file.
//!
//! A scenario starts from a named preset, then applies the `[scenario]`,
//! `[system]` and `[simulation]` tables of a config file, then command-line
//! overrides. Thresholds are given in dB here and converted once.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use sha2::{Digest, Sha256};

use velopaoi_core::channel::db_to_linear;
use velopaoi_core::sim::{LabelMode, Placement};
use velopaoi_core::{Environment, ServingLaw, SimConfig, SystemParams, UserKind};

use crate::CliError;

/// Subcommand a scenario is resolved for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Meta,
    Correlation,
    Joint,
    Paoi,
    Validate,
    HandoverCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Meta => "meta",
            Command::Correlation => "correlation",
            Command::Joint => "joint",
            Command::Paoi => "paoi",
            Command::Validate => "validate",
            Command::HandoverCheck => "handover-check",
        }
    }
}

/// How the analytical correlation coefficient is normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationForm {
    /// Every moment from the discretized joint lattices.
    Lattice,
    /// Cross moment from the lattices, mean and variance from the model's
    /// moment integrals.
    ModelMoments,
}

pub const PRESETS: [&str; 5] = ["ground", "suburban", "urban", "dense-urban", "highrise"];

/// Velocities (m per unit time) swept by the correlation, joint and PAoI runs.
pub const DEFAULT_VELOCITIES: [f64; 5] = [0.0, 100.0, 200.0, 400.0, 650.0];

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub command: Command,
    pub kind: UserKind,
    pub environment: Environment,
    pub theta_db: f64,
    pub velocities: Vec<f64>,
    /// Time between the two observations.
    pub interval: f64,
    pub trials: usize,
    pub seed: u64,
    /// Output stem; files are written as `<out>_analysis.csv` and
    /// `<out>_simulation.csv`.
    pub out: PathBuf,
    pub params: SystemParams,
    pub sim: SimConfig,
    pub serving_law: ServingLaw,
    pub correlation_form: CorrelationForm,
    pub gamma0: f64,
    pub gamma1: f64,
    pub percentile: f64,
    /// Absolute tolerance, or relative for PAoI percentiles.
    pub tolerance: f64,
}

impl Scenario {
    pub fn preset(name: &str, command: Command) -> Result<Self, CliError> {
        let (kind, environment) = match name {
            "ground" => (UserKind::Ground, Environment::Suburban),
            "suburban" => (UserKind::Aerial, Environment::Suburban),
            "urban" => (UserKind::Aerial, Environment::Urban),
            "dense-urban" => (UserKind::Aerial, Environment::DenseUrban),
            "highrise" => (UserKind::Aerial, Environment::Highrise),
            other => {
                return Err(CliError::Config(format!(
                    "unknown preset `{other}` (expected one of {})",
                    PRESETS.join(", ")
                )))
            }
        };
        // Highrise success probabilities at 0 dB are too small to resolve a
        // joint law, so the mobility runs lower the threshold.
        let theta_db = match (environment, command) {
            (Environment::Highrise, Command::Joint | Command::Paoi) if kind == UserKind::Aerial => -20.0,
            _ => 0.0,
        };
        let tolerance = match command {
            Command::Meta => match environment {
                Environment::DenseUrban | Environment::Highrise if kind == UserKind::Aerial => 0.10,
                _ => 0.05,
            },
            Command::HandoverCheck => 0.01,
            _ => 0.05,
        };
        let trials = match command {
            Command::Meta => 100_000,
            Command::HandoverCheck => 1_000_000,
            _ => 20_000,
        };
        let mut s = Scenario {
            name: name.to_string(),
            command,
            kind,
            environment,
            theta_db,
            velocities: DEFAULT_VELOCITIES.to_vec(),
            interval: 1.0,
            trials,
            seed: 1,
            out: PathBuf::from(format!("{name}_{}", command.name())),
            params: SystemParams::default().with_environment(environment),
            sim: SimConfig::default(),
            serving_law: ServingLaw::default(),
            correlation_form: CorrelationForm::Lattice,
            gamma0: 0.5,
            gamma1: 0.5,
            percentile: 0.6,
            tolerance,
        };
        s.sync();
        Ok(s)
    }

    /// Resolves `spec` as a config file path when it exists, else as a preset.
    pub fn resolve(spec: &str, command: Command) -> Result<Self, CliError> {
        let path = Path::new(spec);
        if path.is_file() {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            Self::from_toml(&text, command)
        } else {
            Self::preset(spec, command)
        }
    }

    pub fn from_toml(text: &str, command: Command) -> Result<Self, CliError> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        let base = file.preset.as_deref().unwrap_or("suburban");
        let mut s = Scenario::preset(base, command)?;
        file.scenario.apply(&mut s)?;
        file.system.apply(&mut s.params);
        file.simulation.apply(&mut s.sim)?;
        s.sync();
        s.check()?;
        Ok(s)
    }

    /// Pushes derived fields into the parameter set.
    pub fn sync(&mut self) {
        let (a, b) = self.environment.coefficients();
        self.params.env_a = a;
        self.params.env_b = b;
        self.params.sinr_threshold = db_to_linear(self.theta_db);
    }

    pub fn check(&self) -> Result<(), CliError> {
        self.params.validate().map_err(|e| CliError::Config(e.to_string()))?;
        if self.trials == 0 {
            return Err(CliError::Config("trials must be positive".into()));
        }
        if self.velocities.iter().any(|v| !(*v >= 0.0)) {
            return Err(CliError::Config("velocities must be non-negative".into()));
        }
        for (what, g) in [("gamma0", self.gamma0), ("gamma1", self.gamma1)] {
            if !(0.0..=1.0).contains(&g) {
                return Err(CliError::Config(format!("{what} = {g} outside [0, 1]")));
            }
        }
        if !(0.0..1.0).contains(&self.percentile) {
            return Err(CliError::Config(format!("percentile {} outside [0, 1)", self.percentile)));
        }
        if !(self.interval > 0.0) {
            return Err(CliError::Config("interval must be positive".into()));
        }
        Ok(())
    }

    /// Every input that determines the output, as canonical JSON.
    pub fn canonical(&self) -> String {
        let p = &self.params;
        let value = serde_json::json!({
            "name": self.name,
            "command": self.command.name(),
            "user": self.kind.name(),
            "environment": self.environment.name(),
            "env_a": p.env_a,
            "env_b": p.env_b,
            "threshold_db": self.theta_db,
            "velocities": self.velocities,
            "interval": self.interval,
            "trials": self.trials,
            "seed": self.seed,
            "serving_law": match self.serving_law { ServingLaw::Printed => "printed", ServingLaw::Normalized => "normalized" },
            "correlation_form": match self.correlation_form { CorrelationForm::Lattice => "lattice", CorrelationForm::ModelMoments => "model-moments" },
            "gamma0": self.gamma0,
            "gamma1": self.gamma1,
            "percentile": self.percentile,
            "tolerance": self.tolerance,
            "system": {
                "bs_density": p.bs_density_km2,
                "ue_density": p.ue_density_km2,
                "fit_factor": p.fit_factor,
                "tx_power": p.tx_power,
                "noise": p.noise,
                "ground_pathloss": p.ground_pathloss,
                "los_pathloss": p.los_pathloss,
                "nlos_pathloss": p.nlos_pathloss,
                "los_shape": p.los_shape,
                "nlos_shape": p.nlos_shape,
                "los_excess": p.los_excess,
                "nlos_excess": p.nlos_excess,
                "altitude": p.altitude,
                "arrival_rate": p.arrival_rate,
                "handover_delay": p.handover_delay,
                "slot_duration": p.slot_duration,
                "pdf_step": p.pdf_step,
            },
            "simulation": {
                "placement": match self.sim.placement { Placement::Cell => "cell", Placement::Origin => "origin" },
                "labels": match self.sim.labels { LabelMode::Redraw => "redraw", LabelMode::Persistent => "persistent" },
                "window_factor": self.sim.window_factor,
                "tail_compensation": self.sim.tail_compensation,
            },
        });
        value.to_string()
    }

    /// SHA-256 of the canonical scenario, first 16 hex digits.
    pub fn scenario_hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))[..16].to_string()
    }

    /// Git-style blob hash of the canonical scenario together with the
    /// crate version.
    pub fn fingerprint(&self) -> String {
        let body = format!("{}\n{}", env!("CARGO_PKG_VERSION"), self.canonical());
        let mut h = Sha256::new();
        h.update(format!("blob {}\0", body.len()).as_bytes());
        h.update(body.as_bytes());
        hex::encode(h.finalize())
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    preset: Option<String>,
    #[serde(default)]
    scenario: ScenarioTable,
    #[serde(default)]
    system: SystemTable,
    #[serde(default)]
    simulation: SimulationTable,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioTable {
    name: Option<String>,
    user: Option<String>,
    environment: Option<String>,
    env_a: Option<f64>,
    env_b: Option<f64>,
    threshold_db: Option<f64>,
    velocities: Option<Vec<f64>>,
    interval: Option<f64>,
    trials: Option<usize>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    serving_law: Option<String>,
    correlation_form: Option<String>,
    gamma0: Option<f64>,
    gamma1: Option<f64>,
    percentile: Option<f64>,
    tolerance: Option<f64>,
}

impl ScenarioTable {
    fn apply(self, s: &mut Scenario) -> Result<(), CliError> {
        if let Some(v) = self.name {
            s.name = v;
        }
        if let Some(v) = self.user {
            s.kind = match v.as_str() {
                "ground" => UserKind::Ground,
                "aerial" => UserKind::Aerial,
                other => return Err(CliError::Config(format!("unknown user kind `{other}`"))),
            };
        }
        if let Some(v) = self.environment {
            s.environment = match v.as_str() {
                "suburban" => Environment::Suburban,
                "urban" => Environment::Urban,
                "dense-urban" => Environment::DenseUrban,
                "highrise" => Environment::Highrise,
                "custom" => {
                    let (Some(a), Some(b)) = (self.env_a, self.env_b) else {
                        return Err(CliError::Config("custom environment needs env_a and env_b".into()));
                    };
                    Environment::Custom { a, b }
                }
                other => return Err(CliError::Config(format!("unknown environment `{other}`"))),
            };
        } else if self.env_a.is_some() || self.env_b.is_some() {
            return Err(CliError::Config("env_a/env_b require environment = \"custom\"".into()));
        }
        if let Some(v) = self.threshold_db {
            s.theta_db = v;
        }
        if let Some(v) = self.velocities {
            s.velocities = v;
        }
        if let Some(v) = self.interval {
            s.interval = v;
        }
        if let Some(v) = self.trials {
            s.trials = v;
        }
        if let Some(v) = self.seed {
            s.seed = v;
        }
        if let Some(v) = self.out {
            s.out = v;
        }
        if let Some(v) = self.serving_law {
            s.serving_law = match v.as_str() {
                "printed" => ServingLaw::Printed,
                "normalized" => ServingLaw::Normalized,
                other => return Err(CliError::Config(format!("unknown serving_law `{other}`"))),
            };
        }
        if let Some(v) = self.correlation_form {
            s.correlation_form = match v.as_str() {
                "lattice" => CorrelationForm::Lattice,
                "model-moments" => CorrelationForm::ModelMoments,
                other => return Err(CliError::Config(format!("unknown correlation_form `{other}`"))),
            };
        }
        if let Some(v) = self.gamma0 {
            s.gamma0 = v;
        }
        if let Some(v) = self.gamma1 {
            s.gamma1 = v;
        }
        if let Some(v) = self.percentile {
            s.percentile = v;
        }
        if let Some(v) = self.tolerance {
            s.tolerance = v;
        }
        Ok(())
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemTable {
    bs_density: Option<f64>,
    ue_density: Option<f64>,
    fit_factor: Option<f64>,
    tx_power: Option<f64>,
    noise: Option<f64>,
    ground_pathloss: Option<f64>,
    los_pathloss: Option<f64>,
    nlos_pathloss: Option<f64>,
    los_shape: Option<u32>,
    nlos_shape: Option<u32>,
    los_excess: Option<f64>,
    nlos_excess: Option<f64>,
    altitude: Option<f64>,
    arrival_rate: Option<f64>,
    handover_delay: Option<f64>,
    slot_duration: Option<f64>,
    pdf_step: Option<f64>,
}

impl SystemTable {
    fn apply(self, p: &mut SystemParams) {
        let set = |dst: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *dst = v;
            }
        };
        set(&mut p.bs_density_km2, self.bs_density);
        set(&mut p.ue_density_km2, self.ue_density);
        set(&mut p.fit_factor, self.fit_factor);
        set(&mut p.tx_power, self.tx_power);
        set(&mut p.noise, self.noise);
        set(&mut p.ground_pathloss, self.ground_pathloss);
        set(&mut p.los_pathloss, self.los_pathloss);
        set(&mut p.nlos_pathloss, self.nlos_pathloss);
        set(&mut p.los_excess, self.los_excess);
        set(&mut p.nlos_excess, self.nlos_excess);
        set(&mut p.altitude, self.altitude);
        set(&mut p.arrival_rate, self.arrival_rate);
        set(&mut p.handover_delay, self.handover_delay);
        set(&mut p.slot_duration, self.slot_duration);
        set(&mut p.pdf_step, self.pdf_step);
        if let Some(m) = self.los_shape {
            p.los_shape = m;
        }
        if let Some(m) = self.nlos_shape {
            p.nlos_shape = m;
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimulationTable {
    placement: Option<String>,
    labels: Option<String>,
    window_factor: Option<f64>,
    tail_compensation: Option<bool>,
}

impl SimulationTable {
    fn apply(self, c: &mut SimConfig) -> Result<(), CliError> {
        if let Some(v) = self.placement {
            c.placement = match v.as_str() {
                "cell" => Placement::Cell,
                "origin" => Placement::Origin,
                other => return Err(CliError::Config(format!("unknown placement `{other}`"))),
            };
        }
        if let Some(v) = self.labels {
            c.labels = match v.as_str() {
                "redraw" => LabelMode::Redraw,
                "persistent" => LabelMode::Persistent,
                other => return Err(CliError::Config(format!("unknown label mode `{other}`"))),
            };
        }
        if self.window_factor.is_some() {
            c.window_factor = self.window_factor;
        }
        if let Some(v) = self.tail_compensation {
            c.tail_compensation = v;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_use_table_coefficients() {
        for (name, env) in [
            ("suburban", Environment::Suburban),
            ("urban", Environment::Urban),
            ("dense-urban", Environment::DenseUrban),
            ("highrise", Environment::Highrise),
        ] {
            let s = Scenario::preset(name, Command::Meta).unwrap();
            assert_eq!((s.params.env_a, s.params.env_b), env.coefficients());
            assert_eq!(s.params.sinr_threshold, 1.0);
        }
    }

    #[test]
    fn highrise_mobility_runs_use_minus_twenty_db() {
        let s = Scenario::preset("highrise", Command::Paoi).unwrap();
        assert_eq!(s.theta_db, -20.0);
        assert!((s.params.sinr_threshold - 0.01).abs() < 1e-15);
    }

    #[test]
    fn file_overrides_preset() {
        let s = Scenario::from_toml(
            r#"
            preset = "ground"
            [scenario]
            threshold_db = 3.0
            velocities = [0.0, 50.0]
            [system]
            altitude = 150.0
            [simulation]
            placement = "origin"
            "#,
            Command::Correlation,
        )
        .unwrap();
        assert_eq!(s.kind, UserKind::Ground);
        assert_eq!(s.velocities, vec![0.0, 50.0]);
        assert_eq!(s.params.altitude, 150.0);
        assert_eq!(s.sim.placement, Placement::Origin);
        assert!((s.params.sinr_threshold - 10f64.powf(0.3)).abs() < 1e-12);
    }

    #[test]
    fn rejects_unknown_keys_and_values() {
        assert!(Scenario::from_toml("[scenario]\nspeed = 3", Command::Meta).is_err());
        assert!(Scenario::from_toml("[scenario]\nuser = \"boat\"", Command::Meta).is_err());
        assert!(Scenario::preset("moon", Command::Meta).is_err());
        assert!(Scenario::from_toml("[system]\npdf_step = 0.03", Command::Meta).is_err());
    }

    #[test]
    fn shipped_example_parses() {
        let s = Scenario::from_toml(include_str!("../scenarios/example.toml"), Command::Correlation).unwrap();
        assert_eq!(s.params, SystemParams::default().with_environment(Environment::Suburban));
        assert_eq!(s.trials, 10_000);
    }

    #[test]
    fn fingerprint_tracks_inputs() {
        let a = Scenario::preset("urban", Command::Meta).unwrap();
        let mut b = a.clone();
        assert_eq!(a.fingerprint(), b.fingerprint());
        b.seed = 2;
        assert_ne!(a.fingerprint(), b.fingerprint());
        assert_ne!(a.scenario_hash(), b.scenario_hash());
    }
}
