//! Run configuration: flat `key=value` files, `IONSIM_*` environment
//! overrides, and command-line flags, resolved in that order on top of the
//! built-in defaults. The fully resolved configuration has a canonical text
//! rendering whose SHA-256 hash is embedded in every report for provenance.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use ionsim::noise::NoiseSpec;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub ghz_n: Option<usize>,
    pub circuit_file: Option<PathBuf>,
    pub include_dd: bool,
    pub noise: NoiseSpec,
    pub shots: u64,
    pub seed: u64,
    pub phase_grid: usize,
    pub spam_correct: bool,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            ghz_n: None,
            circuit_file: None,
            include_dd: true,
            // without a config file the simulation is ideal
            noise: NoiseSpec::noiseless(),
            shots: 200,
            seed: 1,
            phase_grid: 0,
            spam_correct: true,
            out_dir: PathBuf::from("out"),
        }
    }
}

pub const CONFIG_KEYS: &[&str] = &[
    "ghz_n",
    "circuit_file",
    "include_dd",
    "noise_preset",
    "p1",
    "p2",
    "t1_seconds",
    "sigma_collective",
    "eps_bright",
    "eps_dark",
    "dur_1q_seconds",
    "dur_2q_seconds",
    "shots",
    "seed",
    "phase_grid",
    "spam_correct",
    "out_dir",
];

fn bad(msg: String) -> ionsim::Error {
    ionsim::Error::Config(msg)
}

impl RunConfig {
    /// Apply one `key=value` pair. `noise_preset` (none | measured | calibrated)
    /// replaces the whole noise block and should come before individual
    /// noise keys.
    pub fn set(&mut self, key: &str, value: &str) -> ionsim::Result<()> {
        let parse_f64 = |v: &str| -> ionsim::Result<f64> {
            v.parse::<f64>()
                .map_err(|e| bad(format!("bad value for `{key}`: {e}")))
        };
        let parse_u64 = |v: &str| -> ionsim::Result<u64> {
            v.parse::<u64>()
                .map_err(|e| bad(format!("bad value for `{key}`: {e}")))
        };
        let parse_bool = |v: &str| -> ionsim::Result<bool> {
            match v {
                "true" | "1" | "yes" => Ok(true),
                "false" | "0" | "no" => Ok(false),
                other => Err(bad(format!("bad boolean for `{key}`: `{other}`"))),
            }
        };
        match key {
            "ghz_n" => self.ghz_n = Some(parse_u64(value)? as usize),
            "circuit_file" => self.circuit_file = Some(PathBuf::from(value)),
            "include_dd" => self.include_dd = parse_bool(value)?,
            "noise_preset" => {
                self.noise = match value {
                    "none" | "noiseless" => NoiseSpec::noiseless(),
                    "measured" => NoiseSpec::measured_gates(),
                    "calibrated" => NoiseSpec::calibrated(),
                    other => return Err(bad(format!("unknown noise preset `{other}`"))),
                }
            }
            "p1" => self.noise.p1 = parse_f64(value)?,
            "p2" => self.noise.p2 = parse_f64(value)?,
            "t1_seconds" => self.noise.t1_seconds = parse_f64(value)?,
            "sigma_collective" => self.noise.sigma_collective = parse_f64(value)?,
            "eps_bright" => self.noise.eps_bright = parse_f64(value)?,
            "eps_dark" => self.noise.eps_dark = parse_f64(value)?,
            "dur_1q_seconds" => self.noise.dur_1q_seconds = parse_f64(value)?,
            "dur_2q_seconds" => self.noise.dur_2q_seconds = parse_f64(value)?,
            "shots" => self.shots = parse_u64(value)?,
            "seed" => self.seed = parse_u64(value)?,
            "phase_grid" => self.phase_grid = parse_u64(value)? as usize,
            "spam_correct" => self.spam_correct = parse_bool(value)?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            other => return Err(bad(format!("unknown configuration key `{other}`"))),
        }
        Ok(())
    }

    /// Parse a flat key=value file. `#` starts a comment.
    pub fn apply_file(&mut self, path: &Path) -> ionsim::Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| bad(format!("cannot read config {}: {e}", path.display())))?;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("line {}: expected key=value", idx + 1)))?;
            self.set(key.trim(), value.trim())
                .map_err(|e| bad(format!("line {}: {e}", idx + 1)))?;
        }
        Ok(())
    }

    /// Environment overrides: `IONSIM_<KEY>` for every config key.
    pub fn apply_env(&mut self) -> ionsim::Result<()> {
        for key in CONFIG_KEYS {
            if *key == "noise_preset" {
                // presets reset the noise block; only explicit file/flag use
                continue;
            }
            let var = format!("IONSIM_{}", key.to_uppercase());
            if let Ok(value) = std::env::var(&var) {
                self.set(key, &value)
                    .map_err(|e| bad(format!("{var}: {e}")))?;
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> ionsim::Result<()> {
        if self.ghz_n.is_some() && self.circuit_file.is_some() {
            return Err(bad(
                "exactly one of ghz_n / circuit_file may be set, got both".into(),
            ));
        }
        self.noise.validate()
    }

    /// Canonical rendering of the resolved configuration: one sorted
    /// `key=value` line per key that influences the computation (the output
    /// directory is a sink, not an input, and stays out of the hash).
    pub fn canonical_text(&self) -> String {
        let mut map = BTreeMap::new();
        map.insert(
            "ghz_n",
            self.ghz_n.map_or(String::new(), |n| n.to_string()),
        );
        map.insert(
            "circuit_file",
            self.circuit_file
                .as_ref()
                .map_or(String::new(), |p| p.display().to_string()),
        );
        map.insert("include_dd", self.include_dd.to_string());
        map.insert("p1", self.noise.p1.to_string());
        map.insert("p2", self.noise.p2.to_string());
        map.insert("t1_seconds", self.noise.t1_seconds.to_string());
        map.insert(
            "sigma_collective",
            self.noise.sigma_collective.to_string(),
        );
        map.insert("eps_bright", self.noise.eps_bright.to_string());
        map.insert("eps_dark", self.noise.eps_dark.to_string());
        map.insert("dur_1q_seconds", self.noise.dur_1q_seconds.to_string());
        map.insert("dur_2q_seconds", self.noise.dur_2q_seconds.to_string());
        map.insert("shots", self.shots.to_string());
        map.insert("seed", self.seed.to_string());
        map.insert("phase_grid", self.phase_grid.to_string());
        map.insert("spam_correct", self.spam_correct.to_string());
        let mut out = String::new();
        for (k, v) in map {
            out.push_str(k);
            out.push('=');
            out.push_str(&v);
            out.push('\n');
        }
        out
    }

    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let digest = Sha256::digest(self.canonical_text().as_bytes());
        let mut hex = String::with_capacity(64);
        for byte in digest {
            hex.push_str(&format!("{byte:02x}"));
        }
        hex
    }
}

/// Render a NoiseSpec as config keys, reusable via `--config`.
pub fn noise_to_config_text(noise: &NoiseSpec) -> String {
    format!(
        "p1={}\np2={}\nt1_seconds={}\nsigma_collective={}\neps_bright={}\neps_dark={}\ndur_1q_seconds={}\ndur_2q_seconds={}\n",
        noise.p1,
        noise.p2,
        noise.t1_seconds,
        noise.sigma_collective,
        noise.eps_bright,
        noise.eps_dark,
        noise.dur_1q_seconds,
        noise.dur_2q_seconds,
    )
}
