//! Artifact writers. Floats use Rust's shortest round-trip formatting, so
//! identical runs produce byte-identical files.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use ionsim::experiments::{ParityScanResult, PopulationResult, ProtocolOutput};
use ionsim::noise::NoiseSpec;

fn bad_io(path: &Path, e: std::io::Error) -> ionsim::Error {
    ionsim::Error::Config(format!("cannot write {}: {e}", path.display()))
}

pub fn ensure_dir(dir: &Path) -> ionsim::Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| bad_io(dir, e))
}

fn bitstring(index: usize, n: usize) -> String {
    (0..n)
        .map(|q| {
            if (index >> (n - 1 - q)) & 1 == 1 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

/// `population.csv`: one row per basis state, columns
/// (bitstring, probability, stderr).
pub fn write_population_csv(
    dir: &Path,
    n: usize,
    pop: &PopulationResult,
) -> ionsim::Result<PathBuf> {
    let path = dir.join("population.csv");
    let mut out = String::from("bitstring,probability,stderr\n");
    for (index, &p) in pop.distribution.iter().enumerate() {
        let stderr = if pop.shots == 0 {
            0.0
        } else {
            (p.clamp(0.0, 1.0) * (1.0 - p.clamp(0.0, 1.0)) / pop.shots as f64).sqrt()
        };
        out.push_str(&format!("{},{},{}\n", bitstring(index, n), p, stderr));
    }
    std::fs::write(&path, out).map_err(|e| bad_io(&path, e))?;
    Ok(path)
}

/// `parity.csv`: one row per scan phase, columns (phi_radians, parity, stderr).
pub fn write_parity_csv(dir: &Path, scan: &ParityScanResult) -> ionsim::Result<PathBuf> {
    let path = dir.join("parity.csv");
    let mut out = String::from("phi_radians,parity,stderr\n");
    for ((phi, parity), stderr) in scan
        .phases
        .iter()
        .zip(&scan.parities)
        .zip(&scan.stderrs)
    {
        out.push_str(&format!("{phi},{parity},{stderr}\n"));
    }
    std::fs::write(&path, out).map_err(|e| bad_io(&path, e))?;
    Ok(path)
}

fn serialize_maybe_infinite<S>(value: &f64, serializer: S) -> Result<S::Ok, S::Error>
where
    S: serde::Serializer,
{
    if value.is_finite() {
        serializer.serialize_f64(*value)
    } else {
        serializer.serialize_str("inf")
    }
}

#[derive(Serialize)]
struct NoiseJson {
    p1: f64,
    p2: f64,
    #[serde(serialize_with = "serialize_maybe_infinite")]
    t1_seconds: f64,
    sigma_collective: f64,
    eps_bright: f64,
    eps_dark: f64,
    dur_1q_seconds: f64,
    dur_2q_seconds: f64,
}

impl From<&NoiseSpec> for NoiseJson {
    fn from(n: &NoiseSpec) -> Self {
        Self {
            p1: n.p1,
            p2: n.p2,
            t1_seconds: n.t1_seconds,
            sigma_collective: n.sigma_collective,
            eps_bright: n.eps_bright,
            eps_dark: n.eps_dark,
            dur_1q_seconds: n.dur_1q_seconds,
            dur_2q_seconds: n.dur_2q_seconds,
        }
    }
}

#[derive(Serialize)]
pub struct Report {
    pub version: &'static str,
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
    pub n: usize,
    pub shots: u64,
    pub exact: bool,
    pub spam_corrected: bool,
    pub include_dd: bool,
    noise: NoiseJson,
    pub a_value: f64,
    pub a_stderr: f64,
    pub b_value: f64,
    pub raw_a_value: f64,
    pub raw_b_value: f64,
    pub fitted_phi0: f64,
    pub rms_residual: f64,
    pub fidelity: f64,
    pub witness: f64,
    pub genuinely_entangled: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direct_fidelity: Option<f64>,
    pub prep_duration_seconds: f64,
}

pub fn build_report(
    command: &str,
    config_hash: String,
    include_dd: bool,
    noise: &NoiseSpec,
    out: &ProtocolOutput,
) -> Report {
    Report {
        version: env!("CARGO_PKG_VERSION"),
        command: command.to_string(),
        config_hash,
        seed: out.report.seed,
        n: out.report.n,
        shots: out.report.shots,
        exact: out.report.shots == 0,
        spam_corrected: out.report.spam_corrected,
        include_dd,
        noise: NoiseJson::from(noise),
        a_value: out.report.a_value,
        a_stderr: out.population.stderr,
        b_value: out.report.b_value,
        raw_a_value: out.report.raw_a_value,
        raw_b_value: out.report.raw_b_value,
        fitted_phi0: out.report.fitted_phi0,
        rms_residual: out.report.rms_residual,
        fidelity: out.report.fidelity,
        witness: out.report.witness,
        genuinely_entangled: out.report.genuinely_entangled,
        direct_fidelity: out.report.direct_fidelity,
        prep_duration_seconds: out.report.total_duration_seconds,
    }
}

pub fn write_report(dir: &Path, report: &Report) -> ionsim::Result<PathBuf> {
    let path = dir.join("report.json");
    let json = serde_json::to_string_pretty(report)
        .map_err(|e| ionsim::Error::Config(format!("report serialization failed: {e}")))?;
    let mut file = std::fs::File::create(&path).map_err(|e| bad_io(&path, e))?;
    file.write_all(json.as_bytes()).map_err(|e| bad_io(&path, e))?;
    file.write_all(b"\n").map_err(|e| bad_io(&path, e))?;
    Ok(path)
}

pub fn write_text(path: &Path, text: &str) -> ionsim::Result<()> {
    std::fs::write(path, text).map_err(|e| bad_io(path, e))
}
