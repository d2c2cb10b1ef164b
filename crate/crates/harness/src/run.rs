//! Jobs, their output files, and run manifests.
//!
//! A job plus a scenario fully determines the bytes of every output file.
//! Each run writes `manifest.json` next to its outputs, recording the job,
//! the canonical scenario, its digest and the SHA-256 of every output, so a
//! run can be checked on disk and reproduced later.

use std::fs;
use std::path::{Path, PathBuf};

use hwnrisk_core::actuarial::ruin_probability;
use hwnrisk_core::hwn::realize_network;
use hwnrisk_core::seed::child_seed;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::assess::{assess, ruin_seed, scenario_outage, AssessOptions, AssessmentReport, TOOL_VERSION};
use crate::config::{CalibrationSection, ScenarioConfig, SCHEMA_VERSION};
use crate::error::{HarnessError, Result};
use crate::figures::reserve_path_pair;
use crate::output::*;
use crate::sweep::{sweep, Axis};

pub const MANIFEST_FILE: &str = "manifest.json";

/// Seeds scanned for the illustrative path pair.
pub const SAMPLE_PATH_SCAN: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Job {
    SampleGeometry,
    Outage,
    Ruin {
        /// Claim intensity; simulated from the network when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambda: Option<f64>,
        #[serde(default)]
        sample_paths: bool,
    },
    Assess {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        forced_outage: Option<f64>,
        #[serde(default)]
        calibrate: bool,
    },
    Sweep {
        axis: Axis,
        values: Vec<f64>,
    },
    Calibrate {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        forced_outage: Option<f64>,
    },
}

/// A named output file and its contents.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputFile {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl OutputFile {
    fn csv(name: &str, header: &[&str], rows: &Table) -> Result<Self> {
        Ok(Self {
            name: name.to_string(),
            bytes: encode_csv(header, rows)?,
        })
    }

    pub fn sha256(&self) -> String {
        hex::encode(Sha256::digest(&self.bytes))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobResult {
    pub files: Vec<OutputFile>,
    pub report: Option<AssessmentReport>,
}

fn ruin_table(config: &ScenarioConfig, lambda: f64) -> Result<Table> {
    let est = ruin_probability(
        &config.insurance_config(lambda),
        config.simulation.paths,
        ruin_seed(config.simulation.seed),
    )?;
    Ok(vec![vec![
        config.insurance.premium_rate.to_string(),
        lambda.to_string(),
        est.probability.to_string(),
        est.half_width.to_string(),
        est.paths.to_string(),
        config.simulation.seed.to_string(),
    ]])
}

/// Computes every output of `job` in memory.
pub fn produce(job: &Job, config: &ScenarioConfig) -> Result<JobResult> {
    config.validate()?;
    let mut files = Vec::new();
    let mut report = None;
    match job {
        Job::SampleGeometry => {
            let network = config.network_config()?;
            let r = realize_network(&network, child_seed(config.simulation.seed, "sample-geometry", 0))?;
            for (k, p) in r.tiers.iter().enumerate() {
                files.push(OutputFile::csv(
                    &format!("tier_{}.csv", k + 1),
                    &PATTERN_HEADER,
                    &pattern_rows(p),
                )?);
            }
            if network.jammers.is_some() {
                files.push(OutputFile::csv(
                    "jammers.csv",
                    &PATTERN_HEADER,
                    &pattern_rows(&r.jammers),
                )?);
            }
        }
        Job::Outage => {
            let rows = sweep_single_outage(config)?;
            files.push(OutputFile::csv("outage.csv", &OUTAGE_HEADER, &rows)?);
        }
        Job::Ruin { lambda, sample_paths } => {
            let lambda = match lambda {
                Some(l) => {
                    if !(*l >= 0.0 && l.is_finite()) {
                        return Err(HarnessError::Config {
                            field: "lambda".into(),
                            reason: format!("must be finite and >= 0, got {l}"),
                        });
                    }
                    *l
                }
                None => {
                    let o = scenario_outage(config, &config.network_config()?)?;
                    o.probability * config.network.users as f64
                }
            };
            files.push(OutputFile::csv("ruin.csv", &RUIN_HEADER, &ruin_table(config, lambda)?)?);
            if *sample_paths {
                let pair = reserve_path_pair(
                    &config.insurance_config(lambda),
                    config.simulation.seed,
                    SAMPLE_PATH_SCAN,
                )?;
                files.push(OutputFile::csv(
                    "path_ruin.csv",
                    &PATH_HEADER,
                    &path_rows(&pair.ruined),
                )?);
                files.push(OutputFile::csv("path_safe.csv", &PATH_HEADER, &path_rows(&pair.safe))?);
            }
        }
        Job::Assess {
            forced_outage,
            calibrate,
        } => {
            let r = assess(
                config,
                AssessOptions {
                    forced_outage: *forced_outage,
                    calibrate: *calibrate,
                },
            )?;
            files.push(OutputFile::csv(
                "assessment.csv",
                &ASSESSMENT_HEADER,
                &assessment_rows(&r),
            )?);
            if r.calibration.is_some() {
                files.push(OutputFile::csv(
                    "calibration.csv",
                    &CALIBRATION_HEADER,
                    &calibration_rows(&r),
                )?);
            }
            report = Some(r);
        }
        Job::Sweep { axis, values } => {
            let rows = sweep(config, *axis, values)?;
            files.push(OutputFile::csv("sweep.csv", &SWEEP_HEADER, &sweep_rows(&rows))?);
            files.push(OutputFile::csv("outage.csv", &OUTAGE_HEADER, &outage_rows(&rows))?);
            files.push(OutputFile::csv("ruin.csv", &RUIN_HEADER, &ruin_rows(&rows))?);
        }
        Job::Calibrate { forced_outage } => {
            let mut c = config.clone();
            c.calibration.get_or_insert_with(CalibrationSection::default);
            let r = assess(
                &c,
                AssessOptions {
                    forced_outage: *forced_outage,
                    calibrate: true,
                },
            )?;
            files.push(OutputFile::csv(
                "calibration.csv",
                &CALIBRATION_HEADER,
                &calibration_rows(&r),
            )?);
            report = Some(r);
        }
    }
    if let Some(r) = &report {
        let mut bytes = serde_json::to_vec_pretty(r).expect("report serializes");
        bytes.push(b'\n');
        files.push(OutputFile {
            name: "report.json".into(),
            bytes,
        });
    }
    Ok(JobResult { files, report })
}

fn sweep_single_outage(config: &ScenarioConfig) -> Result<Table> {
    let network = config.network_config()?;
    let o = scenario_outage(config, &network)?;
    let (zeta_j, alpha_j) = crate::assess::jammer_coordinates(&network);
    Ok(vec![vec![
        zeta_j.to_string(),
        alpha_j.to_string(),
        o.probability.to_string(),
        o.half_width.to_string(),
        o.trials.to_string(),
        config.simulation.seed.to_string(),
    ]])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputRecord {
    pub file: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub tool_version: String,
    pub schema_version: u32,
    pub job: Job,
    pub config: serde_json::Value,
    pub config_digest: String,
    pub seed: u64,
    pub trials: u64,
    pub paths: u64,
    pub outputs: Vec<OutputRecord>,
}

impl Manifest {
    pub fn new(job: &Job, config: &ScenarioConfig, files: &[OutputFile]) -> Self {
        Self {
            tool_version: TOOL_VERSION.to_string(),
            schema_version: SCHEMA_VERSION,
            job: job.clone(),
            config: serde_json::from_str(&config.canonical_json()).expect("canonical json parses"),
            config_digest: config.digest(),
            seed: config.simulation.seed,
            trials: config.simulation.trials,
            paths: config.simulation.paths,
            outputs: files
                .iter()
                .map(|f| OutputRecord {
                    file: f.name.clone(),
                    sha256: f.sha256(),
                    bytes: f.bytes.len() as u64,
                })
                .collect(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| HarnessError::Verification(format!("{}: {e}", path.display())))
    }

    /// The scenario stored in the manifest.
    pub fn scenario(&self) -> Result<ScenarioConfig> {
        ScenarioConfig::from_json(&self.config.to_string())
    }
}

/// Writes `result`'s files and a manifest into `out_dir`.
pub fn emit(job: &Job, config: &ScenarioConfig, result: &JobResult, out_dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(out_dir).map_err(|e| HarnessError::io(out_dir, e))?;
    for f in &result.files {
        let path = out_dir.join(&f.name);
        fs::write(&path, &f.bytes).map_err(|e| HarnessError::io(&path, e))?;
    }
    let manifest = Manifest::new(job, config, &result.files);
    let path = out_dir.join(MANIFEST_FILE);
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    fs::write(&path, text).map_err(|e| HarnessError::io(&path, e))?;
    Ok(path)
}

/// Runs `job` and writes its outputs and manifest into `out_dir`.
pub fn execute(job: &Job, config: &ScenarioConfig, out_dir: &Path) -> Result<JobResult> {
    let result = produce(job, config)?;
    emit(job, config, &result, out_dir)?;
    Ok(result)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verification {
    pub problems: Vec<String>,
    /// Whether outputs were recomputed and compared.
    pub reran: bool,
}

impl Verification {
    pub fn ok(&self) -> bool {
        self.problems.is_empty()
    }

    pub fn into_result(self) -> Result<Self> {
        if self.ok() {
            Ok(self)
        } else {
            Err(HarnessError::Verification(self.problems.join("; ")))
        }
    }
}

/// Checks a manifest against its scenario and the files beside it, and with
/// `rerun` also recomputes every output and compares digests.
pub fn verify(manifest_path: &Path, rerun: bool) -> Result<Verification> {
    let manifest = Manifest::load(manifest_path)?;
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let mut problems = Vec::new();
    let scenario = match manifest.scenario() {
        Ok(s) => Some(s),
        Err(e) => {
            problems.push(format!("stored scenario is invalid: {e}"));
            None
        }
    };
    if let Some(s) = &scenario {
        let digest = s.digest();
        if digest != manifest.config_digest {
            problems.push(format!(
                "config digest mismatch: manifest says {}, scenario hashes to {digest}",
                manifest.config_digest
            ));
        }
        if s.simulation.seed != manifest.seed
            || s.simulation.trials != manifest.trials
            || s.simulation.paths != manifest.paths
        {
            problems.push("seed, trials or paths disagree with the stored scenario".into());
        }
    }
    for rec in &manifest.outputs {
        let path = dir.join(&rec.file);
        match fs::read(&path) {
            Ok(bytes) => {
                let h = hex::encode(Sha256::digest(&bytes));
                if h != rec.sha256 {
                    problems.push(format!("{} has digest {h}, manifest says {}", rec.file, rec.sha256));
                }
            }
            Err(e) => problems.push(format!("{}: {e}", path.display())),
        }
    }
    if rerun {
        if let Some(s) = &scenario {
            let fresh = produce(&manifest.job, s)?;
            let fresh_records = Manifest::new(&manifest.job, s, &fresh.files).outputs;
            if fresh_records != manifest.outputs {
                problems.push("re-running the job produced different outputs".into());
            }
        }
    }
    Ok(Verification { problems, reran: rerun })
}
