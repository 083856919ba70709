//! Batch experiments: a flat key-value config expands into trials over
//! `n x k x seeds`; each trial runs a build, writes and re-verifies its
//! certificate, and lands in a report.
//!
//! ```text
//! # comments start with '#'
//! n = 2000, 4000
//! k = 2
//! r = 4            # or: params = paper
//! t = 16
//! W = 10
//! seeds = 0..9     # inclusive range, or a comma list; may be empty
//! mode = heuristic
//! strategy = lazy
//! backing = implicit
//! workers = 4
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::builder::{audit_certificate, build_path_power, BuildResult, Strategy};
use crate::error::{Error, Result};
use crate::params::{LemmaParams, Mode};
use crate::tournament::{gen_implicit, gen_random, Tournament};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backing {
    Implicit,
    Explicit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamSpec {
    /// `r = 2^(3k)`, `t = 2^(6k)`, `W = 100` for each `k`.
    Paper,
    Fixed {
        r: usize,
        t: usize,
        #[serde(rename = "W")]
        windows: usize,
    },
}

impl ParamSpec {
    pub fn for_k(&self, k: usize) -> Result<LemmaParams> {
        match *self {
            ParamSpec::Paper => LemmaParams::default_for(k),
            ParamSpec::Fixed { r, t, windows } => LemmaParams::new(k, r, t, windows),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: Vec<usize>,
    pub k: Vec<usize>,
    pub params: ParamSpec,
    pub seeds: Vec<u64>,
    pub mode: Mode,
    pub strategy: String,
    pub backing: Backing,
    #[serde(skip)]
    pub workers: Option<usize>,
}

fn cfg_err(field: &str, message: impl Into<String>) -> Error {
    Error::Config {
        field: field.to_owned(),
        message: message.into(),
    }
}

fn parse_list<T: std::str::FromStr>(field: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| cfg_err(field, format!("bad value {s:?}"))))
        .collect()
}

fn parse_seeds(value: &str) -> Result<Vec<u64>> {
    let value = value.trim();
    if let Some((a, b)) = value.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| cfg_err("seeds", format!("bad range start {a:?}")))?;
        let b: u64 = b.trim().parse().map_err(|_| cfg_err("seeds", format!("bad range end {b:?}")))?;
        return Ok((a..=b).collect());
    }
    parse_list("seeds", value)
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut fields: BTreeMap<String, String> = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| cfg_err(line, format!("line {}: expected key = value", lineno + 1)))?;
            let key = key.trim().to_owned();
            if fields.insert(key.clone(), value.trim().to_owned()).is_some() {
                return Err(cfg_err(&key, "given twice"));
            }
        }
        let mut take = |key: &str| fields.remove(key);
        let require = |key: &str, v: Option<String>| v.ok_or_else(|| cfg_err(key, "missing"));

        let n: Vec<usize> = parse_list("n", &require("n", take("n"))?)?;
        let k: Vec<usize> = parse_list("k", &require("k", take("k"))?)?;
        if n.is_empty() {
            return Err(cfg_err("n", "needs at least one value"));
        }
        if k.is_empty() || k.contains(&0) {
            return Err(cfg_err("k", "needs values >= 1"));
        }
        let params = match take("params").as_deref() {
            Some("paper") => ParamSpec::Paper,
            Some(other) => return Err(cfg_err("params", format!("unknown preset {other:?}"))),
            None => {
                let mut num = |key: &str| -> Result<usize> {
                    let v = require(key, take(key))?;
                    v.parse().map_err(|_| cfg_err(key, format!("bad value {v:?}")))
                };
                ParamSpec::Fixed {
                    r: num("r")?,
                    t: num("t")?,
                    windows: num("W")?,
                }
            }
        };
        let seeds = parse_seeds(&require("seeds", take("seeds"))?)?;
        let mode = match take("mode") {
            Some(m) => m.parse().map_err(|e: Error| cfg_err("mode", e.to_string()))?,
            None => Mode::Heuristic,
        };
        let strategy = take("strategy").unwrap_or_else(|| "lazy".into());
        strategy
            .parse::<Strategy>()
            .map_err(|e| cfg_err("strategy", e.to_string()))?;
        let backing = match take("backing").as_deref() {
            None | Some("implicit") => Backing::Implicit,
            Some("explicit") => Backing::Explicit,
            Some(other) => return Err(cfg_err("backing", format!("unknown backing {other:?}"))),
        };
        let workers = match take("workers") {
            Some(w) => Some(
                w.parse()
                    .ok()
                    .filter(|&w: &usize| w > 0)
                    .ok_or_else(|| cfg_err("workers", format!("bad value {w:?}")))?,
            ),
            None => None,
        };
        if let Some(key) = fields.keys().next() {
            return Err(cfg_err(key, "unknown field"));
        }
        for &kk in &k {
            params.for_k(kk).map_err(|e| cfg_err("params", e.to_string()))?;
        }
        Ok(ExperimentConfig {
            n,
            k,
            params,
            seeds,
            mode,
            strategy,
            backing,
            workers,
        })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub t: usize,
    #[serde(rename = "W")]
    pub windows: usize,
    pub seed: u64,
    pub mode: Mode,
    pub strategy: String,
    pub success: bool,
    pub failing_stage: Option<String>,
    pub failing_step: Option<usize>,
    pub error: Option<String>,
    pub length: Option<usize>,
    pub bound: usize,
    pub satisfied: Option<bool>,
    pub ordering_passes: usize,
    pub repairs: u64,
    pub certificate: Option<String>,
    pub verified: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub min_length: Option<usize>,
    pub median_length: Option<usize>,
    pub max_length: Option<usize>,
    pub verification_failures: usize,
    pub guaranteed_failures: usize,
}

/// Wall-clock data, kept apart from the deterministic part of the report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub wall_ms: Vec<u128>,
    pub total_wall_ms: u128,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub records: Vec<TrialRecord>,
    pub summary: Summary,
    pub metadata: RunMetadata,
}

impl ExperimentReport {
    /// False iff a guaranteed-mode trial failed or a certificate did not verify.
    pub fn exit_ok(&self) -> bool {
        self.summary.verification_failures == 0 && self.summary.guaranteed_failures == 0
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "trial,n,k,r,t,W,seed,mode,strategy,success,failing_stage,failing_step,length,bound,satisfied,ordering_passes,repairs,verified,certificate\n",
        );
        let opt = |v: Option<String>| v.unwrap_or_default();
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                r.trial,
                r.n,
                r.k,
                r.r,
                r.t,
                r.windows,
                r.seed,
                r.mode,
                r.strategy,
                r.success,
                opt(r.failing_stage.clone()),
                opt(r.failing_step.map(|s| s.to_string())),
                opt(r.length.map(|s| s.to_string())),
                r.bound,
                opt(r.satisfied.map(|s| s.to_string())),
                r.ordering_passes,
                r.repairs,
                opt(r.verified.map(|s| s.to_string())),
                opt(r.certificate.clone()),
            ));
        }
        out
    }

    /// Writes `report.json`, `report.csv` into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), serde_json::to_string_pretty(self)? + "\n")?;
        fs::write(dir.join("report.csv"), self.to_csv())?;
        Ok(())
    }
}

struct Trial {
    n: usize,
    params: LemmaParams,
    seed: u64,
}

fn tournament_for(backing: Backing, n: usize, seed: u64) -> Tournament {
    match backing {
        Backing::Implicit => gen_implicit(n, seed),
        Backing::Explicit => gen_random(n, seed),
    }
}

/// Runs every trial, writing certificates under `out_dir/certs/`.
/// Refuses up front if any `(n, k)` violates `n >= W t`.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: &Path) -> Result<ExperimentReport> {
    let strategy: Strategy = cfg.strategy.parse()?;
    let mut trials = Vec::new();
    for &n in &cfg.n {
        for &k in &cfg.k {
            let params = cfg.params.for_k(k)?;
            if n < params.span() {
                return Err(Error::Precondition(format!(
                    "n >= W*t required: n = {n} but W*t = {} for k = {k}",
                    params.span()
                )));
            }
            for &seed in &cfg.seeds {
                trials.push(Trial { n, params, seed });
            }
        }
    }
    let cert_dir = out_dir.join("certs");
    if !trials.is_empty() {
        fs::create_dir_all(&cert_dir)?;
    }

    let started = Instant::now();
    let run = |(idx, trial): (usize, &Trial)| -> Result<(TrialRecord, u128)> {
        let clock = Instant::now();
        let rec = run_trial(idx, trial, cfg, strategy, &cert_dir)?;
        Ok((rec, clock.elapsed().as_millis()))
    };
    let results: Vec<(TrialRecord, u128)> = match cfg.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?
            .install(|| trials.par_iter().enumerate().map(run).collect::<Result<_>>())?,
        None => trials.par_iter().enumerate().map(run).collect::<Result<_>>()?,
    };
    let (records, wall_ms): (Vec<_>, Vec<_>) = results.into_iter().unzip();

    let mut lengths: Vec<usize> = records.iter().filter_map(|r| r.length).collect();
    lengths.sort_unstable();
    let successes = records.iter().filter(|r| r.success).count();
    let summary = Summary {
        trials: records.len(),
        successes,
        success_rate: if records.is_empty() { 0.0 } else { successes as f64 / records.len() as f64 },
        min_length: lengths.first().copied(),
        median_length: lengths.get(lengths.len().saturating_sub(1) / 2).copied(),
        max_length: lengths.last().copied(),
        verification_failures: records.iter().filter(|r| r.verified == Some(false)).count(),
        guaranteed_failures: records
            .iter()
            .filter(|r| r.mode == Mode::Guaranteed && !r.success)
            .count(),
    };
    Ok(ExperimentReport {
        config: cfg.clone(),
        records,
        summary,
        metadata: RunMetadata {
            wall_ms,
            total_wall_ms: started.elapsed().as_millis(),
        },
    })
}

fn run_trial(
    idx: usize,
    trial: &Trial,
    cfg: &ExperimentConfig,
    strategy: Strategy,
    cert_dir: &Path,
) -> Result<TrialRecord> {
    let p = trial.params;
    let t = tournament_for(cfg.backing, trial.n, trial.seed);
    let mut rec = TrialRecord {
        trial: idx,
        n: trial.n,
        k: p.k,
        r: p.r,
        t: p.t,
        windows: p.windows,
        seed: trial.seed,
        mode: cfg.mode,
        strategy: cfg.strategy.clone(),
        success: false,
        failing_stage: None,
        failing_step: None,
        error: None,
        length: None,
        bound: crate::builder::length_target(trial.n, &p),
        satisfied: None,
        ordering_passes: 0,
        repairs: 0,
        certificate: None,
        verified: None,
    };
    let outcome = match build_path_power(&t, &p, cfg.mode, strategy) {
        Ok(o) => o,
        Err(e @ (Error::Contract(_) | Error::Precondition(_))) => {
            rec.failing_stage = Some("error".into());
            rec.error = Some(e.to_string());
            return Ok(rec);
        }
        Err(e) => return Err(e),
    };
    rec.ordering_passes = outcome.stats.ordering_passes;
    rec.repairs = outcome.stats.repairs;
    match &outcome.result {
        BuildResult::Failed { step, report } => {
            rec.failing_stage = Some(report.stage.to_string());
            rec.failing_step = Some(*step);
            rec.error = Some(report.detail.clone());
        }
        BuildResult::Success(cert) => {
            let name = format!("trial_{idx:05}.json");
            let path: PathBuf = cert_dir.join(&name);
            cert.write(&path)?;
            let reread = crate::builder::PathPowerCertificate::read(&path)?;
            let lines = audit_certificate(&t, &reread, Some(&outcome.ordering))?;
            rec.success = true;
            rec.length = Some(cert.length);
            rec.satisfied = Some(cert.satisfied);
            rec.certificate = Some(format!("certs/{name}"));
            rec.verified = Some(lines.iter().all(|l| l.pass));
        }
    }
    Ok(rec)
}
