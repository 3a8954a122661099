//! Verification reports and the append-only checkpoint log.

use std::collections::{BTreeMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rug::Float;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::arith::{format_truncated, Factorization, FactorizationJson, PrecisionContext};
use crate::error::Result;

/// Digits printed for high-precision values in reports.
pub const REPORT_DIGITS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    /// Every executed stage agreed with the expected outcome.
    Confirmed,
    /// A witness or a mismatching value was found.
    Counterexample,
    /// Some requested work was not exhausted.
    Partial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub label: String,
    pub factorization: FactorizationJson,
    pub log_n: String,
    pub values: BTreeMap<String, String>,
}

impl Witness {
    pub fn new(label: &str, f: &Factorization) -> Self {
        Witness {
            label: label.to_string(),
            factorization: f.to_json(),
            log_n: format_truncated(f.log_n(), REPORT_DIGITS),
            values: BTreeMap::new(),
        }
    }

    pub fn with_value(mut self, name: &str, v: &Float) -> Self {
        self.values.insert(name.to_string(), format_truncated(v, REPORT_DIGITS));
        self
    }
}

/// Enumeration bookkeeping: `enumerated = accepted + Σ rejected`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Exhaustion {
    pub enumerated: u64,
    pub accepted: u64,
    pub rejected: BTreeMap<String, u64>,
}

impl Exhaustion {
    pub fn accept(&mut self, n: u64) {
        self.enumerated += n;
        self.accepted += n;
    }

    pub fn reject(&mut self, reason: &str, n: u64) {
        self.enumerated += n;
        *self.rejected.entry(reason.to_string()).or_insert(0) += n;
    }

    pub fn absorb(&mut self, other: &Exhaustion) {
        self.enumerated += other.enumerated;
        self.accepted += other.accepted;
        for (k, v) in &other.rejected {
            *self.rejected.entry(k.clone()).or_insert(0) += v;
        }
    }

    pub fn reconciles(&self) -> bool {
        self.enumerated == self.accepted + self.rejected.values().sum::<u64>()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub theorem: String,
    pub phase: Option<String>,
    pub parameters: BTreeMap<String, Value>,
    pub status: Status,
    pub checks: Vec<Check>,
    pub witnesses: Vec<Witness>,
    pub exhaustion: Exhaustion,
    pub tables: BTreeMap<String, Value>,
    pub notes: Vec<String>,
    pub wall_time_s: f64,
    pub digits: u32,
}

impl VerificationReport {
    pub fn new(theorem: &str, phase: Option<&str>, ctx: &PrecisionContext) -> Self {
        VerificationReport {
            theorem: theorem.to_string(),
            phase: phase.map(str::to_string),
            parameters: BTreeMap::new(),
            status: Status::Confirmed,
            checks: Vec::new(),
            witnesses: Vec::new(),
            exhaustion: Exhaustion::default(),
            tables: BTreeMap::new(),
            notes: Vec::new(),
            wall_time_s: 0.0,
            digits: ctx.digits(),
        }
    }

    pub fn param(&mut self, name: &str, v: impl Into<Value>) {
        self.parameters.insert(name.to_string(), v.into());
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) -> bool {
        let detail = detail.into();
        if passed {
            log::debug!("pass {name}: {detail}");
        } else {
            log::warn!("FAIL {name}: {detail}");
        }
        self.checks.push(Check { name: name.to_string(), passed, detail });
        passed
    }

    pub fn table(&mut self, name: &str, v: Value) {
        self.tables.insert(name.to_string(), v);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn mark_partial(&mut self, why: impl Into<String>) {
        self.note(why);
        if self.status == Status::Confirmed {
            self.status = Status::Partial;
        }
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn find_check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Fixes the final status and wall time.
    pub fn finish(mut self, started: Instant) -> Self {
        if !self.all_passed() {
            self.status = Status::Counterexample;
        }
        self.wall_time_s = started.elapsed().as_secs_f64();
        self
    }

    /// Folds a sub-report's checks, witnesses, tables and counts into `self`.
    pub fn absorb(&mut self, other: VerificationReport) {
        let prefix = other.phase.clone().unwrap_or_default();
        for c in other.checks {
            let name = if prefix.is_empty() { c.name } else { format!("{prefix}/{}", c.name) };
            self.checks.push(Check { name, ..c });
        }
        self.witnesses.extend(other.witnesses);
        self.exhaustion.absorb(&other.exhaustion);
        self.tables.extend(other.tables);
        self.notes.extend(other.notes);
        if other.status == Status::Partial && self.status == Status::Confirmed {
            self.status = Status::Partial;
        }
        if other.status == Status::Counterexample {
            self.status = Status::Counterexample;
        }
    }
}

/// One line of the checkpoint log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointRecord {
    pub phase: String,
    pub box_id: String,
    pub status: String,
    pub best_witness: Option<Value>,
}

/// Newline-delimited JSON log of finished sub-boxes, used to resume scans.
#[derive(Debug)]
pub struct CheckpointLog {
    path: PathBuf,
    done: HashSet<(String, String)>,
    records: Vec<CheckpointRecord>,
}

impl CheckpointLog {
    /// Opens (or creates) the log and loads its completed entries.
    pub fn open(path: &Path) -> Result<Self> {
        let mut done = HashSet::new();
        let mut records = Vec::new();
        if path.exists() {
            let reader = BufReader::new(File::open(path)?);
            for line in reader.lines() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let rec: CheckpointRecord = serde_json::from_str(&line)?;
                if rec.status == "done" {
                    done.insert((rec.phase.clone(), rec.box_id.clone()));
                }
                records.push(rec);
            }
        }
        Ok(CheckpointLog { path: path.to_path_buf(), done, records })
    }

    pub fn is_done(&self, phase: &str, box_id: &str) -> bool {
        self.done.contains(&(phase.to_string(), box_id.to_string()))
    }

    pub fn records(&self) -> &[CheckpointRecord] {
        &self.records
    }

    pub fn append(&mut self, rec: CheckpointRecord) -> Result<()> {
        let mut f = OpenOptions::new().create(true).append(true).open(&self.path)?;
        writeln!(f, "{}", serde_json::to_string(&rec)?)?;
        f.flush()?;
        if rec.status == "done" {
            self.done.insert((rec.phase.clone(), rec.box_id.clone()));
        }
        self.records.push(rec);
        Ok(())
    }
}
