//! n_* is the largest n with ω(n) >= 44 and λ(n) > 1.

pub mod finale;
pub mod intervals;
pub mod prelim;
pub mod reduce;
pub mod scan;
pub mod types;

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use serde_json::json;

use crate::arith::PrimeTable;
use crate::error::{Error, Result};

use super::interval::INTERVAL_COUNT;
use super::reference::{table9_range, TABLE10, TABLE6, TABLE7, TABLE8, TABLE_TOL};
use super::report::{CheckpointLog, VerificationReport};

pub use finale::{bucket, triplets, Triplet, Triplets, BUCKETS};
pub use intervals::{IntervalBounds, Setup};
pub use reduce::{eliminate, pair_bounds, PairBounds, Worst};
pub use scan::{Screen, Tally};
pub use types::ScanType;

/// Last interval carried through the scans; later ones are eliminated by the tables.
pub const SCANNED_J_MAX: u32 = 39;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Phase {
    Prelim,
    Tables,
    Type1,
    Type2,
    Reduce,
    Final,
}

impl Phase {
    pub const ALL: [Phase; 6] = [Phase::Prelim, Phase::Tables, Phase::Type1, Phase::Type2, Phase::Reduce, Phase::Final];

    pub fn name(self) -> &'static str {
        match self {
            Phase::Prelim => "prelim",
            Phase::Tables => "tables",
            Phase::Type1 => "type1",
            Phase::Type2 => "type2",
            Phase::Reduce => "reduce",
            Phase::Final => "final",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Phase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Phase::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::domain("phase", format!("unknown phase {s:?}")))
    }
}

/// Number of index partitions handed to the box enumerator.
#[derive(Debug, Clone, Copy)]
pub struct Partitions(pub usize);

impl Default for Partitions {
    fn default() -> Self {
        Partitions(rayon::current_num_threads() * 4)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Thm5Options {
    /// None runs every phase in order.
    pub phase: Option<Phase>,
    pub j: Option<u32>,
    pub bucket: Option<u32>,
    pub long_running: bool,
    pub checkpoint: Option<PathBuf>,
    pub partitions: Partitions,
}

pub(crate) fn record_tally(rep: &mut VerificationReport, t: &Tally) {
    rep.exhaustion.reject("log_n_below_window", t.below_window);
    rep.exhaustion.reject("lambda_below_one", t.lambda_below_one);
    rep.exhaustion.reject("cleared_high_precision", t.cleared_high_precision);
    rep.exhaustion.reject("equals_n_star", t.n_star);
    rep.exhaustion.accept(t.violations);
}

struct Driver<'a> {
    setup: Setup<'a>,
    cache: BTreeMap<u32, IntervalBounds>,
    opts: &'a Thm5Options,
    log: Option<CheckpointLog>,
}

impl<'a> Driver<'a> {
    fn bounds(&mut self, j: u32) -> Result<&IntervalBounds> {
        if !self.cache.contains_key(&j) {
            let b = IntervalBounds::compute(&self.setup, j)?;
            self.cache.insert(j, b);
        }
        Ok(&self.cache[&j])
    }

    /// The intervals a phase covers, or None when the full range needs the long-running flag.
    fn scope(&self, j_max: u32, needs_flag: bool) -> Option<Vec<u32>> {
        match self.opts.j {
            Some(j) if j <= j_max => Some(vec![j]),
            Some(_) => Some(Vec::new()),
            None if needs_flag && !self.opts.long_running => None,
            None => Some((1..=j_max).collect()),
        }
    }

    fn tables(&mut self, rep: &mut VerificationReport) -> Result<()> {
        let js: Vec<u32> = match self.opts.j {
            Some(j) => vec![j],
            None => (1..=INTERVAL_COUNT).collect(),
        };
        let mut rows = Vec::new();
        let mut bad_w = Vec::new();
        let mut bad6 = Vec::new();
        let mut bad7 = Vec::new();
        let mut bad8 = Vec::new();
        let mut bad9 = Vec::new();
        let mut not_eliminated = Vec::new();
        for &j in &js {
            let b = self.bounds(j)?.clone();
            if b.upsilon_at_w >= 1 {
                bad_w.push(j);
            }
            let (w, varpi, dp) = (b.w.to_f64(), b.varpi.to_f64(), b.delta_prime.to_f64());
            if j <= SCANNED_J_MAX {
                let k = (j - 1) as usize;
                if w > TABLE6[k] + TABLE_TOL {
                    bad6.push((j, w));
                }
                if varpi < TABLE7[k] - TABLE_TOL {
                    bad7.push((j, varpi));
                }
                if dp > TABLE8[k] + TABLE_TOL {
                    bad8.push((j, dp));
                }
                if let Some(expected) = table9_range(j) {
                    if b.m_range != Some(expected) {
                        bad9.push((j, b.m_range));
                    }
                }
            } else if b.varpi <= b.w_star {
                not_eliminated.push(j);
            }
            rows.push(json!({
                "j": j,
                "w_star": b.w_star.to_f64(),
                "w": w,
                "varpi_lower": varpi,
                "delta_prime": dp,
                "m_range": b.m_range,
            }));
        }
        rep.table("intervals", json!(rows));
        rep.check("w(j) bounds all z_{m,w}", bad_w.is_empty(), format!("failing j {bad_w:?}"));
        let scanned = js.iter().filter(|&&j| j <= SCANNED_J_MAX).count();
        if scanned > 0 {
            rep.check("table 6 upper bounds", bad6.is_empty(), format!("{scanned} rows, off {bad6:?}"));
            rep.check("table 7 lower bounds", bad7.is_empty(), format!("{scanned} rows, off {bad7:?}"));
            rep.check("table 8 upper bounds", bad8.is_empty(), format!("{scanned} rows, off {bad8:?}"));
        }
        if js.iter().any(|&j| table9_range(j).is_some()) {
            rep.check("table 9 m ranges", bad9.is_empty(), format!("off {bad9:?}"));
        }
        let late = js.iter().filter(|&&j| j > SCANNED_J_MAX).count();
        if late > 0 {
            rep.check(
                "j = 40..118 eliminated",
                not_eliminated.is_empty(),
                format!("{late} intervals, ϖ′ <= w* for {not_eliminated:?}"),
            );
        }
        Ok(())
    }

    fn reduce(&mut self, rep: &mut VerificationReport) -> Result<()> {
        let Some(js) = self.scope(finale::REDUCED_J_MAX, false) else { unreachable!() };
        let mut rows = Vec::new();
        for j in js {
            let b = self.bounds(j)?.clone();
            let (worst, pairs) = eliminate(&self.setup, &b)?;
            let d10 = b.delta_reduced().to_f64();
            let published = TABLE10[(j - 1) as usize];
            rep.check(
                &format!("reduce j={j}: W(j) eliminated"),
                worst.value < 1,
                format!("max υ = {} at m={}, s={}, m1={}, m2={}", super::common::fmt(&worst.value), worst.m, worst.s, worst.m1, worst.m2),
            );
            rep.check(&format!("table 10 j={j}"), d10 <= published + TABLE_TOL, format!("{d10} vs {published}"));
            if let Some((m, pb)) = pairs.first() {
                rep.table(&format!("reduce_j{j}_m{m}"), json!(pb));
            }
            rows.push(json!({"j": j, "delta_reduced": d10, "max_upsilon": worst.value.to_f64()}));
        }
        rep.table("table10", json!(rows));
        Ok(())
    }

    fn scan(&mut self, kind: ScanType, rep: &mut VerificationReport) -> Result<()> {
        let Some(js) = self.scope(kind.j_max(), true) else {
            rep.mark_partial(format!("{}: all j needs --long-running or a single --j", kind.name()));
            return Ok(());
        };
        for j in js {
            let b = self.bounds(j)?.clone();
            types::run(&self.setup, kind, &b, &mut self.log, self.opts.partitions, rep)?;
        }
        Ok(())
    }

    fn finale(&mut self, rep: &mut VerificationReport) -> Result<()> {
        let Some(js) = self.scope(SCANNED_J_MAX, true) else {
            rep.mark_partial("final: all j needs --long-running or a single --j");
            return Ok(());
        };
        let buckets: Vec<u32> = match self.opts.bucket {
            Some(u) if (1..=BUCKETS).contains(&u) => vec![u],
            Some(u) => return Err(Error::domain("final", format!("bucket {u} outside 1..={BUCKETS}"))),
            None if self.opts.long_running => (1..=BUCKETS).collect(),
            None => {
                rep.mark_partial("final: all buckets need --long-running or a single --bucket");
                return Ok(());
            }
        };
        for j in js {
            let b = self.bounds(j)?.clone();
            finale::run(&self.setup, &b, &buckets, &mut self.log, self.opts.partitions, rep)?;
        }
        Ok(())
    }
}

pub fn verify_thm5(table: &PrimeTable, opts: &Thm5Options) -> Result<VerificationReport> {
    let started = Instant::now();
    if let Some(j) = opts.j {
        if j == 0 || j > INTERVAL_COUNT {
            return Err(Error::domain("verify_thm5", format!("j = {j} outside 1..={INTERVAL_COUNT}")));
        }
    }
    let phase = opts.phase.map(Phase::name);
    let mut rep = VerificationReport::new("thm5", Some(phase.unwrap_or("all")), table.ctx());
    if let Some(j) = opts.j {
        rep.param("j", j);
    }
    if let Some(u) = opts.bucket {
        rep.param("bucket", u);
    }
    let log = opts.checkpoint.as_deref().map(CheckpointLog::open).transpose()?;
    let mut d = Driver { setup: Setup::new(table)?, cache: BTreeMap::new(), opts, log };
    let phases: Vec<Phase> = match opts.phase {
        Some(p) => vec![p],
        None => Phase::ALL.to_vec(),
    };
    for p in phases {
        match p {
            Phase::Prelim => prelim::run(table, &mut rep)?,
            Phase::Tables => d.tables(&mut rep)?,
            Phase::Type1 => d.scan(ScanType::One, &mut rep)?,
            Phase::Type2 => d.scan(ScanType::Two, &mut rep)?,
            Phase::Reduce => d.reduce(&mut rep)?,
            Phase::Final => d.finale(&mut rep)?,
        }
    }
    Ok(rep.finish(started))
}
