//! Type-1 and type-2 box scans with the two-coordinate expansion.

use rug::Float;
use serde_json::json;

use crate::error::{Error, Result};

use crate::search::boxes::{union_box, CandidateBox};
use crate::search::interval::{Window, K44};
use crate::search::report::{CheckpointLog, CheckpointRecord, VerificationReport};

use super::intervals::{IntervalBounds, Setup};
use super::scan::{screen_box, ChunkResult, Screen};
use super::{record_tally, Partitions};

/// `(j_min, j_max, δ, published cardinality)` of the type-1 union boxes.
pub const TYPE1_GROUPS: [(u32, u32, &str, u128); 2] = [(1, 4, "0.011", 92_160), (5, 14, "0.01", 53_760)];

/// `(j_min, j_max, δ, published cardinality)` of the type-2 union boxes.
pub const TYPE2_GROUPS: [(u32, u32, &str, u128); 8] = [
    (1, 6, "0.0055", 98_304),
    (7, 9, "0.0054", 73_728),
    (10, 13, "0.005", 49_152),
    (14, 19, "0.005", 49_152),
    (20, 23, "0.0044", 32_768),
    (24, 26, "0.004", 32_768),
    (27, 29, "0.0035", 32_768),
    (30, 39, "0.003", 24_576),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanType {
    One,
    Two,
}

impl ScanType {
    pub fn name(self) -> &'static str {
        match self {
            ScanType::One => "type1",
            ScanType::Two => "type2",
        }
    }

    pub fn groups(self) -> &'static [(u32, u32, &'static str, u128)] {
        match self {
            ScanType::One => &TYPE1_GROUPS,
            ScanType::Two => &TYPE2_GROUPS,
        }
    }

    pub fn j_max(self) -> u32 {
        self.groups().last().expect("nonempty").1
    }

    pub fn group(self, j: u32) -> Result<(u32, u32, &'static str, u128)> {
        self.groups()
            .iter()
            .copied()
            .find(|g| g.0 <= j && j <= g.1)
            .ok_or_else(|| Error::domain(self.name(), format!("j = {j} outside 1..={}", self.j_max())))
    }
}

/// The union base box of the group containing j.
pub fn base_box(setup: &Setup<'_>, kind: ScanType, j: u32) -> Result<CandidateBox> {
    let (lo, hi, delta, _) = kind.group(j)?;
    let delta = setup.table.ctx().parse(delta)?;
    let prec = setup.prec();
    let mut boxes = Vec::new();
    for jj in lo..=hi {
        let mut ranges = Vec::with_capacity(K44);
        for i in 1..=K44 {
            let d = match kind {
                ScanType::One => delta.clone(),
                ScanType::Two => Float::with_val(prec, setup.iv.epsilon(i, jj)? + &delta),
            };
            ranges.push(setup.iv.j_delta_nonempty(i, jj, &d)?);
        }
        boxes.push(CandidateBox::uniform(ranges, &format!("{}:j{jj}", kind.name()))?);
    }
    union_box(&boxes, &format!("{}:j{lo}-{hi}", kind.name()))
}

/// Windows `J_{ε_j(p)+δ}(p, j)` for all 44 primes.
pub fn eps_windows(setup: &Setup<'_>, b: &IntervalBounds, delta: &Float) -> Result<Vec<Window>> {
    (1..=K44)
        .map(|i| {
            let d = Float::with_val(setup.prec(), &b.eps[i - 1] + delta);
            setup.iv.j_delta_nonempty(i, b.j, &d)
        })
        .collect()
}

/// Number of expanded vectors per base vector: `Σ_{i1<i2} |W_i1||W_i2|`.
pub fn pair_expansion_size(wins: &[Window]) -> u64 {
    let mut total = 0;
    for i1 in 0..wins.len() {
        for i2 in i1 + 1..wins.len() {
            total += wins[i1].len() * wins[i2].len();
        }
    }
    total
}

pub(super) fn chunk_record(phase: &str, id: &str, res: &ChunkResult) -> CheckpointRecord {
    CheckpointRecord {
        phase: phase.to_string(),
        box_id: id.to_string(),
        status: "done".to_string(),
        best_witness: Some(json!({
            "bases": res.bases,
            "tally": res.tally,
            "violations": res.violations,
        })),
    }
}

pub(super) fn chunk_from_record(rec: &CheckpointRecord) -> Result<ChunkResult> {
    let v = rec.best_witness.clone().ok_or_else(|| Error::domain("checkpoint", "record without payload"))?;
    Ok(serde_json::from_value(v)?)
}

pub fn run(
    setup: &Setup<'_>,
    kind: ScanType,
    b: &IntervalBounds,
    log: &mut Option<CheckpointLog>,
    parts: Partitions,
    rep: &mut VerificationReport,
) -> Result<()> {
    let j = b.j;
    let (_, _, _, published) = kind.group(j)?;
    let base = base_box(setup, kind, j)?;
    rep.check(
        &format!("{} j={j}: base box size", kind.name()),
        base.cardinality() == published,
        format!("{} (published {published})", base.cardinality()),
    );
    let wins = eps_windows(setup, b, &b.delta_prime)?;
    let screen = Screen::new(setup.table, 10640.8);
    screen.validate(&wins)?;
    let per_base = pair_expansion_size(&wins);
    rep.param(&format!("{}_j{j}_expansion_per_base", kind.name()), per_base);
    let floor = setup.table.ctx().parse(super::prelim::WINDOW_LOW)?;

    let phase = kind.name();
    let mut total = ChunkResult::default();
    let r0 = base.range(0);
    let r1 = base.range(1);
    for a0 in r0.iter() {
        for a1 in r1.iter() {
            let id = format!("j{j}:a1={a0}:a2={a1}");
            let cached = log.as_ref().and_then(|l| {
                l.records().iter().rev().find(|r| r.phase == phase && r.box_id == id && r.status == "done").cloned()
            });
            let res = match cached {
                Some(rec) => chunk_from_record(&rec)?,
                None => {
                    let chunk = base.clone().with_override(0, a0)?.with_override(1, a1)?;
                    let res = screen_box(setup.table, &chunk, &floor, parts.0, |v, flagged| {
                        screen.scan_pairs(v, &wins, flagged)
                    })?;
                    if let Some(l) = log.as_mut() {
                        l.append(chunk_record(phase, &id, &res))?;
                    }
                    res
                }
            };
            total.bases += res.bases;
            total.tally.add(&res.tally);
            total.violations.extend(res.violations);
        }
    }
    let expected = total.bases * per_base;
    record_tally(rep, &total.tally);
    rep.check(
        &format!("{phase} j={j}: exhausted"),
        total.bases as u128 == base.cardinality() && total.tally.total() == expected,
        format!("{} base vectors, {} evaluations", total.bases, total.tally.total()),
    );
    rep.check(
        &format!("{phase} j={j}: only n_* survives"),
        total.violations.is_empty(),
        format!(
            "n_* hits {}, rechecked and cleared {}, violations {:?}",
            total.tally.n_star,
            total.tally.cleared_high_precision,
            total.violations.iter().take(5).collect::<Vec<_>>()
        ),
    );
    Ok(())
}
