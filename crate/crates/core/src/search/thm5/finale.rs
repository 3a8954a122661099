//! Triplet filtering T(j) and the bucketed four-coordinate scan.

use rug::Float;
use serde_json::json;

use crate::error::Result;

use crate::search::boxes::CandidateBox;
use crate::search::common::fmt;
use crate::search::interval::{IntervalGrid, Window, K44};
use crate::search::report::{CheckpointLog, VerificationReport};

use super::intervals::{IntervalBounds, Setup};
use super::scan::{screen_box, ChunkResult, Screen};
use super::types::{chunk_from_record, chunk_record, ScanType};
use super::{record_tally, Partitions};

pub const TRIPLET_SUBDIVISIONS: u32 = 25;
pub const BUCKETS: u32 = 7;
/// Last interval handled by the reduced δ′.
pub const REDUCED_J_MAX: u32 = 14;

/// A kept triplet (0-based prime indices) and its excess ρ = ζ − Σ ε.
#[derive(Debug, Clone)]
pub struct Triplet {
    pub primes: [usize; 3],
    pub rho: Float,
}

#[derive(Debug, Clone)]
pub struct Triplets {
    pub delta: Float,
    pub total: usize,
    pub kept: Vec<Triplet>,
    pub t_max: Float,
}

/// δ′(j) for this phase: reduced for j <= 14, unreduced up to 39.
pub fn final_delta(b: &IntervalBounds) -> Float {
    if b.j <= REDUCED_J_MAX {
        b.delta_reduced()
    } else {
        b.delta_prime.clone()
    }
}

/// `err[i][r]`: the least error on subinterval r with α outside `J_{δ2+ε}`.
pub fn outside_errors(setup: &Setup<'_>, b: &IntervalBounds) -> Result<Vec<Vec<Float>>> {
    let prec = setup.prec();
    let (_, _, d2, _) = ScanType::Two.group(b.j)?;
    let d2 = setup.table.ctx().parse(d2)?;
    let grid = IntervalGrid::new(b.j, TRIPLET_SUBDIVISIONS)?;
    (1..=K44)
        .map(|i| {
            let w = setup.iv.j_delta(i, b.j, &Float::with_val(prec, &d2 + &b.eps[i - 1]))?;
            Ok(grid
                .iter(prec)
                .map(|(x1, x2)| {
                    [w.lo - 1, w.hi + 1]
                        .iter()
                        .flat_map(|&a| [setup.iv.error(i, a, &x1), setup.iv.error(i, a, &x2)])
                        .min_by(|p, q| p.partial_cmp(q).expect("finite"))
                        .expect("four values")
                })
                .collect())
        })
        .collect()
}

pub fn triplets(setup: &Setup<'_>, b: &IntervalBounds) -> Result<Triplets> {
    let prec = setup.prec();
    let delta = final_delta(b);
    let err = outside_errors(setup, b)?;
    let mut kept = Vec::new();
    let mut total = 0;
    for q1 in 0..K44 {
        for q2 in q1 + 1..K44 {
            for q3 in q2 + 1..K44 {
                total += 1;
                let zeta = (0..TRIPLET_SUBDIVISIONS as usize)
                    .map(|r| Float::with_val(prec, &err[q1][r] + &err[q2][r]) + &err[q3][r])
                    .min_by(|p, q| p.partial_cmp(q).expect("finite"))
                    .expect("25 subintervals");
                let eps = Float::with_val(prec, &b.eps[q1] + &b.eps[q2]) + &b.eps[q3];
                let rho = zeta - eps;
                if rho <= delta {
                    kept.push(Triplet { primes: [q1, q2, q3], rho });
                }
            }
        }
    }
    let t_max = kept.iter().map(|t| t.rho.clone()).max_by(|p, q| p.partial_cmp(q).expect("finite"));
    Ok(Triplets { delta, total, kept, t_max: t_max.unwrap_or_else(|| Float::with_val(prec, 0)) })
}

fn bucket_edge(t: &Float, u: u32) -> Float {
    Float::with_val(t.prec(), t - Float::with_val(t.prec(), u) / 1000u32)
}

/// T_u(j): triplets with ρ in `[t − u/1000, t − (u−1)/1000]`.
pub fn bucket(ts: &Triplets, u: u32) -> Vec<&Triplet> {
    let lo = bucket_edge(&ts.t_max, u);
    let hi = bucket_edge(&ts.t_max, u - 1);
    ts.kept.iter().filter(|t| t.rho >= lo && t.rho <= hi).collect()
}

/// The stored base box `Π J_{δ′/2 − (t − u/1000)/2 + ε}`, or None when some
/// window is empty.
pub fn base_box(setup: &Setup<'_>, b: &IntervalBounds, ts: &Triplets, u: u32) -> Result<Option<CandidateBox>> {
    let prec = setup.prec();
    let dd = Float::with_val(prec, &ts.delta - bucket_edge(&ts.t_max, u)) / 2u32;
    let mut ranges = Vec::with_capacity(K44);
    for i in 1..=K44 {
        let d = Float::with_val(prec, &dd + &b.eps[i - 1]);
        if d < 0 {
            return Ok(None);
        }
        let w = setup.iv.j_delta(i, b.j, &d)?;
        if w.is_empty() {
            return Ok(None);
        }
        ranges.push(w);
    }
    Ok(Some(CandidateBox::uniform(ranges, &format!("final:j{}:u{u}", b.j))?))
}

/// Windows for one triplet: `J_{δ′+ε}` on the triplet, `J_{δ′−ρ+ε}` elsewhere.
pub fn triplet_windows(setup: &Setup<'_>, b: &IntervalBounds, delta: &Float, t: &Triplet) -> Result<Vec<Window>> {
    let prec = setup.prec();
    let slack = Float::with_val(prec, delta - &t.rho);
    (0..K44)
        .map(|i| {
            let d = if t.primes.contains(&i) { delta } else { &slack };
            setup.iv.j_delta_nonempty(i + 1, b.j, &Float::with_val(prec, d + &b.eps[i]))
        })
        .collect()
}

fn quad_size(wins: &[Window], triple: [usize; 3]) -> u64 {
    let tri: u64 = triple.iter().map(|&i| wins[i].len()).product();
    let others: u64 = (0..K44).filter(|i| !triple.contains(i)).map(|i| wins[i].len()).sum();
    tri * others
}

pub fn run(
    setup: &Setup<'_>,
    b: &IntervalBounds,
    buckets: &[u32],
    log: &mut Option<CheckpointLog>,
    parts: Partitions,
    rep: &mut VerificationReport,
) -> Result<()> {
    let j = b.j;
    let ts = triplets(setup, b)?;
    let sizes: Vec<usize> = (1..=BUCKETS).map(|u| bucket(&ts, u).len()).collect();
    let covered: usize = sizes.iter().sum();
    rep.table(
        &format!("final_j{j}_triplets"),
        json!({"total": ts.total, "kept": ts.kept.len(), "t_max": ts.t_max.to_f64(), "delta": ts.delta.to_f64(), "buckets": sizes}),
    );
    rep.check(
        &format!("final j={j}: triplets kept are a few hundred"),
        ts.total == 13_244 && ts.kept.len() < 1000,
        format!("{} of {} kept, t = {}", ts.kept.len(), ts.total, fmt(&ts.t_max)),
    );
    let min_rho = ts.kept.iter().map(|t| t.rho.clone()).min_by(|p, q| p.partial_cmp(q).expect("finite"));
    rep.check(
        &format!("final j={j}: buckets 1..7 cover T(j)"),
        min_rho.is_none_or(|r| r >= bucket_edge(&ts.t_max, BUCKETS)),
        format!("bucket sizes {sizes:?}, {covered} placements"),
    );

    let screen = Screen::new(setup.table, 10640.8);
    let floor = setup.table.ctx().parse(super::prelim::WINDOW_LOW)?;
    for &u in buckets {
        let phase = "final";
        let Some(base) = base_box(setup, b, &ts, u)? else {
            rep.note(format!("final j={j} u={u}: stored box is empty"));
            rep.check(&format!("final j={j} u={u}: no survivor"), true, "empty base box");
            continue;
        };
        let tu = bucket(&ts, u);
        let mut total = ChunkResult::default();
        let mut expected = 0u64;
        for t in &tu {
            let wins = triplet_windows(setup, b, &ts.delta, t)?;
            screen.validate(&wins)?;
            let per_base = quad_size(&wins, t.primes);
            expected += per_base * base.cardinality() as u64;
            let [a, c, d] = t.primes;
            let id = format!("j{j}:u{u}:t{a}-{c}-{d}");
            let cached = log.as_ref().and_then(|l| {
                l.records().iter().rev().find(|r| r.phase == phase && r.box_id == id && r.status == "done").cloned()
            });
            let res = match cached {
                Some(rec) => chunk_from_record(&rec)?,
                None => {
                    let res = screen_box(setup.table, &base, &floor, parts.0, |v, flagged| {
                        screen.scan_quads(v, t.primes, &wins, flagged)
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
        record_tally(rep, &total.tally);
        rep.param(&format!("final_j{j}_u{u}_base"), base.cardinality() as u64);
        rep.check(
            &format!("final j={j} u={u}: exhausted"),
            total.tally.total() == expected,
            format!("{} triplets, base {}, {} evaluations", tu.len(), base.cardinality(), total.tally.total()),
        );
        rep.check(
            &format!("final j={j} u={u}: no survivor"),
            total.violations.is_empty(),
            format!(
                "n_* hits {}, rechecked and cleared {}, violations {:?}",
                total.tally.n_star,
                total.tally.cleared_high_precision,
                total.violations.iter().take(5).collect::<Vec<_>>()
            ),
        );
    }
    Ok(())
}
