//! Product boxes of exponent ranges and their deterministic enumeration.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::interval::Window;
use crate::error::{Error, Result};

/// Cardinality above which enumeration needs the long-running flag.
pub const DEFAULT_GUARD: u128 = 1 << 48;

/// A product of inclusive exponent ranges, one per prime index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateBox {
    ranges: Vec<Window>,
    overrides: BTreeMap<usize, i64>,
    provenance: Vec<String>,
}

impl CandidateBox {
    /// Every range must be nonempty.
    pub fn new(ranges: Vec<Window>, provenance: Vec<String>) -> Result<Self> {
        if ranges.is_empty() {
            return Err(Error::domain("candidate_box", "no coordinates"));
        }
        if provenance.len() != ranges.len() {
            return Err(Error::domain("candidate_box", "one provenance entry per range"));
        }
        if let Some(i) = ranges.iter().position(Window::is_empty) {
            return Err(Error::domain("candidate_box", format!("range {i} is empty")));
        }
        Ok(CandidateBox { ranges, overrides: BTreeMap::new(), provenance })
    }

    /// A box with the same provenance label on every coordinate.
    pub fn uniform(ranges: Vec<Window>, label: &str) -> Result<Self> {
        let n = ranges.len();
        Self::new(ranges, vec![label.to_string(); n])
    }

    /// Pins coordinate `i` (0-based) to a single value.
    pub fn with_override(mut self, i: usize, value: i64) -> Result<Self> {
        if i >= self.ranges.len() {
            return Err(Error::domain("candidate_box", format!("override index {i} out of range")));
        }
        self.overrides.insert(i, value);
        Ok(self)
    }

    pub fn dims(&self) -> usize {
        self.ranges.len()
    }

    /// The effective range of coordinate `i`.
    pub fn range(&self, i: usize) -> Window {
        match self.overrides.get(&i) {
            Some(&v) => Window::new(v, v),
            None => self.ranges[i],
        }
    }

    pub fn provenance(&self, i: usize) -> &str {
        &self.provenance[i]
    }

    pub fn cardinality(&self) -> u128 {
        (0..self.dims()).fold(1u128, |acc, i| acc.saturating_mul(self.range(i).len() as u128))
    }

    /// The vector at lexicographic position `index` (last coordinate fastest).
    pub fn vector_at(&self, mut index: u128) -> Vec<i64> {
        let mut v = vec![0; self.dims()];
        for i in (0..self.dims()).rev() {
            let w = self.range(i);
            let len = w.len() as u128;
            v[i] = w.lo + (index % len) as i64;
            index /= len;
        }
        v
    }

    /// Advances `v` to the next vector in lexicographic order; false at the end.
    pub fn advance(&self, v: &mut [i64]) -> bool {
        for i in (0..self.dims()).rev() {
            let w = self.range(i);
            if v[i] < w.hi {
                v[i] += 1;
                return true;
            }
            v[i] = w.lo;
        }
        false
    }

    pub fn iter(&self) -> BoxIter<'_> {
        BoxIter { b: self, next: Some(self.vector_at(0)) }
    }
}

pub struct BoxIter<'a> {
    b: &'a CandidateBox,
    next: Option<Vec<i64>>,
}

impl Iterator for BoxIter<'_> {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        let cur = self.next.take()?;
        let mut n = cur.clone();
        if self.b.advance(&mut n) {
            self.next = Some(n);
        }
        Some(cur)
    }
}

/// Term-by-term union of boxes of equal dimension.
pub fn union_box(boxes: &[CandidateBox], label: &str) -> Result<CandidateBox> {
    let first = boxes.first().ok_or_else(|| Error::domain("union_box", "no boxes"))?;
    let mut ranges = Vec::with_capacity(first.dims());
    for i in 0..first.dims() {
        let mut w = first.range(i);
        for b in &boxes[1..] {
            if b.dims() != first.dims() {
                return Err(Error::domain("union_box", "dimension mismatch"));
            }
            w = w.union(&b.range(i)).ok_or_else(|| {
                Error::domain("union_box", format!("coordinate {i}: union is not a single range"))
            })?;
        }
        ranges.push(w);
    }
    CandidateBox::uniform(ranges, label)
}

#[derive(Debug, Clone, Copy)]
pub struct EnumerateOptions {
    /// Number of contiguous index ranges processed independently.
    pub partitions: usize,
    pub guard: u128,
    pub long_running: bool,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions { partitions: 1, guard: DEFAULT_GUARD, long_running: false }
    }
}

/// A hook result: the score to maximize and the tally bucket it falls in.
#[derive(Debug, Clone)]
pub struct Scored<K> {
    pub key: K,
    pub class: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoxOutcome<K> {
    pub enumerated: u64,
    /// Maximal key, ties broken by the lexicographically smallest vector.
    pub best: Option<(K, Vec<i64>)>,
    pub tallies: BTreeMap<String, u64>,
}

fn better<K: PartialOrd>(cand: &(K, Vec<i64>), cur: &(K, Vec<i64>)) -> bool {
    match cand.0.partial_cmp(&cur.0) {
        Some(Ordering::Greater) => true,
        Some(Ordering::Less) => false,
        _ => cand.1 < cur.1,
    }
}

fn merge<K: PartialOrd>(acc: &mut BoxOutcome<K>, part: BoxOutcome<K>) {
    acc.enumerated += part.enumerated;
    for (k, v) in part.tallies {
        *acc.tallies.entry(k).or_insert(0) += v;
    }
    if let Some(b) = part.best {
        if acc.best.as_ref().is_none_or(|cur| better(&b, cur)) {
            acc.best = Some(b);
        }
    }
}

/// Applies `hook` to every vector of `b` exactly once and reduces to the
/// maximal key. The result does not depend on `opts.partitions`.
pub fn enumerate_box<K, F>(b: &CandidateBox, opts: &EnumerateOptions, hook: F) -> Result<BoxOutcome<K>>
where
    K: PartialOrd + Clone + Send,
    F: Fn(&[i64]) -> Scored<K> + Sync,
{
    let card = b.cardinality();
    if card > opts.guard && !opts.long_running {
        return Err(Error::CardinalityGuard { cardinality: card, guard: opts.guard });
    }
    let parts = opts.partitions.max(1) as u128;
    let chunk = card.div_ceil(parts);
    let bounds: Vec<(u128, u128)> =
        (0..parts).map(|p| (p * chunk, ((p + 1) * chunk).min(card))).filter(|(s, e)| s < e).collect();
    let results: Vec<BoxOutcome<K>> = bounds
        .par_iter()
        .map(|&(start, end)| {
            let mut out = BoxOutcome { enumerated: 0, best: None, tallies: BTreeMap::new() };
            let mut counts: BTreeMap<&'static str, u64> = BTreeMap::new();
            let mut v = b.vector_at(start);
            let mut idx = start;
            loop {
                let s = hook(&v);
                out.enumerated += 1;
                *counts.entry(s.class).or_insert(0) += 1;
                let improves = match &out.best {
                    None => true,
                    Some((k, bv)) => match s.key.partial_cmp(k) {
                        Some(Ordering::Greater) => true,
                        Some(Ordering::Less) => false,
                        _ => v < *bv,
                    },
                };
                if improves {
                    out.best = Some((s.key, v.clone()));
                }
                idx += 1;
                if idx >= end || !b.advance(&mut v) {
                    break;
                }
            }
            out.tallies = counts.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
            out
        })
        .collect();
    let mut acc = BoxOutcome { enumerated: 0, best: None, tallies: BTreeMap::new() };
    for r in results {
        merge(&mut acc, r);
    }
    Ok(acc)
}
