//! Lower bounds for (ϖ′1, ϖ′2) on a grid and the elimination of W(j).

use rayon::prelude::*;
use rug::Float;

use crate::error::{Error, Result};
use crate::lemmas::excluded_window;

use crate::search::interval::{interval_start, K44};

use super::intervals::{IntervalBounds, Setup};
use super::types::ScanType;

pub const GRID_X: u32 = 30;
pub const GRID_W: u32 = 80;
/// Width of W(j) = [w − 0.01, w].
pub const REDUCTION: f64 = 0.01;
/// Subtracted from the f64 grid minima.
pub const GRID_SAFETY: f64 = 1e-9;
/// Number of coordinates known to be far from μ.
pub const FAR: usize = 3;

/// Lower bounds `(ϖ′1, ϖ′2)` for s = 0..=3 at fixed j and m.
pub type PairBounds = [(f64, f64); FAR + 1];

/// The largest υ_{m,m1,m2} met while eliminating W(j).
#[derive(Debug, Clone)]
pub struct Worst {
    pub value: Float,
    pub m: usize,
    pub s: usize,
    pub m1: usize,
    pub m2: usize,
}

struct Constrained {
    below: Vec<i64>,
    above: Vec<i64>,
}

fn constrained(setup: &Setup<'_>, j: u32) -> Result<Constrained> {
    let (_, _, delta, _) = ScanType::One.group(j)?;
    let delta = setup.table.ctx().parse(delta)?;
    let x1 = interval_start(j, setup.prec());
    let x2 = Float::with_val(setup.prec(), &x1 + 1u32);
    let mut below = Vec::with_capacity(K44);
    let mut above = Vec::with_capacity(K44);
    for i in 1..=K44 {
        let (lo, hi) = excluded_window(setup.iv.a(), setup.iv.b(i), &x1, &x2, &delta)?;
        below.push(lo - 1);
        above.push(hi + 1);
    }
    Ok(Constrained { below, above })
}

fn prefix(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let mut out = Vec::with_capacity(v.len() + 1);
    out.push(0.0);
    let mut acc = 0.0;
    for x in v {
        acc += x;
        out.push(acc);
    }
    out
}

fn side_sums(setup: &Setup<'_>, alphas: &[i64], xa: f64, xb: f64, fa: f64, fb: f64) -> (Vec<f64>, Vec<f64>) {
    let iv = &setup.iv;
    let un = (1..=K44).map(|i| iv.psi_min_f64(i, xa, xb, fa, fb)).collect();
    let co = (1..=K44)
        .map(|i| {
            let a = alphas[i - 1];
            [(xa, fa), (xa, fb), (xb, fa), (xb, fb)]
                .iter()
                .map(|&(x, f)| iv.error_f64(i, a, x, f))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    (prefix(un), prefix(co))
}

fn pair_bounds_with(setup: &Setup<'_>, c: &Constrained, b: &IntervalBounds, m: usize) -> PairBounds {
    let x1 = 10639.8 + b.j as f64;
    let w = b.w.to_f64();
    let w_lo = w - REDUCTION;
    let n = K44 - m;
    let mut best = [(f64::INFINITY, f64::INFINITY); FAR + 1];
    for r1 in 0..GRID_X {
        let xa = x1 + r1 as f64 / GRID_X as f64;
        let xb = x1 + (r1 + 1) as f64 / GRID_X as f64;
        for r2 in 0..GRID_W {
            let wa = w_lo + REDUCTION * r2 as f64 / GRID_W as f64;
            let wb = w_lo + REDUCTION * (r2 + 1) as f64 / GRID_W as f64;
            let (un1, co1) = side_sums(setup, &c.below, xa, xb, 1.0 - wb / (2 * m) as f64, 1.0 - wa / (2 * m) as f64);
            let (un2, co2) = side_sums(setup, &c.above, xa, xb, 1.0 + wa / (2 * n) as f64, 1.0 + wb / (2 * n) as f64);
            for (s, slot) in best.iter_mut().enumerate() {
                let v1 = co1[s] + un1[m - s];
                let v2 = co2[FAR - s] + un2[n - (FAR - s)];
                slot.0 = slot.0.min(v1);
                slot.1 = slot.1.min(v2);
            }
        }
    }
    best.map(|(a, b)| ((a - GRID_SAFETY).max(0.0), (b - GRID_SAFETY).max(0.0)))
}

/// Grid lower bounds for `(ϖ′1, ϖ′2)` at fixed j and m, s = 0..=3.
pub fn pair_bounds(setup: &Setup<'_>, b: &IntervalBounds, m: usize) -> Result<PairBounds> {
    if m < FAR || K44 - m < FAR {
        return Err(Error::domain("pair_bounds", format!("m = {m} leaves fewer than {FAR} coordinates on a side")));
    }
    let c = constrained(setup, b.j)?;
    Ok(pair_bounds_with(setup, &c, b, m))
}

/// Maximum of υ_{m,m1,m2}(10639.8 + j, w − 0.01, ϖ′1, ϖ′2) over the m range,
/// the four signatures and all splits; below one eliminates W(j).
pub fn eliminate(setup: &Setup<'_>, b: &IntervalBounds) -> Result<(Worst, Vec<(usize, PairBounds)>)> {
    let (m_lo, m_hi) = b.m_range.ok_or_else(|| Error::domain("reduce", format!("j = {}: empty m range", b.j)))?;
    let c = constrained(setup, b.j)?;
    let prec = setup.prec();
    let z = interval_start(b.j, prec);
    let w_lo = Float::with_val(prec, &b.w - Float::with_val(prec, 1) / 100u32);
    let per_m: Vec<(usize, PairBounds, Worst)> = (m_lo..=m_hi)
        .into_par_iter()
        .map(|m| {
            let pb = pair_bounds_with(setup, &c, b, m);
            let mut worst: Option<Worst> = None;
            for (s, &(w1, w2)) in pb.iter().enumerate() {
                let w1 = Float::with_val(prec, w1);
                let w2 = Float::with_val(prec, w2);
                for m1 in 1..m {
                    for m2 in 1..K44 - m {
                        let v = setup.ups.upsilon_m_m1_m2(&z, &w_lo, &w1, &w2, m, m1, m2)?;
                        if worst.as_ref().is_none_or(|w| v > w.value) {
                            worst = Some(Worst { value: v, m, s, m1, m2 });
                        }
                    }
                }
            }
            Ok((m, pb, worst.expect("nonempty split range")))
        })
        .collect::<Result<_>>()?;
    let mut worst: Option<Worst> = None;
    let mut bounds = Vec::with_capacity(per_m.len());
    for (m, pb, w) in per_m {
        if worst.as_ref().is_none_or(|cur| w.value > cur.value) {
            worst = Some(w);
        }
        bounds.push((m, pb));
    }
    Ok((worst.expect("nonempty m range"), bounds))
}
