//! 720·n_7 is the unique maximizer of λ(n) over ω(n) >= 2.

use std::time::Instant;

use rug::Float;
use serde_json::json;

use crate::arith::{Factorization, PrimeTable};
use crate::bounds::{eta3, lambda_of};
use crate::error::Result;
use crate::lemmas::ineq3_holds;

use super::common::{fmt, upsilon_at_primorial, upsilon_root, LARGE_K_LIMIT};
use super::primorial::{smooth_numbers, u_of};
use super::report::{VerificationReport, Witness};

/// Bound on the multiplier s = n'/n_k over the surviving k.
pub const RATIO_BOUND: u64 = 264_507;

/// `g(k) = (1 − η) log k + (2 − η)(log log k − 1/2)`.
fn g_closed(eta: &Float, k: usize) -> Float {
    let prec = eta.prec();
    let lk = Float::with_val(prec, k).ln();
    let llk = Float::with_val(prec, lk.ln_ref());
    let a = Float::with_val(prec, 1u32 - eta) * &lk;
    let b = Float::with_val(prec, 2u32 - eta) * (llk - Float::with_val(prec, 0.5));
    a + b
}

pub fn verify_thm3(table: &PrimeTable) -> Result<VerificationReport> {
    let started = Instant::now();
    let ctx = table.ctx();
    let prec = ctx.prec();
    let mut rep = VerificationReport::new("thm3", None, ctx);

    let eta = eta3(table)?;
    let star = Factorization::parse(table, "720*n7")?;
    rep.check("eta3", (eta.to_f64() - 1.1999953).abs() < 1e-6, fmt(&eta));
    rep.witnesses.push(Witness::new("maximizer", &star).with_value("lambda", &eta));

    // k >= 44: (2 − η) log n_k > k log k is impossible.
    let limit = table.len().min(LARGE_K_LIMIT);
    let two_minus = Float::with_val(prec, 2u32 - &eta);
    let mut direct_ok = true;
    for k in 44..=limit {
        let lhs = Float::with_val(prec, &two_minus * table.log_primorial(k));
        let lk = Float::with_val(prec, k).ln();
        direct_ok &= lhs <= lk * k as u32;
    }
    let closed_ok = (44..=55).all(|k| g_closed(&eta, k) < 0);
    let turn = Float::with_val(prec, &two_minus / Float::with_val(prec, &eta - 1u32));
    let deriv_ok = Float::with_val(prec, 55).ln() > turn;
    let ineq3_ok = (44..=limit).try_fold(true, |acc, k| Ok::<_, crate::Error>(acc && ineq3_holds(table, k)?))?;
    rep.check(
        "k >= 44 excluded",
        direct_ok && closed_ok && deriv_ok && ineq3_ok,
        format!("direct 44..={limit}, g(k) < 0 on 44..55, g decreasing for log k > {}", fmt(&turn)),
    );

    // 2 <= k <= 43: z_k < n_k rules k out.
    let mut survivors = Vec::new();
    for k in 2..=43 {
        if upsilon_at_primorial(table, k)? >= eta {
            survivors.push(k);
        }
    }
    rep.check("surviving k", survivors == (5..=13).collect::<Vec<_>>(), format!("{survivors:?}"));

    let mut max_ratio = Float::with_val(prec, 0);
    let mut ratios = Vec::new();
    for &k in &survivors {
        let log_nk = table.log_primorial(k).clone();
        let log_z = upsilon_root(table, k, &eta, &log_nk)?;
        let r = Float::with_val(prec, &log_z - &log_nk);
        ratios.push((k, r.to_f64().exp()));
        if r > max_ratio {
            max_ratio = r;
        }
    }
    // s is an integer with s <= z_k/n_k, so s <= 264507 needs z_k/n_k < 264508.
    let bound = ctx.float(RATIO_BOUND + 1).ln();
    rep.check("max floor(z_k/n_k) <= 264507", max_ratio < bound, format!("{ratios:?}"));
    let j = u_of(table, &max_ratio)?;
    rep.check("forces j <= 6", j <= 6, format!("u = {j}"));
    rep.table("z_over_n", json!(ratios));

    // Scan V = {(s n_k, λ(s n_k)) : s <= 264507 13-smooth, 5 <= k <= 13}.
    let smooth = smooth_numbers(table, 6, RATIO_BOUND)?;
    rep.param("smooth_count", smooth.len());
    let mut best: Option<(Float, Factorization)> = None;
    let mut runner: Option<(Float, Factorization)> = None;
    for &k in &survivors {
        let nk = Factorization::primorial(table, k)?;
        for (s, exps) in &smooth {
            let f = if *s == 1 {
                nk.clone()
            } else {
                let idx: Vec<usize> = (1..=6).filter(|&i| exps[i - 1] > 0).collect();
                let e: Vec<u32> = idx.iter().map(|&i| exps[i - 1]).collect();
                nk.multiply(&Factorization::new(table, idx, e)?, table)?
            };
            let l = lambda_of(&f)?;
            match &best {
                Some((b, _)) if l <= *b => {
                    if runner.as_ref().is_none_or(|(r, _)| l > *r) {
                        runner = Some((l, f));
                    }
                }
                _ => {
                    runner = best.take();
                    best = Some((l, f));
                }
            }
        }
        rep.exhaustion.accept(smooth.len() as u64);
    }
    let (lb, fb) = best.expect("nonempty scan");
    rep.check("maximizer is 720*n7", fb == star, format!("max λ {} at {}", fmt(&lb), fb));
    if let Some((lr, fr)) = &runner {
        rep.check("all others below eta3", *lr < eta, format!("runner-up {} with λ = {}", fr, fmt(lr)));
    }
    Ok(rep.finish(started))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::PrecisionContext;

    #[test]
    fn thm3_confirms() {
        let t = PrimeTable::new(400, &PrecisionContext::default());
        let rep = verify_thm3(&t).unwrap();
        assert!(rep.all_passed(), "{:?}", rep.failed_checks().collect::<Vec<_>>());
    }
}
