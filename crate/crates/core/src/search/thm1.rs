//! 60060 is the unique maximizer of r(n) over ω(n) >= 2.

use std::time::Instant;

use rug::Float;
use serde_json::json;

use crate::arith::{Factorization, PrimeTable};
use crate::bounds::{eta2, r_fond2_bound, r_of};
use crate::error::Result;

use super::common::{cap_envelope, cap_head, dominated, fmt, large_k_exclusion, r1_root, ratio_caps, uniform_caps};
use super::primorial::{for_each_canonical, u_of};
use super::report::{VerificationReport, Witness};

pub const MAXIMIZER: u64 = 60060;

pub fn verify_thm1(table: &PrimeTable) -> Result<VerificationReport> {
    let started = Instant::now();
    let ctx = table.ctx();
    let prec = ctx.prec();
    let mut rep = VerificationReport::new("thm1", None, ctx);
    let log_eta2 = eta2(prec).ln();
    let log2 = ctx.float(2).ln();
    let tol = ctx.identity_tol();

    let star = Factorization::parse(table, "60060")?;
    let r_star = r_of(&star)?;
    let diff = Float::with_val(prec, &r_star - &log_eta2).abs();
    rep.check("r(60060) = log eta2", diff <= tol, format!("r = {}", fmt(&r_star)));
    rep.witnesses.push(Witness::new("maximizer", &star).with_value("r", &r_star));

    let big = large_k_exclusion(table)?;
    rep.check(
        "k >= 44 excluded",
        big.ineq2_failure.is_none() && big.max_bound < log2,
        format!("44..={}: max fond2 bound {} < log 2", big.limit, fmt(&big.max_bound)),
    );

    let mut excluded = Vec::new();
    for k in 2..=43 {
        if r_fond2_bound(table, k)? < log_eta2 {
            excluded.push(k);
        }
    }
    let expected: Vec<usize> = [2, 3].into_iter().chain(25..=43).collect();
    rep.check("k-only exclusion", excluded == expected, format!("excluded {excluded:?}"));

    let mut all_caps = Vec::new();
    let mut us = Vec::new();
    for k in 4..=24 {
        let log_z = r1_root(table, k, &log_eta2)?;
        let rest = Float::with_val(prec, &log_z - table.log_primorial(k));
        let u = u_of(table, &rest)?;
        us.push((k, u));
        all_caps.push(ratio_caps(table, k, u, &log_z)?);
    }
    let max_u = us.iter().map(|&(_, u)| u).max().unwrap_or(0);
    rep.check("u(z_k/n_k) <= 3 for k = 4..24", max_u <= 3, format!("{us:?}"));
    let head = cap_head(&cap_envelope(&all_caps));
    rep.check(
        "caps within (4,2,2,1,...)",
        dominated(&head, &[4, 2, 2]),
        format!("envelope head {head:?}"),
    );
    rep.table("u_k", json!(us));
    rep.table("cap_head", json!(head));

    // Enumerate the finite candidate set under the uniform cap.
    let mut best: Option<(Float, Vec<u32>)> = None;
    let mut second: Option<(Float, Vec<u32>)> = None;
    for k in 4..=24 {
        let caps = uniform_caps(&[4, 2, 2], k);
        let n = for_each_canonical(table, &caps, None, |v| {
            let f = Factorization::from_exponent_vector(table, v)?;
            let r = r_of(&f)?;
            match &best {
                Some((b, _)) if r <= *b => {
                    if second.as_ref().is_none_or(|(s, _)| r > *s) {
                        second = Some((r, v.to_vec()));
                    }
                }
                _ => {
                    second = best.take();
                    best = Some((r, v.to_vec()));
                }
            }
            Ok(())
        })?;
        rep.exhaustion.accept(n);
    }
    let (r_best, v_best) = best.expect("nonempty enumeration");
    let best_f = Factorization::from_exponent_vector(table, &v_best)?;
    let is_star = best_f == star;
    rep.check("maximizer is 60060", is_star, format!("max r {} at {:?}", fmt(&r_best), v_best));
    if let Some((r2, v2)) = &second {
        rep.check(
            "all others below log eta2",
            *r2 < log_eta2,
            format!("runner-up {:?} with r = {}", v2, fmt(r2)),
        );
    }
    rep.param("candidates", rep.exhaustion.enumerated);
    Ok(rep.finish(started))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::PrecisionContext;

    #[test]
    fn thm1_confirms() {
        let t = PrimeTable::new(400, &PrecisionContext::default());
        let rep = verify_thm1(&t).unwrap();
        assert!(rep.all_passed(), "{:?}", rep.failed_checks().collect::<Vec<_>>());
    }
}
