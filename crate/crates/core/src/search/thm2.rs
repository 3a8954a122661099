//! 24·n_16 is the largest counterexample to τ(n) <= (2 log n/(k log k))^k.

use std::time::Instant;

use rug::{Float, Integer};
use serde_json::json;

use crate::arith::{Factorization, PrimeTable};
use crate::bounds::{inequality_margin, log_d_k, r2, r_of, Inequality, InequalityConstants};
use crate::error::Result;
use crate::solvers::{solve_monotone, Monotonicity, RootProblem};

use super::common::{cap_envelope, cap_head, dominated, fmt, large_k_exclusion, r1_root, ratio_caps, uniform_caps};
use super::primorial::{for_each_canonical, u_of};
use super::reference::{LARGEST_INEQ2_COUNTEREXAMPLE, TABLE1};
use super::report::{VerificationReport, Witness};

/// The exponent vectors (heads, padded with ones to 16 entries) that violate
/// the inequality at k = 16.
pub const K16_SURVIVORS: [[u32; 2]; 3] = [[3, 1], [3, 2], [4, 2]];

fn pad16(head: &[u32]) -> Vec<u32> {
    uniform_caps(head, 16)
}

/// `log z′_k` with `r_2(z′_k, k) = log 2`.
pub fn r2_root(table: &PrimeTable, k: usize, log_dk: &Float) -> Result<Float> {
    let ctx = table.ctx();
    let log2 = ctx.float(2).ln();
    let p = RootProblem::new(
        |z: &Float| r2(z, k, log_dk),
        log2,
        ctx.parse("1e-3")?,
        ctx.float(1000),
        Monotonicity::Decreasing,
        ctx.root_tol().clone(),
    );
    solve_monotone(&p)
}

/// `(k, u_k)` for k = 4..=16, with `z_k` solving `r_1 = log 2`.
pub fn table1(table: &PrimeTable) -> Result<Vec<(usize, usize)>> {
    let log2 = table.ctx().float(2).ln();
    (4..=16)
        .map(|k| {
            let log_z = r1_root(table, k, &log2)?;
            let rest = Float::with_val(table.prec(), &log_z - table.log_primorial(k));
            Ok((k, u_of(table, &rest)?))
        })
        .collect()
}

pub fn verify_thm2(table: &PrimeTable) -> Result<VerificationReport> {
    let started = Instant::now();
    let ctx = table.ctx();
    let prec = ctx.prec();
    let mut rep = VerificationReport::new("thm2", None, ctx);
    let log2 = ctx.float(2).ln();
    let consts = InequalityConstants::new(table)?;

    let star = Factorization::parse(table, "24*n16")?;
    let n_star = star.to_integer_unchecked();
    let expected: Integer = LARGEST_INEQ2_COUNTEREXAMPLE.parse().expect("valid literal");
    rep.check("24*n16 value", n_star == expected, n_star.to_string());
    let m_star = inequality_margin(Inequality::Inequality2, &star, &consts)?;
    rep.check("24*n16 violates", m_star < 0, format!("margin {}", fmt(&m_star)));
    rep.witnesses.push(Witness::new("largest counterexample", &star).with_value("r", &r_of(&star)?));

    let big = large_k_exclusion(table)?;
    rep.check(
        "k >= 44 excluded",
        big.ineq2_failure.is_none() && big.max_bound < log2,
        format!("44..={}: max fond2 bound {}", big.limit, fmt(&big.max_bound)),
    );

    // 17 <= k <= 43.
    let mut all_caps = Vec::new();
    let mut max_u = 0;
    for k in 17..=43 {
        let log_z = r1_root(table, k, &log2)?;
        let rest = Float::with_val(prec, &log_z - table.log_primorial(k));
        let u = u_of(table, &rest)?;
        max_u = max_u.max(u);
        all_caps.push(ratio_caps(table, k, u, &log_z)?);
    }
    rep.check("u(z_k/n_k) <= 5 for k = 17..43", max_u <= 5, format!("max u = {max_u}"));
    let head = cap_head(&cap_envelope(&all_caps));
    rep.check("caps within (5,3,2,2,1,...)", dominated(&head, &[5, 3, 2, 2]), format!("envelope head {head:?}"));
    let mut worst: Option<(Float, Vec<u32>)> = None;
    for k in 17..=43 {
        let n = for_each_canonical(table, &uniform_caps(&[5, 3, 2, 2], k), None, |v| {
            let f = Factorization::from_exponent_vector(table, v)?;
            let m = inequality_margin(Inequality::Inequality2, &f, &consts)?;
            if worst.as_ref().is_none_or(|(w, _)| m < *w) {
                worst = Some((m, v.to_vec()));
            }
            Ok(())
        })?;
        rep.exhaustion.accept(n);
    }
    if let Some((m, v)) = &worst {
        rep.check("k = 17..43 hold", *m >= 0, format!("smallest margin {} at {:?}", fmt(m), v));
    }

    // k = 2, 3.
    let mut small = Vec::new();
    for k in [2usize, 3] {
        let log_z = r1_root(table, k, &log2)?;
        let cap = (log_z.to_f64() / std::f64::consts::LN_2).floor().max(1.0) as u32;
        let mut found = Vec::new();
        let n = for_each_canonical(table, &vec![cap; k], Some(&log_z), |v| {
            let f = Factorization::from_exponent_vector(table, v)?;
            found.push((f.to_integer_unchecked().to_string(), r_of(&f)? < log2));
            Ok(())
        })?;
        rep.exhaustion.accept(n);
        small.push((k, log_z.exp().to_f64(), found));
    }
    let ok_small = small[0].2.is_empty() && small[1].2 == [("30".to_string(), true)];
    rep.check("k = 2, 3 hold", ok_small, format!("{small:?}"));

    // Table 1 and the r_2 thresholds.
    let t1 = table1(table)?;
    rep.check("table 1", t1 == TABLE1, format!("{t1:?}"));
    rep.table("table1", json!(t1));
    let log_star = star.log_n().clone();
    let mut zp = Vec::new();
    let mut all_below = true;
    for k in 4..=15 {
        let log_z = r1_root(table, k, &log2)?;
        let u = t1[k - 4].1;
        let ldk = log_d_k(table, k, u, &log_z)?;
        let lzp = r2_root(table, k, &ldk)?;
        all_below &= lzp < log_star;
        zp.push((k, lzp.to_f64()));
    }
    rep.check("z'_k < 24 n16 for k = 4..15", all_below, format!("log z'_k {zp:?} vs {}", fmt(&log_star)));

    // k = 16.
    let log_z16 = r1_root(table, 16, &log2)?;
    let ldk = log_d_k(table, 16, t1[12].1, &log_z16)?;
    let lzp16 = r2_root(table, 16, &ldk)?;
    let cap = (lzp16.to_f64() / std::f64::consts::LN_2).floor() as u32;
    let mut violators: Vec<Vec<u32>> = Vec::new();
    let n = for_each_canonical(table, &[cap; 16], Some(&lzp16), |v| {
        let f = Factorization::from_exponent_vector(table, v)?;
        if inequality_margin(Inequality::Inequality2, &f, &consts)? < 0 {
            violators.push(v.to_vec());
        }
        Ok(())
    })?;
    rep.exhaustion.accept(n);
    let expected: Vec<Vec<u32>> = K16_SURVIVORS.iter().map(|h| pad16(h)).collect();
    rep.check(
        "k = 16 violators",
        violators == expected,
        format!("{} candidates, violators {:?}", n, violators.iter().map(|v| cap_head(v)).collect::<Vec<_>>()),
    );
    let mut bumped_ok = true;
    let mut largest: Option<(Float, Vec<u32>)> = None;
    for v in &expected {
        let mut idx: Vec<usize> = (1..=15).collect();
        idx.push(17);
        let bumped = Factorization::new(table, idx, v.clone())?;
        bumped_ok &= r_of(&bumped)? < log2;
        let f = Factorization::from_exponent_vector(table, v)?;
        if largest.as_ref().is_none_or(|(l, _)| f.log_n() > l) {
            largest = Some((f.log_n().clone(), v.clone()));
        }
    }
    rep.check("53 -> 59 replacements hold", bumped_ok, "r < log 2 for all three");
    let largest = largest.map(|(_, v)| v).unwrap_or_default();
    rep.check("24*n16 largest", largest == pad16(&[4, 2]), format!("{:?}", cap_head(&largest)));
    Ok(rep.finish(started))
}
