//! Helpers shared by the theorem drivers.

use rug::Float;

use crate::arith::{format_truncated, PrimeTable};
use crate::bounds::{r1, r1_limit, r_fond2_bound, upsilon_raw};
use crate::error::{Error, Result};
use crate::lemmas::ineq2_holds;
use crate::solvers::{solve_monotone, Monotonicity, RootProblem};

use super::report::REPORT_DIGITS;

/// Largest ω checked explicitly in the large-k exclusions.
pub const LARGE_K_LIMIT: usize = 1000;

pub fn fmt(x: &Float) -> String {
    format_truncated(x, REPORT_DIGITS)
}

/// `log z_k` with `r_1(z_k, k) = target`.
pub fn r1_root(table: &PrimeTable, k: usize, target: &Float) -> Result<Float> {
    let ctx = table.ctx();
    if r1_limit(table, k)? >= *target {
        return Err(Error::NoBracket { doublings: 0 });
    }
    let p = RootProblem::new(
        |z: &Float| r1(table, z, k),
        target.clone(),
        ctx.parse("1e-6")?,
        ctx.float(1000),
        Monotonicity::Decreasing,
        ctx.root_tol().clone(),
    );
    solve_monotone(&p)
}

/// `log z_k` with `υ(n_k, z_k) = target`, searched above `lo`.
pub fn upsilon_root(table: &PrimeTable, k: usize, target: &Float, lo: &Float) -> Result<Float> {
    let ctx = table.ctx();
    let log_nk = table.try_log_primorial(k)?.clone();
    let log_beta = table.log_beta_primorial(k);
    let hi = Float::with_val(ctx.prec(), lo * 2u32) + 1u32;
    let p = RootProblem::new(
        move |z: &Float| upsilon_raw(&log_nk, &log_beta, k, z),
        target.clone(),
        lo.clone(),
        hi,
        Monotonicity::Decreasing,
        ctx.root_tol().clone(),
    );
    solve_monotone(&p)
}

/// `υ(n_k, n_k)`.
pub fn upsilon_at_primorial(table: &PrimeTable, k: usize) -> Result<Float> {
    let log_nk = table.try_log_primorial(k)?;
    upsilon_raw(log_nk, &table.log_beta_primorial(k), k, log_nk)
}

/// Outcome of the `k >= 44` exclusion over `44..=limit`.
pub struct LargeK {
    pub limit: usize,
    /// First k where `β(n_k) <= (log k)^{−k}` fails.
    pub ineq2_failure: Option<usize>,
    /// Largest fond2 bound on r seen.
    pub max_bound: Float,
}

pub fn large_k_exclusion(table: &PrimeTable) -> Result<LargeK> {
    let limit = table.len().min(LARGE_K_LIMIT);
    let mut ineq2_failure = None;
    let mut max_bound = r_fond2_bound(table, 44)?;
    for k in 44..=limit {
        if ineq2_failure.is_none() && !ineq2_holds(table, k)? {
            ineq2_failure = Some(k);
        }
        let b = r_fond2_bound(table, k)?;
        if b > max_bound {
            max_bound = b;
        }
    }
    Ok(LargeK { limit, ineq2_failure, max_bound })
}

/// Exponent caps from the t-ratio test with ℓ = 1: `α_j <= max(1, ⌊(log z/log p_j − 1)/k⌋)`
/// for `j <= u`, and 1 beyond.
pub fn ratio_caps(table: &PrimeTable, k: usize, u: usize, log_z: &Float) -> Result<Vec<u32>> {
    let prec = table.prec();
    let mut caps = vec![1u32; k];
    for (j, cap) in caps.iter_mut().enumerate().take(u.min(k)) {
        let v = (Float::with_val(prec, log_z / table.log_prime(j + 1)) - 1u32) / k as u32;
        let f = v.floor().to_f64();
        if !f.is_finite() || f > u32::MAX as f64 {
            return Err(Error::domain("ratio_caps", "cap out of range"));
        }
        *cap = (f.max(1.0)) as u32;
    }
    Ok(caps)
}

/// Componentwise maximum of equal-length or ragged cap vectors, padded with 1.
pub fn cap_envelope<'a>(caps: impl IntoIterator<Item = &'a Vec<u32>>) -> Vec<u32> {
    let mut out: Vec<u32> = Vec::new();
    for c in caps {
        if c.len() > out.len() {
            out.resize(c.len(), 1);
        }
        for (o, &v) in out.iter_mut().zip(c) {
            *o = (*o).max(v);
        }
    }
    out
}

/// Caps with the leading entries of `head` and ones elsewhere.
pub fn uniform_caps(head: &[u32], k: usize) -> Vec<u32> {
    (0..k).map(|i| head.get(i).copied().unwrap_or(1)).collect()
}

/// Whether `caps` is coordinatewise at most `bound` (missing entries read as 1).
pub fn dominated(caps: &[u32], bound: &[u32]) -> bool {
    caps.iter().enumerate().all(|(i, &c)| c <= bound.get(i).copied().unwrap_or(1))
}

/// Strips trailing ones for compact display.
pub fn cap_head(caps: &[u32]) -> Vec<u32> {
    let end = caps.iter().rposition(|&c| c != 1).map_or(0, |p| p + 1);
    caps[..end].to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::PrecisionContext;

    #[test]
    fn cap_helpers() {
        let env = cap_envelope([&vec![4, 2, 1], &vec![3, 2, 2, 1]]);
        assert_eq!(env, vec![4, 2, 2, 1]);
        assert_eq!(cap_head(&env), vec![4, 2, 2]);
        assert_eq!(uniform_caps(&[5, 3], 4), vec![5, 3, 1, 1]);
    }

    #[test]
    fn r1_root_small_k() {
        let t = PrimeTable::new(60, &PrecisionContext::default());
        let log2 = t.ctx().float(2).ln();
        let z2 = r1_root(&t, 2, &log2).unwrap().exp().to_f64();
        let z3 = r1_root(&t, 3, &log2).unwrap().exp().to_f64();
        assert!((z2 - 3.25).abs() < 0.01, "{z2}");
        assert!((z3 - 36.12).abs() < 0.01, "{z3}");
    }
}
