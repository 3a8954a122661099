//! Exclusion of 45 <= ω <= 73, the window for ω = 44, and the extremal candidate.

use rug::Float;
use serde_json::json;

use crate::arith::{Factorization, PrimeTable};
use crate::bounds::{lambda_of, upsilon_raw};
use crate::error::Result;
use crate::solvers::{solve_monotone, Monotonicity, RootProblem};

use crate::search::common::{fmt, upsilon_root};
use crate::search::interval::K44;
use crate::search::reference::N_STAR;
use crate::search::report::{VerificationReport, Witness};

pub const Z_MID_BOUND: &str = "4569.68";
pub const Z_DROP_BOUND: &str = "9927.67";
pub const Z44_ROUNDED: &str = "10758.21";
pub const LOG_N_STAR: &str = "10640.8428";
pub const WINDOW_LOW: &str = "10640.8";
pub const WINDOW_HIGH: &str = "10758.8";

/// Root of `υ = 1` for given `log γ`, `log β` and k.
fn raw_root(table: &PrimeTable, log_gamma: &Float, log_beta: &Float, k: usize) -> Result<Float> {
    let ctx = table.ctx();
    let lo = Float::with_val(ctx.prec(), log_gamma / 2u32);
    let hi = Float::with_val(ctx.prec(), log_gamma * 2u32) + 1u32;
    let p = RootProblem::new(
        |z: &Float| upsilon_raw(log_gamma, log_beta, k, z),
        ctx.float(1),
        lo,
        hi,
        Monotonicity::Decreasing,
        ctx.root_tol().clone(),
    );
    solve_monotone(&p)
}

/// `z_44` with `υ(n_44, z_44) = 1`.
pub fn z44(table: &PrimeTable) -> Result<Float> {
    let one = table.ctx().float(1);
    let lo = Float::with_val(table.prec(), table.try_log_primorial(K44)? / 2u32);
    upsilon_root(table, K44, &one, &lo)
}

/// The extremal 44-prime candidate.
pub fn n_star(table: &PrimeTable) -> Result<Factorization> {
    Factorization::from_exponent_vector(table, &N_STAR)
}

pub fn run(table: &PrimeTable, rep: &mut VerificationReport) -> Result<()> {
    let ctx = table.ctx();
    let prec = ctx.prec();
    let one = ctx.float(1);

    let mut zs = Vec::new();
    let mut max_z = Float::with_val(prec, 0);
    for k in 45..=73 {
        let lo = Float::with_val(prec, table.try_log_primorial(k)? / 2u32);
        let z = upsilon_root(table, k, &one, &lo)?;
        zs.push((k, z.to_f64()));
        if z > max_z {
            max_z = z;
        }
    }
    rep.check(
        "z_k <= 4569.68 for k = 45..73",
        max_z <= ctx.parse(Z_MID_BOUND)?,
        format!("max z_k = {}", fmt(&max_z)),
    );
    rep.table("z_k_45_73", json!(zs));

    // n = n_45 / p_i, i <= 44.
    let log_n45 = table.try_log_primorial(45)?;
    let log_beta45 = table.log_beta_primorial(45);
    let mut max_drop = Float::with_val(prec, 0);
    let mut worst = 0;
    for i in 1..=K44 {
        let lg = Float::with_val(prec, log_n45 - table.log_prime(i));
        let lb = Float::with_val(prec, &log_beta45 + table.loglog_prime(i));
        let z = raw_root(table, &lg, &lb, K44)?;
        if z > max_drop {
            max_drop = z;
            worst = i;
        }
    }
    rep.check(
        "z_S <= 9927.67 for n_45/p_i",
        max_drop <= ctx.parse(Z_DROP_BOUND)?,
        format!("max {} at i = {worst}", fmt(&max_drop)),
    );

    let z = z44(table)?;
    let rounded = Float::with_val(prec, &z * 100u32).round() / 100u32;
    rep.check(
        "z_44 = 10758.21",
        rounded == ctx.parse(Z44_ROUNDED)? && z < ctx.parse(WINDOW_HIGH)?,
        format!("z_44 = {}", fmt(&z)),
    );

    let star = n_star(table)?;
    let lambda = lambda_of(&star)?;
    let log_n = star.log_n().clone();
    let diff = Float::with_val(prec, &log_n - ctx.parse(LOG_N_STAR)?).abs();
    rep.check(
        "n_* has lambda > 1 in I_1",
        lambda > 1 && diff < 5e-5 && log_n >= ctx.parse(WINDOW_LOW)?,
        format!("λ = {}, log n = {}", fmt(&lambda), fmt(&log_n)),
    );
    rep.witnesses.push(Witness::new("n_star", &star).with_value("lambda", &lambda));
    Ok(())
}
