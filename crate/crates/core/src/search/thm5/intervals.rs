//! Per-interval bounds: w(j), ϖ′(j), δ′(j) and the surviving m range.

use rayon::prelude::*;
use rug::Float;

use crate::arith::PrimeTable;
use crate::bounds::Upsilon44;
use crate::error::{Error, Result};
use crate::lemmas::psi_minimize;
use crate::solvers::{solve_monotone, Monotonicity, RootProblem};

use crate::search::interval::{interval_start, Interval44, IntervalGrid, K44};

/// Subintervals used for the lower bound ϖ′(j).
pub const LOWER_SUBDIVISIONS: u32 = 210;

/// Shared constants for the ω = 44 pipeline.
pub struct Setup<'a> {
    pub table: &'a PrimeTable,
    pub ups: Upsilon44,
    pub iv: Interval44,
}

impl<'a> Setup<'a> {
    pub fn new(table: &'a PrimeTable) -> Result<Self> {
        Ok(Setup { table, ups: Upsilon44::new(table)?, iv: Interval44::new(table)? })
    }

    pub fn prec(&self) -> u32 {
        self.table.prec()
    }
}

/// `max_{1 <= m <= 43} υ_m(z, w)`.
pub fn max_upsilon_m(ups: &Upsilon44, z: &Float, w: &Float) -> Result<Float> {
    let mut best: Option<Float> = None;
    for m in 1..K44 {
        let v = ups.upsilon_m(z, w, m)?;
        if best.as_ref().is_none_or(|b| v > *b) {
            best = Some(v);
        }
    }
    Ok(best.expect("43 values"))
}

/// Smallest w with `max_m υ_m(10639.8 + j, w) = 1`.
pub fn w_star(setup: &Setup<'_>, j: u32) -> Result<Float> {
    let ctx = setup.table.ctx();
    let z = interval_start(j, setup.prec());
    let p = RootProblem::new(
        |w: &Float| max_upsilon_m(&setup.ups, &z, w),
        ctx.float(1),
        ctx.float(0),
        ctx.parse("0.5")?,
        Monotonicity::Decreasing,
        ctx.root_tol().clone(),
    )
    .fixed_bracket();
    solve_monotone(&p)
}

/// `x` rounded up to four decimals.
pub fn ceil4(x: &Float) -> Float {
    let scaled = Float::with_val(x.prec(), x * 10_000u32).ceil();
    scaled / 10_000u32
}

/// ϖ′(j): the minimum over 210 subintervals of `Σ_i min ψ(α, x, 1)`.
pub fn varpi_lower(iv: &Interval44, j: u32) -> Result<Float> {
    let prec = iv.prec();
    let grid = IntervalGrid::new(j, LOWER_SUBDIVISIONS)?;
    let one = Float::with_val(prec, 1);
    let sums: Vec<Float> = (0..LOWER_SUBDIVISIONS)
        .into_par_iter()
        .map(|r| {
            let (a, b) = grid.sub(r, prec);
            let mut s = Float::with_val(prec, 0);
            for i in 1..=K44 {
                s += psi_minimize(iv.a(), iv.b(i), &a, &b, &one, &one)?.value;
            }
            Ok(s)
        })
        .collect::<Result<_>>()?;
    sums.into_iter().min_by(|a, b| a.partial_cmp(b).expect("finite")).ok_or(Error::domain("varpi", "no subintervals"))
}

/// `{m : υ_m(10639.8 + j, ϖ) >= 1}` as a closed range, if nonempty.
pub fn m_range(ups: &Upsilon44, j: u32, varpi: &Float) -> Result<Option<(usize, usize)>> {
    let z = interval_start(j, varpi.prec());
    let mut ms = Vec::new();
    for m in 1..K44 {
        if ups.upsilon_m(&z, varpi, m)? >= 1 {
            ms.push(m);
        }
    }
    let range = ms.first().zip(ms.last()).map(|(&a, &b)| (a, b));
    if let Some((a, b)) = range {
        if b - a + 1 != ms.len() {
            return Err(Error::domain("m_range", format!("j = {j}: surviving m not contiguous: {ms:?}")));
        }
    }
    Ok(range)
}

/// Everything the later phases need about `I_j`.
#[derive(Debug, Clone)]
pub struct IntervalBounds {
    pub j: u32,
    pub w_star: Float,
    /// `w_star` rounded up to four decimals.
    pub w: Float,
    /// `max_m υ_m(10639.8 + j, w)`, below one when `w` is a valid bound.
    pub upsilon_at_w: Float,
    pub varpi: Float,
    pub eps: Vec<Float>,
    pub eps_sum: Float,
    /// `w − Σ ε_j(p)`.
    pub delta_prime: Float,
    pub m_range: Option<(usize, usize)>,
}

impl IntervalBounds {
    pub fn compute(setup: &Setup<'_>, j: u32) -> Result<Self> {
        let prec = setup.prec();
        let w_star = w_star(setup, j)?;
        let w = ceil4(&w_star);
        let upsilon_at_w = max_upsilon_m(&setup.ups, &interval_start(j, prec), &w)?;
        let varpi = varpi_lower(&setup.iv, j)?;
        let eps = setup.iv.epsilons(j)?;
        let eps_sum = eps.iter().fold(Float::with_val(prec, 0), |acc, e| acc + e);
        let delta_prime = Float::with_val(prec, &w - &eps_sum);
        let m_range = m_range(&setup.ups, j, &varpi)?;
        Ok(IntervalBounds { j, w_star, w, upsilon_at_w, varpi, eps, eps_sum, delta_prime, m_range })
    }

    /// `w − 0.01 − Σ ε_j(p)`, valid once the reduction for j succeeds.
    pub fn delta_reduced(&self) -> Float {
        let prec = self.w.prec();
        let hundredth = Float::with_val(prec, 1) / 100u32;
        Float::with_val(prec, &self.delta_prime - hundredth)
    }
}
