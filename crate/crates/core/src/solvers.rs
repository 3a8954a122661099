//! Guarded bisection for monotone thresholds and golden-section maximization.

use std::cmp::Ordering;

use log::debug;
use rug::Float;

use crate::error::{Error, Result};

const SPOT_CHECKS: usize = 8;
const MAX_DOUBLINGS: u32 = 64;
const UNIMODAL_SAMPLES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Increasing,
    Decreasing,
}

type Eval<'a> = Box<dyn Fn(&Float) -> Result<Float> + 'a>;

/// Find `z` in `[lo, hi]` with `eval(z) = target` for a monotone `eval`.
pub struct RootProblem<'a> {
    eval: Eval<'a>,
    target: Float,
    lo: Float,
    hi: Float,
    monotonicity: Monotonicity,
    tol: Float,
    expand: bool,
}

impl<'a> RootProblem<'a> {
    pub fn new<F>(eval: F, target: Float, lo: Float, hi: Float, monotonicity: Monotonicity, tol: Float) -> Self
    where
        F: Fn(&Float) -> Result<Float> + 'a,
    {
        RootProblem { eval: Box::new(eval), target, lo, hi, monotonicity, tol, expand: true }
    }

    /// Disables doubling of the upper bracket end.
    pub fn fixed_bracket(mut self) -> Self {
        self.expand = false;
        self
    }

    fn eval(&self, z: &Float) -> Result<Float> {
        (self.eval)(z)
    }

    /// Sign of `eval(z) − target` oriented so that it is negative left of the root.
    fn side(&self, value: &Float) -> Ordering {
        let c = value.partial_cmp(&self.target).unwrap_or(Ordering::Equal);
        match self.monotonicity {
            Monotonicity::Increasing => c,
            Monotonicity::Decreasing => c.reverse(),
        }
    }
}

/// Bisection on a declared-monotone function.
///
/// The bracket's upper end doubles (up to 2^64 times its width) until it
/// straddles the target, and the declared direction is spot-checked at eight
/// interior points before bisecting.
pub fn solve_monotone(p: &RootProblem<'_>) -> Result<Float> {
    let prec = p.target.prec().max(p.lo.prec());
    let mut lo = Float::with_val(prec, &p.lo);
    let mut hi = Float::with_val(prec, &p.hi);
    if hi <= lo {
        return Err(Error::domain("solve_monotone", "bracket must satisfy lo < hi"));
    }
    let f_lo = p.eval(&lo)?;
    if p.side(&f_lo) == Ordering::Greater {
        return Err(Error::NoBracket { doublings: 0 });
    }
    let mut f_hi = p.eval(&hi)?;
    let mut doublings = 0;
    while p.side(&f_hi) == Ordering::Less {
        if !p.expand || doublings >= MAX_DOUBLINGS {
            return Err(Error::NoBracket { doublings });
        }
        let width = Float::with_val(prec, &hi - &lo);
        hi = Float::with_val(prec, &lo + width * 2u32);
        f_hi = p.eval(&hi)?;
        doublings += 1;
    }
    spot_check(p, &lo, &hi, &f_lo, &f_hi)?;

    let scale = {
        let a = Float::with_val(prec, p.target.abs_ref());
        if a > 1 {
            a
        } else {
            Float::with_val(prec, 1)
        }
    };
    let residual_tol = Float::with_val(prec, &p.tol * &scale);
    let max_steps = prec as usize + 64 + doublings as usize;
    let mut steps = 0;
    loop {
        let mid = Float::with_val(prec, &lo + &hi) / 2u32;
        let f_mid = p.eval(&mid)?;
        let width = Float::with_val(prec, &hi - &lo);
        let residual = Float::with_val(prec, &f_mid - &p.target).abs();
        if width <= p.tol && residual <= residual_tol {
            debug!("solve_monotone: {steps} bisection steps, {doublings} doublings");
            return Ok(mid);
        }
        if steps >= max_steps {
            return Err(Error::Precision(format!(
                "bisection stalled after {steps} steps with residual {}",
                residual.to_f64()
            )));
        }
        match p.side(&f_mid) {
            Ordering::Less => lo = mid,
            Ordering::Greater => hi = mid,
            Ordering::Equal => {
                debug!("solve_monotone: exact hit after {steps} steps");
                return Ok(mid);
            }
        }
        steps += 1;
    }
}

fn spot_check(p: &RootProblem<'_>, lo: &Float, hi: &Float, f_lo: &Float, f_hi: &Float) -> Result<()> {
    let prec = lo.prec();
    let width = Float::with_val(prec, hi - lo);
    let mut prev = f_lo.clone();
    let n = SPOT_CHECKS as u32 + 1;
    for i in 1..=n {
        let v = if i == n {
            f_hi.clone()
        } else {
            let z = Float::with_val(prec, &width * i) / n + lo;
            p.eval(&z)?
        };
        let ok = match p.monotonicity {
            Monotonicity::Increasing => v >= prev,
            Monotonicity::Decreasing => v <= prev,
        };
        if !ok {
            return Err(Error::Monotonicity { at: format!("sample {i} of {n}") });
        }
        prev = v;
    }
    Ok(())
}

/// Golden-section maximization of a unimodal `g` on `[lo, hi]`.
///
/// Returns `(z0, g(z0))`. Sixteen equally spaced samples must rise then fall
/// with a strict peak; a flat sample profile is rejected.
pub fn maximize_bracketed<F>(g: F, lo: &Float, hi: &Float, tol: &Float) -> Result<(Float, Float)>
where
    F: Fn(&Float) -> Result<Float>,
{
    let prec = lo.prec();
    if hi <= lo {
        return Err(Error::domain("maximize_bracketed", "bracket must satisfy lo < hi"));
    }
    let width = Float::with_val(prec, hi - lo);
    let n = UNIMODAL_SAMPLES as u32;
    let mut samples = Vec::with_capacity(UNIMODAL_SAMPLES + 1);
    for i in 0..=n {
        let z = Float::with_val(prec, &width * i) / n + lo;
        samples.push(g(&z)?);
    }
    let first = &samples[0];
    let flat_tol = Float::with_val(prec, first.abs_ref()).max(&Float::with_val(prec, 1)) * tol;
    if samples.iter().all(|v| Float::with_val(prec, v - first).abs() <= flat_tol) {
        return Err(Error::Unimodality("flat sample profile".into()));
    }
    let mut falling = false;
    for w in samples.windows(2) {
        if w[1] < w[0] {
            falling = true;
        } else if falling && w[1] > w[0] {
            return Err(Error::Unimodality("samples rise again after falling".into()));
        }
    }

    let inv_phi = (Float::with_val(prec, 5).sqrt() - 1u32) / 2u32;
    let mut a = Float::with_val(prec, lo);
    let mut b = Float::with_val(prec, hi);
    let mut c = Float::with_val(prec, &b - Float::with_val(prec, &b - &a) * &inv_phi);
    let mut d = Float::with_val(prec, &a + Float::with_val(prec, &b - &a) * &inv_phi);
    let mut gc = g(&c)?;
    let mut gd = g(&d)?;
    while Float::with_val(prec, &b - &a) > *tol {
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = Float::with_val(prec, &b - Float::with_val(prec, &b - &a) * &inv_phi);
            gc = g(&c)?;
        } else {
            a = c;
            c = d;
            gc = gd;
            d = Float::with_val(prec, &a + Float::with_val(prec, &b - &a) * &inv_phi);
            gd = g(&d)?;
        }
    }
    let z0 = Float::with_val(prec, &a + &b) / 2u32;
    let v = g(&z0)?;
    Ok((z0, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{Factorization, PrecisionContext, PrimeTable};
    use crate::bounds::{r1, upsilon};

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    #[test]
    fn r1_thresholds() {
        let c = ctx();
        let t = PrimeTable::new(50, &c);
        let log2 = c.float(2).ln();
        let solve = |k: usize| {
            let p = RootProblem::new(
                |z: &Float| r1(&t, z, k),
                log2.clone(),
                c.float(1e-6),
                c.float(100),
                Monotonicity::Decreasing,
                c.root_tol().clone(),
            );
            solve_monotone(&p).unwrap().exp()
        };
        assert!((solve(2).to_f64() - 3.2557).abs() < 1e-3);
        assert!((solve(3).to_f64() - 36.1257).abs() < 1e-3);
    }

    #[test]
    fn upsilon_threshold_44() {
        let c = ctx();
        let t = PrimeTable::new(50, &c);
        let n44 = Factorization::primorial(&t, 44).unwrap();
        let p = RootProblem::new(
            |z: &Float| upsilon(&n44, z),
            c.float(1),
            c.float(1000),
            c.float(100_000),
            Monotonicity::Decreasing,
            c.root_tol().clone(),
        );
        let z = solve_monotone(&p).unwrap();
        assert!((z.to_f64() - 10758.21).abs() < 0.01, "{z}");
        let residual = Float::with_val(c.prec(), upsilon(&n44, &z).unwrap() - 1u32).abs();
        assert!(residual <= *c.root_tol());
    }

    #[test]
    fn bracket_expands_and_gives_up() {
        let c = ctx();
        let p = RootProblem::new(
            |z: &Float| Ok(Float::with_val(z.prec(), z.ln_ref())),
            c.float(20),
            c.float(1),
            c.float(2),
            Monotonicity::Increasing,
            c.root_tol().clone(),
        );
        let z = solve_monotone(&p).unwrap();
        assert!((z.to_f64() - 20f64.exp()).abs() < 1e-6);
        let p = RootProblem::new(
            |_: &Float| Ok(c.float(0)),
            c.float(1),
            c.float(1),
            c.float(2),
            Monotonicity::Increasing,
            c.root_tol().clone(),
        );
        assert!(matches!(solve_monotone(&p), Err(Error::NoBracket { doublings: 64 })));
    }

    #[test]
    fn wrong_direction_is_rejected() {
        let c = ctx();
        let p = RootProblem::new(
            |z: &Float| Ok(Float::with_val(z.prec(), 10u32 - z)),
            c.float(5),
            c.float(0),
            c.float(10),
            Monotonicity::Increasing,
            c.root_tol().clone(),
        );
        assert!(solve_monotone(&p).is_err());
        // Non-monotone in the interior but straddling at the ends.
        let p = RootProblem::new(
            |z: &Float| Ok(Float::with_val(z.prec(), z.sin_ref()) * 10u32 + z),
            c.float(3),
            c.float(0),
            c.float(10),
            Monotonicity::Increasing,
            c.root_tol().clone(),
        )
        .fixed_bracket();
        assert!(matches!(solve_monotone(&p), Err(Error::Monotonicity { .. })));
    }

    #[test]
    fn golden_section_closed_form() {
        let c = ctx();
        let g = |z: &Float| Ok((Float::with_val(z.prec(), z.sqrt_ref()) - 1u32) / z);
        let (z0, v) = maximize_bracketed(g, &c.float(1.5), &c.float(50), &c.root_tol().clone()).unwrap();
        assert!((z0.to_f64() - 4.0).abs() < 1e-12);
        assert!((v.to_f64() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn flat_and_bimodal_rejected() {
        let c = ctx();
        let tol = c.root_tol().clone();
        let flat = |z: &Float| Ok(Float::with_val(z.prec(), 3));
        assert!(matches!(maximize_bracketed(flat, &c.float(0), &c.float(1), &tol), Err(Error::Unimodality(_))));
        let wavy = |z: &Float| Ok(Float::with_val(z.prec(), z.sin_ref()));
        assert!(maximize_bracketed(wavy, &c.float(0), &c.float(20), &tol).is_err());
    }
}
