use rug::ops::Pow;
use rug::{Assign, Float};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest working precision accepted, in significant decimal digits.
pub const MIN_DIGITS: u32 = 50;
/// Working precision used when nothing else is requested.
pub const DEFAULT_DIGITS: u32 = 60;
/// Environment variable overriding [`DEFAULT_DIGITS`].
pub const DIGITS_ENV: &str = "TAUBOUND_DIGITS";

/// How comparisons treat rounding error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RoundingPolicy {
    /// Round-to-nearest at the working precision; comparisons are exact.
    #[default]
    Nearest,
    /// Every strict comparison is widened by `10^-(digits-10)` against the
    /// caller, so an elimination only succeeds with that much room to spare.
    Widened,
}

/// Working precision, the acceptance threshold for elimination criteria and
/// the tolerance used by root solvers.
#[derive(Debug, Clone)]
pub struct PrecisionContext {
    digits: u32,
    threshold: Float,
    root_tol: Float,
    rounding: RoundingPolicy,
}

impl PrecisionContext {
    pub fn new(digits: u32) -> Result<Self> {
        if digits < MIN_DIGITS {
            return Err(Error::Precision(format!(
                "{digits} digits requested, at least {MIN_DIGITS} required"
            )));
        }
        let prec = bits_for(digits);
        let threshold = parse_with(prec, "0.999999")?;
        let root_tol = Float::with_val(prec, 10u32).pow(-30i32);
        Ok(PrecisionContext { digits, threshold, root_tol, rounding: RoundingPolicy::Nearest })
    }

    /// Reads `TAUBOUND_DIGITS`, falling back to [`DEFAULT_DIGITS`].
    pub fn from_env() -> Result<Self> {
        match std::env::var(DIGITS_ENV) {
            Ok(v) => {
                let digits = v
                    .trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Precision(format!("{DIGITS_ENV}={v:?} is not a digit count")))?;
                Self::new(digits)
            }
            Err(_) => Self::new(DEFAULT_DIGITS),
        }
    }

    pub fn with_threshold(mut self, threshold: &str) -> Result<Self> {
        let t = parse_with(self.prec(), threshold)?;
        if t >= 1 {
            return Err(Error::Precision(format!("threshold {threshold} must be < 1")));
        }
        self.threshold = t;
        Ok(self)
    }

    pub fn with_root_tol(mut self, tol: &str) -> Result<Self> {
        let t = parse_with(self.prec(), tol)?;
        if t <= 0 {
            return Err(Error::Precision(format!("root tolerance {tol} must be positive")));
        }
        self.root_tol = t;
        Ok(self)
    }

    pub fn with_rounding(mut self, rounding: RoundingPolicy) -> Self {
        self.rounding = rounding;
        self
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// Binary precision backing `digits` decimal digits, with guard bits.
    pub fn prec(&self) -> u32 {
        bits_for(self.digits)
    }

    pub fn threshold(&self) -> &Float {
        &self.threshold
    }

    pub fn root_tol(&self) -> &Float {
        &self.root_tol
    }

    pub fn rounding(&self) -> RoundingPolicy {
        self.rounding
    }

    pub fn float<T>(&self, value: T) -> Float
    where
        Float: Assign<T>,
    {
        Float::with_val(self.prec(), value)
    }

    /// Parses a decimal literal at working precision.
    pub fn parse(&self, literal: &str) -> Result<Float> {
        parse_with(self.prec(), literal)
    }

    /// `10^-exp` at working precision.
    pub fn ten_pow_neg(&self, exp: u32) -> Float {
        Float::with_val(self.prec(), 10u32).pow(-(exp as i32))
    }

    /// Relative tolerance for identities that should hold up to rounding.
    pub fn identity_tol(&self) -> Float {
        self.ten_pow_neg(self.digits - 10)
    }

    /// Margin added against the caller in every strict comparison.
    pub fn slack(&self) -> Float {
        match self.rounding {
            RoundingPolicy::Nearest => self.float(0),
            RoundingPolicy::Widened => self.identity_tol(),
        }
    }

    /// `value < bound`, with the widened margin applied when requested.
    pub fn is_below(&self, value: &Float, bound: &Float) -> bool {
        let b = Float::with_val(self.prec(), bound - self.slack());
        *value < b
    }

    /// `value > bound`, with the widened margin applied when requested.
    pub fn is_above(&self, value: &Float, bound: &Float) -> bool {
        let b = Float::with_val(self.prec(), bound + self.slack());
        *value > b
    }

    /// Criterion used when eliminating a candidate: the bound must be strictly
    /// below the acceptance threshold (0.999999 by default).
    pub fn passes_criterion(&self, value: &Float) -> bool {
        self.is_below(value, &self.threshold)
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        PrecisionContext::new(DEFAULT_DIGITS).expect("default precision is valid")
    }
}

pub(crate) fn bits_for(digits: u32) -> u32 {
    // log2(10) = 3.3219...; 16 guard bits.
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 16
}

fn parse_with(prec: u32, literal: &str) -> Result<Float> {
    let parsed = Float::parse(literal.trim())
        .map_err(|e| Error::Parse(format!("{literal:?} is not a decimal number: {e}")))?;
    Ok(Float::with_val(prec, parsed))
}

/// Renders `x` with `digits` significant digits followed by the truncation
/// marker `…`.
pub fn format_truncated(x: &Float, digits: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let s = x.to_string_radix(10, Some(digits + 2));
    let (mantissa, exp) = match s.find('e') {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i64>().unwrap_or(0)),
        None => (s.as_str(), 0),
    };
    let negative = mantissa.starts_with('-');
    let body = mantissa.trim_start_matches('-');
    let digits_only: String = body.chars().filter(|c| c.is_ascii_digit()).collect();
    let point = body.find('.').unwrap_or(body.len()) as i64 + exp;
    let kept: String = digits_only.chars().take(digits).collect();
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if point <= 0 {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-point) as usize));
        out.push_str(&kept);
    } else if point as usize >= kept.len() {
        out.push_str(&kept);
        out.extend(std::iter::repeat_n('0', point as usize - kept.len()));
    } else {
        out.push_str(&kept[..point as usize]);
        out.push('.');
        out.push_str(&kept[point as usize..]);
    }
    out.push('…');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_low_precision() {
        assert!(PrecisionContext::new(49).is_err());
        assert!(PrecisionContext::new(50).is_ok());
    }

    #[test]
    fn threshold_must_be_below_one() {
        let ctx = PrecisionContext::default();
        assert!(ctx.clone().with_threshold("1").is_err());
        assert!(ctx.with_threshold("0.9999").is_ok());
    }

    #[test]
    fn default_threshold_and_tol() {
        let ctx = PrecisionContext::default();
        assert_eq!(ctx.digits(), 60);
        assert_eq!(ctx.threshold().to_f64(), 0.999999);
        assert!((ctx.root_tol().to_f64() - 1e-30).abs() < 1e-40);
        assert!(ctx.prec() >= 200);
    }

    #[test]
    fn widened_comparisons_are_stricter() {
        let near = PrecisionContext::default();
        let wide = near.clone().with_rounding(RoundingPolicy::Widened);
        let one = near.float(1);
        let almost = Float::with_val(near.prec(), &one - near.ten_pow_neg(55));
        assert!(near.is_below(&almost, &one));
        assert!(!wide.is_below(&almost, &one));
    }

    #[test]
    fn truncated_formatting() {
        let ctx = PrecisionContext::default();
        let x = ctx.parse("1.19999531234").unwrap();
        assert_eq!(format_truncated(&x, 8), "1.1999953…");
        let y = ctx.parse("10640.8428123").unwrap();
        assert_eq!(format_truncated(&y, 9), "10640.8428…");
        let z = ctx.parse("0.000123456").unwrap();
        assert_eq!(format_truncated(&z, 3), "0.000123…");
        assert_eq!(format_truncated(&ctx.float(2304), 4), "2304…");
    }
}
