//! The intervals `I_j = [10639.8 + j, 10640.8 + j]`, their subdivisions, the
//! exponent windows J_δ(p, j) and the per-prime errors ε_j(p).

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::arith::PrimeTable;
use crate::error::{Error, Result};
use crate::lemmas::{psi, psi_minimize};

/// Number of prime factors of the candidates in the interval pipeline.
pub const K44: usize = 44;
/// Number of intervals `I_j` covering `(10640.8, 10758.8]`.
pub const INTERVAL_COUNT: u32 = 118;

/// `10639.8 + j` as an exact decimal at precision `prec`.
pub fn interval_start(j: u32, prec: u32) -> Float {
    Float::with_val(prec, 106_398 + 10 * j) / 10u32
}

/// An inclusive integer exponent range; empty when `lo > hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
}

impl Window {
    pub fn new(lo: i64, hi: i64) -> Self {
        Window { lo, hi }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn len(&self) -> u64 {
        if self.is_empty() {
            0
        } else {
            (self.hi - self.lo + 1) as u64
        }
    }

    pub fn contains(&self, a: i64) -> bool {
        self.lo <= a && a <= self.hi
    }

    /// Union of two windows, provided it is again a single range.
    pub fn union(&self, other: &Window) -> Option<Window> {
        if self.is_empty() {
            return Some(*other);
        }
        if other.is_empty() {
            return Some(*self);
        }
        if other.lo > self.hi + 1 || self.lo > other.hi + 1 {
            return None;
        }
        Some(Window::new(self.lo.min(other.lo), self.hi.max(other.hi)))
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }
}

/// `I_j` split into equal subintervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalGrid {
    pub j: u32,
    pub subdivisions: u32,
}

impl IntervalGrid {
    pub fn new(j: u32, subdivisions: u32) -> Result<Self> {
        if j == 0 || j > INTERVAL_COUNT {
            return Err(Error::domain("interval_grid", format!("j = {j} outside 1..={INTERVAL_COUNT}")));
        }
        if subdivisions == 0 {
            return Err(Error::domain("interval_grid", "need at least one subdivision"));
        }
        Ok(IntervalGrid { j, subdivisions })
    }

    pub fn start(&self, prec: u32) -> Float {
        interval_start(self.j, prec)
    }

    pub fn end(&self, prec: u32) -> Float {
        interval_start(self.j, prec) + 1u32
    }

    /// Endpoints of subinterval `r` (0-based).
    pub fn sub(&self, r: u32, prec: u32) -> (Float, Float) {
        let n = self.subdivisions;
        // (10 (10639.8 + j) n + 10 r) / (10 n), kept exact in the numerator.
        let base = Float::with_val(prec, (106_398 + 10 * self.j) as u64 * n as u64);
        let lo = Float::with_val(prec, &base + 10 * r) / (10 * n);
        let hi = Float::with_val(prec, &base + 10 * (r + 1)) / (10 * n);
        (lo, hi)
    }

    pub fn iter(&self, prec: u32) -> impl Iterator<Item = (Float, Float)> + '_ {
        (0..self.subdivisions).map(move |r| self.sub(r, prec))
    }
}

/// Constants `A = log n_44` and `B_i = 44 log p_i` with f64 mirrors.
#[derive(Debug, Clone)]
pub struct Interval44 {
    prec: u32,
    a: Float,
    b: Vec<Float>,
    a_f: f64,
    b_f: Vec<f64>,
    log_p: Vec<f64>,
}

impl Interval44 {
    pub fn new(table: &PrimeTable) -> Result<Self> {
        let prec = table.prec();
        let a = table.try_log_primorial(K44)?.clone();
        let b: Vec<Float> = (1..=K44).map(|i| Float::with_val(prec, table.log_prime(i) * K44 as u32)).collect();
        let b_f = b.iter().map(Float::to_f64).collect();
        let log_p = (1..=K44).map(|i| table.log_prime_f64(i)).collect();
        Ok(Interval44 { prec, a_f: a.to_f64(), a, b, b_f, log_p })
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// `A = log n_44`.
    pub fn a(&self) -> &Float {
        &self.a
    }

    /// `B_i = 44 log p_i`, 1-based.
    pub fn b(&self, i: usize) -> &Float {
        &self.b[i - 1]
    }

    pub fn a_f64(&self) -> f64 {
        self.a_f
    }

    pub fn b_f64(&self, i: usize) -> f64 {
        self.b_f[i - 1]
    }

    pub fn log_p_f64(&self, i: usize) -> f64 {
        self.log_p[i - 1]
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i == 0 || i > K44 {
            return Err(Error::domain("interval44", format!("prime index {i} outside 1..=44")));
        }
        Ok(())
    }

    /// J_δ(p_i, j) = `{⌈((1−δ)(10639.8+j) + A)/B⌉ − 1, …, ⌊((1+δ)(10640.8+j) + A)/B⌋ − 1}`.
    pub fn j_delta(&self, i: usize, j: u32, delta: &Float) -> Result<Window> {
        self.check_index(i)?;
        if *delta < 0 {
            return Err(Error::domain("j_delta", "δ must be nonnegative"));
        }
        let prec = self.prec;
        let x1 = interval_start(j, prec);
        let x2 = Float::with_val(prec, &x1 + 1u32);
        let lo_arg = (Float::with_val(prec, 1u32 - delta) * x1 + &self.a) / self.b(i);
        let hi_arg = (Float::with_val(prec, delta + 1u32) * x2 + &self.a) / self.b(i);
        let lo = to_i64(lo_arg.ceil())? - 1;
        let hi = to_i64(hi_arg.floor())? - 1;
        Ok(Window::new(lo, hi))
    }

    /// [`Interval44::j_delta`], failing on an empty window.
    pub fn j_delta_nonempty(&self, i: usize, j: u32, delta: &Float) -> Result<Window> {
        let w = self.j_delta(i, j, delta)?;
        if w.is_empty() {
            return Err(Error::EmptyWindow { prime_index: i, j });
        }
        Ok(w)
    }

    /// ε_j(p_i) = min over α and z ∈ I_j of `|((α+1)B − A)/z − 1|`.
    pub fn epsilon(&self, i: usize, j: u32) -> Result<Float> {
        self.check_index(i)?;
        let x1 = interval_start(j, self.prec);
        let x2 = Float::with_val(self.prec, &x1 + 1u32);
        let one = Float::with_val(self.prec, 1);
        Ok(psi_minimize(&self.a, self.b(i), &x1, &x2, &one, &one)?.value)
    }

    /// ε_j(p_i) for all 44 primes.
    pub fn epsilons(&self, j: u32) -> Result<Vec<Float>> {
        (1..=K44).map(|i| self.epsilon(i, j)).collect()
    }

    /// The defining error `|((α+1)B_i − A)/x − 1|`.
    pub fn error(&self, i: usize, alpha: i64, x: &Float) -> Float {
        let one = Float::with_val(self.prec, 1);
        psi(alpha, x, &one, &self.a, self.b(i))
    }

    /// f64 mirror of [`Interval44::error`] with a general φ.
    pub fn error_f64(&self, i: usize, alpha: i64, x: f64, phi: f64) -> f64 {
        (((alpha + 1) as f64 * self.b_f[i - 1] - self.a_f) / x - phi).abs()
    }

    /// f64 minimum of ψ over α ∈ Z, x ∈ [x1, x2], φ ∈ [φ1, φ2].
    pub fn psi_min_f64(&self, i: usize, x1: f64, x2: f64, phi1: f64, phi2: f64) -> f64 {
        let b = self.b_f[i - 1];
        let lo = ((x1 * phi1 + self.a_f) / b).ceil();
        let hi = ((x2 * phi2 + self.a_f) / b).floor();
        if lo <= hi {
            return 0.0;
        }
        let mut best = f64::INFINITY;
        for alpha in [hi as i64 - 1, lo as i64 - 1] {
            for x in [x1, x2] {
                for phi in [phi1, phi2] {
                    best = best.min(self.error_f64(i, alpha, x, phi));
                }
            }
        }
        best
    }
}

fn to_i64(x: Float) -> Result<i64> {
    x.to_integer()
        .and_then(|i| i.to_i64())
        .ok_or_else(|| Error::domain("j_delta", "window endpoint out of range"))
}
