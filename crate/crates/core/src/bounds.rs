//! Scalar bound and score functions evaluated on factorizations or on
//! `(z, k, ...)` parameter tuples.
//!
//! Every υ-type function takes `z = log n` rather than `n`: the witnesses of
//! interest have `log n` near 10^4 and exist only in log space.

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::arith::{log_plus, Factorization, PrimeTable};
use crate::error::{Error, Result};

fn ln_u(prec: u32, v: u64) -> Float {
    Float::with_val(prec, v).ln()
}

/// `k log k`.
fn k_log_k(prec: u32, k: usize) -> Float {
    Float::with_val(prec, ln_u(prec, k as u64) * k as u32)
}

fn require_omega(func: &'static str, f: &Factorization, min: usize) -> Result<usize> {
    let k = f.omega();
    if k < min {
        return Err(Error::domain(func, format!("ω(n) = {k} < {min}")));
    }
    Ok(k)
}

/// λ from `log τ`, `log n` and k: `(τ^{1/k} − 1)·k·log k / log n`.
pub fn lambda_from_logs(log_tau: &Float, log_n: &Float, k: usize) -> Float {
    let prec = log_n.prec();
    let root = Float::with_val(prec, log_tau / k as u32).exp();
    Float::with_val(prec, root - 1u32) * k_log_k(prec, k) / log_n
}

/// λ(n) = (τ(n)^{1/k} − 1)·k·log k / log n, k = ω(n) ≥ 2.
pub fn lambda_of(f: &Factorization) -> Result<Float> {
    let k = require_omega("lambda_of", f, 2)?;
    Ok(lambda_from_logs(&f.log_tau(), f.log_n(), k))
}

/// Reconstructs τ from λ through `(1 + λ·log n/(k log k))^k`.
pub fn tau_from_lambda(lambda: &Float, log_n: &Float, k: usize) -> Float {
    let prec = log_n.prec();
    let base = Float::with_val(prec, lambda * log_n) / k_log_k(prec, k) + 1u32;
    Float::with_val(prec, rug::ops::Pow::pow(base, k as u32))
}

/// t(n) = τ(n)^{1/k} / log n.
pub fn t_of(f: &Factorization) -> Result<Float> {
    let k = require_omega("t_of", f, 1)?;
    let prec = f.prec();
    let root = Float::with_val(prec, f.log_tau() / k as u32).exp();
    Ok(root / f.log_n())
}

/// r(n) = (1/k)(log τ − k·log(log n / (k log k))), k ≥ 2.
pub fn r_of(f: &Factorization) -> Result<Float> {
    let k = require_omega("r_of", f, 2)?;
    Ok(r_from_logs(&f.log_tau(), f.log_n(), k))
}

pub fn r_from_logs(log_tau: &Float, log_n: &Float, k: usize) -> Float {
    let prec = log_n.prec();
    let inner = Float::with_val(prec, log_n / k_log_k(prec, k)).ln();
    Float::with_val(prec, log_tau / k as u32) - inner
}

/// υ from its ingredients: `log k (1 + log γ / z) β^{1/k} − k log k / z`.
pub fn upsilon_raw(log_gamma: &Float, log_beta: &Float, k: usize, z: &Float) -> Result<Float> {
    if *z <= 0 {
        return Err(Error::domain("upsilon", "log z must be positive (z > 1)"));
    }
    if k < 2 {
        return Err(Error::domain("upsilon", format!("k = {k} < 2")));
    }
    let prec = z.prec();
    let beta_root = Float::with_val(prec, log_beta / k as u32).exp();
    let lk = ln_u(prec, k as u64);
    let first = Float::with_val(prec, log_gamma / z) + 1u32;
    let v = lk.clone() * first * beta_root;
    Ok(v - k_log_k(prec, k) / z)
}

/// υ(n, z) with `z` given as its logarithm.
pub fn upsilon(f: &Factorization, log_z: &Float) -> Result<Float> {
    upsilon_raw(f.gamma_log(), &f.beta_log(), f.omega(), log_z)
}

/// r_1(z, k) = log β(n_k)/k + log log k + log(1 + log n_k / log z).
pub fn r1(table: &PrimeTable, log_z: &Float, k: usize) -> Result<Float> {
    if *log_z <= 0 || k < 2 {
        return Err(Error::domain("r1", "requires z > 1 and k >= 2"));
    }
    let prec = table.prec();
    let log_nk = table.try_log_primorial(k)?;
    let a = table.log_beta_primorial(k) / k as u32;
    let b = ln_u(prec, k as u64).ln();
    let c = (Float::with_val(prec, log_nk / log_z) + 1u32).ln();
    Ok(a + b + c)
}

/// Limit of r_1(z, k) as z → ∞: `log β(n_k)/k + log log k`.
pub fn r1_limit(table: &PrimeTable, k: usize) -> Result<Float> {
    let prec = table.prec();
    table.try_log_primorial(k)?;
    Ok(table.log_beta_primorial(k) / k as u32 + ln_u(prec, k as u64).ln())
}

/// The k-only bound `log 2 + log log k + log β(n_k)/k` on r(n) derived from fond2.
pub fn r_fond2_bound(table: &PrimeTable, k: usize) -> Result<Float> {
    let prec = table.prec();
    Ok(r1_limit(table, k)? + ln_u(prec, 2))
}

/// log d_k with
/// `d_k = 2^{k−u}·β(n_u)/u^u·(log(z_k n_u^2 / n_k))^u`, `u = u_k`.
pub fn log_d_k(table: &PrimeTable, k: usize, u: usize, log_zk: &Float) -> Result<Float> {
    let prec = table.prec();
    if u > k {
        return Err(Error::domain("d_k", format!("u_k = {u} exceeds k = {k}")));
    }
    let mut v = Float::with_val(prec, ln_u(prec, 2) * (k - u) as u32);
    if u > 0 {
        v += table.log_beta_primorial(u);
        v -= Float::with_val(prec, ln_u(prec, u as u64) * u as u32);
        let inner = Float::with_val(prec, log_zk + Float::with_val(prec, table.log_primorial(u) * 2u32))
            - table.try_log_primorial(k)?;
        if inner <= 0 {
            return Err(Error::domain("d_k", "log(z_k n_u^2 / n_k) must be positive"));
        }
        v += inner.ln() * u as u32;
    }
    Ok(v)
}

/// r_2(z, k) = (1/k)(log d_k − k log(log z / (k log k))).
pub fn r2(log_z: &Float, k: usize, log_dk: &Float) -> Result<Float> {
    if *log_z <= 0 || k < 2 {
        return Err(Error::domain("r2", "requires z > 1 and k >= 2"));
    }
    Ok(r_from_logs(log_dk, log_z, k))
}

/// Precomputed constants of the ω = 44 family υ_m, υ_{m,m1,m2}.
#[derive(Debug, Clone)]
pub struct Upsilon44 {
    k: usize,
    log_gamma: Float,
    scale: Float,
    k_log_k: Float,
}

impl Upsilon44 {
    /// Constants for the prime set `{p_1, …, p_44}`.
    pub fn new(table: &PrimeTable) -> Result<Self> {
        let k = 44;
        let prec = table.prec();
        let log_gamma = table.try_log_primorial(k)?.clone();
        let beta_root = Float::with_val(prec, table.log_beta_primorial(k) / k as u32).exp();
        let scale = beta_root * ln_u(prec, k as u64);
        Ok(Upsilon44 { k, log_gamma, scale, k_log_k: k_log_k(prec, k) })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn log_gamma(&self) -> &Float {
        &self.log_gamma
    }

    fn base(&self, z: &Float) -> Result<Float> {
        if *z <= 0 {
            return Err(Error::domain("upsilon_m", "z must be positive"));
        }
        Ok(Float::with_val(z.prec(), &self.log_gamma / z) + 1u32)
    }

    /// υ_m(z, w) for `1 <= m <= 43`.
    pub fn upsilon_m(&self, z: &Float, w: &Float, m: usize) -> Result<Float> {
        let k = self.k;
        if m == 0 || m >= k {
            return Err(Error::domain("upsilon_m", format!("m = {m} outside 1..={}", k - 1)));
        }
        if *w < 0 {
            return Err(Error::domain("upsilon_m", "w must be nonnegative"));
        }
        let prec = z.prec();
        let b = self.base(z)?;
        let low = Float::with_val(prec, &b - Float::with_val(prec, w / (2 * m) as u32));
        let high = Float::with_val(prec, &b + Float::with_val(prec, w / (2 * (k - m)) as u32));
        let factors = [(low, m), (high, k - m)];
        self.finish("upsilon_m", z, &factors)
    }

    /// υ_{m,m1,m2}(z, w, w1, w2), the four-factor refinement.
    #[allow(clippy::too_many_arguments)]
    pub fn upsilon_m_m1_m2(
        &self,
        z: &Float,
        w: &Float,
        w1: &Float,
        w2: &Float,
        m: usize,
        m1: usize,
        m2: usize,
    ) -> Result<Float> {
        let k = self.k;
        if m < 2 || m + 2 > k || m1 == 0 || m1 >= m || m2 == 0 || m + m2 >= k {
            return Err(Error::domain(
                "upsilon_m_m1_m2",
                format!("partition sizes m={m}, m1={m1}, m2={m2} violate 1<=m1<m, 1<=m2<{k}-m"),
            ));
        }
        if *w < 0 || *w1 < 0 || *w2 < 0 {
            return Err(Error::domain("upsilon_m_m1_m2", "w, w1, w2 must be nonnegative"));
        }
        let prec = z.prec();
        let b = self.base(z)?;
        let frac = |x: &Float, d: usize| Float::with_val(prec, x / (2 * d) as u32);
        let mu1 = Float::with_val(prec, &b - frac(w, m));
        let mu2 = Float::with_val(prec, &b + frac(w, k - m));
        let factors = [
            (Float::with_val(prec, &mu1 - frac(w1, m1)), m1),
            (Float::with_val(prec, &mu1 + frac(w1, m - m1)), m - m1),
            (Float::with_val(prec, &mu2 - frac(w2, m2)), m2),
            (Float::with_val(prec, &mu2 + frac(w2, k - m - m2)), k - m - m2),
        ];
        self.finish("upsilon_m_m1_m2", z, &factors)
    }

    fn finish(&self, func: &'static str, z: &Float, factors: &[(Float, usize)]) -> Result<Float> {
        let prec = z.prec();
        let mut log_prod = Float::with_val(prec, 0);
        for (f, weight) in factors {
            if *f <= 0 {
                return Err(Error::domain(func, "nonpositive base factor"));
            }
            log_prod += Float::with_val(prec, f.ln_ref()) * *weight as u32;
        }
        let prod = (log_prod / self.k as u32).exp();
        Ok(prod * &self.scale - Float::with_val(prec, &self.k_log_k / z))
    }
}

/// The partition statistics of `x_i = (α_i + 1) log q_i / log n`, sorted
/// ascending, scaled by k (`w = kϖ`, `w1 = kϖ_1`, `w2 = kϖ_2`).
#[derive(Debug, Clone)]
pub struct PartitionStats {
    pub k: usize,
    pub m: usize,
    pub m1: usize,
    pub m2: usize,
    pub mu: Float,
    pub mu1: Float,
    pub mu2: Float,
    pub w: Float,
    pub w1: Float,
    pub w2: Float,
}

impl PartitionStats {
    pub fn from_factorization(f: &Factorization) -> Result<Self> {
        require_omega("partition_stats", f, 2)?;
        let prec = f.prec();
        let mut xs: Vec<Float> = f
            .primes()
            .iter()
            .zip(f.exponents())
            .map(|(&p, &a)| Float::with_val(prec, p).ln() * (a + 1) / f.log_n())
            .collect();
        xs.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        Self::from_sorted(&xs)
    }

    /// Statistics for an ascending list `xs` with at least two distinct values.
    pub fn from_sorted(xs: &[Float]) -> Result<Self> {
        let k = xs.len();
        if k < 2 {
            return Err(Error::domain("partition_stats", "need at least two values"));
        }
        if xs.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::domain("partition_stats", "values must be ascending"));
        }
        let prec = xs[0].prec();
        let kf = k as u32;
        let mu = Float::with_val(prec, Float::sum(xs.iter())) / kf;
        let m = xs.iter().filter(|x| **x <= mu).count().clamp(1, k - 1);
        let dev = |lo: usize, hi: usize, c: &Float| {
            let mut acc = Float::with_val(prec, 0);
            for x in &xs[lo..hi] {
                acc += Float::with_val(prec, x - c).abs();
            }
            acc * kf
        };
        let w = dev(0, k, &mu);
        let mu1 = Float::with_val(prec, &mu - Float::with_val(prec, &w / (kf * 2 * m as u32)));
        let mu2 = Float::with_val(prec, &mu + Float::with_val(prec, &w / (kf * 2 * (k - m) as u32)));
        let w1 = dev(0, m, &mu1);
        let w2 = dev(m, k, &mu2);
        let m1 = xs[..m].iter().filter(|x| **x <= mu1).count();
        let m2 = xs[m..].iter().filter(|x| **x <= mu2).count();
        Ok(PartitionStats { k, m, m1, m2, mu, mu1, mu2, w, w1, w2 })
    }
}

/// The constants `(c1, c2)` and exponent `j_{s+1}/k` of the stage function f_s.
#[derive(Debug, Clone)]
pub struct StageConstants {
    pub k: usize,
    /// Cutoffs `j_1 >= … >= j_{s+1} >= 1`.
    pub cutoffs: Vec<usize>,
    pub log_c1: Float,
    pub c1: Float,
    pub c2: Float,
    pub alpha: Float,
}

impl StageConstants {
    /// Stage index s (`cutoffs.len() − 1`).
    pub fn stage(&self) -> usize {
        self.cutoffs.len() - 1
    }

    /// g(z) = (c1 (z − c2)^α − 1)/z, the f_s kernel without the `k log k` factor.
    pub fn kernel(&self, z: &Float) -> Result<Float> {
        let prec = z.prec();
        let shifted = Float::with_val(prec, z - &self.c2);
        if shifted <= 0 {
            return Err(Error::domain("f_family", "log z must exceed c2"));
        }
        let pow = Float::with_val(prec, shifted.ln() * &self.alpha).exp();
        Ok((pow * &self.c1 - 1u32) / z)
    }

    /// f_s at `log z`.
    pub fn eval(&self, z: &Float) -> Result<Float> {
        Ok(self.kernel(z)? * k_log_k(z.prec(), self.k))
    }
}

/// Builds the f_s constants for cutoffs `[j_1, …, j_{s+1}]`, `1 <= s <= 4`.
///
/// `c1 = 2^{(k−j1)/k} 3^{(j1−j2)/k} ⋯ (s+2)^{(j_s−j_{s+1})/k} j_{s+1}^{−j_{s+1}/k} β(n_{j_{s+1}})^{1/k}`
/// and `c2 = log(n_k n_{j1} ⋯ n_{j_s} / n_{j_{s+1}}^{s+2})`.
pub fn f_family_constants(table: &PrimeTable, k: usize, cutoffs: &[usize]) -> Result<StageConstants> {
    let s = cutoffs.len().checked_sub(1).ok_or_else(|| Error::domain("f_family", "no cutoffs"))?;
    if !(1..=4).contains(&s) {
        return Err(Error::domain("f_family", format!("stage s = {s} outside 1..=4")));
    }
    if cutoffs.windows(2).any(|w| w[1] > w[0]) || cutoffs[0] > k {
        return Err(Error::domain("f_family", "cutoffs must satisfy j_{s+1} <= … <= j_1 <= k"));
    }
    let last = cutoffs[s];
    if last == 0 {
        return Err(Error::domain("f_family", "j_{s+1} = 0 is the direct case, not an f_s bound"));
    }
    let prec = table.prec();
    let mut log_c1 = Float::with_val(prec, ln_u(prec, 2) * (k - cutoffs[0]) as u32);
    for t in 0..s {
        log_c1 += ln_u(prec, (t + 3) as u64) * (cutoffs[t] - cutoffs[t + 1]) as u32;
    }
    log_c1 -= ln_u(prec, last as u64) * last as u32;
    log_c1 += table.log_beta_primorial(last);
    log_c1 /= k as u32;
    let c1 = Float::with_val(prec, log_c1.exp_ref());

    let mut c2 = table.try_log_primorial(k)?.clone();
    for &j in &cutoffs[..s] {
        c2 += table.log_primorial(j);
    }
    c2 -= Float::with_val(prec, table.log_primorial(last) * (s + 2) as u32);
    if c2 <= 0 {
        return Err(Error::hypothesis("f_family", "c2 must be positive"));
    }
    if c1 <= 0 {
        return Err(Error::hypothesis("f_family", "c1 must be positive"));
    }
    let alpha = Float::with_val(prec, last) / k as u32;
    Ok(StageConstants { k, cutoffs: cutoffs.to_vec(), log_c1, c1, c2, alpha })
}

/// f_s(j_{s+1}, …, j_1, k, z) at `log z`.
pub fn f_family(table: &PrimeTable, k: usize, cutoffs: &[usize], log_z: &Float) -> Result<Float> {
    f_family_constants(table, k, cutoffs)?.eval(log_z)
}

/// Checks the general f_s constants against the written-out s = 1 and s = 2
/// forms at one representative cutoff tuple per stage.
pub fn validate_family_pattern(table: &PrimeTable) -> Result<()> {
    let prec = table.prec();
    let tol = table.ctx().identity_tol();
    let lg = |v: usize| Float::with_val(prec, v).ln();
    for &(k, j1, j2, j3) in &[(74usize, 20usize, 12usize, 5usize), (80, 24, 9, 3)] {
        let kf = k as u32;
        let part = |x: Float, e: usize| x * e as u32 / kf;
        let c1_one = part(lg(2), k - j1) + part(lg(3), j1 - j2) - part(lg(j2), j2) + table.log_beta_primorial(j2) / kf;
        let c2_one = Float::with_val(prec, table.try_log_primorial(k)? + table.log_primorial(j1))
            - Float::with_val(prec, table.log_primorial(j2) * 3u32);
        let c1_two = part(lg(2), k - j1) + part(lg(3), j1 - j2) + part(lg(4), j2 - j3) - part(lg(j3), j3)
            + table.log_beta_primorial(j3) / kf;
        let c2_two = Float::with_val(prec, table.log_primorial(k) + table.log_primorial(j1)) + table.log_primorial(j2)
            - Float::with_val(prec, table.log_primorial(j3) * 4u32);
        let one = f_family_constants(table, k, &[j1, j2])?;
        let two = f_family_constants(table, k, &[j1, j2, j3])?;
        for (a, b) in [(&one.log_c1, &c1_one), (&one.c2, &c2_one), (&two.log_c1, &c1_two), (&two.c2, &c2_two)] {
            if Float::with_val(prec, a - b).abs() > tol {
                return Err(Error::hypothesis("f_family", "general constants disagree with the s = 1, 2 forms"));
            }
        }
    }
    Ok(())
}

/// η₂ = exp((1/6) log 96 − log(log 60060 / (6 log 6))).
pub fn eta2(prec: u32) -> Float {
    let a = ln_u(prec, 96) / 6u32;
    let b = (ln_u(prec, 60060) / k_log_k(prec, 6)).ln();
    (a - b).exp()
}

/// η₃ = λ(720·n_7).
pub fn eta3(table: &PrimeTable) -> Result<Float> {
    let f = Factorization::parse(table, "720*n7")?;
    lambda_of(&f)
}

/// `log τ(n) · log log n / (log 2 · log n)`, n ≥ 3.
pub fn nicolas_robin_ratio(f: &Factorization) -> Result<Float> {
    let prec = f.prec();
    if *f.log_n() <= ln_u(prec, 2) {
        return Err(Error::domain("nicolas_robin_ratio", "requires n >= 3"));
    }
    let llog = Float::with_val(prec, f.log_n().ln_ref());
    Ok(f.log_tau() * llog / (ln_u(prec, 2) * f.log_n()))
}

/// The inequalities checked by brute force over `2 <= n <= n_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inequality {
    /// τ ≤ (log(nγ)/ω)^ω β.
    Ramanujan,
    /// 2^ω ≤ τ ≤ (1 + Ω/ω)^ω.
    Jensen1,
    /// τ ≤ (log n/ω)^ω (1 + log γ/log n)^ω β.
    Fond1,
    /// τ ≤ (2 log n/ω)^ω β.
    Fond2,
    /// τ ≤ (η₂ log n/(ω log₊ω))^ω.
    Inequality1,
    /// τ ≤ (2 log n/(ω log₊ω))^ω.
    Inequality2,
    /// τ ≤ (1 + η₃ log n/(ω log₊ω))^ω.
    Inequality3,
    /// τ < (1 + log n/(k log k))^k for k = ω ≥ 74.
    Theorem4,
}

impl Inequality {
    pub const ALL: [Inequality; 8] = [
        Inequality::Ramanujan,
        Inequality::Jensen1,
        Inequality::Fond1,
        Inequality::Fond2,
        Inequality::Inequality1,
        Inequality::Inequality2,
        Inequality::Inequality3,
        Inequality::Theorem4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Inequality::Ramanujan => "ramanujan",
            Inequality::Jensen1 => "jensen1",
            Inequality::Fond1 => "fond1",
            Inequality::Fond2 => "fond2",
            Inequality::Inequality1 => "inequality1",
            Inequality::Inequality2 => "inequality2",
            Inequality::Inequality3 => "inequality3",
            Inequality::Theorem4 => "theorem4",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Inequality::ALL
            .into_iter()
            .find(|i| i.name() == name)
            .ok_or_else(|| Error::Parse(format!("unknown inequality {name:?}")))
    }

    /// Whether the statement constrains n at all (Theorem 4 needs ω ≥ 74).
    pub fn applies(self, omega: usize) -> bool {
        match self {
            Inequality::Theorem4 => omega >= 74,
            _ => true,
        }
    }

    /// Whether equality counts as a violation.
    pub fn strict(self) -> bool {
        matches!(self, Inequality::Theorem4)
    }
}

/// Constants shared by the brute-force inequality checks.
#[derive(Debug, Clone)]
pub struct InequalityConstants {
    pub log_eta2: Float,
    pub eta3: Float,
}

impl InequalityConstants {
    pub fn new(table: &PrimeTable) -> Result<Self> {
        Ok(InequalityConstants { log_eta2: eta2(table.prec()).ln(), eta3: eta3(table)? })
    }
}

/// `log(RHS) − log(LHS)` for `ineq` at `f`: nonnegative iff the inequality
/// holds (for Jensen1 the smaller of the two sides' margins).
pub fn inequality_margin(ineq: Inequality, f: &Factorization, consts: &InequalityConstants) -> Result<Float> {
    let prec = f.prec();
    let k = f.omega();
    let kf = k as u32;
    let log_tau = f.log_tau();
    let log_n = f.log_n();
    let log_k = ln_u(prec, k as u64);
    let log_plus_k = log_plus(&Float::with_val(prec, k))?;
    let rhs = match ineq {
        Inequality::Ramanujan => {
            let s = Float::with_val(prec, log_n + f.gamma_log()) / kf;
            s.ln() * kf + f.beta_log()
        }
        Inequality::Jensen1 => {
            let lower = Float::with_val(prec, &log_tau - ln_u(prec, 2) * kf);
            let ratio = Float::with_val(prec, f.big_omega()) / kf + 1u32;
            let upper = ratio.ln() * kf - &log_tau;
            return Ok(if lower < upper { lower } else { upper });
        }
        Inequality::Fond1 => {
            let a = (Float::with_val(prec, log_n / kf)).ln() * kf;
            let b = (Float::with_val(prec, f.gamma_log() / log_n) + 1u32).ln() * kf;
            a + b + f.beta_log()
        }
        Inequality::Fond2 => (Float::with_val(prec, log_n * 2u32) / kf).ln() * kf + f.beta_log(),
        Inequality::Inequality1 => {
            let v = Float::with_val(prec, log_n / kf) / &log_plus_k;
            (v.ln() + &consts.log_eta2) * kf
        }
        Inequality::Inequality2 => {
            let v = Float::with_val(prec, log_n * 2u32) / kf / &log_plus_k;
            v.ln() * kf
        }
        Inequality::Inequality3 => {
            let v = Float::with_val(prec, log_n * &consts.eta3) / kf / &log_plus_k + 1u32;
            v.ln() * kf
        }
        Inequality::Theorem4 => {
            let v = Float::with_val(prec, log_n / kf) / &log_k + 1u32;
            v.ln() * kf
        }
    };
    Ok(rhs - log_tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{factorize_small, PrecisionContext, DEFAULT_MATERIALIZE_BOUND};

    fn table() -> PrimeTable {
        PrimeTable::new(400, &PrecisionContext::default())
    }

    fn fact(t: &PrimeTable, s: &str) -> Factorization {
        Factorization::parse(t, s).unwrap()
    }

    fn close(a: &Float, b: f64, tol: f64) -> bool {
        (a.to_f64() - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn lambda_values() {
        let t = table();
        let eta3 = lambda_of(&fact(&t, "720*n7")).unwrap();
        assert!(close(&eta3, 1.1999953, 1e-7), "{eta3}");
        // n = 6: 2 log 2 / log 6.
        let six = lambda_of(&fact(&t, "6")).unwrap();
        let expect = 2.0 * 2f64.ln() / 6f64.ln();
        assert!(close(&six, expect, 1e-14));
        assert!(lambda_of(&fact(&t, "8")).is_err());
    }

    #[test]
    fn lambda_solves_its_implicit_definition() {
        // Solve (1 + λ log n/(k log k))^k = τ for λ by bisection and compare.
        let t = table();
        let f = fact(&t, "6");
        let direct = lambda_of(&f).unwrap();
        let tau = Float::with_val(t.prec(), 4);
        let (mut lo, mut hi) = (t.ctx().float(0), t.ctx().float(10));
        for _ in 0..250 {
            let mid = Float::with_val(t.prec(), &lo + &hi) / 2u32;
            if tau_from_lambda(&mid, f.log_n(), 2) < tau {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let err = Float::with_val(t.prec(), &direct - &lo).abs();
        assert!(err < t.ctx().ten_pow_neg(50));
    }

    fn witness(t: &PrimeTable, k: usize) -> Factorization {
        let mut exps = vec![1u32; k];
        for e in exps.iter_mut().take(16) {
            *e = 2;
        }
        exps[..7].copy_from_slice(&[13, 8, 5, 4, 3, 3, 3]);
        Factorization::from_exponent_vector(t, &exps).unwrap()
    }

    #[test]
    fn extremal_witnesses() {
        let t = table();
        let a = lambda_of(&witness(&t, 73)).unwrap();
        assert!(close(&a, 1.0008832, 1e-7), "{a}");
        let b = lambda_of(&witness(&t, 74)).unwrap();
        assert!(close(&b, 0.99991077, 1e-8), "{b}");
    }

    #[test]
    fn partition_stats_bound_lambda() {
        let t = table();
        let u = Upsilon44::new(&t).unwrap();
        let mut exps = vec![1u32; 44];
        exps[..12].copy_from_slice(&[40, 25, 17, 14, 11, 10, 9, 8, 7, 6, 6, 5]);
        for e in exps.iter_mut().take(44).skip(12) {
            *e = 3;
        }
        let f = Factorization::from_exponent_vector(&t, &exps).unwrap();
        let st = PartitionStats::from_factorization(&f).unwrap();
        let ups = u.upsilon_m(f.log_n(), &st.w, st.m).unwrap();
        assert!(lambda_of(&f).unwrap() <= ups);
        let ups2 = u.upsilon_m_m1_m2(f.log_n(), &st.w, &st.w1, &st.w2, st.m, st.m1.max(1), st.m2.max(1)).unwrap();
        assert!(ups2 <= ups);
        let sum = Float::with_val(t.prec(), &st.mu * 44u32);
        let expect = Float::with_val(t.prec(), f.gamma_log() / f.log_n()) + 1u32;
        assert!(Float::with_val(t.prec(), sum - expect).abs() < t.ctx().identity_tol());
    }

    #[test]
    fn family_pattern_validates() {
        validate_family_pattern(&table()).unwrap();
    }

    #[test]
    fn t_and_r_values() {
        let t = table();
        let two = t_of(&fact(&t, "2")).unwrap();
        assert!(close(&two, 2.0 / 2f64.ln(), 1e-14));
        let f = fact(&t, "60060");
        let tv = t_of(&f).unwrap();
        assert!(close(&tv, 96f64.powf(1.0 / 6.0) / 60060f64.ln(), 1e-14));
        let r = r_of(&f).unwrap();
        assert!(close(&r, 0.737505, 1e-6));
        let logeta2 = eta2(t.prec()).ln();
        assert!(Float::with_val(t.prec(), &r - &logeta2).abs() < t.ctx().identity_tol());
        let r30 = r_of(&fact(&t, "30")).unwrap();
        assert!(r30 < ln_u(t.prec(), 2));
    }

    #[test]
    fn r_identity_round_trip() {
        let t = table();
        let f = fact(&t, "36");
        let r = r_of(&f).unwrap();
        let k = 2usize;
        let base = Float::with_val(t.prec(), r.exp_ref()) * f.log_n() / k_log_k(t.prec(), k);
        let tau = Float::with_val(t.prec(), rug::ops::Pow::pow(base, k as u32));
        assert!(Float::with_val(t.prec(), tau - 9u32).abs() < t.ctx().identity_tol());
    }

    #[test]
    fn eta_constants() {
        let t = table();
        assert!(close(&eta2(t.prec()), 2.0907132, 1e-7));
        assert!(close(&eta3(&t).unwrap(), 1.1999953, 1e-7));
        // Closed form (1152^{1/7} − 1)·7 log 7 / log 367567200.
        let closed = (1152f64.powf(1.0 / 7.0) - 1.0) * 7.0 * 7f64.ln() / 367_567_200f64.ln();
        assert!(close(&eta3(&t).unwrap(), closed, 1e-13));
    }

    #[test]
    fn nicolas_robin_value() {
        let t = table();
        let f = factorize_small(&t, 6_983_776_800, 10_000_000_000).unwrap();
        assert!(close(&nicolas_robin_ratio(&f).unwrap(), 1.5379, 1e-4));
    }

    #[test]
    fn upsilon_primorial_threshold() {
        let t = table();
        let n95 = Factorization::primorial(&t, 95).unwrap();
        let n94 = Factorization::primorial(&t, 94).unwrap();
        assert!(upsilon(&n95, n95.log_n()).unwrap() < 1);
        assert!(upsilon(&n94, n94.log_n()).unwrap() > 1);
        assert!(upsilon(&n94, &t.ctx().float(0)).is_err());
    }

    #[test]
    fn upsilon_decreasing_in_z() {
        let t = table();
        let n44 = Factorization::primorial(&t, 44).unwrap();
        let mut prev: Option<Float> = None;
        for i in 1..200 {
            let z = t.ctx().float(i * 100);
            let v = upsilon(&n44, &z).unwrap();
            if let Some(p) = &prev {
                assert!(v < *p);
            }
            prev = Some(v);
        }
    }

    #[test]
    fn r1_decreasing_and_dominates() {
        let t = table();
        let f = fact(&t, "60060");
        let bound = r1(&t, f.log_n(), 6).unwrap();
        assert!(bound >= r_of(&f).unwrap());
        let mut prev = r1(&t, &t.ctx().float(1), 6).unwrap();
        for i in 2..100 {
            let v = r1(&t, &t.ctx().float(i), 6).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn upsilon_m_reduces_and_degenerates() {
        let t = table();
        let u = Upsilon44::new(&t).unwrap();
        let z = t.ctx().parse("10700").unwrap();
        let zero = t.ctx().float(0);
        let a = u.upsilon_m(&z, &zero, 1).unwrap();
        let b = u.upsilon_m(&z, &zero, 30).unwrap();
        assert!(Float::with_val(t.prec(), &a - &b).abs() < t.ctx().identity_tol());
        let w = t.ctx().parse("0.2").unwrap();
        assert!(u.upsilon_m(&z, &w, 30).unwrap() < b);
        // w1 = w2 = 0 collapses to υ_m.
        let full = u.upsilon_m_m1_m2(&z, &w, &zero, &zero, 20, 5, 7).unwrap();
        let two = u.upsilon_m(&z, &w, 20).unwrap();
        assert!(Float::with_val(t.prec(), &full - &two).abs() < t.ctx().identity_tol());
        assert!(u.upsilon_m(&z, &w, 44).is_err());
        assert!(u.upsilon_m_m1_m2(&z, &w, &zero, &zero, 20, 20, 7).is_err());
        let huge = t.ctx().float(1000);
        assert!(u.upsilon_m(&z, &huge, 3).is_err());
    }

    #[test]
    fn upsilon_m_decreasing_in_w2() {
        let t = table();
        let u = Upsilon44::new(&t).unwrap();
        let z = t.ctx().parse("10640.8").unwrap();
        let w = t.ctx().parse("0.2037").unwrap();
        let w1 = t.ctx().parse("0.0103").unwrap();
        let h = t.ctx().parse("0.000001").unwrap();
        let mut prev: Option<Float> = None;
        for i in 0..20 {
            let w2 = Float::with_val(t.prec(), &h * (i * 5000) as u32);
            let v = u.upsilon_m_m1_m2(&z, &w, &w1, &w2, 11, 3, 10).unwrap();
            if let Some(p) = &prev {
                assert!(v < *p);
            }
            prev = Some(v);
        }
    }

    #[test]
    fn generic_stage_matches_explicit_forms() {
        let t = table();
        let prec = t.prec();
        let (k, j1, j2, j3) = (74usize, 20usize, 12usize, 5usize);
        let kf = k as u32;
        // f_1 as written out for s = 1.
        let c1 = (Float::with_val(prec, 2).ln() * (k - j1) as u32 / kf).exp()
            * (Float::with_val(prec, 3).ln() * (j1 - j2) as u32 / kf).exp()
            / (Float::with_val(prec, j2).ln() * j2 as u32 / kf).exp()
            * (t.log_beta_primorial(j2) / kf).exp();
        let c2 = Float::with_val(prec, t.log_primorial(k) + t.log_primorial(j1))
            - Float::with_val(prec, t.log_primorial(j2) * 3u32);
        let g = f_family_constants(&t, k, &[j1, j2]).unwrap();
        assert!(Float::with_val(prec, &g.c1 - &c1).abs() < t.ctx().identity_tol());
        assert!(Float::with_val(prec, &g.c2 - &c2).abs() < t.ctx().identity_tol());
        // f_2 as written out for s = 2.
        let c1b = (Float::with_val(prec, 2).ln() * (k - j1) as u32 / kf).exp()
            * (Float::with_val(prec, 3).ln() * (j1 - j2) as u32 / kf).exp()
            * (Float::with_val(prec, 4).ln() * (j2 - j3) as u32 / kf).exp()
            / (Float::with_val(prec, j3).ln() * j3 as u32 / kf).exp()
            * (t.log_beta_primorial(j3) / kf).exp();
        let c2b = Float::with_val(prec, t.log_primorial(k) + t.log_primorial(j1)) + t.log_primorial(j2)
            - Float::with_val(prec, t.log_primorial(j3) * 4u32);
        let g2 = f_family_constants(&t, k, &[j1, j2, j3]).unwrap();
        assert!(Float::with_val(prec, &g2.c1 - &c1b).abs() < t.ctx().identity_tol());
        assert!(Float::with_val(prec, &g2.c2 - &c2b).abs() < t.ctx().identity_tol());
        assert!(f_family_constants(&t, k, &[j1]).is_err());
        assert!(f_family_constants(&t, k, &[j2, j1]).is_err());
        assert!(f_family_constants(&t, k, &[j1, 0]).is_err());
    }

    #[test]
    fn f1_dominates_lambda_of_shape() {
        // n' = p_1^{α_1}⋯p_{j2}^{α_{j2}} · p_{j2+1}^2⋯p_{j1}^2 · p_{j1+1}⋯p_k with α_i ≥ 3.
        let t = table();
        let (k, j1, j2) = (74usize, 18usize, 5usize);
        let mut exps = vec![1u32; k];
        for e in exps.iter_mut().take(j1) {
            *e = 2;
        }
        for (i, e) in [9u32, 6, 4, 3, 3].into_iter().enumerate() {
            exps[i] = e;
        }
        let f = Factorization::from_exponent_vector(&t, &exps).unwrap();
        let lam = lambda_of(&f).unwrap();
        let bound = f_family(&t, k, &[j1, j2], f.log_n()).unwrap();
        assert!(lam <= bound, "{lam} > {bound}");
    }

    #[test]
    fn d_k_and_r2() {
        let t = table();
        let log_z = t.ctx().parse("30").unwrap();
        let ld = log_d_k(&t, 10, 4, &log_z).unwrap();
        let r = r2(&log_z, 10, &ld).unwrap();
        assert!(r.is_finite());
        assert!(log_d_k(&t, 3, 4, &log_z).is_err());
    }

    #[test]
    fn inequality_margins_on_small_n() {
        let t = table();
        let c = InequalityConstants::new(&t).unwrap();
        for n in [2u64, 12, 60060, 720, 367_567_200] {
            let f = factorize_small(&t, n, DEFAULT_MATERIALIZE_BOUND).unwrap();
            for ineq in Inequality::ALL {
                if !ineq.applies(f.omega()) || (ineq == Inequality::Inequality2 && f.omega() >= 4) {
                    continue;
                }
                let m = inequality_margin(ineq, &f, &c).unwrap();
                assert!(m > -t.ctx().identity_tol(), "{} at {n}: {m}", ineq.name());
            }
        }
        let f = fact(&t, "60060");
        assert!(inequality_margin(Inequality::Inequality2, &f, &c).unwrap() < 0);
        let f = fact(&t, "24*n16");
        assert!(inequality_margin(Inequality::Inequality2, &f, &c).unwrap() < 0);
        assert_eq!(Inequality::parse("fond2").unwrap(), Inequality::Fond2);
        assert!(Inequality::parse("nope").is_err());
    }
}
