//! Executable forms of the auxiliary inequalities: AM-GM partition bounds,
//! closed-form monotonicity certificates, the ψ minimizer, the λ ratio bound
//! and the unique-maximum construction for `(c1 (z − c2)^α − 1)/z`.

use std::cmp::Ordering;

use rug::ops::Pow;
use rug::Float;

use crate::arith::{Factorization, PrimeTable};
use crate::bounds::upsilon_raw;
use crate::error::{Error, Result};
use crate::solvers::{solve_monotone, Monotonicity, RootProblem};

fn floor_i64(x: &Float) -> Result<i64> {
    Float::with_val(x.prec(), x.floor_ref())
        .to_integer()
        .and_then(|i| i.to_i64())
        .ok_or_else(|| Error::domain("floor", "value out of i64 range"))
}

fn ceil_i64(x: &Float) -> Result<i64> {
    Float::with_val(x.prec(), x.ceil_ref())
        .to_integer()
        .and_then(|i| i.to_i64())
        .ok_or_else(|| Error::domain("ceil", "value out of i64 range"))
}

fn mean(xs: &[Float]) -> Float {
    let prec = xs[0].prec();
    Float::with_val(prec, Float::sum(xs.iter())) / xs.len() as u32
}

fn abs_dev(xs: &[Float], c: &Float) -> Float {
    let mut acc = Float::with_val(c.prec(), 0);
    for x in xs {
        acc += Float::with_val(c.prec(), x - c).abs();
    }
    acc
}

fn pow_u(x: &Float, e: usize) -> Float {
    Float::with_val(x.prec(), x.pow(e as u32))
}

/// Split sizes for [`amgm_partition_bound`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Splits {
    None,
    One { m: usize },
    Three { m: usize, m1: usize, m2: usize },
}

/// The AM-GM bound on `x_1 ⋯ x_k`: `μ^k`, `μ1^m μ2^{k−m}` or the four-block form.
///
/// `xs` must be positive and ascending; the split points must respect the
/// ordering `x_m <= μ <= x_{m+1}` (and the inner ones at μ1, μ2).
pub fn amgm_partition_bound(xs: &[Float], splits: Splits) -> Result<Float> {
    let k = xs.len();
    if k == 0 || xs[0] <= 0 {
        return Err(Error::domain("amgm_partition_bound", "need at least one positive value"));
    }
    if xs.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::domain("amgm_partition_bound", "values must be ascending"));
    }
    let prec = xs[0].prec();
    let mu = mean(xs);
    let check_split = |lo: usize, split: usize, hi: usize, c: &Float| -> Result<()> {
        if split <= lo || split >= hi || xs[split - 1] > *c || xs[split] < *c {
            return Err(Error::domain("amgm_partition_bound", "split inconsistent with ordering"));
        }
        Ok(())
    };
    match splits {
        Splits::None => Ok(pow_u(&mu, k)),
        Splits::One { m } => {
            check_split(0, m, k, &mu)?;
            let w = abs_dev(xs, &mu);
            let mu1 = Float::with_val(prec, &mu - Float::with_val(prec, &w / (2 * m) as u32));
            let mu2 = Float::with_val(prec, &mu + Float::with_val(prec, &w / (2 * (k - m)) as u32));
            Ok(pow_u(&mu1, m) * pow_u(&mu2, k - m))
        }
        Splits::Three { m, m1, m2 } => {
            if k < 4 {
                return Err(Error::domain("amgm_partition_bound", "four blocks need k >= 4"));
            }
            check_split(0, m, k, &mu)?;
            let w = abs_dev(xs, &mu);
            let mu1 = Float::with_val(prec, &mu - Float::with_val(prec, &w / (2 * m) as u32));
            let mu2 = Float::with_val(prec, &mu + Float::with_val(prec, &w / (2 * (k - m)) as u32));
            check_split(0, m1, m, &mu1)?;
            check_split(m, m + m2, k, &mu2)?;
            let w1 = abs_dev(&xs[..m], &mu1);
            let w2 = abs_dev(&xs[m..], &mu2);
            let part = |c: &Float, w: &Float, d: usize, sign: bool| {
                let delta = Float::with_val(prec, w / (2 * d) as u32);
                if sign {
                    Float::with_val(prec, c + delta)
                } else {
                    Float::with_val(prec, c - delta)
                }
            };
            Ok(pow_u(&part(&mu1, &w1, m1, false), m1)
                * pow_u(&part(&mu1, &w1, m - m1, true), m - m1)
                * pow_u(&part(&mu2, &w2, m2, false), m2)
                * pow_u(&part(&mu2, &w2, k - m - m2, true), k - m - m2))
        }
    }
}

fn check_fond_inputs(zs: &[Float]) -> Result<()> {
    if zs.is_empty() || zs.iter().any(|z| *z <= 0) {
        return Err(Error::domain("ineqfond_bound", "z_i must be positive"));
    }
    Ok(())
}

/// `Π(z_i/k) (1 + Σ 1/z_i)^k`, the upper bound on `Π(1 + x_i z_i)` when
/// `Σ x_i = 1` and `x_i >= −1/z_i`.
pub fn ineqfond_bound(zs: &[Float], xs: &[Float]) -> Result<Float> {
    check_fond_inputs(zs)?;
    if xs.len() != zs.len() {
        return Err(Error::domain("ineqfond_bound", "length mismatch"));
    }
    let prec = zs[0].prec();
    let k = zs.len();
    let tol = Float::with_val(prec, Float::i_exp(1, -(prec as i32) + 24));
    for (x, z) in xs.iter().zip(zs) {
        let floor = Float::with_val(prec, -Float::with_val(prec, z.recip_ref()));
        if *x < floor {
            return Err(Error::domain("ineqfond_bound", "x_i < -1/z_i"));
        }
    }
    let sum = Float::with_val(prec, Float::sum(xs.iter()));
    if Float::with_val(prec, sum - 1u32).abs() > tol {
        return Err(Error::domain("ineqfond_bound", "x_i must sum to 1"));
    }
    let mut bound = Float::with_val(prec, 1);
    let mut inv = Float::with_val(prec, 1);
    for z in zs {
        bound *= Float::with_val(prec, z / k as u32);
        inv += Float::with_val(prec, z.recip_ref());
    }
    Ok(bound * pow_u(&inv, k))
}

/// `Π(1 + x_i z_i)`.
pub fn ineqfond_product(zs: &[Float], xs: &[Float]) -> Float {
    let prec = zs[0].prec();
    let mut p = Float::with_val(prec, 1);
    for (x, z) in xs.iter().zip(zs) {
        p *= Float::with_val(prec, x * z) + 1u32;
    }
    p
}

/// The unique point of equality `x_i = (1 + Σ 1/z_j)/k − 1/z_i`.
pub fn equality_point(zs: &[Float]) -> Result<Vec<Float>> {
    check_fond_inputs(zs)?;
    let prec = zs[0].prec();
    let mut s = Float::with_val(prec, 1);
    for z in zs {
        s += Float::with_val(prec, z.recip_ref());
    }
    let c = s / zs.len() as u32;
    Ok(zs.iter().map(|z| Float::with_val(prec, &c - Float::with_val(prec, z.recip_ref()))).collect())
}

/// Whether `(μ − ϖ/(2m))^m (μ + ϖ/(2(k−m)))^{k−m}` is strictly decreasing at ϖ,
/// read off the sign of its logarithmic derivative.
pub fn g1_decreasing(mu: &Float, w: &Float, m: usize, k: usize) -> Result<bool> {
    if *mu <= 0 || *w < 0 || m == 0 || m >= k {
        return Err(Error::hypothesis("g1_decreasing", "needs μ > 0, ϖ >= 0, 1 <= m <= k-1"));
    }
    let prec = mu.prec();
    let two_mu = Float::with_val(prec, mu * 2u32);
    let left = Float::with_val(prec, &two_mu - Float::with_val(prec, w / m as u32));
    if left <= 0 {
        return Err(Error::hypothesis("g1_decreasing", "μ − ϖ/(2m) must be positive"));
    }
    let right = two_mu + Float::with_val(prec, w / (k - m) as u32);
    let d = -left.recip() + right.recip();
    Ok(d < 0)
}

/// Parameters of the four-block product `f(ϖ)`.
#[derive(Debug, Clone)]
pub struct FourBlock {
    pub mu: Float,
    pub w1: Float,
    pub w2: Float,
    pub k: usize,
    pub m: usize,
    pub m1: usize,
    pub m2: usize,
}

impl FourBlock {
    fn check(&self, w: &Float) -> Result<[(Float, f64, usize); 4]> {
        let FourBlock { mu, w1, w2, k, m, m1, m2 } = self;
        let (k, m, m1, m2) = (*k, *m, *m1, *m2);
        if *mu <= 0 || *w1 < 0 || *w2 < 0 || m == 0 || m >= k || m1 == 0 || m2 == 0 || m1 >= m || m + m2 >= k {
            return Err(Error::hypothesis("f_once_decreasing", "block sizes or signs violate hypotheses"));
        }
        let prec = mu.prec();
        let a = Float::with_val(prec, mu - Float::with_val(prec, w / (2 * m) as u32));
        let b = Float::with_val(prec, mu + Float::with_val(prec, w / (2 * (k - m)) as u32));
        let d = |x: &Float, n: usize| Float::with_val(prec, x / (2 * n) as u32);
        let f1 = Float::with_val(prec, &a - d(w1, m1));
        let f2 = Float::with_val(prec, &a + d(w1, m - m1));
        let f3 = Float::with_val(prec, &b - d(w2, m2));
        let f4 = Float::with_val(prec, &b + d(w2, k - m - m2));
        if f1 <= 0 || f3 <= 0 || f2 <= 0 || f4 <= 0 {
            return Err(Error::hypothesis("f_once_decreasing", "nonpositive factor"));
        }
        let sm = -0.5 / m as f64;
        let sk = 0.5 / (k - m) as f64;
        Ok([(f1, sm, m1), (f2, sm, m - m1), (f3, sk, m2), (f4, sk, k - m - m2)])
    }

    /// `f'(ϖ)/f(ϖ)`.
    pub fn log_derivative(&self, w: &Float) -> Result<Float> {
        let factors = self.check(w)?;
        let prec = self.mu.prec();
        let mut acc = Float::with_val(prec, 0);
        for (f, slope, mult) in factors {
            acc += Float::with_val(prec, slope) * mult as u32 / f;
        }
        Ok(acc)
    }

    pub fn value(&self, w: &Float) -> Result<Float> {
        let factors = self.check(w)?;
        let prec = self.mu.prec();
        let mut acc = Float::with_val(prec, 1);
        for (f, _, mult) in factors {
            acc *= pow_u(&f, mult);
        }
        Ok(acc)
    }
}

/// Whether `f'(ϖ0) < 0`, which (log-concavity of f) certifies `f(ϖ) < f(ϖ0)`
/// for every `ϖ > ϖ0`.
pub fn f_once_decreasing(f: &FourBlock, w0: &Float) -> Result<bool> {
    if *w0 <= 0 {
        return Err(Error::hypothesis("f_once_decreasing", "ϖ0 must be positive"));
    }
    Ok(f.log_derivative(w0)? < 0)
}

/// Certificate that `B Π(γ_i + A/z)^{ϱ_i} − C/z` is decreasing in z at `z`,
/// for two or four factors.
pub fn zn_decreasing(a: &Float, b: &Float, c: &Float, gammas: &[Float], rhos: &[Float], z: &Float) -> Result<bool> {
    let prec = a.prec();
    if gammas.len() != rhos.len() || !(gammas.len() == 2 || gammas.len() == 4) {
        return Err(Error::hypothesis("zn_decreasing", "need two or four (γ, ϱ) pairs"));
    }
    if *a <= 0 || *b <= 0 || *c <= 0 || *z <= 0 {
        return Err(Error::hypothesis("zn_decreasing", "A, B, C, z must be positive"));
    }
    if gammas.iter().any(|g| *g < 0) || rhos.iter().any(|r| *r < 0) {
        return Err(Error::hypothesis("zn_decreasing", "γ_i, ϱ_i must be nonnegative"));
    }
    let rho_sum = Float::with_val(prec, Float::sum(rhos.iter()));
    if Float::with_val(prec, rho_sum - 1u32).abs() > Float::with_val(prec, Float::i_exp(1, -(prec as i32) + 24)) {
        return Err(Error::hypothesis("zn_decreasing", "ϱ_i must sum to 1"));
    }
    let ab = Float::with_val(prec, a * b);
    if *c >= ab {
        return Err(Error::hypothesis("zn_decreasing", "requires C < AB"));
    }
    let az = Float::with_val(prec, a / z);
    let mut log_prod = Float::with_val(prec, 0);
    let mut harmonic = Float::with_val(prec, 0);
    for (g, r) in gammas.iter().zip(rhos) {
        let base = Float::with_val(prec, g + &az);
        log_prod += Float::with_val(prec, base.ln_ref()) * r;
        harmonic += Float::with_val(prec, r / &base);
    }
    Ok(*c < ab * log_prod.exp() * harmonic)
}

pub fn z2_decreasing(a: &Float, b: &Float, c: &Float, gammas: &[Float; 2], rhos: &[Float; 2], z: &Float) -> Result<bool> {
    zn_decreasing(a, b, c, gammas, rhos, z)
}

pub fn z4_decreasing(a: &Float, b: &Float, c: &Float, gammas: &[Float; 4], rhos: &[Float; 4], z: &Float) -> Result<bool> {
    zn_decreasing(a, b, c, gammas, rhos, z)
}

/// `ψ(α, x, φ) = |((α + 1)B − A)/x − φ|`.
pub fn psi(alpha: i64, x: &Float, phi: &Float, a: &Float, b: &Float) -> Float {
    let prec = x.prec();
    let num = Float::with_val(prec, b * (alpha + 1)) - a;
    (num / x - phi).abs()
}

/// A minimizing point `(α, x, φ)` of ψ.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiPoint {
    pub alpha: i64,
    pub x: Float,
    pub phi: Float,
}

#[derive(Debug, Clone)]
pub struct PsiMin {
    pub value: Float,
    /// Minimizers in tie-break order (α, then x, then φ ascending); the first
    /// entry is the canonical one. When the minimum is zero only the
    /// canonical point is listed.
    pub argmin: Vec<PsiPoint>,
}

fn cmp_points(p: &PsiPoint, q: &PsiPoint) -> Ordering {
    p.alpha
        .cmp(&q.alpha)
        .then(p.x.partial_cmp(&q.x).unwrap_or(Ordering::Equal))
        .then(p.phi.partial_cmp(&q.phi).unwrap_or(Ordering::Equal))
}

fn collect_min(cands: Vec<(Float, PsiPoint)>) -> PsiMin {
    let mut best: Option<Float> = None;
    for (v, _) in &cands {
        if best.as_ref().is_none_or(|b| v < b) {
            best = Some(v.clone());
        }
    }
    let value = best.expect("nonempty candidate set");
    let mut argmin: Vec<PsiPoint> = cands.into_iter().filter(|(v, _)| *v == value).map(|(_, p)| p).collect();
    argmin.sort_by(cmp_points);
    argmin.dedup();
    PsiMin { value, argmin }
}

/// Minimum of ψ over `α ∈ Z`, `x ∈ [x1, x2]`, `φ ∈ [φ1, φ2]`.
pub fn psi_minimize(a: &Float, b: &Float, x1: &Float, x2: &Float, phi1: &Float, phi2: &Float) -> Result<PsiMin> {
    if *x1 <= 0 || *phi1 <= 0 || x1 > x2 || phi1 > phi2 || *b <= 0 {
        return Err(Error::domain("psi_minimize", "needs x1, φ1, B > 0, x1 <= x2, φ1 <= φ2"));
    }
    let prec = x1.prec();
    let lo = ceil_i64(&((Float::with_val(prec, x1 * phi1) + a) / b))?;
    let hi = floor_i64(&((Float::with_val(prec, x2 * phi2) + a) / b))?;
    if lo <= hi {
        let alpha = lo - 1;
        let c = Float::with_val(prec, b * lo) - a;
        let at_phi2 = Float::with_val(prec, &c / phi2);
        let x = if at_phi2 > *x1 { at_phi2 } else { x1.clone() };
        let phi = Float::with_val(prec, &c / &x);
        let value = Float::with_val(prec, 0);
        return Ok(PsiMin { value, argmin: vec![PsiPoint { alpha, x, phi }] });
    }
    let mut cands = Vec::with_capacity(8);
    for alpha in [hi - 1, lo - 1] {
        for x in [x1, x2] {
            for phi in [phi1, phi2] {
                let v = psi(alpha, x, phi, a, b);
                cands.push((v, PsiPoint { alpha, x: x.clone(), phi: phi.clone() }));
            }
        }
    }
    Ok(collect_min(cands))
}

/// The excluded α-window `[⌈((1−δ)x1 + A)/B⌉ − 1, ⌊((1+δ)x2 + A)/B⌋ − 1]`.
pub fn excluded_window(a: &Float, b: &Float, x1: &Float, x2: &Float, delta: &Float) -> Result<(i64, i64)> {
    let prec = x1.prec();
    let one_minus = Float::with_val(prec, 1u32 - delta);
    let one_plus = Float::with_val(prec, delta + 1u32);
    let lo = ceil_i64(&((one_minus * x1 + a) / b))? - 1;
    let hi = floor_i64(&((one_plus * x2 + a) / b))? - 1;
    Ok((lo, hi))
}

/// Minimum of `ψ(α, x, 1)` over `x ∈ [x1, x2]` and α outside the excluded window.
pub fn psi_minimize_excluded(a: &Float, b: &Float, x1: &Float, x2: &Float, delta: &Float) -> Result<PsiMin> {
    if *x1 <= 0 || x1 > x2 || *b <= 0 || *delta <= 0 {
        return Err(Error::domain("psi_minimize_excluded", "needs x1, B, δ > 0 and x1 <= x2"));
    }
    let prec = x1.prec();
    let (lo, hi) = excluded_window(a, b, x1, x2, delta)?;
    let one = Float::with_val(prec, 1);
    let mut cands = Vec::with_capacity(4);
    for alpha in [lo - 1, hi + 1] {
        for x in [x1, x2] {
            let v = psi(alpha, x, &one, a, b);
            cands.push((v, PsiPoint { alpha, x: x.clone(), phi: one.clone() }));
        }
    }
    Ok(collect_min(cands))
}

/// `(1 + ℓ/(kα))(1 − log p / log n)` for `p^α ∥ n`, `α >= 2`.
pub fn ratio_bound(f: &Factorization, p: u64, ell: u32) -> Result<Float> {
    if !(ell == 1 || ell == 2) {
        return Err(Error::domain("ratio_bound", "ℓ must be 1 or 2"));
    }
    let k = f.omega();
    if k < 2 {
        return Err(Error::domain("ratio_bound", "ω(n) must be at least 2"));
    }
    let pos = f.primes().iter().position(|&q| q == p).ok_or_else(|| Error::domain("ratio_bound", "p does not divide n"))?;
    let alpha = f.exponents()[pos];
    if alpha < 2 {
        return Err(Error::domain("ratio_bound", "exponent of p must be at least 2"));
    }
    let prec = f.prec();
    let log_p = Float::with_val(prec, p).ln();
    Ok(ratio_value(ell, k, alpha, f.log_n(), &log_p))
}

/// `(1 + ℓ/(kα))(1 − log p / log n)` from its parameters.
pub fn ratio_value(ell: u32, k: usize, alpha: u32, log_n: &Float, log_p: &Float) -> Float {
    let prec = log_n.prec();
    let first = Float::with_val(prec, ell) / (k as u32 * alpha) + 1u32;
    let second = 1u32 - Float::with_val(prec, log_p / log_n);
    first * second
}

/// Whether the ratio bound is below 1, via `p > n^{ℓ/(αk+ℓ)}`.
pub fn ratio_threshold(ell: u32, k: usize, alpha: u32, log_n: &Float, log_p: &Float) -> bool {
    let prec = log_n.prec();
    let lhs = Float::with_val(prec, log_p * (alpha as u64 * k as u64 + ell as u64));
    let rhs = Float::with_val(prec, log_n * ell);
    lhs > rhs
}

/// `max(2, ⌈(ℓ/k)(log n / log p − 1)⌉)`.
pub fn ratio4_exponent(ell: u32, k: usize, log_n: &Float, log_p: &Float) -> Result<u32> {
    let prec = log_n.prec();
    let v = (Float::with_val(prec, log_n / log_p) - 1u32) * ell / k as u32;
    let c = ceil_i64(&v)?;
    Ok(c.max(2) as u32)
}

/// The maximizer of `g(z) = (c1 (z − c2)^α − 1)/z` on `z > c1^{−1/α} + c2`,
/// found as the unique zero of `h(z) = c1 α z − c1 (z − c2) + (z − c2)^{1−α}`.
#[derive(Debug, Clone)]
pub struct GMax {
    pub z0: Float,
    pub value: Float,
}

pub fn g_value(c1: &Float, c2: &Float, alpha: &Float, z: &Float) -> Result<Float> {
    let prec = z.prec();
    let shifted = Float::with_val(prec, z - c2);
    if shifted <= 0 || *z <= 0 {
        return Err(Error::domain("g", "z must exceed max(c2, 0)"));
    }
    let pow = (shifted.ln() * alpha).exp();
    Ok((pow * c1 - 1u32) / z)
}

pub fn h_value(c1: &Float, c2: &Float, alpha: &Float, z: &Float) -> Result<Float> {
    let prec = z.prec();
    let shifted = Float::with_val(prec, z - c2);
    if shifted <= 0 {
        return Err(Error::domain("h", "z must exceed c2"));
    }
    let one_minus = Float::with_val(prec, 1u32 - alpha);
    let pow = (Float::with_val(prec, shifted.ln_ref()) * one_minus).exp();
    Ok(Float::with_val(prec, c1 * alpha) * z - Float::with_val(prec, c1 * &shifted) + pow)
}

/// `h'(z) = c1 (α − 1) + (1 − α)/(z − c2)^α`.
pub fn h_derivative(c1: &Float, c2: &Float, alpha: &Float, z: &Float) -> Result<Float> {
    let prec = z.prec();
    let shifted = Float::with_val(prec, z - c2);
    if shifted <= 0 {
        return Err(Error::domain("h", "z must exceed c2"));
    }
    let one_minus = Float::with_val(prec, 1u32 - alpha);
    let pow = (shifted.ln() * alpha).exp();
    Ok(Float::with_val(prec, &one_minus / pow) - Float::with_val(prec, c1 * one_minus))
}

/// Lower end `c1^{−1/α} + c2` of the interval on which g is considered.
pub fn g_domain_start(c1: &Float, c2: &Float, alpha: &Float) -> Float {
    let prec = c1.prec();
    let e = Float::with_val(prec, c1.ln_ref()) / alpha;
    Float::with_val(prec, (-e).exp() + c2)
}

pub fn g_unique_max(c1: &Float, c2: &Float, alpha: &Float, tol: &Float) -> Result<GMax> {
    if *alpha <= 0 || *alpha >= 1 || *c1 <= 0 || *c2 < 0 {
        return Err(Error::domain("g_unique_max", "needs α in (0,1), c1 > 0, c2 >= 0"));
    }
    let prec = c1.prec();
    let start = g_domain_start(c1, c2, alpha);
    let lo = if start > *c2 {
        start.clone()
    } else {
        let eps = Float::with_val(prec, Float::i_exp(1, -(prec as i32) / 2));
        Float::with_val(prec, c2 * (eps + 1u32)) + Float::with_val(prec, Float::i_exp(1, -(prec as i32) / 2))
    };
    let hi = Float::with_val(prec, &lo * 2u32) + 100_000u32;
    let p = RootProblem::new(
        |z: &Float| h_value(c1, c2, alpha, z),
        Float::with_val(prec, 0),
        lo,
        hi,
        Monotonicity::Decreasing,
        tol.clone(),
    );
    let z0 = solve_monotone(&p)?;
    if z0 <= start {
        return Err(Error::Precision("maximizer not inside the domain".into()));
    }
    let value = g_value(c1, c2, alpha, &z0)?;
    Ok(GMax { z0, value })
}

/// `Σ_{i<=k} log p_i <= k(log k + log log k − 1/2)`, stated for `k >= 5`.
pub fn ineq3_holds(table: &PrimeTable, k: usize) -> Result<bool> {
    let lhs = table.try_log_primorial(k)?;
    let prec = table.prec();
    let lk = Float::with_val(prec, k).ln();
    let llk = Float::with_val(prec, lk.ln_ref());
    let rhs = (lk + llk - Float::with_val(prec, 0.5)) * k as u32;
    Ok(*lhs <= rhs)
}

/// `Σ_{i<=k} log log p_i >= k(log log k + (log log k − 3/2)/log k)`, stated for `k >= 6`.
pub fn ineq4_holds(table: &PrimeTable, k: usize) -> Result<bool> {
    table.try_log_primorial(k)?;
    let lhs = -table.log_beta_primorial(k);
    let prec = table.prec();
    let lk = Float::with_val(prec, k).ln();
    let llk = Float::with_val(prec, lk.ln_ref());
    let frac = Float::with_val(prec, &llk - 1.5f64) / &lk;
    Ok(lhs >= (llk + frac) * k as u32)
}

/// `β(n_k) <= (log k)^{−k}`, stated for `k >= 44`.
pub fn ineq2_holds(table: &PrimeTable, k: usize) -> Result<bool> {
    table.try_log_primorial(k)?;
    let prec = table.prec();
    let llk = Float::with_val(prec, k).ln().ln();
    Ok(table.log_beta_primorial(k) <= -(llk * k as u32))
}

/// `υ(n_k, n_k) < 1`, stated for `k >= 95`.
pub fn upsilon_primorial_below_one(table: &PrimeTable, k: usize) -> Result<bool> {
    let log_nk = table.try_log_primorial(k)?;
    let v = upsilon_raw(log_nk, &table.log_beta_primorial(k), k, log_nk)?;
    Ok(v < 1)
}

/// The first k in `lo..=hi` where `check` fails, if any.
pub fn first_failure<F>(lo: usize, hi: usize, check: F) -> Result<Option<usize>>
where
    F: Fn(usize) -> Result<bool>,
{
    for k in lo..=hi {
        if !check(k)? {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::PrecisionContext;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn fl(c: &PrecisionContext, v: f64) -> Float {
        c.float(v)
    }

    #[test]
    fn amgm_levels() {
        let c = ctx();
        let xs = vec![fl(&c, 1.0), fl(&c, 2.0), fl(&c, 3.0)];
        let b = amgm_partition_bound(&xs, Splits::None).unwrap();
        assert_eq!(b, 8);
        let same = vec![fl(&c, 1.5); 5];
        assert_eq!(amgm_partition_bound(&same, Splits::None).unwrap(), pow_u(&fl(&c, 1.5), 5));
        assert!(amgm_partition_bound(&[fl(&c, 2.0), fl(&c, 1.0)], Splits::None).is_err());
        let skew = vec![fl(&c, 1.0), fl(&c, 2.0), fl(&c, 4.0)];
        assert!(amgm_partition_bound(&skew, Splits::One { m: 1 }).is_err());
        assert!(amgm_partition_bound(&skew, Splits::One { m: 2 }).is_ok());
    }

    #[test]
    fn amgm_chain_on_random_inputs() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut checked = 0;
        while checked < 200 {
            let k = rng.gen_range(4..12);
            let mut raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.1..5.0)).collect();
            raw.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let xs: Vec<Float> = raw.iter().map(|&v| fl(&c, v)).collect();
            let mu = mean(&xs);
            let m = xs.iter().filter(|x| **x <= mu).count();
            if m < 2 || m > k - 2 {
                continue;
            }
            let w = abs_dev(&xs, &mu);
            let mu1 = Float::with_val(c.prec(), &mu - Float::with_val(c.prec(), &w / (2 * m) as u32));
            let mu2 = Float::with_val(c.prec(), &mu + Float::with_val(c.prec(), &w / (2 * (k - m)) as u32));
            let m1 = xs[..m].iter().filter(|x| **x <= mu1).count();
            let m2 = xs[m..].iter().filter(|x| **x <= mu2).count();
            if m1 == 0 || m1 == m || m2 == 0 || m + m2 == k {
                continue;
            }
            let prod = xs.iter().fold(c.float(1), |acc, x| acc * x);
            let l1 = amgm_partition_bound(&xs, Splits::None).unwrap();
            let l2 = amgm_partition_bound(&xs, Splits::One { m }).unwrap();
            let l3 = amgm_partition_bound(&xs, Splits::Three { m, m1, m2 }).unwrap();
            let slack = c.identity_tol();
            assert!(Float::with_val(c.prec(), &prod - &l3) <= slack);
            assert!(Float::with_val(c.prec(), &l3 - &l2) <= slack);
            assert!(Float::with_val(c.prec(), &l2 - &l1) <= slack);
            checked += 1;
        }
    }

    #[test]
    fn ineqfond_equality_and_bound() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let one = vec![fl(&c, 3.0)];
        let b1 = ineqfond_bound(&one, &[fl(&c, 1.0)]).unwrap();
        assert_eq!(b1, 4);
        for _ in 0..100 {
            let k = rng.gen_range(1..10);
            let zs: Vec<Float> = (0..k).map(|_| fl(&c, rng.gen_range(0.2..20.0))).collect();
            let xs = equality_point(&zs).unwrap();
            let bound = ineqfond_bound(&zs, &xs).unwrap();
            let prod = ineqfond_product(&zs, &xs);
            let rel = Float::with_val(c.prec(), &bound - &prod).abs() / &bound;
            assert!(rel < c.ten_pow_neg(40));
            // Random admissible point: perturb along a zero-sum direction.
            let mut ys = xs.clone();
            if k >= 2 {
                let t = rng.gen_range(0.0..0.5);
                let (i, j) = (0, k - 1);
                let room = Float::with_val(c.prec(), &ys[j] + Float::with_val(c.prec(), zs[j].recip_ref()));
                let step = room * t;
                ys[i] += &step;
                ys[j] -= &step;
            }
            let b = ineqfond_bound(&zs, &ys).unwrap();
            assert!(ineqfond_product(&zs, &ys) <= Float::with_val(c.prec(), &b + c.identity_tol()));
        }
        let zs = vec![fl(&c, 1.0), fl(&c, 1.0)];
        assert!(ineqfond_bound(&zs, &[fl(&c, 2.5), fl(&c, -1.5)]).is_err());
        assert!(ineqfond_bound(&zs, &[fl(&c, 0.5), fl(&c, 0.4)]).is_err());
    }

    #[test]
    fn certificates() {
        let c = ctx();
        assert!(g1_decreasing(&fl(&c, 0.5), &fl(&c, 0.1), 3, 10).unwrap());
        assert!(!g1_decreasing(&fl(&c, 0.5), &fl(&c, 0.0), 3, 10).unwrap());
        assert!(g1_decreasing(&fl(&c, 0.01), &fl(&c, 1.0), 3, 10).is_err());

        let (a, b) = (fl(&c, 2.0), fl(&c, 3.0));
        let g2 = [fl(&c, 0.5), fl(&c, 1.5)];
        let r2 = [fl(&c, 0.25), fl(&c, 0.75)];
        assert!(z2_decreasing(&a, &b, &fl(&c, 5.0), &g2, &r2, &fl(&c, 10.0)).unwrap());
        assert!(z2_decreasing(&a, &b, &fl(&c, 6.0), &g2, &r2, &fl(&c, 10.0)).is_err());
        let g4 = [g2[0].clone(), g2[1].clone(), fl(&c, 7.0), fl(&c, 9.0)];
        let r4 = [r2[0].clone(), r2[1].clone(), fl(&c, 0.0), fl(&c, 0.0)];
        for z in [0.5, 3.0, 40.0] {
            let z = fl(&c, z);
            let two = z2_decreasing(&a, &b, &fl(&c, 5.5), &g2, &r2, &z).unwrap();
            let four = z4_decreasing(&a, &b, &fl(&c, 5.5), &g4, &r4, &z).unwrap();
            assert_eq!(two, four);
        }
    }

    #[test]
    fn z2_certificate_matches_finite_difference() {
        let c = ctx();
        let (a, b, cc) = (fl(&c, 2.0), fl(&c, 3.0), fl(&c, 5.9));
        let g = [fl(&c, 0.2), fl(&c, 0.4)];
        let r = [fl(&c, 0.5), fl(&c, 0.5)];
        let expr = |z: f64| {
            let az = 2.0 / z;
            3.0 * (0.2 + az).powf(0.5) * (0.4 + az).powf(0.5) - 5.9 / z
        };
        for z in [0.5, 1.0, 5.0, 50.0] {
            assert!(z2_decreasing(&a, &b, &cc, &g, &r, &fl(&c, z)).unwrap());
            assert!(expr(z + 1e-6) < expr(z));
        }
    }

    #[test]
    fn f_once_decreasing_sign() {
        let c = ctx();
        let f = FourBlock { mu: fl(&c, 1.0 / 44.0 * 1.3), w1: fl(&c, 0.01), w2: fl(&c, 0.09), k: 44, m: 11, m1: 3, m2: 10 };
        let w0 = fl(&c, 0.2);
        let cert = f_once_decreasing(&f, &w0).unwrap();
        let h = fl(&c, 1e-8);
        let ahead = f.value(&Float::with_val(c.prec(), &w0 + &h)).unwrap();
        assert_eq!(cert, ahead < f.value(&w0).unwrap());
        assert!(f_once_decreasing(&f, &fl(&c, 0.0)).is_err());
    }

    fn brute_psi(a: f64, b: f64, x1: f64, x2: f64, p1: f64, p2: f64, span: i64, grid: usize) -> f64 {
        let mut best = f64::INFINITY;
        for alpha in -span..=span {
            let num = (alpha + 1) as f64 * b - a;
            for i in 0..=grid {
                let x = x1 + (x2 - x1) * i as f64 / grid as f64;
                let q = num / x;
                // Over φ the best is the clamp of q into [φ1, φ2].
                let phi = q.clamp(p1, p2);
                best = best.min((q - phi).abs());
                for j in [0usize, grid] {
                    let phi = p1 + (p2 - p1) * j as f64 / grid as f64;
                    best = best.min((q - phi).abs());
                }
            }
        }
        best
    }

    #[test]
    fn psi_trivial_zero() {
        let c = ctx();
        let r = psi_minimize(&fl(&c, 0.0), &fl(&c, 1.0), &fl(&c, 1.0), &fl(&c, 1.0), &fl(&c, 0.5), &fl(&c, 1.5)).unwrap();
        assert_eq!(r.value, 0);
        assert_eq!(r.argmin[0].alpha, 0);
    }

    #[test]
    fn psi_matches_brute_force() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut nonzero = 0;
        for _ in 0..500 {
            let a = rng.gen_range(0.0..30.0);
            let b = rng.gen_range(0.5..8.0);
            let x1 = rng.gen_range(0.1..3.0);
            let x2 = x1 + rng.gen_range(0.0..0.3);
            let p1 = rng.gen_range(0.2..2.0);
            let p2 = p1 + rng.gen_range(0.0..0.3);
            let r = psi_minimize(&fl(&c, a), &fl(&c, b), &fl(&c, x1), &fl(&c, x2), &fl(&c, p1), &fl(&c, p2)).unwrap();
            let brute = brute_psi(a, b, x1, x2, p1, p2, 1000, 200);
            let got = r.value.to_f64();
            assert!(got <= brute + 1e-9, "{got} vs {brute}");
            if got > 0.0 {
                nonzero += 1;
                assert!((got - brute).abs() < 1e-9, "{got} vs {brute}");
            }
        }
        assert!(nonzero > 50);
    }

    #[test]
    fn psi_excluded_avoids_window() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let a = fl(&c, rng.gen_range(0.0..20.0));
            let b = fl(&c, rng.gen_range(0.5..5.0));
            let x1v = rng.gen_range(0.5..3.0);
            let x1 = fl(&c, x1v);
            let x2 = fl(&c, x1v + rng.gen_range(0.0..0.5));
            let d = fl(&c, rng.gen_range(0.001..0.2));
            let r = psi_minimize_excluded(&a, &b, &x1, &x2, &d).unwrap();
            let (lo, hi) = excluded_window(&a, &b, &x1, &x2, &d).unwrap();
            assert!(r.value > 0);
            for p in &r.argmin {
                assert!(p.alpha < lo || p.alpha > hi);
            }
            // Exhaustive check over α outside the window on an x grid.
            let one = c.float(1);
            for alpha in (lo - 40..lo).chain(hi + 1..hi + 40) {
                for i in 0..=20 {
                    let x = Float::with_val(c.prec(), &x2 - &x1) * i / 20u32 + &x1;
                    assert!(psi(alpha, &x, &one, &a, &b) >= Float::with_val(c.prec(), &r.value - c.identity_tol()));
                }
            }
        }
    }

    #[test]
    fn ratio_bound_dominates_lambda_ratio() {
        use crate::arith::factorize_small;
        use crate::bounds::lambda_of;
        let c = ctx();
        let t = PrimeTable::new(80_000, &c);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut done = 0;
        while done < 10_000 {
            let n = rng.gen_range(12u64..1_000_000);
            let f = factorize_small(&t, n, 1_000_000).unwrap();
            if f.omega() < 2 {
                continue;
            }
            let Some(pos) = f.exponents().iter().position(|&e| e >= 2) else { continue };
            let p = f.primes()[pos];
            let g = factorize_small(&t, n / p, 1_000_000).unwrap();
            if g.omega() != f.omega() {
                continue;
            }
            let bound = ratio_bound(&f, p, 2).unwrap();
            let ratio = lambda_of(&f).unwrap() / lambda_of(&g).unwrap();
            assert!(ratio <= Float::with_val(c.prec(), &bound + c.identity_tol()), "n = {n}");
            let lp = Float::with_val(c.prec(), p).ln();
            for ell in [1, 2] {
                let alpha = f.exponents()[pos];
                let b = ratio_value(ell, f.omega(), alpha, f.log_n(), &lp);
                assert_eq!(b < 1, ratio_threshold(ell, f.omega(), alpha, f.log_n(), &lp));
                let a4 = ratio4_exponent(ell, f.omega(), f.log_n(), &lp).unwrap();
                assert!(ratio_value(ell, f.omega(), a4, f.log_n(), &lp) < 1);
            }
            done += 1;
        }
        let f = factorize_small(&t, 30, 100).unwrap();
        assert!(ratio_bound(&f, 2, 2).is_err());
        assert!(ratio_bound(&f, 7, 2).is_err());
    }

    #[test]
    fn g_max_closed_form() {
        let c = ctx();
        let r = g_unique_max(&c.float(1), &c.float(0), &c.float(0.5), c.root_tol()).unwrap();
        assert!((r.z0.to_f64() - 4.0).abs() < 1e-25);
        assert!((r.value.to_f64() - 0.25).abs() < 1e-25);
        assert!(g_unique_max(&c.float(1), &c.float(0), &c.float(1.5), c.root_tol()).is_err());
    }

    #[test]
    fn g_max_random_and_shift_bound() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let c1 = c.float(rng.gen_range(0.5..1039.0));
            let c2 = c.float(rng.gen_range(159.7..2000.0));
            let alpha = c.float(rng.gen_range(1.0 / 94.0..0.99));
            let r = g_unique_max(&c1, &c2, &alpha, c.root_tol()).unwrap();
            let shift = Float::with_val(c.prec(), &r.z0 - &c2);
            assert!(shift > 1.61);
            let start = g_domain_start(&c1, &c2, &alpha).max(&Float::with_val(c.prec(), &c2 + c.ten_pow_neg(30)));
            let top = Float::with_val(c.prec(), &r.value + c.ten_pow_neg(20));
            let span = Float::with_val(c.prec(), &r.z0 - &start) * 4u32 + 10u32;
            let at = |i: u32, n: u32| Float::with_val(c.prec(), &span * i) / n + &start;
            for i in 1..=10_000 {
                assert!(g_value(&c1, &c2, &alpha, &at(i, 10_000)).unwrap() <= top);
            }
            for i in 1..=16 {
                assert!(h_derivative(&c1, &c2, &alpha, &at(i, 16)).unwrap() < 0);
            }
        }
    }

    #[test]
    fn lemma_ranges_small() {
        let c = ctx();
        let t = PrimeTable::new(10_000, &c);
        assert_eq!(first_failure(5, 10_000, |k| ineq3_holds(&t, k)).unwrap(), None);
        assert_eq!(first_failure(6, 10_000, |k| ineq4_holds(&t, k)).unwrap(), None);
        assert_eq!(first_failure(44, 10_000, |k| ineq2_holds(&t, k)).unwrap(), None);
        assert!(!ineq2_holds(&t, 43).unwrap());
    }
}
