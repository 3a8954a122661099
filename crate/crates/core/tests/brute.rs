use taubound::arith::PrecisionContext;
use taubound::bounds::Inequality;
use taubound::search::{brute_check, Status};
use taubound::Error;

const N_MAX: u64 = 1_000_000;

#[test]
fn holds_up_to_a_million() {
    let ctx = PrecisionContext::default();
    for ineq in Inequality::ALL.into_iter().filter(|&i| i != Inequality::Inequality2) {
        let rep = brute_check(&ctx, ineq, N_MAX, false).unwrap();
        assert_eq!(rep.status, Status::Confirmed, "{}: {:?}", ineq.name(), rep.checks);
        assert!(rep.witnesses.is_empty(), "{}", ineq.name());
        assert!(rep.exhaustion.reconciles());
    }
}

#[test]
fn inequality2_counterexamples_in_exclusion_set() {
    let ctx = PrecisionContext::default();
    let rep = brute_check(&ctx, Inequality::Inequality2, N_MAX, false).unwrap();
    assert_eq!(rep.status, Status::Confirmed, "{:?}", rep.checks);
    assert!(!rep.witnesses.is_empty());
    for w in &rep.witnesses {
        assert!(w.factorization.idx.len() >= 4, "{w:?}");
    }
    // 210 = n_4: τ = 16 > (2 log 210/(4 log 4))^4.
    let bound = (2.0 * 210f64.ln() / (4.0 * 4f64.ln())).powi(4);
    assert!(tau_omega(210).0 as f64 > bound);
    assert!(rep.witnesses.iter().any(|w| w.factorization.idx == [1, 2, 3, 4] && w.factorization.exp == [1, 1, 1, 1]));
}

#[test]
fn guard_refuses_large_ranges() {
    let ctx = PrecisionContext::default();
    let err = brute_check(&ctx, Inequality::Fond1, 20_000_000, false).unwrap_err();
    assert!(matches!(err, Error::CardinalityGuard { .. }));
}

/// (τ(n), ω(n)) by trial division.
fn tau_omega(mut n: u64) -> (u64, u32) {
    let (mut t, mut w, mut d) = (1, 0, 2);
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut a = 0;
            while n.is_multiple_of(d) {
                n /= d;
                a += 1;
            }
            t *= a + 1;
            w += 1;
        }
        d += 1;
    }
    if n > 1 {
        (t * 2, w + 1)
    } else {
        (t, w)
    }
}

#[test]
fn inequality2_count_matches_trial_division() {
    let n_max = 100_000u64;
    let oracle = (2..=n_max)
        .filter(|&n| {
            let (t, k) = tau_omega(n);
            let log_plus = (k.max(2) as f64).ln();
            (t as f64).ln() > k as f64 * (2.0 * (n as f64).ln() / (k as f64 * log_plus)).ln() + 1e-12
        })
        .count();
    let rep = brute_check(&PrecisionContext::default(), Inequality::Inequality2, n_max, false).unwrap();
    assert_eq!(rep.parameters["counterexamples"], oracle as u64);
    assert_eq!(rep.exhaustion.rejected["counterexample"], oracle as u64);
}
