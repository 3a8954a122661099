use taubound::arith::{PrecisionContext, PrimeTable};
use taubound::search::{verify_thm5, Phase, Thm5Options, VerificationReport};

fn run(phase: Phase, j: Option<u32>, bucket: Option<u32>) -> VerificationReport {
    let t = PrimeTable::new(200, &PrecisionContext::default());
    let opts = Thm5Options { phase: Some(phase), j, bucket, ..Default::default() };
    let rep = verify_thm5(&t, &opts).unwrap();
    assert!(rep.all_passed(), "{:?}", rep.failed_checks().collect::<Vec<_>>());
    assert!(rep.exhaustion.reconciles());
    rep
}

fn small_primes(k: usize) -> Vec<f64> {
    let mut out = Vec::new();
    let mut n = 2u64;
    while out.len() < k {
        if (2..n).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d)) {
            out.push(n as f64);
        }
        n += 1;
    }
    out
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[test]
fn prelim_witness_in_window() {
    let rep = run(Phase::Prelim, None, None);
    let w = rep.witnesses.iter().find(|w| w.label == "n_star").expect("n_* witness");
    let fj = serde_json::to_value(&w.factorization).unwrap();
    let idx: Vec<usize> = serde_json::from_value(fj["idx"].clone()).unwrap();
    let exp: Vec<u32> = serde_json::from_value(fj["exp"].clone()).unwrap();
    assert_eq!(idx, (1..=44).collect::<Vec<_>>());
    // λ recomputed in f64 from the exponent vector.
    let p = small_primes(44);
    let log_n: f64 = exp.iter().zip(&p).map(|(&a, q)| a as f64 * q.ln()).sum();
    let log_tau: f64 = exp.iter().map(|&a| ((a + 1) as f64).ln()).sum();
    let lambda = ((log_tau / 44.0).exp() - 1.0) * 44.0 * 44f64.ln() / log_n;
    assert!((log_n - 10640.8428).abs() < 1e-3, "{log_n}");
    assert!(lambda > 1.0 && lambda < 1.000001, "{lambda}");
    let reported: f64 = w.log_n.trim_end_matches('…').parse().unwrap();
    assert!((reported - log_n).abs() < 1e-8);
}

#[test]
fn tables_first_interval() {
    let rep = run(Phase::Tables, Some(1), None);
    for t in ["table 6", "table 7", "table 8", "table 9"] {
        assert!(rep.checks.iter().any(|c| c.name.starts_with(t) && c.passed), "{t}");
    }
}

#[test]
fn reduce_first_interval_matches_sample_pairs() {
    let rep = run(Phase::Reduce, Some(1), None);
    let pairs: Vec<(f64, f64)> = serde_json::from_value(rep.tables["reduce_j1_m11"].clone()).unwrap();
    let published = [
        (0.010296421544, 0.093154520284),
        (0.010296421544, 0.089438737225),
        (0.011179764497, 0.087104430865),
        (0.012637967643, 0.085223479629),
    ];
    for (ours, theirs) in pairs.iter().zip(&published) {
        // Lower bounds, lowered by the grid safety margin.
        assert!(ours.0 <= theirs.0 && theirs.0 - ours.0 < 2e-9, "{ours:?} vs {theirs:?}");
        assert!(ours.1 <= theirs.1 && theirs.1 - ours.1 < 2e-9, "{ours:?} vs {theirs:?}");
    }
    let d = rep.tables["table10"][0]["delta_reduced"].as_f64().unwrap();
    assert!(d <= 0.02422 + 5e-4 && d > 0.02422 - 5e-4, "{d}");
    assert!(rep.tables["table10"][0]["max_upsilon"].as_f64().unwrap() < 1.0);
}

#[test]
fn final_first_bucket() {
    let rep = run(Phase::Final, Some(1), Some(1));
    let t = &rep.tables["final_j1_triplets"];
    assert_eq!(t["total"].as_u64().unwrap(), binomial(44, 3));
    let kept = t["kept"].as_u64().unwrap();
    assert!(kept < 1000);
    let buckets: Vec<u64> = serde_json::from_value(t["buckets"].clone()).unwrap();
    assert_eq!(buckets.len(), 7);
    assert!(buckets.iter().sum::<u64>() >= kept);
    assert!(rep.exhaustion.enumerated > 0);
    assert_eq!(rep.exhaustion.accepted, 0);
}

#[test]
fn type1_first_interval() {
    let rep = run(Phase::Type1, Some(1), None);
    assert!(rep.checks.iter().any(|c| c.name == "type1 j=1: base box size" && c.detail.starts_with("92160 ")));
    assert_eq!(rep.exhaustion.accepted, 0);
    assert!(rep.exhaustion.rejected["equals_n_star"] > 0);
}

#[test]
fn type2_first_interval() {
    let rep = run(Phase::Type2, Some(1), None);
    assert!(rep.checks.iter().any(|c| c.name == "type2 j=1: base box size" && c.detail.starts_with("98304 ")));
    assert_eq!(rep.exhaustion.accepted, 0);
}
