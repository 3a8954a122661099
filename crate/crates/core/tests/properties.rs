use std::sync::OnceLock;

use proptest::prelude::*;
use rug::Float;
use taubound::arith::{Factorization, PrecisionContext, PrimeTable};
use taubound::search::{canonicalize, enumerate_box, u_of, CandidateBox, EnumerateOptions, Interval44, Scored, Window};

fn table() -> &'static PrimeTable {
    static T: OnceLock<PrimeTable> = OnceLock::new();
    T.get_or_init(|| PrimeTable::new(200, &PrecisionContext::default()))
}

fn interval() -> &'static Interval44 {
    static I: OnceLock<Interval44> = OnceLock::new();
    I.get_or_init(|| Interval44::new(table()).unwrap())
}

fn f(x: f64) -> Float {
    Float::with_val(table().prec(), x)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn u_of_matches_linear_scan(log_x in 0.0f64..900.0) {
        let t = table();
        let naive = (0..t.len()).take_while(|&l| t.log_primorial(l).to_f64() <= log_x).last().unwrap();
        prop_assert_eq!(u_of(t, &f(log_x)).unwrap(), naive);
    }

    #[test]
    fn canonicalize_keeps_tau_and_shrinks_n(exps in prop::collection::vec(0u32..6, 1..12)) {
        let t = table();
        let idx: Vec<usize> = exps.iter().enumerate().filter(|(_, &a)| a > 0).map(|(i, _)| 3 * i + 1).collect();
        prop_assume!(!idx.is_empty());
        let e: Vec<u32> = exps.iter().copied().filter(|&a| a > 0).collect();
        let g = Factorization::new(t, idx, e.clone()).unwrap();
        let c = canonicalize(t, &g).unwrap();
        prop_assert!(c.is_canonical());
        prop_assert_eq!(c.tau(), g.tau());
        prop_assert_eq!(c.omega(), g.omega());
        prop_assert!(*c.log_n() <= *g.log_n());
        let mut sorted = e;
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        prop_assert_eq!(c.exponents(), &sorted[..]);
        prop_assert_eq!(canonicalize(t, &c).unwrap(), c);
    }

    #[test]
    fn j_delta_contains_every_close_exponent(i in 1usize..=44, j in 1u32..=118, d1 in 0.0f64..0.03, extra in 0.0f64..0.03, s in 0.0f64..1.0) {
        let iv = interval();
        let (d1f, d2f) = (f(d1), f(d1 + extra));
        let w1 = iv.j_delta(i, j, &d1f).unwrap();
        let w2 = iv.j_delta(i, j, &d2f).unwrap();
        for a in w1.iter() {
            prop_assert!(w2.contains(a));
        }
        let x = 10639.8 + j as f64 + s;
        let centre = ((x + iv.a_f64()) / iv.b_f64(i) - 1.0).round() as i64;
        for a in centre - 2..=centre + 2 {
            if iv.error(i, a, &f(x)) <= d1f {
                prop_assert!(w1.contains(a), "alpha {} outside {:?}", a, w1);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn enumerate_box_independent_of_partitions(lens in prop::collection::vec((0i64..4, 1i64..5), 2..6), seed in 0u64..1000) {
        let ranges: Vec<Window> = lens.iter().map(|&(lo, n)| Window::new(lo, lo + n - 1)).collect();
        let b = CandidateBox::uniform(ranges, "prop").unwrap();
        let hook = |v: &[i64]| {
            let h = v.iter().fold(seed, |acc, &a| acc.wrapping_mul(31).wrapping_add(a as u64)) % 7;
            Scored { key: h, class: if h > 3 { "high" } else { "low" } }
        };
        let runs: Vec<_> = [1usize, 4, 16]
            .iter()
            .map(|&p| enumerate_box(&b, &EnumerateOptions { partitions: p, ..Default::default() }, hook).unwrap())
            .collect();
        prop_assert_eq!(runs[0].enumerated as u128, b.cardinality());
        prop_assert_eq!(&runs[0], &runs[1]);
        prop_assert_eq!(&runs[0], &runs[2]);
    }
}
