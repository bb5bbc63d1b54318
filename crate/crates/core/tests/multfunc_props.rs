use std::sync::Arc;

use linnik_core::arith::{gcd, is_squarefree};
use linnik_core::group::UnitGroup;
use linnik_core::multfunc::{
    pretend_sum, pretentious_distance, sign_density_counts, MultiplicativeFunction, Sign,
};
use proptest::prelude::*;

fn builtins() -> Vec<MultiplicativeFunction> {
    vec![
        MultiplicativeFunction::liouville(),
        MultiplicativeFunction::mobius(),
        MultiplicativeFunction::one(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn multiplicative_on_coprime_pairs(m in 1u64..=1_000_000, n0 in 1u64..=1_000_000) {
        let mut n = n0;
        loop {
            let g = gcd(m, n);
            if g == 1 {
                break;
            }
            n /= g;
        }
        for h in builtins() {
            prop_assert_eq!(h.eval(m * n).unwrap(), h.eval(m).unwrap() * h.eval(n).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pretend_sum_monotone_in_cutoff(q in 3u64..120, a in 2.0f64..500.0, b in 2.0f64..500.0) {
        let g = UnitGroup::new(q).unwrap();
        let lam = MultiplicativeFunction::liouville();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        for chi in g.real_characters() {
            prop_assert!(pretend_sum(&lam, &g, &chi, lo).unwrap() <= pretend_sum(&lam, &g, &chi, hi).unwrap());
        }
    }

    #[test]
    fn sign_counts_partition_squarefree_units(q in 1u64..60, y in 1u64..3_000) {
        let g = Arc::new(UnitGroup::new(q.max(3)).unwrap());
        let chi = g.real_characters().into_iter().next_back().unwrap();
        let mut fs = builtins();
        fs.retain(|h| h.name != "mobius");
        fs.push(MultiplicativeFunction::from_real_character(g.clone(), chi).unwrap());
        let qq = g.q;
        let expected = (1..=y).filter(|&n| gcd(n, qq) == 1 && is_squarefree(n)).count() as u64;
        for h in fs {
            let p = sign_density_counts(&h, qq, y, Sign::Plus, 0.1).unwrap().count;
            let m = sign_density_counts(&h, qq, y, Sign::Minus, 0.1).unwrap().count;
            prop_assert_eq!(p + m, expected, "{}", h.name);
        }
    }

    #[test]
    fn distance_is_symmetric(x in 2.0f64..2_000.0, r in 1u64..100) {
        let f = MultiplicativeFunction::liouville();
        let g = MultiplicativeFunction::one();
        prop_assert_eq!(pretentious_distance(&f, &g, x, r), pretentious_distance(&g, &f, x, r));
    }
}
