use linnik_core::arith::IntegerInterval;
use linnik_core::charsums::f_delta;
use linnik_core::densemodel::{build_dense_model, verify_model};
use linnik_core::group::UnitGroup;
use linnik_core::multfunc::{MultiplicativeFunction, Sign};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn model_structure(q in 5u64..120, r in 40.0f64..400.0, d1 in 0.01f64..0.5, d2 in 0.01f64..0.5, minus in any::<bool>()) {
        let g = UnitGroup::new(q).unwrap();
        let h = MultiplicativeFunction::liouville();
        let sign = if minus { Sign::Minus } else { Sign::Plus };
        let iv = IntegerInterval::e_adic(r, 0);
        let f = f_delta(&h, q, 3.0, &iv, sign, None).unwrap();
        let fh = f.hat(&g);
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        let a = build_dense_model(&g, &f, lo, "prop").unwrap();
        let b = build_dense_model(&g, &f, hi, "prop").unwrap();

        prop_assert_eq!(a.spectrum[0], 0);
        for c in 1..fh.len() {
            prop_assert_eq!(a.spectrum.contains(&c), fh[c].norm() >= lo);
        }
        prop_assert!(b.spectrum.iter().all(|c| a.spectrum.contains(c)));
        prop_assert!((a.mean() - fh[0].re).abs() < 1e-9);
        prop_assert!(verify_model(&g, &a, &f, 0.1).unwrap().asserted_ok());
    }
}
