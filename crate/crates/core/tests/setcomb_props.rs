use linnik_core::group::{convolve_group, UnitGroup};
use linnik_core::setcomb::{
    is_subgroup, kneser_check, product_set, stabilizer, triple_convolution, UnitSet,
};
use proptest::prelude::*;

fn set_from_bits(g: &UnitGroup, bits: &[bool]) -> UnitSet {
    UnitSet::from_indices(
        g,
        (0..g.phi as usize).filter(|&i| bits[i % bits.len()] ^ (i % 3 == 0 && bits[0])),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stabilizer_is_subgroup(q in 1u64..=80, bits in prop::collection::vec(any::<bool>(), 1..20)) {
        let g = UnitGroup::new(q).unwrap();
        let s = set_from_bits(&g, &bits);
        let st = stabilizer(&g, &s);
        prop_assert!(is_subgroup(&g, &st));
        prop_assert!(product_set(&g, &s, &st).is_subset(&s) || s.is_empty());
    }

    #[test]
    fn kneser_inequality(q in 1u64..=80, a in prop::collection::vec(any::<bool>(), 1..20),
                         b in prop::collection::vec(any::<bool>(), 1..20)) {
        let g = UnitGroup::new(q).unwrap();
        let (sa, sb) = (set_from_bits(&g, &a), set_from_bits(&g, &b));
        prop_assume!(!sa.is_empty() && !sb.is_empty());
        prop_assert!(kneser_check(&g, &sa, &sb).unwrap().holds());
    }

    #[test]
    fn triple_convolution_matches_loop(q in 1u64..=60, a in prop::collection::vec(any::<bool>(), 1..12),
                                       b in prop::collection::vec(any::<bool>(), 1..12),
                                       c in prop::collection::vec(any::<bool>(), 1..12)) {
        let g = UnitGroup::new(q).unwrap();
        let sets = [set_from_bits(&g, &a), set_from_bits(&g, &b), set_from_bits(&g, &c)];
        let n = g.phi as usize;
        let mut brute = vec![0i64; n];
        for i in sets[0].indices() {
            for j in sets[1].indices() {
                for k in sets[2].indices() {
                    brute[g.mul_index(g.mul_index(i, j), k)] += 1;
                }
            }
        }
        prop_assert_eq!(triple_convolution(&g, &sets[0], &sets[1], &sets[2]), brute.clone());
        let ind: Vec<Vec<i64>> = sets.iter().map(|s| s.mask().iter().map(|&x| x as i64).collect()).collect();
        prop_assert_eq!(convolve_group(&g, &convolve_group(&g, &ind[0], &ind[1]), &ind[2]), brute);
    }
}

#[test]
fn index_two_coset_triple_is_quarter_phi_squared() {
    for q in [7u64, 13, 35, 64, 101, 120] {
        let g = UnitGroup::new(q).unwrap();
        let phi = g.phi as i64;
        for h in g.index2_subgroups() {
            for b in h.coset_reps(&g) {
                let s = UnitSet::from_coset(&g, &h.with_rep(b));
                let t = triple_convolution(&g, &s, &s, &s);
                let target = h.with_rep(g.mul(g.mul(b, b), b));
                for (i, &v) in t.iter().enumerate() {
                    let expect = if target.contains(&g, g.unit(i)) {
                        phi * phi / 4
                    } else {
                        0
                    };
                    assert_eq!(v, expect, "q={q} b={b}");
                }
            }
        }
    }
}
