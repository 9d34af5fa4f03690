use super::*;
use num_rational::BigRational;

fn lengths(pairs: &[(u32, u32)]) -> crate::subgroup::LengthSequence {
    crate::subgroup::LengthSequence::from_pairs(pairs).unwrap()
}

fn spec(indices: &[u32], pairs: &[(u32, u32)]) -> SubgroupSpec {
    SubgroupSpec::new(indices.iter().copied().collect(), lengths(pairs)).unwrap()
}

fn set(xs: &[u32]) -> BTreeSet<u32> {
    xs.iter().copied().collect()
}

#[test]
fn strict_paper_sum_at_ten() {
    let p = RuleParams::paper();
    let r = partial_dimension(&spec(&[], &[(1, 3)]), 10, &p, LengthRule::StrictPaper).unwrap();
    assert_eq!(r.lengths, vec![5]);
    assert_eq!(r.classes.len(), 2);
    assert!(r.classes.iter().all(|c| c.exponent == 354293));
    assert_eq!(r.partial_sum, Dyadic::pow2_neg(354292));
    assert_eq!(r.tail_from, 11);
    assert_eq!(r.tail, tail_bound(11, &p).unwrap());
}

#[test]
fn below_minimum_length() {
    let p = RuleParams::desk();
    let r = partial_dimension(&spec(&[1], &[(1, 3)]), 4, &p, LengthRule::Nullity).unwrap();
    assert!(r.classes.is_empty());
    assert!(r.partial_sum.is_zero());
    assert!(r.tail.num > BigUint::zero());
}

#[test]
fn term_examples() {
    assert_eq!(class_exponent(5, 5, &RuleParams::with_rho(1)), 17);
    assert_eq!(class_exponent(5, 5, &RuleParams::paper()), 354293);
    let t = dimension_term(&ActiveClass {
        vertex_count: 5,
        path: TreePath::from_steps_str(&crate::geometry::ReducedWord::identity(), "aaaa").unwrap(),
        cells: 5,
        exponent: 17,
    });
    assert_eq!(t.to_decimal(30), "0.00000762939453125");
}

#[test]
fn bridge_doubles() {
    let p = RuleParams::paper();
    let catalog = Catalog::build(17, LengthRule::StrictPaper, &p).unwrap();
    let bridge = |s: &SubgroupSpec| {
        activate(&catalog, s, &p).into_iter().find(|c| c.path.step_string() == "bbbaaaaaaaaaaBBB").unwrap()
    };
    let without = bridge(&spec(&[], &[(1, 3)]));
    let with = bridge(&spec(&[1], &[(1, 3)]));
    assert_eq!((without.cells, with.cells), (17, 16));
    assert_eq!((without.exponent, with.exponent), (1062881, 1062880));
    assert_eq!(dimension_term(&with), dimension_term(&without).mul_pow2(1));
}

#[test]
fn nullity_rule_admits_two_mod_three() {
    let p = RuleParams::desk();
    let f = LengthFilter::new(LengthRule::Nullity, &p);
    assert_eq!(f.admissible_up_to(20).unwrap(), vec![5, 8, 11, 14, 17, 20]);
    assert_eq!(f.next_after(5).unwrap(), 8);
    let s = LengthFilter::new(LengthRule::StrictPaper, &p);
    assert_eq!(s.admissible_up_to(20).unwrap(), vec![5, 11, 17]);
    assert_eq!(s.next_after(17).unwrap(), 23);
}

fn tail_oracle(from: usize, count: usize, rho: u32) -> BigRational {
    // direct finite sum of 2 (3l+2) 6^l 2^{-(3^rho - 1) l}
    let k = 3u64.pow(rho) - 1;
    (from..from + count)
        .map(|l| {
            let num = BigInt::from(2 * (3 * l + 2)) * num_traits::pow(BigInt::from(6), l);
            BigRational::new(num, BigInt::one() << (k * l as u64))
        })
        .fold(BigRational::zero(), |a, b| a + b)
}

fn as_rational(r: &ScaledRatio) -> BigRational {
    BigRational::new(BigInt::from(r.num.clone()), BigInt::from(r.den.clone()) << r.exp)
}

#[test]
fn tail_closed_form_matches_sum() {
    for rho in [2, 3] {
        let p = RuleParams::with_rho(rho);
        for from in [1, 5, 11] {
            let head = as_rational(&tail_bound(from, &p).unwrap()) - as_rational(&tail_bound(from + 50, &p).unwrap());
            assert_eq!(head, tail_oracle(from, 50, rho), "rho {rho} from {from}");
            assert!(tail_bound(from + 1, &p).unwrap().cmp_ratio(&tail_bound(from, &p).unwrap()) == Ordering::Less);
        }
    }
}

#[test]
fn tail_diverges_at_radius_one() {
    assert_eq!(tail_bound(5, &RuleParams::with_rho(1)), Err(SeriesError::Divergent { rho: 1 }));
}

#[test]
fn paper_tail_thresholds() {
    let p = RuleParams::paper();
    let bridge = Dyadic::pow2_neg(1062881);
    assert_eq!(tail_bound(18, &p).unwrap().cmp_dyadic(&bridge), Ordering::Greater);
    assert_eq!(tail_bound(19, &p).unwrap().cmp_dyadic(&bridge), Ordering::Less);
    assert_eq!(tail_bound(19, &p).unwrap().cmp_dyadic(&Dyadic::pow2_neg(1121800)), Ordering::Less);
}

#[test]
fn lexicographic_order() {
    assert_eq!(lex_cmp(&set(&[]), &set(&[2])), Ordering::Less);
    assert_eq!(lex_cmp(&set(&[2]), &set(&[1])), Ordering::Less);
    assert_eq!(lex_cmp(&set(&[1]), &set(&[1, 2])), Ordering::Less);
    assert_eq!(lex_cmp(&set(&[1, 2]), &set(&[1])), Ordering::Greater);
    assert_eq!(lex_cmp(&set(&[3]), &set(&[3])), Ordering::Equal);
}

#[test]
fn coarsening_is_termwise() {
    let p = RuleParams::desk();
    let pairs = [(1, 3), (2, 6)];
    let catalog = Catalog::build(14, LengthRule::Nullity, &p).unwrap();
    let all = [&[][..], &[1], &[2], &[1, 2]];
    let active: Vec<BTreeMap<TreePath, u64>> = all
        .iter()
        .map(|i| activate(&catalog, &spec(i, &pairs), &p).into_iter().map(|c| (c.path, c.exponent)).collect())
        .collect();
    for (a, i) in all.iter().enumerate() {
        for (b, j) in all.iter().enumerate() {
            if !i.iter().all(|n| j.contains(n)) {
                continue;
            }
            for (path, e) in &active[a] {
                assert!(active[b][path] <= *e, "{path} under {i:?} vs {j:?}");
            }
            let sum = |m: &BTreeMap<TreePath, u64>| Dyadic::sum(&m.values().map(|&e| Dyadic::pow2_neg(e)).collect::<Vec<_>>());
            assert!(sum(&active[a]) <= sum(&active[b]));
        }
    }
}

#[test]
fn order_does_not_matter() {
    let p = RuleParams::desk();
    let s = spec(&[1], &[(1, 3)]);
    let catalog = Catalog::build(14, LengthRule::Nullity, &p).unwrap();
    let base = report_from_catalog(&catalog, &s, &p).unwrap().to_json(40);
    for seed in 0..3 {
        let shuffled = report_from_catalog(&catalog.shuffled(seed), &s, &p).unwrap().to_json(40);
        assert_eq!(base.to_string(), shuffled.to_string());
    }
}

#[test]
fn tail_indices_are_invisible_below_their_bridges() {
    let p = RuleParams::desk();
    let pairs = [(1, 1), (2, 4), (3, 16)];
    // 2 l(3) + 11 > 14
    let catalog = Catalog::build(14, LengthRule::Nullity, &p).unwrap();
    let full = activate(&catalog, &spec(&[1, 2, 3], &pairs), &p);
    let cut = activate(&catalog, &spec(&[1, 2], &pairs), &p);
    assert_eq!(full, cut);
}

#[test]
fn self_comparison_is_inconclusive() {
    let p = RuleParams::paper();
    let s = spec(&[1], &[(1, 3)]);
    let c = compare(&s, &s, 10, &p, LengthRule::StrictPaper).unwrap();
    assert!(c.delta.is_zero());
    assert_eq!(c.verdict, Verdict::Inconclusive);
    assert!(recheck_certificate(&c.to_json()).unwrap());
}

#[test]
fn bridge_certifies_at_paper_radius() {
    let p = RuleParams::paper();
    let lo = spec(&[], &[(1, 3)]);
    let hi = spec(&[1], &[(1, 3)]);
    // too short to see the bridge: the tail swamps everything
    let early = compare(&lo, &hi, 11, &p, LengthRule::StrictPaper).unwrap();
    assert_eq!(early.verdict, Verdict::Inconclusive);
    // the bridge is the only difference and the tail from 23 on is far below it
    let c = compare(&lo, &hi, 17, &p, LengthRule::StrictPaper).unwrap();
    assert_eq!(c.delta, Dyadic::pow2_neg(1062881));
    assert_eq!(c.verdict, Verdict::CertifiedPositive);
    let json = c.to_json();
    assert!(recheck_certificate(&json).unwrap());
    let mut forged = json.clone();
    forged["verdict"] = Value::from("INCONCLUSIVE");
    assert!(!recheck_certificate(&forged).unwrap());
}

#[test]
fn desk_certificates_are_sound() {
    let p = RuleParams::desk();
    let chain: Vec<SubgroupSpec> = [&[][..], &[2], &[1], &[1, 2]].iter().map(|i| spec(i, &[(1, 1), (2, 2)])).collect();
    // with only length 5 inside, the tail from 8 on swamps every difference
    for c in certify_chain(&chain, 5, &p, LengthRule::Nullity).unwrap() {
        assert_eq!(c.verdict, Verdict::Inconclusive);
    }
    let short = certify_chain(&chain, 11, &p, LengthRule::Nullity).unwrap();
    let long = certify_chain(&chain, 14, &p, LengthRule::Nullity).unwrap();
    assert_eq!(short.len(), 3);
    for (s, l) in short.iter().zip(&long) {
        assert!(recheck_certificate(&s.to_json()).unwrap());
        if s.verdict == Verdict::CertifiedPositive {
            // the longer truncation stays inside the claimed interval
            let gap = l.delta.sub(&s.delta);
            let abs = if gap.is_positive() { gap } else { Dyadic::zero().sub(&gap) };
            assert_ne!(s.tail.scale(2).cmp_dyadic(&abs), Ordering::Less);
            assert!(l.delta.is_positive());
            assert_eq!(l.verdict, Verdict::CertifiedPositive);
        }
    }
    assert!(short.iter().any(|c| c.verdict == Verdict::CertifiedPositive));
    assert!(certify_chain(&chain[..1], 11, &p, LengthRule::Nullity).unwrap().is_empty());
}

#[test]
fn chain_must_increase() {
    let p = RuleParams::desk();
    let chain = [spec(&[1], &[(1, 1), (2, 2)]), spec(&[2], &[(1, 1), (2, 2)])];
    assert_eq!(certify_chain(&chain, 8, &p, LengthRule::Nullity).unwrap_err(), SeriesError::NotIncreasing);
    let mixed = [spec(&[], &[(1, 1)]), spec(&[1], &[(1, 2)])];
    assert!(matches!(compare(&mixed[0], &mixed[1], 8, &p, LengthRule::Nullity), Err(SeriesError::InvalidInput(_))));
}
