use gwquasi::arith::rat::{c_factor, factorial, frac, rat, Rat};
use gwquasi::arith::SymRat;
use gwquasi::engine::{degree_of, Engine, Insertion, InvariantKey, Rule};
use gwquasi::Error;
use num_bigint::BigInt;
use proptest::prelude::*;

fn engine() -> &'static Engine {
    Engine::global()
}

#[test]
fn one_point_genus_zero() {
    for n in 1..=3u32 {
        for d in 1..=5u32 {
            let m = (n + 1) * d - 2;
            let v = engine().rational(&InvariantKey::stationary(n, 0, &[m])).unwrap();
            let df = Rat::from_integer(factorial(d as u64));
            let mut expect = rat(1);
            for _ in 0..=n {
                expect /= &df;
            }
            assert_eq!(v, expect, "N={n} d={d}");
        }
    }
}

#[test]
fn two_point_closed_forms() {
    for n in 1..=3u32 {
        let h = n + 1;
        for m1 in 0..=10u32 {
            for m2 in 0..=10u32 {
                let key = InvariantKey::stationary(n, 0, &[m1, m2]);
                let expect = if (m1 + m2) % h == 0 {
                    let d = 1 + (m1 + m2) / h;
                    (c_factor(h, m1) * c_factor(h, m2) * rat(d as i64)).recip()
                } else {
                    rat(0)
                };
                assert_eq!(engine().rational(&key).unwrap(), expect);
            }
            for k in 0..=n {
                let key = InvariantKey::from_pairs(n, 0, &[(m1, n), (0, k)]);
                let expect = if (m1 + k + 1) % h == 0 {
                    c_factor(h, m1 + 1).recip()
                } else {
                    rat(0)
                };
                assert_eq!(engine().rational(&key).unwrap(), expect, "N={n} m={m1} k={k}");
            }
        }
    }
}

#[test]
fn three_point_stationary_table_row() {
    for n in 1..=2u32 {
        let h = n + 1;
        for m in [[0u32, 0, 0], [1, 2, 3], [4, 4, 1], [5, 0, 7]] {
            let key = InvariantKey::stationary(n, 0, &m);
            let v = engine().rational(&key).unwrap();
            if degree_of(&key).is_some() {
                let c: Rat = m.iter().map(|&x| c_factor(h, x)).product();
                assert_eq!(v * c, rat(1), "N={n} m={m:?}");
            } else {
                assert_eq!(v, rat(0));
            }
        }
    }
}

#[test]
fn trr0_expansion_sums_to_value() {
    let e = Engine::new();
    let keys = [
        InvariantKey::from_pairs(1, 0, &[(1, 1), (0, 1), (0, 1)]),
        InvariantKey::from_pairs(2, 0, &[(2, 2), (0, 2), (0, 2)]),
        InvariantKey::from_pairs(2, 0, &[(3, 2), (1, 2), (0, 2), (0, 1)]),
        InvariantKey::from_pairs(1, 0, &[(4, 1), (2, 1), (1, 1), (0, 0), (0, 1)]),
    ];
    for key in keys {
        let terms = e.trr0_expand(&key, gwquasi::engine::pivot_index(&key)).unwrap();
        let mut acc = rat(0);
        for t in &terms {
            assert!(degree_of(&t.left).is_some() && degree_of(&t.right).is_some());
            acc += &t.coeff * e.rational(&t.left).unwrap() * e.rational(&t.right).unwrap();
        }
        assert_eq!(acc, e.rational(&key).unwrap(), "{key}");
    }
    let first = InvariantKey::from_pairs(1, 0, &[(1, 1), (0, 1), (0, 1)]);
    assert!(matches!(e.trr0_expand(&first, 0), Err(Error::PivotZeroLevel)));
}

#[test]
fn genus_one_rules_agree() {
    // the genus-1 TRR used by dispatch against the general genus-g TRR at g = 1
    let e = Engine::new();
    for n in 1..=2u32 {
        for ms in [vec![2u32], vec![4], vec![5], vec![2, 3], vec![3, 3], vec![4, 2]] {
            let key = InvariantKey::stationary(n, 1, &ms);
            let via_rule = e.invariant(&key).unwrap();
            let terms = e.trrg_expand(&key, gwquasi::engine::pivot_index(&key)).unwrap();
            let mut acc = SymRat::zero();
            for t in &terms {
                acc += &e.invariant(&t.higher).unwrap().try_mul(&t.bracket).unwrap().scale(&t.coeff);
            }
            assert_eq!(acc, via_rule, "{key}");
        }
    }
}

#[test]
fn trrg_threshold_and_precedence() {
    let e = Engine::new();
    let k = InvariantKey::stationary(1, 1, &[2]);
    assert_eq!(e.rule_for(&k), Rule::Genus1Trr);
    let k = InvariantKey::stationary(1, 2, &[4]);
    assert!(matches!(
        e.trrg_expand(&k, 0),
        Err(Error::PivotBelowThreshold { m: 4, threshold: 5 })
    ));
    let k = InvariantKey::stationary(1, 2, &[8]);
    assert_eq!(e.rule_for(&k), Rule::TrrG);
    let v = e.invariant(&k).unwrap();
    assert!(!v.is_zero());
}

#[test]
fn beta_bracket_routes_agree() {
    let e = Engine::new();
    let extras_sets: Vec<Vec<Insertion>> = vec![
        vec![],
        vec![Insertion::new(1, 1)],
        vec![Insertion::new(0, 1), Insertion::new(2, 1)],
    ];
    for n in 1..=2u32 {
        for beta in 0..=4u32 {
            for j in 0..=n {
                for pm in 0..=3u32 {
                    for pk in [0, n] {
                        for extras in &extras_sets {
                            let extras: Vec<Insertion> = extras
                                .iter()
                                .map(|i| Insertion::new(i.m, i.k.min(n)))
                                .collect();
                            let pivot = Insertion::new(pm, pk);
                            let a = e.bracket_by_chains(n, j, pivot, &extras, beta).unwrap();
                            let b = e.bracket_by_recursion(n, j, pivot, &extras, beta).unwrap();
                            assert_eq!(a, b, "N={n} j={j} pivot={pivot} beta={beta} {extras:?}");
                        }
                    }
                }
            }
        }
    }
    // β = 0 reduces to the plain two-point bracket
    let p = Insertion::new(3, 1);
    let plain = e.rational(&InvariantKey::from_pairs(1, 0, &[(0, 0), (3, 1)])).unwrap();
    assert_eq!(e.beta_bracket(1, 1, p, &[], 0).unwrap(), plain);
    assert!(e.beta_bracket(1, 1, p, &[], -1).is_err());
}

#[test]
fn genus_zero_is_atom_free_genus_one_is_linear() {
    let e = engine();
    for ms in [vec![3u32, 4, 5], vec![2, 2, 2, 2], vec![9]] {
        assert!(e.invariant(&InvariantKey::stationary(2, 0, &ms)).unwrap().is_rational());
    }
    let v = e.invariant(&InvariantKey::stationary(1, 1, &[4])).unwrap();
    assert_eq!(v.atoms().len(), 1);
    assert_eq!(v.atom_coeff("gw[N=1;g=1;ins=(0,1)]"), c_factor(2, 4).recip());
}

#[test]
fn genus_one_p1_one_point_with_known_atom() {
    // ⟨τ_{2d}(pt)⟩_{1,d} · c_2(2d) = d/12 + ⟨τ_0(pt)⟩_1, ⟨τ_0(pt)⟩_1 = -1/24
    let e = engine();
    let mut sigma = std::collections::HashMap::new();
    sigma.insert("gw[N=1;g=1;ins=(0,1)]".to_string(), frac(-1, 24));
    for d in 1..=6u32 {
        let m = 2 * d;
        let v = e.invariant(&InvariantKey::stationary(1, 1, &[m])).unwrap();
        let p = v.resolve(&sigma).unwrap() * c_factor(2, m);
        assert_eq!(p, frac(d as i64, 12) - frac(1, 24));
    }
    // ⟨τ_2(pt)⟩_{1,1} = 1/24 for P^1
    let v = e.invariant(&InvariantKey::stationary(1, 1, &[2])).unwrap();
    assert_eq!(v.resolve(&sigma).unwrap(), frac(1, 24));
}

#[test]
fn cache_round_trip_and_conflict() {
    let e = Engine::new();
    e.invariant(&InvariantKey::stationary(2, 1, &[4, 3])).unwrap();
    let mut buf = Vec::new();
    let n = e.export_cache(&mut buf).unwrap();
    assert!(n > 3);
    let fresh = Engine::new();
    assert_eq!(fresh.import_cache(&buf[..]).unwrap(), n);
    assert_eq!(fresh.cache_len(), n);
    let bad = "{\"key\":\"gw[N=1;g=0;ins=(0,1)]\",\"value\":{\"scalar\":\"2\",\"atoms\":{}}}\n";
    fresh.invariant(&InvariantKey::from_pairs(1, 0, &[(0, 1)])).unwrap();
    assert!(fresh.import_cache(bad.as_bytes()).is_err());
    assert!(fresh.import_cache("not json\n".as_bytes()).is_err());
}

fn arb_key() -> impl Strategy<Value = InvariantKey> {
    (1u32..=2, 0u32..=1, proptest::collection::vec((0u32..=5, 0u32..=2), 1..=4)).prop_map(
        |(n, g, pairs)| {
            let pairs: Vec<(u32, u32)> = pairs.into_iter().map(|(m, k)| (m, k.min(n))).collect();
            InvariantKey::from_pairs(n, g, &pairs)
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn permutation_invariant(key in arb_key(), seed in 0usize..24) {
        let mut ins = key.insertions().to_vec();
        let len = ins.len();
        ins.rotate_left(seed % len);
        if len > 1 { ins.swap(0, len - 1); }
        let shuffled = InvariantKey::new(key.n_target, key.g, ins);
        prop_assert_eq!(&shuffled, &key);
        prop_assert_eq!(engine().invariant(&shuffled).unwrap(), engine().invariant(&key).unwrap());
    }

    #[test]
    fn string_equation_post_hoc(key in arb_key()) {
        prop_assume!(key.is_stable());
        let lhs = engine().invariant(&key.with(Insertion::new(0, 0))).unwrap();
        let mut rhs = SymRat::zero();
        for (i, ins) in key.insertions().iter().enumerate() {
            if ins.m > 0 {
                rhs += &engine().invariant(&key.replaced(i, Insertion::new(ins.m - 1, ins.k))).unwrap();
            }
        }
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn divisor_equation_post_hoc(key in arb_key()) {
        prop_assume!(key.is_stable());
        let with = key.with(Insertion::new(0, 1));
        let Some(d) = degree_of(&with) else { return Ok(()); };
        let lhs = engine().invariant(&with).unwrap();
        let mut rhs = engine().invariant(&key).unwrap().scale(&Rat::from_integer(BigInt::from(d)));
        for (i, ins) in key.insertions().iter().enumerate() {
            if ins.m > 0 && ins.k < key.n_target {
                rhs += &engine().invariant(&key.replaced(i, Insertion::new(ins.m - 1, ins.k + 1))).unwrap();
            }
        }
        prop_assert_eq!(lhs, rhs);
    }
}
