use proptest::prelude::*;

use syzslope::bundle::{decompose, min_d_linear, Coverage, DThreshold};
use syzslope::{mu_max_bruteforce, mu_max_closure, Monomial, MonomialSet, Rational};

fn monomial(n: usize, max_exp: u32) -> impl Strategy<Value = Monomial> {
    prop::collection::vec(0..=max_exp, n + 1).prop_map(|e| Monomial::new(e).unwrap())
}

fn composition(n: usize, d: u32) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0..=n, d as usize).prop_map(move |picks| {
        let mut e = vec![0u32; n + 1];
        for p in picks {
            e[p] += 1;
        }
        e
    })
}

/// Uniform-degree sets with 2..=10 distinct generators.
fn uniform_set() -> impl Strategy<Value = MonomialSet> {
    (1usize..=3, 1u32..=8)
        .prop_flat_map(|(n, d)| {
            (
                Just(n),
                prop::collection::btree_set(composition(n, d), 2..=10),
            )
        })
        .prop_filter("need two generators", |(_, s)| s.len() >= 2)
        .prop_map(|(n, s)| {
            let monos = s.into_iter().map(|e| Monomial::new(e).unwrap()).collect();
            MonomialSet::new(n, monos).unwrap()
        })
}

/// Sets of mixed degree.
fn mixed_set() -> impl Strategy<Value = MonomialSet> {
    (1usize..=3)
        .prop_flat_map(|n| (Just(n), prop::collection::btree_set(monomial(n, 5), 2..=9)))
        .prop_filter("need two generators", |(_, s)| s.len() >= 2)
        .prop_map(|(n, s)| MonomialSet::new(n, s.into_iter().collect()).unwrap())
}

proptest! {
    #[test]
    fn gcd_is_a_meet(a in monomial(3, 6), b in monomial(3, 6), c in monomial(3, 6)) {
        let ab = a.gcd(&b).unwrap();
        prop_assert_eq!(&ab, &b.gcd(&a).unwrap());
        prop_assert_eq!(ab.gcd(&c).unwrap(), a.gcd(&b.gcd(&c).unwrap()).unwrap());
        prop_assert_eq!(a.gcd(&a).unwrap(), a.clone());
        prop_assert!(ab.divides(&a).unwrap() && ab.divides(&b).unwrap());
        if c.divides(&a).unwrap() && c.divides(&b).unwrap() {
            prop_assert!(c.divides(&ab).unwrap());
        }
        prop_assert!(ab.degree() <= a.degree().min(b.degree()));
    }

    #[test]
    fn divisibility_is_antisymmetric(a in monomial(2, 4), b in monomial(2, 4)) {
        if a.divides(&b).unwrap() && b.divides(&a).unwrap() {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn closure_matches_oracle(s in uniform_set()) {
        prop_assert_eq!(mu_max_closure(&s).unwrap(), mu_max_bruteforce(&s).unwrap());
    }

    #[test]
    fn closure_matches_oracle_mixed_degrees(s in mixed_set()) {
        let closure = mu_max_closure(&s).unwrap();
        let brute = mu_max_bruteforce(&s).unwrap();
        prop_assert_eq!(&closure.mu_max, &brute.mu_max);
        for (r, e) in &brute.per_size {
            prop_assert_eq!(&closure.per_size[r].value, &e.value);
        }
    }

    #[test]
    fn mu_max_ignores_variable_order(s in uniform_set(), seed in any::<u64>()) {
        let vars = s.n() + 1;
        let mut perm: Vec<usize> = (0..vars).collect();
        perm.rotate_left((seed as usize) % vars);
        if seed & 1 == 1 {
            perm.reverse();
        }
        let p = s.permuted(&perm).unwrap();
        let a = mu_max_closure(&s).unwrap();
        let b = mu_max_closure(&p).unwrap();
        prop_assert_eq!(&a.mu_max, &b.mu_max);
        prop_assert_eq!(a.per_rank_table(), b.per_rank_table());
    }

    #[test]
    fn scaling_exponents_scales_slopes(s in uniform_set(), t in 2u32..=4) {
        let scaled: Vec<Monomial> = s
            .monomials()
            .iter()
            .map(|m| Monomial::new(m.exponents().iter().map(|e| e * t).collect()).unwrap())
            .collect();
        let scaled = MonomialSet::new(s.n(), scaled).unwrap();
        let factor = Rational::from_int(i64::from(t));
        let base = mu_max_closure(&s).unwrap();
        let big = mu_max_closure(&scaled).unwrap();
        prop_assert_eq!(&big.mu_max, &(base.mu_max.clone() * factor.clone()));
        for ((r1, v1), (r2, v2)) in base.per_rank_table().into_iter().zip(big.per_rank_table()) {
            prop_assert_eq!(r1, r2);
            prop_assert_eq!(v2, v1 * factor.clone());
        }
    }

    #[test]
    fn json_round_trip_is_canonical(s in uniform_set()) {
        let back = MonomialSet::from_json(&s.to_json()).unwrap();
        prop_assert_eq!(&back, &s.canonical());
        prop_assert_eq!(back.to_json(), s.to_json());
        let text = MonomialSet::from_text(&s.to_text(), s.n()).unwrap();
        prop_assert_eq!(text.canonical(), s.canonical());
    }

    #[test]
    fn rational_text_round_trip(p in -10_000i64..10_000, q in 1i64..500) {
        let r = Rational::new(p, q);
        prop_assert_eq!(r.to_string().parse::<Rational>().unwrap(), r);
    }

    #[test]
    fn decomposition_identities(a in 2u64..400, b in 1u64..40, n in 2usize..=8) {
        prop_assume!(a > b);
        let (m, j, dec) = match decompose(a, b, n).unwrap() {
            Coverage::Covered(dec) => (dec.m, dec.j, Some(dec)),
            Coverage::NotCovered { m, j } => (m, j, None),
        };
        prop_assert_eq!(m * b - j, a);
        prop_assert!(j < b);
        if let Some(dec) = dec {
            if j > 0 {
                let (s, l) = (dec.s.unwrap(), dec.l.unwrap());
                prop_assert_eq!(s * j + l, b);
                prop_assert!(l < j);
            }
        }
    }

    #[test]
    fn linear_threshold_is_minimal(ap in -20i64..20, aq in 1i64..20, bp in -400i64..400, bq in 1i64..20) {
        let alpha = Rational::new(ap, aq);
        let beta = Rational::new(bp, bq);
        let at = |d: i64| alpha.clone() * Rational::from_int(d) + beta.clone();
        match min_d_linear(&alpha, &beta) {
            DThreshold::From(d0) => {
                let d0 = d0 as i64;
                prop_assert!(d0 >= 2);
                prop_assert!(at(d0).is_positive());
                prop_assert!(!at(d0 - 1).is_positive());
                prop_assert!(at(d0 + 1000).is_positive());
            }
            DThreshold::AllD => prop_assert!((1..50).all(|d| at(d).is_positive())),
            DThreshold::NoD => prop_assert!(!at(1_000_000).is_positive()),
        }
    }
}
