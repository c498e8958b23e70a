use std::cmp::Ordering;
use std::collections::BTreeMap;

use proptest::prelude::*;
use rees_core::{Field, Monomial, MonomialOrder, PolyRing, Polynomial, PrimeField, Rationals, RingRef};

const P: u64 = 32003;

fn ring() -> RingRef<PrimeField> {
    PolyRing::new(2, 3, PrimeField::new(P).unwrap()).unwrap()
}

type RawTerms = Vec<(Vec<u32>, i64)>;

fn raw_terms() -> impl Strategy<Value = RawTerms> {
    prop::collection::vec((prop::collection::vec(0u32..4, 5), -20i64..20), 0..8)
}

fn build(ring: &RingRef<PrimeField>, raw: &RawTerms) -> Polynomial<PrimeField> {
    let terms = raw
        .iter()
        .map(|(e, c)| (Monomial::from_exponents(e).unwrap(), ring.field().from_i64(*c)))
        .collect();
    Polynomial::from_terms(ring, terms)
}

/// Coefficient table keyed by exponent vector, zero entries dropped.
fn table(raw: &RawTerms) -> BTreeMap<Vec<u32>, u64> {
    let mut out: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
    for (e, c) in raw {
        let entry = out.entry(e.clone()).or_default();
        *entry = (*entry + c.rem_euclid(P as i64) as u64) % P;
    }
    out.retain(|_, c| *c != 0);
    out
}

fn table_of(f: &Polynomial<PrimeField>) -> BTreeMap<Vec<u32>, u64> {
    f.terms()
        .iter()
        .map(|(m, c)| (m.exponents()[..5].iter().map(|&e| u32::from(e)).collect(), *c))
        .collect()
}

fn monomial() -> impl Strategy<Value = Monomial> {
    prop::collection::vec(0u32..5, 7).prop_map(|e| Monomial::from_exponents(&e).unwrap())
}

fn orders() -> impl Strategy<Value = MonomialOrder> {
    prop_oneof![
        Just(MonomialOrder::DegRevLex),
        Just(MonomialOrder::Lex),
        (1u32..127).prop_map(|first_block| MonomialOrder::BlockElim { first_block }),
    ]
}

proptest! {
    #[test]
    fn terms_are_strictly_decreasing_and_nonzero(raw in raw_terms()) {
        let r = ring();
        let f = build(&r, &raw);
        for pair in f.terms().windows(2) {
            prop_assert_eq!(MonomialOrder::DegRevLex.cmp(&pair[0].0, &pair[1].0), Ordering::Greater);
        }
        prop_assert!(f.terms().iter().all(|(_, c)| *c != 0));
        prop_assert_eq!(table_of(&f), table(&raw));
    }

    #[test]
    fn display_and_compact_forms_parse_back(raw in raw_terms()) {
        let r = ring();
        let f = build(&r, &raw);
        prop_assert_eq!(Polynomial::parse(&f.to_string(), &r).unwrap(), f.clone());
        prop_assert_eq!(Polynomial::parse(&f.to_compact_string(), &r).unwrap(), f);
    }

    #[test]
    fn product_matches_convolution(a in raw_terms(), b in raw_terms()) {
        let r = ring();
        let product = &build(&r, &a) * &build(&r, &b);
        let mut expected: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
        for (ea, ca) in table(&a) {
            for (eb, cb) in table(&b) {
                let e: Vec<u32> = ea.iter().zip(&eb).map(|(x, y)| x + y).collect();
                let entry = expected.entry(e).or_default();
                *entry = (*entry + ca * cb) % P;
            }
        }
        expected.retain(|_, c| *c != 0);
        prop_assert_eq!(table_of(&product), expected);
    }

    #[test]
    fn ring_axioms(a in raw_terms(), b in raw_terms(), c in raw_terms()) {
        let r = ring();
        let (f, g, h) = (build(&r, &a), build(&r, &b), build(&r, &c));
        prop_assert_eq!(&f * &g, &g * &f);
        prop_assert_eq!(&(&f + &g) * &h, &(&f * &h) + &(&g * &h));
        prop_assert!((&f - &f).is_zero());
        prop_assert_eq!(&(&f * &g) * &h, &f * &(&g * &h));
    }

    #[test]
    fn bidegree_is_additive(ex in prop::collection::vec(0u32..4, 5), ey in prop::collection::vec(0u32..4, 5)) {
        let r = ring();
        let a = Monomial::from_exponents(&ex).unwrap();
        let b = Monomial::from_exponents(&ey).unwrap();
        let (ax, at) = r.bidegree_of(&a);
        let (bx, bt) = r.bidegree_of(&b);
        prop_assert_eq!(r.bidegree_of(&a.mul(&b)), (ax + bx, at + bt));
        prop_assert_eq!(ax, ex[..2].iter().sum::<u32>());
    }

    #[test]
    fn orders_are_total_and_multiplicative(order in orders(), a in monomial(), b in monomial(), c in monomial()) {
        let ab = order.cmp(&a, &b);
        prop_assert_eq!(order.cmp(&b, &a), ab.reverse());
        prop_assert_eq!(ab == Ordering::Equal, a == b);
        prop_assert_eq!(order.cmp(&a.mul(&c), &b.mul(&c)), ab);
        prop_assert_ne!(order.cmp(&a.mul(&c), &a), Ordering::Less);
        if ab != Ordering::Greater && order.cmp(&b, &c) != Ordering::Greater {
            prop_assert_ne!(order.cmp(&a, &c), Ordering::Greater);
        }
    }

    #[test]
    fn sort_key_agrees_with_order(order in orders(), a in monomial(), b in monomial()) {
        prop_assert_eq!(order.sort_key(&a).cmp(&order.sort_key(&b)), order.cmp(&a, &b));
    }

    #[test]
    fn divisibility_and_lcm(a in monomial(), b in monomial()) {
        let l = a.lcm(&b);
        prop_assert!(a.divides(&l) && b.divides(&l));
        prop_assert_eq!(a.quotient_of(&l).map(|q| q.mul(&a)), Some(l));
        prop_assert_eq!(a.is_coprime(&b), l == a.mul(&b));
    }
}

#[test]
fn rational_coefficients_round_trip() {
    let r = PolyRing::new(2, 2, Rationals).unwrap();
    let f = Polynomial::parse("1/2*x1^2 - 3/4*x2*T1 + 7", &r).unwrap();
    assert_eq!(f.to_compact_string(), "1/2*x1^2-3/4*x2*T1+7");
    assert_eq!(Polynomial::parse(&f.to_string(), &r).unwrap(), f);
}

#[test]
fn fractions_rejected_over_prime_field() {
    assert!(Polynomial::parse("1/2*x1", &ring()).is_err());
}

#[test]
fn unknown_variables_rejected() {
    assert!(Polynomial::parse("x3", &ring()).is_err());
    assert!(Polynomial::parse("T4", &ring()).is_err());
    assert!(Polynomial::parse("x1+", &ring()).is_err());
}
