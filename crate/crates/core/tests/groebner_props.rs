use proptest::prelude::*;
use rees_core::groebner::monomial_ideal_dimension;
use rees_core::{Field, Ideal, Monomial, MonomialOrder, PolyRing, Polynomial, PrimeField, RingRef};

const P: u64 = 32003;

fn ring() -> RingRef<PrimeField> {
    PolyRing::new(2, 2, PrimeField::new(P).unwrap()).unwrap()
}

/// Homogeneous polynomials of degree 2 in the four variables.
fn quadric() -> impl Strategy<Value = Vec<(usize, usize, i64)>> {
    prop::collection::vec((0usize..4, 0usize..4, -5i64..6), 1..4)
}

fn build(r: &RingRef<PrimeField>, raw: &[(usize, usize, i64)]) -> Polynomial<PrimeField> {
    raw.iter().fold(Polynomial::zero(r), |acc, &(i, j, c)| {
        let term = &(&Polynomial::var(r, i) * &Polynomial::var(r, j)) * &Polynomial::constant(r, r.field().from_i64(c));
        &acc + &term
    })
}

fn ideal_of(r: &RingRef<PrimeField>, gens: &[Vec<(usize, usize, i64)>]) -> Ideal<PrimeField> {
    Ideal::new(r, gens.iter().map(|g| build(r, g)).collect()).unwrap()
}

fn generators() -> impl Strategy<Value = Vec<Vec<(usize, usize, i64)>>> {
    prop::collection::vec(quadric(), 1..4)
}

fn dense(r: &RingRef<PrimeField>, coeffs: &[i64], degree: u32) -> Polynomial<PrimeField> {
    let mut monos = Vec::new();
    for a in 0..=degree {
        for b in 0..=degree - a {
            for c in 0..=degree - a - b {
                monos.push(Monomial::from_exponents(&[a, b, c, degree - a - b - c]).unwrap());
            }
        }
    }
    let terms = monos
        .into_iter()
        .zip(coeffs.iter().cycle())
        .map(|(m, &c)| (m, r.field().from_i64(c)))
        .collect();
    Polynomial::from_terms(r, terms)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn basis_generates_and_is_reduced(gens in generators()) {
        let r = ring();
        let ideal = ideal_of(&r, &gens);
        let gb = ideal.groebner_basis(MonomialOrder::DegRevLex).unwrap();
        prop_assert!(gb.is_certified());
        for g in ideal.generators() {
            prop_assert!(gb.normal_form(g).is_zero());
        }
        let leads = gb.leading_monomials();
        for (k, p) in gb.polynomials().iter().enumerate() {
            prop_assert!(ideal.contains(p).unwrap());
            for (mono, _) in p.terms() {
                for (j, lead) in leads.iter().enumerate() {
                    prop_assert!(j == k || !lead.divides(mono));
                }
            }
        }
    }

    #[test]
    fn normal_form_is_a_linear_remainder(gens in generators(), a in prop::collection::vec(-9i64..10, 1..40), b in prop::collection::vec(-9i64..10, 1..40)) {
        // degree 5 in four variables has 56 monomials, which exercises long reductions
        let r = ring();
        let ideal = ideal_of(&r, &gens);
        let gb = ideal.groebner_basis(MonomialOrder::DegRevLex).unwrap();
        let f = dense(&r, &a, 5);
        let g = dense(&r, &b, 5);
        let nf = gb.normal_form(&f);
        prop_assert!(ideal.contains(&(&f - &nf)).unwrap());
        for (mono, _) in nf.terms() {
            prop_assert!(gb.leading_monomials().iter().all(|l| !l.divides(mono)));
        }
        prop_assert_eq!(gb.normal_form(&(&f + &g)), &nf + &gb.normal_form(&g));
    }

    #[test]
    fn colon_brackets_the_ideal(gens in generators(), f in quadric()) {
        let r = ring();
        let ideal = ideal_of(&r, &gens);
        let f = build(&r, &f);
        prop_assume!(!f.is_zero());
        let colon = ideal.colon_poly(&f).unwrap();
        prop_assert!(colon.contains_ideal(&ideal).unwrap());
        for q in colon.generators() {
            prop_assert!(ideal.contains(&(q * &f)).unwrap());
        }
    }

    #[test]
    fn intersection_lies_between_product_and_factors(a in generators(), b in generators()) {
        let r = ring();
        let (i, j) = (ideal_of(&r, &a), ideal_of(&r, &b));
        let meet = i.intersect(&j).unwrap();
        prop_assert!(i.contains_ideal(&meet).unwrap());
        prop_assert!(j.contains_ideal(&meet).unwrap());
        prop_assert!(meet.contains_ideal(&i.product(&j).unwrap()).unwrap());
    }

    #[test]
    fn x_intersection_matches_generic_route(gens in prop::collection::vec((0usize..4, 0usize..4, -5i64..6), 1..3), pure in prop::collection::vec((2usize..4, 2usize..4, -5i64..6), 1..3)) {
        // one mixed generator and one pure-T generator, both bihomogeneous
        let r = ring();
        let mixed = gens.iter().fold(Polynomial::zero(&r), |acc, &(i, j, c)| {
            let t = &(&Polynomial::var(&r, i % 2) * &Polynomial::var(&r, 2 + j % 2)) * &Polynomial::constant(&r, r.field().from_i64(c));
            &acc + &t
        });
        let ideal = Ideal::new(&r, vec![mixed, build(&r, &pure)]).unwrap();
        let fast = ideal.intersect_x_ideal().unwrap();
        let slow = ideal.intersect(&Ideal::x_ideal(&r)).unwrap();
        prop_assert!(fast.equals(&slow).unwrap());
    }

    #[test]
    fn linear_ideal_height_is_rank(rows in prop::collection::vec(prop::collection::vec(-3i64..4, 4), 1..5)) {
        let r = ring();
        let gens: Vec<_> = rows.iter().map(|row| {
            row.iter().enumerate().fold(Polynomial::zero(&r), |acc, (v, &c)| {
                &acc + &(&Polynomial::var(&r, v) * &Polynomial::constant(&r, r.field().from_i64(c)))
            })
        }).collect();
        prop_assume!(gens.iter().any(|g| !g.is_zero()));
        let ideal = Ideal::new(&r, gens).unwrap();
        prop_assert_eq!(ideal.krull_height().unwrap(), rank_mod_p(&rows));
    }

    #[test]
    fn monomial_dimension_matches_brute_force(gens in prop::collection::vec(prop::collection::vec(0u32..3, 6), 1..6)) {
        let monos: Vec<_> = gens.iter().map(|e| Monomial::from_exponents(e).unwrap()).collect();
        let supports: Vec<u32> = monos.iter().map(|m| m.support()).collect();
        let brute = (0u32..64)
            .filter(|s| supports.iter().all(|g| g & !s != 0))
            .map(|s| s.count_ones() as usize)
            .max()
            .unwrap_or(0);
        prop_assert_eq!(monomial_ideal_dimension(&monos, 6), brute);
    }
}

fn rank_mod_p(rows: &[Vec<i64>]) -> usize {
    let p = P as i64;
    let mut m: Vec<Vec<i64>> = rows.iter().map(|r| r.iter().map(|c| c.rem_euclid(p)).collect()).collect();
    let inverse = |a: i64| {
        let (mut base, mut e, mut acc) = (a, p - 2, 1i64);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        acc
    };
    let mut rank = 0;
    for col in 0..4 {
        let Some(pivot) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = inverse(m[rank][col]);
        for r in 0..m.len() {
            if r != rank && m[r][col] != 0 {
                let factor = m[r][col] * inv % p;
                for c in 0..4 {
                    m[r][c] = (m[r][c] - factor * m[rank][c]).rem_euclid(p);
                }
            }
        }
        rank += 1;
    }
    rank
}

#[test]
fn unit_ideal_has_no_height() {
    let r = ring();
    let ideal = Ideal::new(&r, vec![Polynomial::one(&r)]).unwrap();
    assert!(ideal.krull_height().is_err());
    assert!(!ideal.is_proper().unwrap());
}

#[test]
fn saturation_strips_the_x_factor() {
    // (x1*T1 - x2*T2) * (x1, x2) saturates back to the principal ideal
    let r = ring();
    let f = Polynomial::parse("x1*T1 - x2*T2", &r).unwrap();
    let m = Ideal::x_ideal(&r);
    let i = Ideal::new(&r, vec![f.clone()]).unwrap().product(&m).unwrap();
    let (sat, steps) = i.saturate(&m).unwrap();
    assert_eq!(steps, 1);
    assert!(sat.equals(&Ideal::new(&r, vec![f]).unwrap()).unwrap());
}
