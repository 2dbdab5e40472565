//! Randomized structural properties: the Laurent ring, boundary mutation,
//! the six-vertex correspondence, and file/text roundtrips. Seeds are fixed
//! through proptest's default persistence-free deterministic RNG.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use proptest::test_runner::Config;
use tsys::{Boundary, LaurentPoly, Monomial, MutationDirection, VarId};

fn var_pool() -> Vec<VarId> {
    vec![
        VarId::atom(1, 1),
        VarId::atom(1, 2),
        VarId::atom(2, 1),
        VarId::named("b"),
        VarId::indexed("c", 0, 3),
    ]
}

fn arb_monomial() -> impl Strategy<Value = Monomial> {
    prop::collection::vec((0usize..5, -2i64..=2), 0..4).prop_map(|exps| {
        let pool = var_pool();
        let mut m = Monomial::unit();
        for (i, e) in exps {
            m = m.mul(&Monomial::var(pool[i].clone(), e));
        }
        m
    })
}

fn arb_poly() -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec((arb_monomial(), -5i64..=5), 0..5).prop_map(|terms| {
        let mut p = LaurentPoly::zero();
        for (m, c) in terms {
            p = p.add(&LaurentPoly::term(m, BigInt::from(c)));
        }
        p
    })
}

/// A positive rational point for every pool variable.
fn arb_assignment() -> impl Strategy<Value = BTreeMap<VarId, BigRational>> {
    prop::collection::vec((1i64..=7, 1i64..=7), var_pool().len()).prop_map(|vals| {
        var_pool()
            .into_iter()
            .zip(vals)
            .map(|(v, (n, d))| (v, BigRational::new(BigInt::from(n), BigInt::from(d))))
            .collect()
    })
}

/// A boundary reached from a staircase by a random mutation walk; mutation
/// attempts at non-extremal vertices are simply skipped.
fn arb_boundary() -> impl Strategy<Value = Boundary> {
    (
        1i32..=3,
        4i64..=8,
        prop::collection::vec((1i32..=3, 0i64..=8, prop::bool::ANY), 0..6),
    )
        .prop_map(|(rank, width, walk)| {
            let mut b = Boundary::basic_staircase(rank, 0, width);
            for (alpha, j, fwd) in walk {
                if alpha > rank || j > width {
                    continue;
                }
                let dir = if fwd { MutationDirection::Forward } else { MutationDirection::Backward };
                if let Ok((next, _)) = b.mutate(alpha, j, dir) {
                    b = next;
                }
            }
            b
        })
}

/// Window-insensitive comparison: mutating outside the stored window widens
/// it, so the involution is checked on heights and labels, not the struct.
fn same_surface(a: &Boundary, b: &Boundary) -> bool {
    let (alo, ahi) = a.window();
    let (blo, bhi) = b.window();
    let (lo, hi) = (alo.min(blo) - 2, ahi.max(bhi) + 2);
    a.rank() == b.rank()
        && (1..=a.rank()).all(|alpha| {
            (lo..=hi).all(|j| {
                a.height(alpha, j) == b.height(alpha, j) && a.label(alpha, j) == b.label(alpha, j)
            })
        })
}

proptest! {
    #![proptest_config(Config { cases: 64, ..Config::default() })]

    #[test]
    fn ring_axioms(p in arb_poly(), q in arb_poly(), s in arb_poly()) {
        prop_assert_eq!(p.add(&q).add(&s), p.add(&q.add(&s)));
        prop_assert_eq!(p.mul(&q), q.mul(&p));
        prop_assert_eq!(p.mul(&q.add(&s)), p.mul(&q).add(&p.mul(&s)));
        prop_assert_eq!(p.add(&p.neg()), LaurentPoly::zero());
        prop_assert_eq!(p.mul(&LaurentPoly::one()), p);
    }

    #[test]
    fn exact_division_inverts_multiplication(p in arb_poly(), q in arb_poly()) {
        prop_assume!(!q.is_zero());
        prop_assert_eq!(p.mul(&q).exact_div(&q).unwrap(), p);
    }

    #[test]
    fn evaluation_is_a_ring_map(p in arb_poly(), q in arb_poly(), at in arb_assignment()) {
        let ev = |x: &LaurentPoly| x.eval(&at).unwrap();
        prop_assert_eq!(ev(&p.add(&q)), ev(&p) + ev(&q));
        prop_assert_eq!(ev(&p.mul(&q)), ev(&p) * ev(&q));
    }

    #[test]
    fn display_parse_roundtrip(p in arb_poly()) {
        prop_assert_eq!(LaurentPoly::parse(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn mutation_is_an_involution(b in arb_boundary(), alpha in 1i32..=3, j in 0i64..=8) {
        prop_assume!(alpha <= b.rank());
        if let Ok((up, _)) = b.mutate(alpha, j, MutationDirection::Forward) {
            let (down, label) = up.mutate(alpha, j, MutationDirection::Backward).unwrap();
            prop_assert!(same_surface(&down, &b));
            prop_assert_eq!(label, b.label(alpha, j));
        }
        if let Ok((down, _)) = b.mutate(alpha, j, MutationDirection::Backward) {
            let (up, label) = down.mutate(alpha, j, MutationDirection::Forward).unwrap();
            prop_assert!(same_surface(&up, &b));
            prop_assert_eq!(label, b.label(alpha, j));
        }
    }

    #[test]
    fn six_vertex_rules_hold_on_mutated_boundaries(b in arb_boundary()) {
        let (lo, hi) = b.window();
        let view = b.to_six_vertex(lo - 2, hi + 2);
        prop_assert!(view.ice_rule_ok());
        prop_assert!(view.ampere_ok(&b));
        let rebuilt = view.heights_from_anchor(b.height(1, lo - 2)).unwrap();
        for alpha in 1..=b.rank() {
            for j in lo - 2..=hi + 2 {
                prop_assert_eq!(
                    rebuilt[(alpha - 1) as usize][(j - lo + 2) as usize],
                    b.height(alpha, j)
                );
            }
        }
    }

    #[test]
    fn boundary_file_roundtrip(b in arb_boundary()) {
        let text = b.to_file_string();
        let back = Boundary::from_file_str(&text).unwrap();
        prop_assert_eq!(&back, &b);
        // Serialization is canonical: a second pass is byte-identical.
        prop_assert_eq!(back.to_file_string(), text);
    }
}
