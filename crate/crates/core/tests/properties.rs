//! Randomized invariants: exact arithmetic, the tuple order, synthetic
//! pre-canonical structures and KLR relations.

use std::cmp::Ordering;

use canon_core::cartan::{tuple_compare, tuple_partial_cmp, CartanDatum, WordTuple};
use canon_core::klr::{verify_relations, ActionMode, PolyRep, QijChoice};
use canon_core::precanon::{audit, canonical_triangular, dual_bases, uniqueness_stress, Mode, PrecanonicalStructure};
use canon_core::{LMat, Laurent, Ratio};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn laurent() -> impl Strategy<Value = Laurent> {
    prop::collection::vec((-4i64..=4, -3i64..=3), 0..5).prop_map(|ts| Laurent::from_int_terms(&ts))
}

fn nonzero() -> impl Strategy<Value = Laurent> {
    laurent().prop_filter("nonzero", |x| !x.is_zero())
}

/// Entries of `q⁻¹ℤ≥0[q⁻¹]`.
fn neg_part() -> impl Strategy<Value = Laurent> {
    prop::collection::vec((-3i64..=-1, 0i64..=2), 0..3).prop_map(|ts| Laurent::from_int_terms(&ts))
}

fn tuple(len: usize) -> impl Strategy<Value = WordTuple> {
    prop::collection::vec(prop::collection::vec(0u32..3, 0..3), len).prop_map(WordTuple::new)
}

/// A structure whose canonical basis is known by construction: pick the
/// transition `M` (unitriangular over a chain, entries in `q⁻¹ℤ[q⁻¹]`) and
/// make it orthonormal, so `R = M·bar(M)⁻¹` and `G = bar(M⁻¹)ᵀ·M⁻¹`.
fn planted(n: usize, entries: Vec<Laurent>) -> (PrecanonicalStructure, LMat) {
    let mut m = LMat::identity(n);
    let mut it = entries.into_iter();
    for c in 0..n {
        for r in 0..c {
            m.set(r, c, it.next().unwrap_or_else(Laurent::zero));
        }
    }
    let minv = m.inverse_laurent().unwrap();
    let r = m.mul(&m.bar().inverse_laurent().unwrap()).unwrap();
    let g = minv.bar().transpose().mul(&minv).unwrap();
    let less = (0..n).map(|a| (0..n).map(|b| a < b).collect()).collect();
    let p = PrecanonicalStructure::new((0..n).map(|c| format!("a{c}")).collect(), less, r, g).unwrap();
    (p, m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn laurent_ring_laws(a in laurent(), b in laurent(), c in laurent()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!((&a * &b).bar(), &a.bar() * &b.bar());
        prop_assert_eq!((&a * &b).eval_one(), a.eval_one() * b.eval_one());
    }

    #[test]
    fn ratio_field_laws(a in nonzero(), b in nonzero(), c in laurent()) {
        let x = Ratio::new(c.clone(), a.clone()).unwrap();
        let y = Ratio::new(a.clone(), b.clone()).unwrap();
        prop_assert_eq!(&(&x * &y) * &y.inv().unwrap(), x.clone());
        prop_assert_eq!(&(&x + &y) - &y, x.clone());
        prop_assert_eq!((&x * &y).bar(), &x.bar() * &y.bar());
        // c/a · a = c
        prop_assert_eq!((&x * &Ratio::from_poly(a)).as_poly(), Some(c));
    }

    #[test]
    fn tuple_order_is_a_partial_order_refined_by_the_total_order(a in tuple(3), b in tuple(3), c in tuple(3)) {
        let ab = tuple_partial_cmp(&a, &b).unwrap();
        prop_assert_eq!(ab.map(Ordering::reverse), tuple_partial_cmp(&b, &a).unwrap());
        prop_assert_eq!(ab == Some(Ordering::Equal), a == b);
        if ab == Some(Ordering::Greater) && tuple_partial_cmp(&b, &c).unwrap() == Some(Ordering::Greater) {
            prop_assert_eq!(tuple_partial_cmp(&a, &c).unwrap(), Some(Ordering::Greater));
        }
        let t = tuple_compare(&a, &b).unwrap();
        if let Some(o) = ab {
            prop_assert_eq!(o, t);
        }
        prop_assert_eq!(t.reverse(), tuple_compare(&b, &a).unwrap());
        if t == Ordering::Greater && tuple_compare(&b, &c).unwrap() == Ordering::Greater {
            prop_assert_eq!(tuple_compare(&a, &c).unwrap(), Ordering::Greater);
        }
    }

    #[test]
    fn planted_canonical_basis_is_recovered(n in 1usize..=5, entries in prop::collection::vec(neg_part(), 10), seed in any::<u64>()) {
        let (p, m) = planted(n, entries);
        prop_assert!(p.bar_is_involution());
        let b = canonical_triangular(&p).unwrap();
        prop_assert_eq!(&b.transition, &m);
        prop_assert!(audit(&p, &b.transition).passes(Mode::Triangular));
        prop_assert!(dual_bases(&p, &b).unwrap().identity_holds);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assert!(uniqueness_stress(&p, Mode::Triangular, 3, &mut rng).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn klr_relations_hold_for_any_seed(seed in any::<u64>(), generic in any::<bool>()) {
        let mode = if generic { ActionMode::Generic } else { ActionMode::Factored };
        for d in [CartanDatum::a1(), CartanDatum::a2()] {
            let rep = PolyRep::new(&d, QijChoice::geometric_default(&d).unwrap(), mode);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r = verify_relations(&rep, 3, &mut rng).unwrap();
            // A1 has no mixed-label relations to check
            prop_assert!(r.relations.values().all(|o| o.failed == 0), "{}: {:?}", d.name, r);
        }
    }
}
