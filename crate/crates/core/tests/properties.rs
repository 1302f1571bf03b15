mod common;

use std::sync::OnceLock;

use proptest::prelude::*;

use omf5::form::{self, Place};
use omf5::mat5::{self, Mat5};
use omf5::neighbours::{ClassIndex, GenusData};
use omf5::poly::ZPoly;

fn genus_61() -> &'static (GenusData, ClassIndex) {
    static G: OnceLock<(GenusData, ClassIndex)> = OnceLock::new();
    G.get_or_init(|| {
        let g = common::genus(61, 1);
        let idx = ClassIndex::from_classes(&g.classes);
        (g, idx)
    })
}

#[test]
fn hilbert_reciprocity() {
    common::hilbert_reciprocity(1000).unwrap();
}

#[test]
fn hw_eichler_on_seeds() {
    common::hw_eichler_seeds().unwrap();
}

#[test]
fn neighbour_counts() {
    common::neighbour_counts().unwrap();
}

#[test]
fn hecke_operators_commute_on_61() {
    common::commutation_61().unwrap();
}

#[test]
fn mass_independent_of_traversal_prime() {
    common::mass_two_primes().unwrap();
}

#[test]
fn genus_independent_of_base_point() {
    common::base_point_independence().unwrap();
}

#[test]
fn classes_share_local_invariants() {
    common::classes_share_invariants().unwrap();
}

/// Product of elementary matrices: a random element of GL₅(ℤ).
fn unimodular() -> impl Strategy<Value = Mat5> {
    prop::collection::vec((0usize..5, 0usize..5, -2i64..=2, any::<bool>()), 1..12).prop_map(|ops| {
        let mut g = mat5::IDENTITY;
        for (i, j, c, flip) in ops {
            let mut e = mat5::IDENTITY;
            if i != j {
                e[i][j] = c;
            } else if flip {
                e[i][i] = -1;
            }
            g = mat5::mul(&g, &e);
        }
        g
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn change_of_basis_keeps_class_and_invariants(k in 0usize..8, g in unimodular()) {
        let (genus, index) = genus_61();
        let q = &genus.classes[k];
        let r = q.transform(&g).unwrap();
        prop_assert_eq!(r.det(), q.det());
        for p in [2u64, 61] {
            prop_assert_eq!(form::hasse_witt(&r, Place::Finite(p)), form::hasse_witt(q, Place::Finite(p)));
        }
        prop_assert_eq!(form::eichler_invariant(&r, 61), form::eichler_invariant(q, 61));
        let (j, phi) = index.locate_any(&r).expect("located");
        prop_assert_eq!(j, k);
        prop_assert_eq!(&mat5::congruence(genus.classes[j].hessian(), &phi), r.hessian());
    }

    #[test]
    fn poly_shift_is_composition(c in prop::collection::vec(-20i64..=20, 1..7), s in -5i64..=5, x in -7i64..=7) {
        let f = ZPoly::from_i64(&c);
        let (s, x) = (num_bigint::BigInt::from(s), num_bigint::BigInt::from(x));
        prop_assert_eq!(f.shift(&s).eval(&x), f.eval(&(&x + &s)));
    }

    #[test]
    fn radical_generator_is_radical(k in 0usize..8, g in unimodular()) {
        let (genus, _) = genus_61();
        let q = genus.classes[k].transform(&g).unwrap();
        let rg = form::radical_generator(&q, 61).unwrap();
        let m = 122i64;
        let v = rg.vector;
        prop_assert!(v.iter().any(|x| x.rem_euclid(61) != 0));
        for e in 0..5 {
            let mut u = [0i64; 5];
            u[e] = 1;
            prop_assert_eq!(q.inner(&v, &u).rem_euclid(m), 0);
        }
    }
}
