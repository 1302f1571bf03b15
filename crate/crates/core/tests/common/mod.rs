//! Shared setup and property checks for the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::Ratio;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use omf5::arith::prime_divisors;
use omf5::form::{self, hilbert_symbol, GenusDescriptor, Place, QuinaryForm};
use omf5::hecke::{build_space, hecke_matrix, HeckeKind};
use omf5::linalg::IntMatrix;
use omf5::neighbours::{self, enumerate_genus, verify_closure, ClassIndex, GenusData};

pub type Check = Result<String, String>;

pub fn seed(dm: u64, dp: u64) -> QuinaryForm {
    form::seed_search(&GenusDescriptor::new(dm, dp).unwrap(), 16).unwrap()
}

pub fn genus(dm: u64, dp: u64) -> GenusData {
    let s = seed(dm, dp);
    enumerate_genus(&s, neighbours::default_prime(&s)).unwrap()
}

/// Reduce a (saturated) integer basis mod ℓ entrywise.
pub fn basis_mod(basis: &[Vec<BigInt>], ell: u64) -> Vec<Vec<u64>> {
    let l = BigInt::from(ell);
    basis
        .iter()
        .map(|v| v.iter().map(|x| u64::try_from(((x % &l) + &l) % &l).unwrap()).collect())
        .collect()
}

pub fn ensure_eq<T: PartialEq + std::fmt::Debug>(got: T, want: T, what: &str) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: got {got:?}, want {want:?}"))
    }
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

// ---------------------------------------------------------------- property checks

fn rat() -> impl Strategy<Value = Ratio<i128>> {
    (prop_oneof![-1_000_000i128..=-1, 1i128..=1_000_000], 1i128..=10_000).prop_map(|(n, d)| Ratio::new(n, d))
}

/// ∏_v (a,b)_v = 1 over all places.
pub fn hilbert_reciprocity(cases: u32) -> Check {
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    runner
        .run(&(rat(), rat()), |(a, b)| {
            let mut primes = vec![2u64];
            for x in [a.numer(), a.denom(), b.numer(), b.denom()] {
                primes.extend(prime_divisors(x.unsigned_abs() as u64));
            }
            primes.sort_unstable();
            primes.dedup();
            let mut prod = hilbert_symbol(&a, &b, Place::Infinity).unwrap();
            for p in primes {
                prod *= hilbert_symbol(&a, &b, Place::Finite(p)).unwrap();
            }
            prop_assert_eq!(prod, 1, "({}, {})", a, b);
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(format!("{cases} random pairs"))
}

pub const HW_EICHLER_DESCRIPTORS: &[(u64, u64)] = &[(5, 1), (13, 1), (19, 1), (61, 1), (89, 1), (13, 19), (19, 13)];

/// HW_p = e_p^{v_p(D)} at every p | D, the prescribed HW pattern, and det = 2D on every seed.
pub fn hw_eichler_seeds() -> Check {
    for &(dm, dp) in HW_EICHLER_DESCRIPTORS {
        let q = seed(dm, dp);
        let d = dm * dp;
        ensure(q.det() == 2 * d as i64, format!("det of seed ({dm},{dp})"))?;
        ensure(form::is_special(&q), format!("seed ({dm},{dp}) not special"))?;
        ensure(form::hasse_witt(&q, Place::Infinity) == Ok(-1), "HW_∞ ≠ −1")?;
        for p in prime_divisors(d) {
            let hw = form::hasse_witt(&q, Place::Finite(p)).unwrap();
            let e = form::eichler_invariant(&q, p).unwrap();
            ensure(hw == e, format!("HW_{p} = {hw} but e_{p} = {e} for ({dm},{dp})"))?;
            ensure((hw == -1) == (dm % p == 0), format!("HW_{p} has the wrong sign for ({dm},{dp})"))?;
        }
    }
    Ok(format!("{} descriptors", HW_EICHLER_DESCRIPTORS.len()))
}

/// Isotropic lines and totally isotropic planes mod p both number (p+1)(p²+1) for p ∤ 2D (p = 2 for odd D).
pub fn neighbour_counts() -> Check {
    let mut checked = 0;
    for &(dm, dp) in &[(5u64, 1u64), (13, 1), (61, 1), (13, 19)] {
        let q = seed(dm, dp);
        for p in [2u64, 3, 5, 7] {
            if (dm * dp) % p == 0 {
                continue;
            }
            let want = ((p + 1) * (p * p + 1)) as usize;
            let lines = neighbours::isotropic_lines(&q, p).map_err(|e| e.to_string())?.len();
            let planes = neighbours::isotropic_planes(&q, p).map_err(|e| e.to_string())?.len();
            ensure(lines == want, format!("D={}: {lines} isotropic lines mod {p}, want {want}", dm * dp))?;
            ensure(planes == want, format!("D={}: {planes} isotropic planes mod {p}, want {want}", dm * dp))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} (D, p) pairs"))
}

/// T(2), T(3), T(5), T₁(4), T₁(9) pairwise commute on the D=61 space.
pub fn commutation_61() -> Check {
    let g = genus(61, 1);
    let s = build_space(&g, 0, 0, 1).unwrap();
    let ops: Vec<(String, IntMatrix)> = [(2, HeckeKind::T), (3, HeckeKind::T), (5, HeckeKind::T), (2, HeckeKind::T1), (3, HeckeKind::T1)]
        .iter()
        .map(|&(p, k)| (format!("{k}({p})"), hecke_matrix(&s, p, k).unwrap().matrix))
        .collect();
    for (i, (na, a)) in ops.iter().enumerate() {
        for (nb, b) in &ops[i + 1..] {
            ensure(a.mul(b) == b.mul(a), format!("{na} and {nb} do not commute"))?;
        }
    }
    Ok(format!("{} operators", ops.len()))
}

/// Class count and mass agree for two traversal primes.
pub fn mass_two_primes() -> Check {
    let mut out = Vec::new();
    for &(dm, dp, p1, p2) in &[(61u64, 1u64, 2u64, 3u64), (89, 1, 2, 5), (13, 19, 2, 3)] {
        let s = seed(dm, dp);
        let a = enumerate_genus(&s, p1).map_err(|e| e.to_string())?;
        let b = enumerate_genus(&s, p2).map_err(|e| e.to_string())?;
        ensure(a.len() == b.len() && a.mass() == b.mass(), format!("D={}: primes {p1}/{p2} disagree", dm * dp))?;
        out.push(format!("D={}: h={} mass={}/{}", dm * dp, a.len(), a.mass().0, a.mass().1));
    }
    Ok(out.join("; "))
}

/// Starting from any class gives the same genus; the result is closed under a second prime.
pub fn base_point_independence() -> Check {
    for &(dm, dp) in &[(61u64, 1u64), (89, 1)] {
        let g = genus(dm, dp);
        let index = ClassIndex::from_classes(&g.classes);
        for start in [1, g.len() - 1] {
            let h = enumerate_genus(&g.classes[start], g.traversal_prime).map_err(|e| e.to_string())?;
            ensure(h.len() == g.len() && h.mass() == g.mass(), format!("D={}: base point {start} changes the genus", dm * dp))?;
            ensure(h.classes.iter().all(|c| index.locate(c).is_some()), "class outside the original genus")?;
        }
        ensure(verify_closure(&g, 3).map_err(|e| e.to_string())?, format!("D={} not closed under 3-neighbours", dm * dp))?;
    }
    Ok("D=61, 89".into())
}

/// Every class of the genus has the seed's local invariants.
pub fn classes_share_invariants() -> Check {
    let g = genus(13, 19);
    let d = g.d();
    for c in &g.classes {
        ensure(c.det() == g.seed.det(), "det differs")?;
        for p in prime_divisors(2 * d) {
            ensure(form::hasse_witt(c, Place::Finite(p)) == form::hasse_witt(&g.seed, Place::Finite(p)), "HW differs")?;
        }
        for p in prime_divisors(d) {
            ensure(form::eichler_invariant(c, p) == form::eichler_invariant(&g.seed, p), "Eichler invariant differs")?;
        }
    }
    Ok(format!("{} classes of D=247", g.len()))
}
