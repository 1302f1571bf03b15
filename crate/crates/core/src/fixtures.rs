//! Classical newform eigenvalue fixtures and the lift-eigenvalue formulas used to name
//! Saito–Kurokawa and Yoshida blocks.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_traits::{Pow, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::arith::is_prime;
use crate::eigen::charpoly;
use crate::error::{invalid, Error, Result};
use crate::linalg::IntMatrix;
use crate::poly::ZPoly;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApMod {
    pub ell: u64,
    pub values: BTreeMap<u64, u64>,
}

/// Hecke eigenvalues of a classical newform. Rational forms fill `ap`; forms with larger
/// coefficient fields carry residues at one prime above ℓ and, optionally, the
/// characteristic polynomial of a_p over ℚ (coefficients, constant term first).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NewformFixture {
    pub label: String,
    pub level: u64,
    pub weight: u32,
    #[serde(default)]
    pub ap: BTreeMap<u64, i64>,
    #[serde(default)]
    pub ap_mod: Option<ApMod>,
    #[serde(default)]
    pub al_signs: BTreeMap<u64, i8>,
    #[serde(default)]
    pub ap_charpoly: BTreeMap<u64, Vec<i64>>,
    pub source: String,
}

impl NewformFixture {
    pub fn from_json(text: &str) -> Result<Self> {
        let f: NewformFixture = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        f.validate()?;
        Ok(f)
    }

    fn validate(&self) -> Result<()> {
        if self.level == 0 || self.weight < 2 || self.weight % 2 != 0 {
            return Err(Error::Schema(format!("{}: bad level/weight", self.label)));
        }
        let primes = self.ap.keys().chain(self.ap_charpoly.keys()).chain(self.ap_mod.iter().flat_map(|m| m.values.keys()));
        if let Some(p) = primes.into_iter().find(|&&p| !is_prime(p)) {
            return Err(Error::Schema(format!("{}: key {p} is not prime", self.label)));
        }
        if let Some(m) = &self.ap_mod {
            if !is_prime(m.ell) || m.values.values().any(|&v| v >= m.ell) {
                return Err(Error::Schema(format!("{}: residues must lie in [0, ℓ) for prime ℓ", self.label)));
            }
        }
        for (&q, &s) in &self.al_signs {
            if self.level % q != 0 || !(s == 1 || s == -1) {
                return Err(Error::Schema(format!("{}: Atkin–Lehner sign {s} at {q}", self.label)));
            }
        }
        for (p, c) in &self.ap_charpoly {
            if c.last() != Some(&1) {
                return Err(Error::Schema(format!("{}: a_{p} polynomial is not monic", self.label)));
            }
        }
        for (&p, &a) in &self.ap {
            // |a_p| ≤ 2 p^{(w−1)/2}  ⟺  a_p² ≤ 4 p^{w−1}
            let lhs = BigInt::from(a) * BigInt::from(a);
            let rhs = BigInt::from(4) * BigInt::from(p).pow(self.weight - 1);
            if lhs > rhs {
                return Err(Error::RamanujanBound(format!("{}: a_{p} = {a}", self.label)));
            }
        }
        Ok(())
    }

    pub fn is_rational(&self) -> bool {
        !self.ap.is_empty()
    }

    pub fn charpoly_of_ap(&self, p: u64) -> Option<ZPoly> {
        if let Some(&a) = self.ap.get(&p) {
            return Some(ZPoly::linear(a));
        }
        self.ap_charpoly.get(&p).map(|c| ZPoly::from_i64(c))
    }

    /// a_p mod ℓ, from the rational value or the stored residue.
    pub fn ap_residue(&self, p: u64, ell: u64) -> Option<u64> {
        if let Some(&a) = self.ap.get(&p) {
            return Some(a.rem_euclid(ell as i64) as u64);
        }
        self.ap_mod.as_ref().filter(|m| m.ell == ell).and_then(|m| m.values.get(&p).copied())
    }

    pub fn primes(&self) -> Vec<u64> {
        let mut ps: Vec<u64> = self.ap.keys().copied().collect();
        if let Some(m) = &self.ap_mod {
            ps.extend(m.values.keys());
        }
        ps.sort();
        ps.dedup();
        ps
    }

    /// Primes p ∤ qℓ among the fixture primes at which a_p ≢ 1 + p^{w−1} mod ℓ.
    pub fn eisenstein_failures(&self, ell: u64) -> Vec<u64> {
        let w = self.weight;
        self.primes()
            .into_iter()
            .filter(|&p| self.level % p != 0 && p != ell)
            .filter(|&p| {
                let e = (BigInt::from(1) + BigInt::from(p).pow(w - 1)) % BigInt::from(ell);
                match self.ap_residue(p, ell) {
                    Some(a) => BigInt::from(a) != e,
                    None => true,
                }
            })
            .collect()
    }
}

pub fn load_fixture(path: impl AsRef<Path>) -> Result<NewformFixture> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::MissingFile(format!("{}: {e}", path.display())))?;
    NewformFixture::from_json(&text)
}

/// `fixtures/` at the workspace root.
pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn load_named(label: &str) -> Result<NewformFixture> {
    load_fixture(fixture_dir().join(format!("{label}.json")))
}

/// a_p + p^{k−2} + p^{j+k−1}.
pub fn sk_eigenvalue(p: u64, ap: &BigInt, k: u32, j: u32) -> BigInt {
    let pb = BigInt::from(p);
    ap + pb.clone().pow(k - 2) + pb.pow(j + k - 1)
}

/// a_p(h) + p^{b+1}·a_p(g).
pub fn yoshida_eigenvalue(p: u64, ap_g: &BigInt, ap_h: &BigInt, b: u32) -> BigInt {
    ap_h + BigInt::from(p).pow(b + 1) * ap_g
}

/// Charpoly of the SK eigenvalue on the Galois orbit of a_p: χ(x − p^{k−2} − p^{j+k−1}).
pub fn sk_block_poly(chi_ap: &ZPoly, p: u64, k: u32, j: u32) -> ZPoly {
    chi_ap.shift(&(-sk_eigenvalue(p, &BigInt::from(0), k, j)))
}

/// Charpoly of the Yoshida eigenvalues a_p(h) + p^{b+1}·a_p(g) as a_p(g), a_p(h) run over their
/// Galois orbits: the characteristic polynomial of C_h ⊗ 1 + p^{b+1}·1 ⊗ C_g.
pub fn yoshida_block_poly(chi_g: &ZPoly, chi_h: &ZPoly, p: u64, b: u32) -> Result<ZPoly> {
    let cg = companion(chi_g)?;
    let ch = companion(chi_h)?;
    let (m, n) = (cg.rows, ch.rows);
    let s = i64::try_from(p).ok().and_then(|p| p.checked_pow(b + 1)).ok_or_else(|| invalid!("p^(b+1) overflows"))?;
    let mut k = IntMatrix::zeros(m * n, m * n);
    for i in 0..n {
        for j in 0..n {
            for r in 0..m {
                k[(i * m + r, j * m + r)] += ch[(i, j)];
            }
        }
        for r in 0..m {
            for c in 0..m {
                k[(i * m + r, i * m + c)] += s * cg[(r, c)];
            }
        }
    }
    Ok(charpoly(&k)?.poly)
}

fn companion(f: &ZPoly) -> Result<IntMatrix> {
    if !f.is_monic() || f.degree() == 0 {
        return Err(invalid!("companion matrix needs a monic polynomial of positive degree"));
    }
    let n = f.degree();
    let mut c = IntMatrix::zeros(n, n);
    for i in 1..n {
        c[(i, i - 1)] = 1;
    }
    for i in 0..n {
        c[(i, n - 1)] = -f.coeffs()[i].to_i64().ok_or_else(|| invalid!("coefficient overflows i64"))?;
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn known_q_expansions() {
        let g = load_named("19.6.a.a").unwrap();
        assert_eq!((g.ap[&2], g.ap[&3], g.ap[&5]), (-6, 4, 54));
        let h = load_named("13.4.a.a").unwrap();
        assert_eq!((h.ap[&2], h.ap[&3], h.ap[&5]), (-5, -7, -7));
    }

    #[test]
    fn load_errors() {
        assert!(matches!(load_fixture("/nonexistent/x.json"), Err(Error::MissingFile(_))));
        assert!(matches!(NewformFixture::from_json("{\"label\":1}"), Err(Error::Schema(_))));
        let bad = r#"{"label":"x","level":13,"weight":4,"ap":{"2":6},"source":"t"}"#;
        assert!(matches!(NewformFixture::from_json(bad), Err(Error::RamanujanBound(_))));
        let ok = r#"{"label":"x","level":13,"weight":4,"ap":{"2":5},"source":"t"}"#;
        assert!(NewformFixture::from_json(ok).is_ok());
    }

    #[test]
    fn lift_formulas() {
        assert_eq!(sk_eigenvalue(2, &b(-6), 3, 0), b(0));
        assert_eq!(sk_eigenvalue(3, &b(4), 3, 0), b(16));
        // a ≡ −7 mod 43 ⟹ SK eigenvalue ≡ −1
        for a in [-7i64, 36, 79] {
            assert_eq!((sk_eigenvalue(2, &b(a), 3, 0) % 43 + 43) % 43, b(42));
        }
        assert_eq!(yoshida_eigenvalue(2, &b(-5), &b(-6), 0), b(-16));
        assert_eq!((yoshida_eigenvalue(2, &b(-5), &b(-6), 0) % 7 + 7) % 7, b(5));
        assert_eq!((sk_eigenvalue(2, &b(-6), 3, 2) % 7 + 7) % 7, b(5));
        assert_eq!(yoshida_eigenvalue(97, &b(0), &b(0), 3), b(0));
        // no overflow for large exponents
        assert!(sk_eigenvalue(97, &b(0), 30, 30) > b(i64::MAX));
    }

    #[test]
    fn eisenstein_congruences() {
        assert!(load_named("13.4.a.a").unwrap().eisenstein_failures(7).is_empty());
        assert!(load_named("37.4.a.a").unwrap().eisenstein_failures(19).is_empty());
        assert!(!load_named("19.6.a.a").unwrap().eisenstein_failures(7).is_empty());
    }

    #[test]
    fn lift_block_polys() {
        // SK orbit of 61.4.a.a at p = 2 is the degree-6 factor of T(2) on the D = 61 space
        let g = load_named("61.4.a.a").unwrap();
        let f = sk_block_poly(&g.charpoly_of_ap(2).unwrap(), 2, 3, 0);
        assert_eq!(f, ZPoly::from_i64(&[2026, -5205, 4471, -1714, 322, -29, 1]));
        // rational g: a plain shift
        let h = ZPoly::from_i64(&[2, 3, 1]); // roots −1, −2
        let y = yoshida_block_poly(&ZPoly::linear(-5), &h, 2, 0).unwrap();
        assert_eq!(y, ZPoly::product(&[ZPoly::linear(-11), ZPoly::linear(-12)]));
        // sums over both orbits: (x² − 2) and (x² − 3) give roots ±√3 ± 2√2, (x² − 11)² − 96
        let y = yoshida_block_poly(&ZPoly::from_i64(&[-2, 0, 1]), &ZPoly::from_i64(&[-3, 0, 1]), 2, 0).unwrap();
        assert_eq!(y, ZPoly::from_i64(&[25, 0, -22, 0, 1]));
    }

    #[test]
    fn all_fixtures_load() {
        let n = std::fs::read_dir(fixture_dir()).unwrap().filter(|e| {
            let p = e.as_ref().unwrap().path();
            p.extension().is_some_and(|x| x == "json") && load_fixture(&p).is_ok()
        });
        assert!(n.count() >= 10);
    }
}
