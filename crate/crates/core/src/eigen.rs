//! Characteristic polynomials, factor verification, block splitting and mod-ℓ / ℓ-adic
//! eigen-analysis of integer matrices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, mod_inv, mul_mod, word_primes};
use crate::error::{inconsistent, invalid, Result};
use crate::linalg::{self, crt, kernel_mod, symmetric, IntMatrix};
use crate::poly::ZPoly;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharPoly {
    pub poly: ZPoly,
    pub provenance: Option<String>,
}

/// Exact characteristic polynomial det(x·I − M) by CRT over word-sized primes.
pub fn charpoly(m: &IntMatrix) -> Result<CharPoly> {
    if !m.is_square() {
        return Err(invalid!("charpoly of a non-square matrix"));
    }
    let n = m.rows;
    // |c_k| ≤ C(n,k)·B^k ≤ (1+B)^n where B bounds every |eigenvalue|
    let b = m.row_norm() as f64;
    let bits = (n as f64) * (1.0 + b).log2() + 2.0;
    let count = (bits / 30.0).ceil() as usize + 1;
    let primes: Vec<u64> = word_primes().take(count).collect();
    let residues: Vec<Vec<u64>> = primes.par_iter().map(|&p| linalg::charpoly_mod(&m.mod_p(p), p)).collect();
    let modulus: BigInt = primes.iter().map(|&p| BigInt::from(p)).product();
    let coeffs = (0..=n)
        .map(|k| {
            let r: Vec<u64> = residues.iter().map(|c| c[k]).collect();
            symmetric(&crt(&r, &primes).0, &modulus)
        })
        .collect();
    Ok(CharPoly { poly: ZPoly::new(coeffs), provenance: None })
}

impl CharPoly {
    /// χ(M)·v ≡ 0 mod p for a fixed pseudo-random v, at several primes.
    pub fn cayley_hamilton_check(&self, m: &IntMatrix, primes: &[u64]) -> bool {
        let n = m.rows;
        primes.iter().all(|&p| {
            let v: Vec<u64> = (0..n as u64).map(|i| (i * 7919 + 13) % p).collect();
            let w = poly_apply_mod(&self.poly, &m.mod_p(p), &v, p);
            w.iter().all(|&x| x == 0)
        })
    }
}

/// f(M)·v over 𝔽_p by Horner.
pub fn poly_apply_mod(f: &ZPoly, m: &[Vec<u64>], v: &[u64], p: u64) -> Vec<u64> {
    let fp = f.mod_p(p);
    let n = v.len();
    let mut w = vec![0u64; n];
    for &c in fp.c.iter().rev() {
        let mw: Vec<u64> = (0..n).map(|i| m[i].iter().zip(&w).fold(0, |acc, (&a, &x)| (acc + mul_mod(a, x, p)) % p)).collect();
        w = mw.iter().zip(v).map(|(&a, &x)| (a + mul_mod(c, x, p)) % p).collect();
    }
    w
}

/// f(M)·v exactly.
pub fn poly_apply(f: &ZPoly, m: &IntMatrix, v: &[BigInt]) -> Vec<BigInt> {
    let mut w = vec![BigInt::zero(); v.len()];
    for c in f.coeffs().iter().rev() {
        let mw = m.mul_vec_big(&w);
        w = mw.into_iter().zip(v).map(|(a, x)| a + c * x).collect();
    }
    w
}

/// f(M) mod p by Horner on matrices.
pub fn poly_eval_matrix_mod(f: &ZPoly, m: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let n = m.len();
    let fp = f.mod_p(p);
    let mut x = vec![vec![0u64; n]; n];
    for &c in fp.c.iter().rev() {
        let mut y = vec![vec![0u64; n]; n];
        for i in 0..n {
            for k in 0..n {
                let a = x[i][k];
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    y[i][j] = (y[i][j] + mul_mod(a, m[k][j], p)) % p;
                }
            }
            y[i][i] = (y[i][i] + c) % p;
        }
        x = y;
    }
    x
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorCheck {
    pub equal: bool,
    pub rational_roots: Vec<String>,
}

/// Does the product of `factors` equal f exactly? Also lists the rational roots of f.
pub fn verify_factor_product(f: &CharPoly, factors: &[ZPoly]) -> FactorCheck {
    let prod = ZPoly::product(factors);
    FactorCheck {
        equal: prod == f.poly,
        rational_roots: f.poly.integer_roots().iter().map(|r| r.to_string()).collect(),
    }
}

/// Saturated integer basis of ker f(M).
pub fn block_split(m: &IntMatrix, f: &ZPoly) -> Result<Vec<Vec<BigInt>>> {
    let chi = charpoly(m)?.poly;
    block_split_with(m, f, &chi)
}

/// As [`block_split`], with the characteristic polynomial supplied.
pub fn block_split_with(m: &IntMatrix, f: &ZPoly, chi: &ZPoly) -> Result<Vec<Vec<BigInt>>> {
    if !f.is_monic() {
        return Err(invalid!("block polynomial must be monic"));
    }
    let g = chi.div_exact(f).ok_or_else(|| invalid!("{f} does not divide the characteristic polynomial"))?;
    let coprime = f.gcd_q(&g).degree() == 0;
    let n = m.rows;
    let basis = if !coprime || f.degree() <= g.degree() {
        kernel_of_poly(m, f)?
    } else {
        // ker f(M) = (ker g(Mᵀ))^⊥ since ℚⁿ = ker f(M) ⊕ ker g(M) and im g(M) = ker f(M)
        let mt = m.transpose();
        let y = kernel_of_poly(&mt, &g)?;
        if y.len() != g.degree() {
            return Err(inconsistent!("complement block has dimension {} ≠ {}", y.len(), g.degree()));
        }
        let big = |p: u64| -> Vec<Vec<u64>> {
            let pb = BigInt::from(p);
            y.iter().map(|v| v.iter().map(|x| x.mod_floor(&pb).to_u64().unwrap()).collect()).collect()
        };
        let k = linalg::nullspace_modular(n, big, |basis| {
            basis.iter().all(|x| y.iter().all(|yy| yy.iter().zip(x).map(|(a, b)| a * b).sum::<BigInt>().is_zero()))
        })?;
        if k.len() != f.degree() {
            return Err(inconsistent!("block dimension {} ≠ degree {}", k.len(), f.degree()));
        }
        k
    };
    linalg::saturate(&basis)
}

fn kernel_of_poly(m: &IntMatrix, f: &ZPoly) -> Result<Vec<Vec<BigInt>>> {
    linalg::nullspace_modular(
        m.rows,
        |p| poly_eval_matrix_mod(f, &m.mod_p(p), p),
        |basis| basis.iter().all(|v| poly_apply(f, m, v).iter().all(|x| x.is_zero())),
    )
}

/// Basis over 𝔽_ℓ of ker(M − c·I).
pub fn mod_ell_kernel(m: &IntMatrix, c: i64, ell: u64) -> Result<Vec<Vec<u64>>> {
    if !is_prime(ell) {
        return Err(invalid!("{ell} is not prime"));
    }
    let mut a = m.mod_p(ell);
    let cm = c.rem_euclid(ell as i64) as u64;
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = (row[i] + ell - cm) % ell;
    }
    Ok(kernel_mod(&a, m.cols, ell))
}

/// Vectors x = B·y mod ℓ of the lattice spanned by `block` (columns) with M·x ≡ c·x.
pub fn block_eigenvectors_mod(m: &IntMatrix, block: &[Vec<BigInt>], c: i64, ell: u64) -> Vec<Vec<u64>> {
    let n = m.rows;
    let lb = BigInt::from(ell);
    let b: Vec<Vec<u64>> = block.iter().map(|v| v.iter().map(|x| x.mod_floor(&lb).to_u64().unwrap()).collect()).collect();
    let mm = m.mod_p(ell);
    let cm = c.rem_euclid(ell as i64) as u64;
    // columns (M − c)·b_j
    let cols: Vec<Vec<u64>> = b
        .iter()
        .map(|bj| {
            (0..n)
                .map(|i| {
                    let s = mm[i].iter().zip(bj).fold(0, |acc, (&a, &x)| (acc + mul_mod(a, x, ell)) % ell);
                    (s + ell - mul_mod(cm, bj[i], ell)) % ell
                })
                .collect()
        })
        .collect();
    let rows: Vec<Vec<u64>> = (0..n).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
    kernel_mod(&rows, block.len(), ell)
        .into_iter()
        .map(|y| {
            (0..n).map(|i| b.iter().zip(&y).fold(0, |acc, (bj, &yj)| (acc + mul_mod(bj[i], yj, ell)) % ell)).collect()
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Collinear,
    CommonEigenspaceForced,
    Independent,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceReport {
    pub ell: u64,
    pub kernel_dim: usize,
    pub span_dim: usize,
    pub vectors: Vec<Vec<u64>>,
    /// Per operator: the eigenvalue mod ℓ of each vector (None if not an eigenvector).
    pub eigenvalues: Vec<Vec<Option<u64>>>,
    pub verdict: Verdict,
}

/// Reduce integer vectors (content removed) mod ℓ.
pub fn reduce_vectors(vectors: &[Vec<BigInt>], ell: u64) -> Result<Vec<Vec<u64>>> {
    let lb = BigInt::from(ell);
    vectors
        .iter()
        .map(|v| {
            let v = linalg::make_primitive(v);
            let r: Vec<u64> = v.iter().map(|x| x.mod_floor(&lb).to_u64().unwrap()).collect();
            if r.iter().all(|&x| x == 0) {
                Err(invalid!("vector reduces to zero mod {ell}"))
            } else {
                Ok(r)
            }
        })
        .collect()
}

fn eigenvalue_mod(m: &[Vec<u64>], v: &[u64], ell: u64) -> Option<u64> {
    let mv: Vec<u64> = m.iter().map(|row| row.iter().zip(v).fold(0, |acc, (&a, &x)| (acc + mul_mod(a, x, ell)) % ell)).collect();
    let i = v.iter().position(|&x| x != 0)?;
    let lam = mul_mod(mv[i], mod_inv(v[i] as i64, ell as i64).unwrap() as u64, ell);
    mv.iter().zip(v).all(|(&a, &x)| a == mul_mod(lam, x, ell)).then_some(lam)
}

/// Congruence analysis of vectors already reduced mod ℓ.
pub fn congruence_report_mod(vectors: Vec<Vec<u64>>, ell: u64, ops: &[IntMatrix]) -> Result<CongruenceReport> {
    if vectors.is_empty() {
        return Err(invalid!("no vectors supplied"));
    }
    let n = vectors[0].len();
    if vectors.iter().any(|v| v.len() != n) {
        return Err(invalid!("vectors of different lengths"));
    }
    if vectors.iter().any(|v| v.iter().all(|&x| x == 0)) {
        return Err(invalid!("zero vector mod {ell}"));
    }
    let span_dim = linalg::rank_mod(&vectors, ell);
    let mods: Vec<Vec<Vec<u64>>> = ops.iter().map(|m| m.mod_p(ell)).collect();
    let eigenvalues: Vec<Vec<Option<u64>>> =
        mods.iter().map(|m| vectors.iter().map(|v| eigenvalue_mod(m, v, ell)).collect()).collect();
    // joint kernel of (M − λ) over operators with a common eigenvalue on all vectors
    let mut joint: Vec<Vec<u64>> = Vec::new();
    let mut all_eigen = !ops.is_empty();
    for (m, ev) in mods.iter().zip(&eigenvalues) {
        match ev[0] {
            Some(l) if ev.iter().all(|&x| x == Some(l)) => {
                for (i, row) in m.iter().enumerate() {
                    let mut r = row.clone();
                    r[i] = (r[i] + ell - l) % ell;
                    joint.push(r);
                }
            }
            _ => all_eigen = false,
        }
    }
    let kernel_dim = if joint.is_empty() { n } else { n - linalg::rank_mod(&joint, ell) };
    let verdict = if span_dim == 1 {
        Verdict::Collinear
    } else if all_eigen && span_dim < vectors.len() && kernel_dim < vectors.len() {
        Verdict::CommonEigenspaceForced
    } else {
        Verdict::Independent
    };
    Ok(CongruenceReport { ell, kernel_dim, span_dim, vectors, eigenvalues, verdict })
}

/// Congruence analysis of integer vectors (content removed, then reduced mod ℓ).
pub fn congruence_report(vectors: &[Vec<BigInt>], ell: u64, ops: &[IntMatrix]) -> Result<CongruenceReport> {
    congruence_report_mod(reduce_vectors(vectors, ell)?, ell, ops)
}

/// Two nonzero vectors over 𝔽_ℓ are proportional.
pub fn proportional(u: &[u64], v: &[u64], ell: u64) -> bool {
    linalg::rank_mod(&[u.to_vec(), v.to_vec()], ell) == 1
}

/// Membership of x in the 𝔽_ℓ-span of `space`.
pub fn in_span_mod(x: &[u64], space: &[Vec<u64>], ell: u64) -> bool {
    let r = linalg::rank_mod(space, ell);
    let mut with = space.to_vec();
    with.push(x.to_vec());
    linalg::rank_mod(&with, ell) == r
}

// ---------------------------------------------------------------- ℓ-adic refinement

/// ℓ-adic roots of f congruent to r0 mod ℓ, each to precision ℓ^prec (values in [0, ℓ^prec)).
pub fn padic_roots(f: &ZPoly, ell: u64, r0: i64, prec: u32) -> Vec<BigInt> {
    let l = BigInt::from(ell);
    let modulus = l.pow(prec);
    let start = BigInt::from(r0).mod_floor(&l);
    let mut out = Vec::new();
    refine(f, &l, &start, 1, prec, &modulus, &mut out);
    out.sort();
    out.dedup();
    out
}

/// Roots of f in r + ℓ^k·ℤ_ℓ, found digit by digit via the shifted polynomial f(r + ℓ^k·x).
fn refine(f: &ZPoly, l: &BigInt, r: &BigInt, k: u32, prec: u32, modulus: &BigInt, out: &mut Vec<BigInt>) {
    let lk = l.pow(k);
    // g(x) = f(r + ℓ^k x), coefficients via Taylor shift
    let g = taylor_shift(f, r, &lk);
    let v = g.coeffs().iter().filter(|c| !c.is_zero()).map(|c| val(c, l)).min();
    let Some(v) = v else {
        out.push(r.mod_floor(modulus));
        return;
    };
    // a few guard digits beyond the requested precision weed out branches that die later
    if k >= prec + 4 {
        out.push(r.mod_floor(modulus));
        return;
    }
    let scale = l.pow(v);
    let h: Vec<BigInt> = g.coeffs().iter().map(|c| (c / &scale).mod_floor(l)).collect();
    let hp = crate::poly::PPoly::new(h.iter().map(|x| x.to_u64().unwrap()).collect(), l.to_u64().unwrap());
    if hp.degree() == 0 {
        return;
    }
    for t in hp.roots() {
        let nr = r + &lk * BigInt::from(t);
        refine(f, l, &nr, k + 1, prec, modulus, out);
    }
}

fn val(x: &BigInt, l: &BigInt) -> u32 {
    let mut v = 0;
    let mut y = x.clone();
    while !y.is_zero() && (&y % l).is_zero() {
        y /= l;
        v += 1;
    }
    v
}

/// Coefficients of f(a + s·x).
fn taylor_shift(f: &ZPoly, a: &BigInt, s: &BigInt) -> ZPoly {
    let n = f.coeffs().len();
    let mut c: Vec<BigInt> = f.coeffs().to_vec();
    // repeated synthetic division by (x − a)
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let t = &c[j + 1] * a;
            c[j] += t;
        }
    }
    let mut sp = BigInt::one();
    for x in c.iter_mut() {
        *x *= &sp;
        sp *= s;
    }
    ZPoly::new(c)
}

/// Reduction mod ℓ of an eigenvector for an ℓ-adic eigenvalue r (known mod ℓ^k), via
/// full-pivot Smith elimination of M − r·I over ℤ/ℓ^k.
pub fn padic_eigenvector_mod(m: &IntMatrix, r: &BigInt, ell: u64, k: u32) -> Result<Vec<u64>> {
    let n = m.rows;
    let q = (ell as i128).pow(k);
    let rr = (r % BigInt::from(q)).to_i128().unwrap().rem_euclid(q);
    let mulq = |a: i128, b: i128| -> i128 { ((a % q) * (b % q)).rem_euclid(q) };
    let mut a: Vec<Vec<i128>> = (0..n)
        .map(|i| (0..n).map(|j| (m[(i, j)] as i128 - if i == j { rr } else { 0 }).rem_euclid(q)).collect())
        .collect();
    let mut v: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i128).collect()).collect();
    let vl = |x: i128| -> u32 {
        if x == 0 {
            return k;
        }
        let mut y = x;
        let mut e = 0;
        while y % ell as i128 == 0 {
            y /= ell as i128;
            e += 1;
        }
        e
    };
    for s in 0..n {
        // pivot of minimal valuation in the trailing block
        let mut best = (k + 1, s, s);
        for i in s..n {
            for j in s..n {
                let e = vl(a[i][j]);
                if e < best.0 {
                    best = (e, i, j);
                }
            }
        }
        if best.0 >= k {
            break;
        }
        let (e, pi, pj) = best;
        a.swap(s, pi);
        for row in a.iter_mut() {
            row.swap(s, pj);
        }
        for row in v.iter_mut() {
            row.swap(s, pj);
        }
        // pivot = ℓ^e·u with u a unit
        let le = (ell as i128).pow(e);
        let u = a[s][s] / le;
        let uinv = inv_mod_i128(u, q);
        // clear below: rows i ← rows i − (a_is/ℓ^e)·u⁻¹·row s
        for i in s + 1..n {
            if a[i][s] == 0 {
                continue;
            }
            let f = mulq(a[i][s] / le, uinv);
            for j in s..n {
                let t = mulq(f, a[s][j]);
                a[i][j] = (a[i][j] - t).rem_euclid(q);
            }
        }
        // clear right: columns j ← columns j − (a_sj/ℓ^e)·u⁻¹·column s (also on V)
        for j in s + 1..n {
            if a[s][j] == 0 {
                continue;
            }
            let f = mulq(a[s][j] / le, uinv);
            for i in 0..n {
                let t = mulq(f, a[i][s]);
                a[i][j] = (a[i][j] - t).rem_euclid(q);
                let tv = mulq(f, v[i][s]);
                v[i][j] = (v[i][j] - tv).rem_euclid(q);
            }
        }
    }
    let col: Vec<u64> = (0..n).map(|i| (v[i][n - 1] % ell as i128) as u64).collect();
    if col.iter().all(|&x| x == 0) {
        return Err(inconsistent!("ℓ-adic eigenvector vanished mod {ell}"));
    }
    Ok(col)
}

fn inv_mod_i128(u: i128, q: i128) -> i128 {
    let (g, x, _) = crate::arith::ext_gcd(u.rem_euclid(q), q);
    assert_eq!(g, 1, "non-unit pivot");
    x.rem_euclid(q)
}

/// Base-ℓ digits of x (least significant first).
pub fn digits(x: &BigInt, ell: u64, count: usize) -> Vec<u64> {
    let l = BigInt::from(ell);
    let mut y = x.mod_floor(&l.pow(count as u32));
    (0..count)
        .map(|_| {
            let d = (&y % &l).to_u64().unwrap();
            y /= &l;
            d
        })
        .collect()
}
