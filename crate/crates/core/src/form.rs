//! Integral quinary quadratic forms and their local invariants.

use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, is_prime, legendre, valuation};
use crate::error::{inconsistent, invalid, Error, Result};
use crate::mat5::{self, Mat5, Vec5, N};
use crate::reduce;

pub type Rat = Ratio<i128>;

/// A place of ℚ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Place {
    Infinity,
    Finite(u64),
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinity => write!(f, "inf"),
            Place::Finite(p) => write!(f, "{p}"),
        }
    }
}

/// Positive-definite integral quinary form, stored by its Hessian H (Q(v) = ½vᵀHv).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuinaryForm {
    hessian: Mat5,
    det: i64,
}

/// Sage upper-triangular coefficient order: (i,j) for i ≤ j, row by row.
fn upper_pairs() -> impl Iterator<Item = (usize, usize)> {
    (0..N).flat_map(|i| (i..N).map(move |j| (i, j)))
}

impl QuinaryForm {
    pub fn new(hessian: Mat5) -> Result<Self> {
        for i in 0..N {
            if hessian[i][i] % 2 != 0 {
                return Err(invalid!("odd diagonal entry H[{i}][{i}] = {}", hessian[i][i]));
            }
            for j in 0..i {
                if hessian[i][j] != hessian[j][i] {
                    return Err(invalid!("Hessian not symmetric at ({i},{j})"));
                }
            }
        }
        for k in 1..=N {
            let minor: Vec<Vec<i128>> =
                (0..k).map(|i| (0..k).map(|j| hessian[i][j] as i128).collect()).collect();
            if mat5::det_i128(&minor) <= 0 {
                return Err(invalid!("Hessian not positive definite"));
            }
        }
        let det = mat5::det(&hessian);
        Ok(QuinaryForm { hessian, det })
    }

    /// From the 15 coefficients of Σ_{i≤j} a_ij x_i x_j in upper-triangular order.
    pub fn from_coefficients(c: &[i64]) -> Result<Self> {
        if c.len() != 15 {
            return Err(invalid!("expected 15 coefficients, got {}", c.len()));
        }
        let mut h = [[0i64; N]; N];
        for ((i, j), &a) in upper_pairs().zip(c) {
            if i == j {
                h[i][i] = 2 * a;
            } else {
                h[i][j] = a;
                h[j][i] = a;
            }
        }
        Self::new(h)
    }

    pub fn coefficients(&self) -> Vec<i64> {
        upper_pairs()
            .map(|(i, j)| if i == j { self.hessian[i][i] / 2 } else { self.hessian[i][j] })
            .collect()
    }

    pub fn diagonal(entries: [i64; N]) -> Result<Self> {
        let mut h = [[0; N]; N];
        for i in 0..N {
            h[i][i] = entries[i];
        }
        Self::new(h)
    }

    pub fn hessian(&self) -> &Mat5 {
        &self.hessian
    }

    /// Signed determinant; for rank 5 this is det(H).
    pub fn det(&self) -> i64 {
        self.det
    }

    /// ⟨u,v⟩ = uᵀHv.
    pub fn inner(&self, u: &Vec5, v: &Vec5) -> i64 {
        mat5::bilinear(&self.hessian, u, v)
    }

    /// Q(v) = ½vᵀHv.
    pub fn eval(&self, v: &Vec5) -> i64 {
        self.inner(v, v) / 2
    }

    /// gᵀHg, for any integer g with nonzero determinant.
    pub fn transform(&self, g: &Mat5) -> Result<Self> {
        Self::new(mat5::congruence(&self.hessian, g))
    }

    /// LLL-reduced representative with the transform g (gᵀHg = reduced).
    pub fn reduced(&self) -> (Self, Mat5) {
        let (h, g) = reduce::reduce(&self.hessian);
        let det = self.det;
        (QuinaryForm { hessian: h, det }, g)
    }
}

pub fn signed_determinant(q: &QuinaryForm) -> i64 {
    q.det()
}

// ---------------------------------------------------------------- Hilbert symbols

fn split_p(x: i128, p: u64) -> (u32, i128) {
    let v = valuation(x, p);
    (v, x / (p as i128).pow(v))
}

/// (a,b)_p for nonzero rationals a, b.
pub fn hilbert_symbol(a: &Rat, b: &Rat, place: Place) -> Result<i8> {
    if a.is_zero() || b.is_zero() {
        return Err(invalid!("Hilbert symbol of zero"));
    }
    let p = match place {
        Place::Infinity => {
            return Ok(if a.is_negative() && b.is_negative() { -1 } else { 1 });
        }
        Place::Finite(p) if is_prime(p) => p,
        Place::Finite(p) => return Err(invalid!("{p} is not prime")),
    };
    // a = p^α·u with u a p-adic unit given as a fraction of p-free integers
    let (an, au) = split_p(*a.numer(), p);
    let (ad, aw) = split_p(*a.denom(), p);
    let (bn, bu) = split_p(*b.numer(), p);
    let (bd, bw) = split_p(*b.denom(), p);
    let alpha = an as i64 - ad as i64;
    let beta = bn as i64 - bd as i64;
    // unit parts up to squares: u ~ num·den
    let u = au * aw;
    let v = bu * bw;
    if p == 2 {
        let e = |x: i128| ((x.rem_euclid(4) - 1) / 2) as i64; // ε(x) = (x−1)/2 mod 2
        let w = |x: i128| {
            let r = x.rem_euclid(8);
            if r == 3 || r == 5 {
                1
            } else {
                0
            }
        }; // ω(x) = (x²−1)/8 mod 2
        let s = e(u) * e(v) + alpha * w(v) + beta * w(u);
        Ok(if s.rem_euclid(2) == 0 { 1 } else { -1 })
    } else {
        let eps = ((p - 1) / 2) as i64;
        let mut sign = if (alpha * beta * eps).rem_euclid(2) == 0 { 1 } else { -1 };
        if beta.rem_euclid(2) == 1 {
            sign *= legendre(u, p);
        }
        if alpha.rem_euclid(2) == 1 {
            sign *= legendre(v, p);
        }
        Ok(sign)
    }
}

/// Symmetric Gaussian elimination over ℚ; returns the diagonal entries of a Hessian congruent to H.
pub fn rational_diagonal(h: &Mat5) -> Result<Vec<Rat>> {
    let mut a: Vec<Vec<Rat>> =
        h.iter().map(|r| r.iter().map(|&x| Rat::from_integer(x as i128)).collect()).collect();
    let n = N;
    let mut diag = Vec::with_capacity(n);
    for k in 0..n {
        if a[k][k].is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !a[j][j].is_zero()) {
                a.swap(k, j);
                for row in a.iter_mut() {
                    row.swap(k, j);
                }
            } else if let Some(j) = (k + 1..n).find(|&j| !a[k][j].is_zero()) {
                // e_k ← e_k + e_j gives value 2·a_kj ≠ 0
                for c in 0..n {
                    let t = a[j][c];
                    a[k][c] += t;
                }
                for r in 0..n {
                    let t = a[r][j];
                    a[r][k] += t;
                }
            } else {
                return Err(invalid!("degenerate form"));
            }
        }
        let piv = a[k][k];
        for i in k + 1..n {
            let f = a[i][k] / piv;
            if f.is_zero() {
                continue;
            }
            for j in k..n {
                let t = a[k][j];
                a[i][j] -= f * t;
            }
        }
        for i in k + 1..n {
            a[k][i] = Rat::zero();
            a[i][k] = Rat::zero();
        }
        diag.push(piv);
    }
    Ok(diag)
}

/// HW_v(Q) = (−1,−1)_v ∏_{i<j} (a_i,a_j)_v over a rational diagonalisation Q ≅ ⟨a_1,…,a_5⟩.
pub fn hasse_witt(q: &QuinaryForm, place: Place) -> Result<i8> {
    let d = rational_diagonal(q.hessian())?;
    let vals: Vec<Rat> = d.iter().map(|x| x / Rat::from_integer(2)).collect();
    let minus_one = Rat::from_integer(-1);
    let mut hw = hilbert_symbol(&minus_one, &minus_one, place)?;
    for i in 0..N {
        for j in i + 1..N {
            hw *= hilbert_symbol(&vals[i], &vals[j], place)?;
        }
    }
    Ok(hw)
}

/// Elementary divisors of H, i.e. the invariants of L^∨/L.
pub fn discriminant_group(q: &QuinaryForm) -> Vec<i64> {
    let m: Vec<Vec<i128>> = q.hessian().iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let (_, s, _) = mat5::smith_form(&m);
    (0..N).map(|i| s[i][i] as i64).collect()
}

pub fn is_special(q: &QuinaryForm) -> bool {
    discriminant_group(q).iter().filter(|&&d| d > 1).count() <= 1
}

pub fn is_special_at(q: &QuinaryForm, p: u64) -> bool {
    discriminant_group(q).iter().filter(|&&d| d % p as i64 == 0).count() <= 1
}

/// Eichler invariant e(L_p) of a lattice special at p, via the Jordan splitting L_p = A ⊥ ℤ_p·w.
pub fn eichler_invariant(q: &QuinaryForm, p: u64) -> Result<i8> {
    if !is_prime(p) {
        return Err(invalid!("{p} is not prime"));
    }
    if !is_special_at(q, p) {
        return Err(invalid!("lattice is not special at {p}"));
    }
    let n_half = q.det() / 2;
    if n_half % p as i64 != 0 {
        return Ok(1);
    }
    let det_a = if p == 2 { unimodular_det_at_two(q)? } else { unimodular_det_odd(q, p)? };
    hilbert_symbol(&Rat::from_integer(p as i128), &det_a, Place::Finite(p))
}

fn vp_rat(x: &Rat, p: u64) -> i64 {
    if x.is_zero() {
        return i64::MAX;
    }
    valuation(*x.numer(), p) as i64 - valuation(*x.denom(), p) as i64
}

/// p odd: p-adic diagonalisation by minimal-valuation pivots; det of the unit part.
fn unimodular_det_odd(q: &QuinaryForm, p: u64) -> Result<Rat> {
    let mut a: Vec<Vec<Rat>> =
        q.hessian().iter().map(|r| r.iter().map(|&x| Rat::from_integer(x as i128)).collect()).collect();
    let mut units = Rat::from_integer(1);
    let mut unit_count = 0;
    for k in 0..N {
        // best diagonal pivot
        let (mut bi, mut bv) = (k, vp_rat(&a[k][k], p));
        for i in k + 1..N {
            let v = vp_rat(&a[i][i], p);
            if v < bv {
                (bi, bv) = (i, v);
            }
        }
        let mut off = None;
        for i in k..N {
            for j in i + 1..N {
                if vp_rat(&a[i][j], p) < bv && off.is_none() {
                    off = Some((i, j));
                }
            }
        }
        if let Some((i, j)) = off {
            // e_i ← e_i + e_j: the new diagonal has valuation v(a_ij) since p is odd
            for c in 0..N {
                let t = a[j][c];
                a[i][c] += t;
            }
            for r in 0..N {
                let t = a[r][j];
                a[r][i] += t;
            }
            bi = i;
        }
        a.swap(k, bi);
        for row in a.iter_mut() {
            row.swap(k, bi);
        }
        let piv = a[k][k];
        if piv.is_zero() {
            return Err(inconsistent!("degenerate form during p-adic splitting"));
        }
        for i in k + 1..N {
            let f = a[i][k] / piv;
            for j in k..N {
                let t = a[k][j];
                a[i][j] -= f * t;
            }
        }
        for i in k + 1..N {
            a[k][i] = Rat::zero();
            a[i][k] = Rat::zero();
        }
        if vp_rat(&piv, p) == 0 {
            units *= piv;
            unit_count += 1;
        }
    }
    if unit_count != N - 1 {
        return Err(inconsistent!("unimodular Jordan component at {p} has rank {unit_count}"));
    }
    Ok(units)
}

/// p = 2: split off two even unimodular planes; det A = det(B₁)·det(B₂).
fn unimodular_det_at_two(q: &QuinaryForm) -> Result<Rat> {
    let mut a: Vec<Vec<Rat>> =
        q.hessian().iter().map(|r| r.iter().map(|&x| Rat::from_integer(x as i128)).collect()).collect();
    let mut alive: Vec<usize> = (0..N).collect();
    let mut det_a = Rat::from_integer(1);
    for _ in 0..2 {
        let mut pair = None;
        'search: for (x, &i) in alive.iter().enumerate() {
            for &j in &alive[x + 1..] {
                if vp_rat(&a[i][j], 2) == 0 {
                    pair = Some((i, j));
                    break 'search;
                }
            }
        }
        let Some((i, j)) = pair else {
            return Err(inconsistent!("no even unimodular plane at 2"));
        };
        let (bii, bij, bjj) = (a[i][i], a[i][j], a[j][j]);
        let det_b = bii * bjj - bij * bij;
        det_a *= det_b;
        alive.retain(|&k| k != i && k != j);
        // project the remaining basis vectors orthogonally to span(e_i, e_j)
        for &k in &alive {
            let (hik, hjk) = (a[i][k], a[j][k]);
            let ci = (bjj * hik - bij * hjk) / det_b;
            let cj = (bii * hjk - bij * hik) / det_b;
            // e_k ← e_k − ci·e_i − cj·e_j
            for c in 0..N {
                let t = ci * a[i][c] + cj * a[j][c];
                a[k][c] -= t;
            }
            for r in 0..N {
                let t = ci * a[r][i] + cj * a[r][j];
                a[r][k] -= t;
            }
        }
    }
    Ok(det_a)
}

/// Full local data at p.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalInvariants {
    pub p: u64,
    pub hasse_witt: i8,
    pub eichler: Option<i8>,
    pub radical_rank: u32,
    pub is_special_at_p: bool,
}

pub fn local_invariants(q: &QuinaryForm, p: u64) -> Result<LocalInvariants> {
    let special = is_special_at(q, p);
    let eichler = if special { Some(eichler_invariant(q, p)?) } else { None };
    let d = q.det() / 2;
    let radical_rank = if d % p as i64 == 0 {
        match radical_generator(q, p) {
            Ok(_) => 1,
            Err(_) => 0,
        }
    } else {
        0
    };
    Ok(LocalInvariants {
        p,
        hasse_witt: hasse_witt(q, Place::Finite(p))?,
        eichler,
        radical_rank,
        is_special_at_p: special,
    })
}

// ---------------------------------------------------------------- radical

/// Normalised generator of Rad(L ⊗ ℤ/2p) for p | D, as a vector with entries in [0, 2p).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RadicalGenerator {
    pub p: u64,
    pub modulus: i64,
    pub vector: Vec5,
}

pub fn radical_generator(q: &QuinaryForm, p: u64) -> Result<RadicalGenerator> {
    let d = q.det() / 2;
    if !is_prime(p) || d % p as i64 != 0 {
        return Err(invalid!("{p} does not divide D = {d}"));
    }
    let m = 2 * p as i64;
    let h: Vec<Vec<i128>> = q.hessian().iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let (_, s, v) = mat5::smith_form(&h);
    // H·v ≡ 0 ⟺ S·(V⁻¹v) ≡ 0; the kernel is spanned by columns V·e_i with s_i ≡ 0 mod gcd
    let hits: Vec<usize> = (0..N).filter(|&i| (s[i][i] as i64).gcd(&m) > 1).collect();
    if hits.len() != 1 || (s[hits[0]][hits[0]] as i64) % m != 0 {
        return Err(inconsistent!("radical mod {m} is not free of rank 1"));
    }
    let col: Vec5 = std::array::from_fn(|r| (v[r][hits[0]] as i64).rem_euclid(m));
    Ok(RadicalGenerator { p, modulus: m, vector: normalise_radical(q, &col, p as i64) })
}

/// Lexicographically least unit multiple of `v` modulo `m`.
pub fn normalise_mod(v: &Vec5, m: i64) -> Vec5 {
    (1..m)
        .filter(|u| u.gcd(&m) == 1)
        .map(|u| std::array::from_fn(|i| (u * v[i]).rem_euclid(m)))
        .min()
        .expect("unit group nonempty")
}

/// Scale a radical vector mod 2p so that Q(v)/p is the least positive residue of its square
/// class mod p; this leaves only the sign free, which is then fixed lexicographically.
/// Without the first step, generators of isometric lattices differ by arbitrary units.
fn normalise_radical(q: &QuinaryForm, v: &Vec5, p: i64) -> Vec5 {
    let m = 2 * p;
    if p == 2 {
        return normalise_mod(v, m);
    }
    let qv = |w: &Vec5| -> i64 {
        let w128: Vec<i128> = w.iter().map(|&x| x as i128).collect();
        let h = q.hessian();
        let mut s: i128 = 0;
        for i in 0..N {
            for j in 0..N {
                s += w128[i] * h[i][j] as i128 * w128[j];
            }
        }
        ((s / 2) / p as i128).rem_euclid(p as i128) as i64
    };
    let target = |c: i64| -> i64 { (1..p).find(|&t| (1..p).any(|x| (x * x % p) * c % p == t)).unwrap_or(0) };
    let scaled: Vec<Vec5> = (1..m)
        .filter(|u| u.gcd(&m) == 1)
        .map(|u| std::array::from_fn(|i| (u * v[i]).rem_euclid(m)))
        .collect();
    let c0 = target(qv(v));
    scaled.into_iter().filter(|w| qv(w) == c0).min().expect("some unit reaches the class representative")
}

// ---------------------------------------------------------------- genus descriptor and seeds

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GenusDescriptor {
    pub d_minus: u64,
    pub d_plus: u64,
}

impl GenusDescriptor {
    pub fn new(d_minus: u64, d_plus: u64) -> Result<Self> {
        if d_minus == 0 || d_plus == 0 {
            return Err(invalid!("D⁻ and D⁺ must be positive"));
        }
        if !arith::is_squarefree(d_minus) {
            return Err(invalid!("D⁻ = {d_minus} is not squarefree"));
        }
        if d_minus.gcd(&d_plus) != 1 {
            return Err(invalid!("gcd(D⁻, D⁺) ≠ 1"));
        }
        if arith::factorize(d_minus).len() % 2 == 0 {
            return Err(Error::NoGenus(format!(
                "D⁻ = {d_minus} has an even number of prime factors"
            )));
        }
        Ok(GenusDescriptor { d_minus, d_plus })
    }

    pub fn d(&self) -> u64 {
        self.d_minus * self.d_plus
    }

    /// Does `q` have exactly the local invariants of this genus?
    pub fn check(&self, q: &QuinaryForm) -> Result<bool> {
        let d = self.d();
        if q.det() != 2 * d as i64 || !is_special(q) {
            return Ok(false);
        }
        if hasse_witt(q, Place::Infinity)? != -1 {
            return Ok(false);
        }
        for p in arith::prime_divisors(2 * d) {
            let want = if self.d_minus % p == 0 { -1 } else { 1 };
            if hasse_witt(q, Place::Finite(p))? != want {
                return Ok(false);
            }
            if d % p == 0 && self.d_plus % p == 0 && eichler_invariant(q, p)? != 1 {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Box search for a seed lattice of the genus.
///
/// Candidates are Hessians [[H₄, c], [cᵀ, h]] with an even positive-definite 4×4 block H₄ and a
/// column c whose entries are bounded by `coeff_bound`; h is solved from det = 2D. Boxes are
/// visited in increasing size and the first valid candidate (reduced) is returned.
pub fn seed_search(desc: &GenusDescriptor, coeff_bound: i64) -> Result<QuinaryForm> {
    let desc = GenusDescriptor::new(desc.d_minus, desc.d_plus)?;
    let target = 2 * desc.d() as i128;
    for s in 1..=coeff_bound {
        if let Some(q) = search_box(&desc, s, target)? {
            return Ok(q.reduced().0);
        }
    }
    Err(Error::NotFound(format!("no seed with coefficients bounded by {coeff_bound}")))
}

fn search_box(desc: &GenusDescriptor, s: i64, target: i128) -> Result<Option<QuinaryForm>> {
    // 4×4 block: diagonal Q-values a_ii ∈ [1,s] non-decreasing, |H_ij| ≤ min(a_ii, s)
    let pairs: Vec<(usize, usize)> = (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).collect();
    for d0 in 1..=s {
        for d1 in d0..=s {
            for d2 in d1..=s {
                for d3 in d2..=s {
                    let diag = [d0, d1, d2, d3];
                    let mut off = [-s; 6];
                    loop {
                        let mut h4 = [[0i64; 4]; 4];
                        for i in 0..4 {
                            h4[i][i] = 2 * diag[i];
                        }
                        let mut ok = true;
                        for (t, &(i, j)) in pairs.iter().enumerate() {
                            if off[t].abs() > diag[i] {
                                ok = false;
                            }
                            h4[i][j] = off[t];
                            h4[j][i] = off[t];
                        }
                        if ok {
                            if let Some(q) = try_block(desc, &h4, diag, off, s, target)? {
                                return Ok(Some(q));
                            }
                        }
                        if !odometer(&mut off, -s, s) {
                            break;
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}

fn odometer(x: &mut [i64], lo: i64, hi: i64) -> bool {
    for v in x.iter_mut().rev() {
        if *v < hi {
            *v += 1;
            return true;
        }
        *v = lo;
    }
    false
}

fn try_block(
    desc: &GenusDescriptor,
    h4: &[[i64; 4]; 4],
    diag: [i64; 4],
    off: [i64; 6],
    s: i64,
    target: i128,
) -> Result<Option<QuinaryForm>> {
    let m: Vec<Vec<i128>> = h4.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    for k in 1..=4 {
        let minor: Vec<Vec<i128>> = m[..k].iter().map(|r| r[..k].to_vec()).collect();
        if mat5::det_i128(&minor) <= 0 {
            return Ok(None);
        }
    }
    let det4 = mat5::det_i128(&m);
    // adjugate of the 4×4 block
    let mut adj = [[0i128; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let minor: Vec<Vec<i128>> = (0..4)
                .filter(|&r| r != j)
                .map(|r| (0..4).filter(|&c| c != i).map(|c| m[r][c]).collect())
                .collect();
            adj[i][j] = if (i + j) % 2 == 0 { 1 } else { -1 } * mat5::det_i128(&minor);
        }
    }
    let mut c = [-s; 4];
    loop {
        let box_edge = diag.iter().any(|&x| x == s)
            || off.iter().any(|x| x.abs() == s)
            || c.iter().any(|x| x.abs() == s);
        if box_edge && c.iter().zip(diag).all(|(x, d)| x.abs() <= d.max(1)) {
            // det [[H4, c],[cᵀ, h]] = h·det4 − cᵀ adj(H4) c
            let mut quad = 0i128;
            for i in 0..4 {
                for j in 0..4 {
                    quad += c[i] as i128 * adj[i][j] * c[j] as i128;
                }
            }
            let num = target + quad;
            if num % det4 == 0 && (num / det4) % 2 == 0 && num / det4 > 0 {
                let hh = (num / det4) as i64;
                let mut h = [[0i64; N]; N];
                for i in 0..4 {
                    for j in 0..4 {
                        h[i][j] = h4[i][j];
                    }
                    h[i][4] = c[i];
                    h[4][i] = c[i];
                }
                h[4][4] = hh;
                if let Ok(q) = QuinaryForm::new(h) {
                    if desc.check(&q)? {
                        return Ok(Some(q));
                    }
                }
            }
        }
        if !odometer(&mut c, -s, s) {
            break;
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn q61() -> QuinaryForm {
        QuinaryForm::from_coefficients(&[1, 0, 0, 1, 1, 1, 0, 1, 0, 1, 0, 0, 1, 0, 8]).unwrap()
    }

    fn r(n: i128) -> Rat {
        Rat::from_integer(n)
    }

    #[test]
    fn hilbert_examples() {
        assert_eq!(hilbert_symbol(&r(1), &r(7), Place::Finite(3)), Ok(1));
        assert_eq!(hilbert_symbol(&r(-1), &r(-1), Place::Finite(2)), Ok(-1));
        assert_eq!(hilbert_symbol(&r(2), &r(5), Place::Finite(5)), Ok(-1));
        assert_eq!(hilbert_symbol(&r(-1), &r(-1), Place::Infinity), Ok(-1));
        assert!(hilbert_symbol(&r(0), &r(5), Place::Finite(5)).is_err());
        assert_eq!(hilbert_symbol(&Rat::new(3, 4), &Rat::new(-1, 9), Place::Finite(3)), Ok(-1));
    }

    #[test]
    fn q61_invariants() {
        let q = q61();
        assert_eq!(q.hessian()[4][4], 16);
        assert_eq!(signed_determinant(&q), 122);
        assert_eq!(hasse_witt(&q, Place::Finite(61)), Ok(-1));
        assert_eq!(hasse_witt(&q, Place::Infinity), Ok(-1));
        assert_eq!(hasse_witt(&q, Place::Finite(2)), Ok(1));
        assert_eq!(discriminant_group(&q), vec![1, 1, 1, 1, 122]);
        assert!(is_special(&q));
        assert_eq!(eichler_invariant(&q, 61), Ok(-1));
        assert_eq!(eichler_invariant(&q, 7), Ok(1));
        assert_eq!(q.coefficients(), vec![1, 0, 0, 1, 1, 1, 0, 1, 0, 1, 0, 0, 1, 0, 8]);
    }

    #[test]
    fn sum_of_squares() {
        let q = QuinaryForm::diagonal([2; 5]).unwrap();
        assert_eq!(q.det(), 32);
        assert_eq!(hasse_witt(&q, Place::Finite(3)), Ok(1));
        assert_eq!(discriminant_group(&q), vec![2, 2, 2, 2, 2]);
        assert!(!is_special(&q));
        assert!(eichler_invariant(&q, 2).is_err());
    }

    #[test]
    fn radical_of_q61() {
        let q = q61();
        let r = radical_generator(&q, 61).unwrap();
        assert_eq!(r.modulus, 122);
        let hv = mat5::mul_vec(q.hessian(), &r.vector);
        assert!(hv.iter().all(|x| x % 122 == 0));
        assert!(radical_generator(&q, 7).is_err());
        let neg: Vec5 = std::array::from_fn(|i| (-r.vector[i]).rem_euclid(122));
        assert_eq!(normalise_radical(&q, &neg, 61), r.vector);
    }

    #[test]
    fn seed_examples() {
        let d61 = GenusDescriptor::new(61, 1).unwrap();
        let s = seed_search(&d61, 16).unwrap();
        assert_eq!(s.det(), 122);
        assert!(d61.check(&s).unwrap());
        let d5 = GenusDescriptor::new(5, 1).unwrap();
        let s5 = seed_search(&d5, 16).unwrap();
        assert_eq!(s5.det(), 10);
        assert_eq!(hasse_witt(&s5, Place::Finite(5)), Ok(-1));
        assert!(matches!(GenusDescriptor::new(1, 7), Err(Error::NoGenus(_))));
    }
}
