//! Rational models of the SO₅-representations W_{a,b} inside tensor powers of the 5-space.
//!
//! W_{a,b} is the image of the Young symmetrizer c_λ = a_λ·b_λ for λ = ((a+b)/2, (a−b)/2)
//! intersected with the kernels of all pairwise contractions with the invariant form H.
//! Tensor index I = Σ_t i_t·5^{a−1−t}.

use std::collections::HashMap;

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::word_primes;
use crate::error::{inconsistent, invalid, Error, Result};
use crate::linalg;
use crate::mat5::{Mat5, N};

pub const MAX_A: usize = 6;

pub fn weight_dimension(a: i64, b: i64) -> Result<u64> {
    if a < b || b < 0 {
        return Err(invalid!("need a ≥ b ≥ 0, got ({a},{b})"));
    }
    // ((a+2)² − (b+1)²)/3 · (a+2)/2 · (b+1), kept integral
    let num = ((a + 2).pow(2) - (b + 1).pow(2)) * (a + 2) * (b + 1);
    Ok((num / 6) as u64)
}

// ---------------------------------------------------------------- rational matrices

/// Matrix num/den with a common positive denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    pub num: Vec<Vec<BigInt>>,
    pub den: BigInt,
}

impl RatMatrix {
    pub fn zeros(r: usize, c: usize) -> Self {
        RatMatrix { num: vec![vec![BigInt::zero(); c]; r], den: BigInt::one() }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.num[i][i] = BigInt::one();
        }
        m
    }

    pub fn from_int(rows: &[Vec<BigInt>]) -> Self {
        RatMatrix { num: rows.to_vec(), den: BigInt::one() }
    }

    pub fn from_columns(cols: &[Vec<BigInt>], rows: usize) -> Self {
        RatMatrix { num: (0..rows).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect(), den: BigInt::one() }
    }

    pub fn rows(&self) -> usize {
        self.num.len()
    }

    pub fn cols(&self) -> usize {
        self.num.first().map_or(0, |r| r.len())
    }

    pub fn normalize(mut self) -> Self {
        let g = self.num.iter().flatten().fold(self.den.clone(), |acc, x| acc.gcd(x));
        if !g.is_one() && !g.is_zero() {
            self.num.iter_mut().flatten().for_each(|x| *x /= &g);
            self.den /= &g;
        }
        self
    }

    pub fn mul(&self, o: &RatMatrix) -> RatMatrix {
        let (r, k, c) = (self.rows(), self.cols(), o.cols());
        let mut num = vec![vec![BigInt::zero(); c]; r];
        for i in 0..r {
            for t in 0..k {
                let a = &self.num[i][t];
                if a.is_zero() {
                    continue;
                }
                for j in 0..c {
                    num[i][j] += a * &o.num[t][j];
                }
            }
        }
        RatMatrix { num, den: &self.den * &o.den }.normalize()
    }

    pub fn add(&self, o: &RatMatrix) -> RatMatrix {
        let l = self.den.lcm(&o.den);
        let (fa, fb) = (&l / &self.den, &l / &o.den);
        let num = self
            .num
            .iter()
            .zip(&o.num)
            .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x * &fa + y * &fb).collect())
            .collect();
        RatMatrix { num, den: l }.normalize()
    }

    pub fn scale(&self, s: i64) -> RatMatrix {
        RatMatrix { num: self.num.iter().map(|r| r.iter().map(|x| x * s).collect()).collect(), den: self.den.clone() }
            .normalize()
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    pub fn get(&self, i: usize, j: usize) -> BigRational {
        BigRational::new(self.num[i][j].clone(), self.den.clone())
    }

    /// Inverse of a square matrix, if nonsingular.
    pub fn inverse(&self) -> Option<RatMatrix> {
        let n = self.rows();
        let mut a: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                let mut row: Vec<BigRational> = (0..n).map(|j| self.get(i, j)).collect();
                row.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
                row
            })
            .collect();
        for c in 0..n {
            let p = (c..n).find(|&r| !a[r][c].is_zero())?;
            a.swap(c, p);
            let inv = a[c][c].recip();
            a[c].iter_mut().for_each(|x| *x *= &inv);
            for r in 0..n {
                if r != c && !a[r][c].is_zero() {
                    let f = a[r][c].clone();
                    for k in 0..2 * n {
                        let t = &f * &a[c][k];
                        a[r][k] -= t;
                    }
                }
            }
        }
        let den = a.iter().flat_map(|r| r[n..].iter()).fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let num = a.iter().map(|r| r[n..].iter().map(|q| q.numer() * (&den / q.denom())).collect()).collect();
        Some(RatMatrix { num, den }.normalize())
    }
}

// ---------------------------------------------------------------- symmetrizer images

/// Semistandard tableaux of shape (l1, l2) with entries in 0..5, as position-indexed fillings.
fn semistandard_fillings(l1: usize, l2: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let row1: Vec<Vec<usize>> = (0..l1).map(|_| 0..N).multi_cartesian_product().filter(|r| r.windows(2).all(|w| w[0] <= w[1])).collect();
    let row1 = if l1 == 0 { vec![vec![]] } else { row1 };
    for r1 in &row1 {
        let row2: Vec<Vec<usize>> = if l2 == 0 {
            vec![vec![]]
        } else {
            (0..l2).map(|_| 0..N).multi_cartesian_product().filter(|r| r.windows(2).all(|w| w[0] <= w[1])).collect()
        };
        for r2 in row2 {
            if r2.iter().enumerate().all(|(j, &x)| x > r1[j]) {
                let mut f = r1.clone();
                f.extend(r2);
                out.push(f);
            }
        }
    }
    out
}

fn tensor_index(digits: &[usize]) -> usize {
    digits.iter().fold(0, |acc, &d| acc * N + d)
}

fn tensor_digits(mut idx: usize, a: usize) -> Vec<usize> {
    let mut d = vec![0; a];
    for t in (0..a).rev() {
        d[t] = idx % N;
        idx /= N;
    }
    d
}

/// c_λ·e_T = a_λ·b_λ·e_T as a sparse tensor.
fn young_image(filling: &[usize], l1: usize, l2: usize) -> HashMap<usize, i64> {
    // column antisymmetrizer: columns {j, l1+j} for j < l2
    let mut after_b: Vec<(Vec<usize>, i64)> = vec![(filling.to_vec(), 1)];
    for j in 0..l2 {
        let mut next = Vec::with_capacity(after_b.len() * 2);
        for (t, s) in after_b {
            let mut sw = t.clone();
            sw.swap(j, l1 + j);
            next.push((t, s));
            next.push((sw, -s));
        }
        after_b = next;
    }
    // row symmetrizer
    let mut out: HashMap<usize, i64> = HashMap::new();
    let p1: Vec<Vec<usize>> = (0..l1).permutations(l1).collect();
    let p2: Vec<Vec<usize>> = (0..l2).permutations(l2).collect();
    for (t, s) in &after_b {
        for s1 in &p1 {
            for s2 in &p2 {
                let mut u = Vec::with_capacity(l1 + l2);
                u.extend(s1.iter().map(|&k| t[k]));
                u.extend(s2.iter().map(|&k| t[l1 + k]));
                *out.entry(tensor_index(&u)).or_insert(0) += s;
            }
        }
    }
    out.retain(|_, v| *v != 0);
    out
}

/// Contraction of positions (p, q) against H: rest-index → value.
fn contract(t: &HashMap<usize, i64>, a: usize, p: usize, q: usize, h: &Mat5) -> HashMap<usize, i128> {
    let mut out: HashMap<usize, i128> = HashMap::new();
    for (&idx, &v) in t {
        let d = tensor_digits(idx, a);
        let c = h[d[p]][d[q]];
        if c == 0 {
            continue;
        }
        let rest: Vec<usize> = d.iter().enumerate().filter(|&(k, _)| k != p && k != q).map(|(_, &x)| x).collect();
        *out.entry(tensor_index(&rest)).or_insert(0) += v as i128 * c as i128;
    }
    out.retain(|_, v| *v != 0);
    out
}

/// The representation W_{a,b} relative to the invariant form H.
#[derive(Clone, Debug)]
pub struct WeightRep {
    pub a: usize,
    pub b: usize,
    pub dim: usize,
    pub form: Mat5,
    /// Basis vectors inside (ℚ⁵)^{⊗a}, sparse and primitive.
    pub basis: Vec<Vec<(usize, i128)>>,
    pivots: Vec<usize>,
    pivot_inv: RatMatrix,
}

fn check_weight(a: i64, b: i64) -> Result<(usize, usize)> {
    weight_dimension(a, b)?;
    if (a - b) % 2 != 0 {
        return Err(invalid!("W_{{{a},{b}}} needs a ≡ b mod 2"));
    }
    if a as usize > MAX_A {
        return Err(Error::Unsupported(format!("weight a = {a} exceeds the cap {MAX_A}")));
    }
    Ok((a as usize, b as usize))
}

/// W_{a,b} for the Euclidean form.
pub fn build_weight(a: i64, b: i64) -> Result<WeightRep> {
    build_weight_for(a, b, &crate::mat5::IDENTITY)
}

/// W_{a,b} for the invariant form H (the Hessian of the lattice it acts on).
pub fn build_weight_for(a: i64, b: i64, h: &Mat5) -> Result<WeightRep> {
    let (a, b) = check_weight(a, b)?;
    let expected = weight_dimension(a as i64, b as i64)? as usize;
    if a == 0 {
        return WeightRep::from_basis(0, 0, *h, vec![vec![(0, 1)]]);
    }
    let (l1, l2) = ((a + b) / 2, (a - b) / 2);
    let images: Vec<HashMap<usize, i64>> = semistandard_fillings(l1, l2).iter().map(|f| young_image(f, l1, l2)).collect();
    let m = images.len();
    // contraction rows, one representative pair per orbit of the row group
    let mut pairs = Vec::new();
    if l1 >= 2 {
        pairs.push((0, 1));
    }
    if l2 >= 2 {
        pairs.push((l1, l1 + 1));
    }
    if l2 >= 1 {
        pairs.push((0, l1));
    }
    let mut row_of: HashMap<(usize, usize), usize> = HashMap::new();
    let mut entries: Vec<(usize, usize, i128)> = Vec::new();
    for (k, img) in images.iter().enumerate() {
        for (pi, &(p, q)) in pairs.iter().enumerate() {
            for (rest, v) in contract(img, a, p, q, h) {
                let n = row_of.len();
                let r = *row_of.entry((pi, rest)).or_insert(n);
                entries.push((r, k, v));
            }
        }
    }
    let rows = row_of.len();
    let modp = |p: u64| -> Vec<Vec<u64>> {
        let mut mat = vec![vec![0u64; m]; rows.max(1)];
        for &(r, k, v) in &entries {
            mat[r][k] = (mat[r][k] + v.rem_euclid(p as i128) as u64) % p;
        }
        mat
    };
    let kernel = linalg::nullspace_modular(m, modp, |basis| {
        basis.iter().all(|y| {
            let mut acc = vec![BigInt::zero(); rows];
            for &(r, k, v) in &entries {
                acc[r] += &y[k] * v;
            }
            acc.iter().all(|x| x.is_zero())
        })
    })?;
    if kernel.len() != expected {
        return Err(inconsistent!("W_{{{a},{b}}} has dimension {} ≠ {expected}", kernel.len()));
    }
    let basis: Vec<Vec<(usize, i128)>> = kernel
        .iter()
        .map(|y| {
            let mut acc: HashMap<usize, BigInt> = HashMap::new();
            for (k, img) in images.iter().enumerate() {
                if y[k].is_zero() {
                    continue;
                }
                for (&i, &x) in img {
                    *acc.entry(i).or_insert_with(BigInt::zero) += &y[k] * x;
                }
            }
            let g = acc.values().fold(BigInt::zero(), |g, x| g.gcd(x));
            let mut v: Vec<(usize, i128)> = acc
                .into_iter()
                .filter(|(_, x)| !x.is_zero())
                .map(|(i, x)| (i, (x / &g).to_i128().expect("weight basis entry overflow")))
                .collect();
            v.sort();
            v
        })
        .collect();
    WeightRep::from_basis(a, b, *h, basis)
}

impl WeightRep {
    fn from_basis(a: usize, b: usize, form: Mat5, basis: Vec<Vec<(usize, i128)>>) -> Result<Self> {
        let dim = basis.len();
        // pivot tensor positions with B[P] invertible
        let cols = N.pow(a as u32);
        for p in word_primes().take(4) {
            let mut rows: Vec<Vec<u64>> = basis
                .iter()
                .map(|v| {
                    let mut r = vec![0u64; cols];
                    for &(i, x) in v {
                        r[i] = x.rem_euclid(p as i128) as u64;
                    }
                    r
                })
                .collect();
            let piv = linalg::rref_mod(&mut rows, p);
            if piv.len() == dim {
                let sub: Vec<Vec<BigInt>> = piv
                    .iter()
                    .map(|&pi| basis.iter().map(|v| v.iter().find(|e| e.0 == pi).map_or(BigInt::zero(), |e| BigInt::from(e.1))).collect())
                    .collect();
                let inv = RatMatrix::from_int(&sub).inverse().ok_or_else(|| inconsistent!("singular pivot block"))?;
                return Ok(WeightRep { a, b, dim, form, basis, pivots: piv, pivot_inv: inv });
            }
        }
        Err(inconsistent!("no invertible pivot block for W_{{{a},{b}}}"))
    }

    /// Dense form of basis vector k.
    pub fn dense(&self, k: usize) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); N.pow(self.a as u32)];
        for &(i, x) in &self.basis[k] {
            v[i] = BigInt::from(x);
        }
        v
    }

    /// Coordinates in this basis of a tensor given on the pivot positions.
    fn coords(&self, at_pivots: &[BigInt]) -> Vec<BigRational> {
        (0..self.dim)
            .map(|r| {
                let s: BigInt = self.pivot_inv.num[r].iter().zip(at_pivots).map(|(x, y)| x * y).sum();
                BigRational::new(s, self.pivot_inv.den.clone())
            })
            .collect()
    }

    /// All contractions vanish on every basis vector.
    pub fn is_traceless(&self) -> bool {
        let a = self.a;
        if a < 2 {
            return true;
        }
        self.basis.iter().all(|v| {
            let t: HashMap<usize, i64> = v.iter().map(|&(i, x)| (i, x as i64)).collect();
            (0..a).tuple_combinations().all(|(p, q)| contract(&t, a, p, q, &self.form).is_empty())
        })
    }
}

/// A rational 5×5 matrix num/den with num an integer matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RatMat5 {
    pub num: Mat5,
    pub den: i64,
}

impl RatMat5 {
    pub fn integral(g: Mat5) -> Self {
        RatMat5 { num: g, den: 1 }
    }
}

/// Matrix (in the bases of `src` and `dst`) of g^{⊗a}: W_src → W_dst, for g with
/// gᵀ·H_dst·g = H_src (g maps src-coordinates to dst-coordinates).
pub fn weight_map(src: &WeightRep, dst: &WeightRep, g: &RatMat5) -> Result<RatMatrix> {
    if src.a != dst.a || src.b != dst.b {
        return Err(invalid!("weight mismatch"));
    }
    let gh = crate::mat5::congruence(&dst.form, &g.num);
    let d2 = g.den * g.den;
    if (0..N).any(|i| (0..N).any(|j| gh[i][j] != src.form[i][j] * d2)) {
        return Err(invalid!("matrix is not an isometry between the weight forms"));
    }
    let a = src.a;
    let pivot_digits: Vec<Vec<usize>> = dst.pivots.iter().map(|&p| tensor_digits(p, a)).collect();
    let mut num = vec![vec![BigInt::zero(); src.dim]; dst.dim];
    let mut den = BigInt::one();
    let mut cols: Vec<Vec<BigRational>> = Vec::with_capacity(src.dim);
    for v in &src.basis {
        let at: Vec<BigInt> = pivot_digits
            .iter()
            .map(|pd| {
                let mut s: i128 = 0;
                for &(j, x) in v {
                    let jd = tensor_digits(j, a);
                    let mut prod: i128 = x;
                    for t in 0..a {
                        prod = prod.checked_mul(g.num[pd[t]][jd[t]] as i128).expect("tensor action overflow");
                        if prod == 0 {
                            break;
                        }
                    }
                    s = s.checked_add(prod).expect("tensor action overflow");
                }
                BigInt::from(s)
            })
            .collect();
        let c = dst.coords(&at);
        for q in &c {
            den = den.lcm(q.denom());
        }
        cols.push(c);
    }
    for (j, c) in cols.iter().enumerate() {
        for (i, q) in c.iter().enumerate() {
            num[i][j] = q.numer() * (&den / q.denom());
        }
    }
    let scale = BigInt::from(g.den).pow(a as u32);
    Ok(RatMatrix { num, den: den * scale }.normalize())
}

/// ρ(g) on W for g ∈ O(H) (−I acts as (−1)^a = 1, a being even whenever b is).
pub fn weight_action(w: &WeightRep, g: &Mat5) -> Result<RatMatrix> {
    weight_map(w, w, &RatMat5::integral(*g))
}

/// Gram matrix on W induced by H^{⊗a} (positive definite).
pub fn weight_gram(w: &WeightRep) -> RatMatrix {
    let a = w.a;
    let mut gram = vec![vec![BigInt::zero(); w.dim]; w.dim];
    for (r, u) in w.basis.iter().enumerate() {
        for (s, v) in w.basis.iter().enumerate() {
            let mut acc = BigInt::zero();
            for &(i, x) in u {
                let id = tensor_digits(i, a);
                for &(j, y) in v {
                    let jd = tensor_digits(j, a);
                    let f: i128 = (0..a).map(|t| w.form[id[t]][jd[t]] as i128).product();
                    if f != 0 {
                        acc += BigInt::from(x) * BigInt::from(y) * BigInt::from(f);
                    }
                }
            }
            gram[r][s] = acc;
        }
    }
    RatMatrix::from_int(&gram)
}

pub fn transpose(m: &RatMatrix) -> RatMatrix {
    let (r, c) = (m.rows(), m.cols());
    RatMatrix { num: (0..c).map(|j| (0..r).map(|i| m.num[i][j].clone()).collect()).collect(), den: m.den.clone() }
}

/// Nonzero entries of a rational matrix are all of absolute value at most `bound` after scaling.
pub fn max_abs(m: &RatMatrix) -> BigInt {
    m.num.iter().flatten().map(|x| x.abs()).max().unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        assert_eq!(weight_dimension(0, 0).unwrap(), 1);
        assert_eq!(weight_dimension(2, 0).unwrap(), 10);
        assert_eq!(weight_dimension(1, 1).unwrap(), 5);
        assert_eq!(weight_dimension(4, 0).unwrap(), 35);
        assert!(weight_dimension(0, 1).is_err());
    }

    #[test]
    fn small_weights_build() {
        for (a, b) in [(0, 0), (1, 1), (2, 0), (2, 2), (3, 1)] {
            let w = build_weight(a, b).unwrap();
            assert_eq!(w.dim as u64, weight_dimension(a, b).unwrap());
            assert!(w.is_traceless());
        }
        assert!(build_weight(1, 0).is_err());
        assert!(matches!(build_weight(8, 0), Err(Error::Unsupported(_))));
    }

    #[test]
    fn all_dimensions_up_to_cap() {
        for a in 0..=MAX_A as i64 {
            for b in (0..=a).filter(|b| (a - b) % 2 == 0) {
                let w = build_weight(a, b).unwrap();
                assert_eq!(w.dim as u64, weight_dimension(a, b).unwrap(), "({a},{b})");
            }
        }
    }

    #[test]
    fn action_is_homomorphism() {
        let w = build_weight(2, 0).unwrap();
        let p: Mat5 = [[0, 1, 0, 0, 0], [1, 0, 0, 0, 0], [0, 0, -1, 0, 0], [0, 0, 0, 0, 1], [0, 0, 0, 1, 0]];
        let s: Mat5 = [[1, 0, 0, 0, 0], [0, 0, 0, 0, -1], [0, 1, 0, 0, 0], [0, 0, 1, 0, 0], [0, 0, 0, 1, 0]];
        let lhs = weight_action(&w, &crate::mat5::mul(&p, &s)).unwrap();
        let rhs = weight_action(&w, &p).unwrap().mul(&weight_action(&w, &s).unwrap());
        assert_eq!(lhs, rhs);
        assert_eq!(weight_action(&w, &crate::mat5::IDENTITY).unwrap(), RatMatrix::identity(10));
        assert_eq!(weight_action(&w, &crate::mat5::neg(&crate::mat5::IDENTITY)).unwrap(), RatMatrix::identity(10));
    }
}
