//! Exact dense linear algebra: integer matrices, modular elimination, rational
//! reconstruction, and lattice saturation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{mod_inv, mul_mod, word_primes};
use crate::error::{inconsistent, invalid, Result};

/// Dense integer matrix, row-major, entries in i64.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(invalid!("ragged matrix"));
        }
        Ok(IntMatrix { rows: r, cols: c, data: rows.concat() })
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        self.data.chunks(self.cols.max(1)).map(|r| r.to_vec()).take(self.rows).collect()
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, o: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, o.rows);
        let mut r = IntMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..o.cols {
                    r.data[i * o.cols + j] += a * o[(k, j)];
                }
            }
        }
        r
    }

    pub fn mul_vec_big(&self, v: &[BigInt]) -> Vec<BigInt> {
        (0..self.rows)
            .map(|i| {
                self.row(i).iter().zip(v).filter(|(a, _)| **a != 0).map(|(a, x)| x * BigInt::from(*a)).sum()
            })
            .collect()
    }

    pub fn mod_p(&self, p: u64) -> Vec<Vec<u64>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|&x| x.rem_euclid(p as i64) as u64).collect())
            .collect()
    }

    /// Maximum absolute row sum (bounds the spectral radius).
    pub fn row_norm(&self) -> u64 {
        (0..self.rows).map(|i| self.row(i).iter().map(|x| x.unsigned_abs()).sum()).max().unwrap_or(0)
    }

    /// Apply a permutation: result[(i,j)] = self[(perm[i], perm[j])].
    pub fn permuted(&self, perm: &[usize]) -> IntMatrix {
        let n = self.rows;
        let mut r = IntMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                r[(i, j)] = self[(perm[i], perm[j])];
            }
        }
        r
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        &mut self.data[i * self.cols + j]
    }
}

// ---------------------------------------------------------------- mod-p kernels

/// In-place reduced row echelon form over 𝔽_p; returns pivot columns.
pub fn rref_mod(m: &mut [Vec<u64>], p: u64) -> Vec<usize> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, pr);
        let inv = mod_inv(m[r][c] as i64, p as i64).unwrap() as u64;
        for x in m[r].iter_mut() {
            *x = mul_mod(*x, inv, p);
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && row[c] != 0 {
                let f = row[c];
                for (x, &y) in row.iter_mut().zip(&pivot_row).skip(c) {
                    *x = (*x + p - mul_mod(f, y, p)) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Kernel basis over 𝔽_p in reduced form (one vector per free column, 1 at that column).
pub fn kernel_mod(m: &[Vec<u64>], cols: usize, p: u64) -> Vec<Vec<u64>> {
    let mut a = m.to_vec();
    let pivots = rref_mod(&mut a, p);
    kernel_from_rref(&a, &pivots, cols, p)
}

fn kernel_from_rref(a: &[Vec<u64>], pivots: &[usize], cols: usize, p: u64) -> Vec<Vec<u64>> {
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0u64; cols];
            v[f] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - a[r][f]) % p;
            }
            v
        })
        .collect()
}

pub fn rank_mod(m: &[Vec<u64>], p: u64) -> usize {
    let mut a = m.to_vec();
    rref_mod(&mut a, p).len()
}

/// Characteristic polynomial over 𝔽_p via Hessenberg reduction (low degree first, monic).
pub fn charpoly_mod(m: &[Vec<u64>], p: u64) -> Vec<u64> {
    let n = m.len();
    let mut h: Vec<Vec<u64>> = m.to_vec();
    let sub = |a: u64, b: u64| (a + p - b) % p;
    for j in 0..n.saturating_sub(2) {
        let Some(i) = (j + 1..n).find(|&i| h[i][j] != 0) else { continue };
        if i != j + 1 {
            h.swap(i, j + 1);
            for row in h.iter_mut() {
                row.swap(i, j + 1);
            }
        }
        let inv = mod_inv(h[j + 1][j] as i64, p as i64).unwrap() as u64;
        for i in j + 2..n {
            let u = mul_mod(h[i][j], inv, p);
            if u == 0 {
                continue;
            }
            // row_i -= u·row_{j+1}; col_{j+1} += u·col_i
            for k in 0..n {
                let t = mul_mod(u, h[j + 1][k], p);
                h[i][k] = sub(h[i][k], t);
            }
            for row in h.iter_mut() {
                let t = mul_mod(u, row[i], p);
                row[j + 1] = (row[j + 1] + t) % p;
            }
        }
    }
    // recurrence for the charpolys of leading principal blocks
    let mut polys: Vec<Vec<u64>> = vec![vec![1]];
    for k in 0..n {
        // p_{k+1} = (x − h_kk) p_k − Σ_{i<k} h_ik · (∏_{m=i+1}^{k} h_{m,m−1}) · p_i
        let mut next = vec![0u64; k + 2];
        for (d, &c) in polys[k].iter().enumerate() {
            next[d + 1] = (next[d + 1] + c) % p;
            next[d] = sub(next[d], mul_mod(h[k][k], c, p));
        }
        let mut prod = 1u64;
        for i in (0..k).rev() {
            prod = mul_mod(prod, h[i + 1][i], p);
            if prod == 0 {
                break;
            }
            let f = mul_mod(h[i][k], prod, p);
            if f == 0 {
                continue;
            }
            for (d, &c) in polys[i].iter().enumerate() {
                next[d] = sub(next[d], mul_mod(f, c, p));
            }
        }
        polys.push(next);
    }
    polys.pop().unwrap()
}

// ---------------------------------------------------------------- CRT and reconstruction

/// Symmetric CRT lift of residues (r_i mod p_i).
pub fn crt(residues: &[u64], primes: &[u64]) -> (BigInt, BigInt) {
    let mut x = BigInt::zero();
    let mut m = BigInt::one();
    for (&r, &p) in residues.iter().zip(primes) {
        let pb = BigInt::from(p);
        // x + m·t ≡ r mod p
        let xm = (&x).mod_floor(&pb).to_u64().unwrap();
        let mm = (&m).mod_floor(&pb).to_u64().unwrap();
        let inv = mod_inv(mm as i64, p as i64).unwrap() as u64;
        let t = mul_mod((r + p - xm) % p, inv, p);
        x += &m * BigInt::from(t);
        m *= pb;
    }
    (x, m)
}

pub fn symmetric(x: &BigInt, m: &BigInt) -> BigInt {
    let half: BigInt = m >> 1usize;
    let r = x.mod_floor(m);
    if r > half {
        r - m
    } else {
        r
    }
}

/// Rational reconstruction of x mod m: n/d with |n|, d ≤ √(m/2).
pub fn rational_reconstruct(x: &BigInt, m: &BigInt) -> Option<BigRational> {
    let bound: BigInt = (m >> 1usize).sqrt();
    let (mut r0, mut r1) = (m.clone(), x.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        (r0, r1, t0, t1) = (r1, r2, t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(BigRational::new(r1, t1))
}

// ---------------------------------------------------------------- rational nullspace

/// Kernel over ℚ of an integer matrix given by a residue oracle: `modp(p)` returns the matrix
/// mod p, `check` verifies a candidate integer kernel basis exactly. Returns integer column
/// vectors (one per free column, primitive).
pub fn nullspace_modular(
    cols: usize,
    modp: impl Fn(u64) -> Vec<Vec<u64>> + Sync,
    check: impl Fn(&[Vec<BigInt>]) -> bool,
) -> Result<Vec<Vec<BigInt>>> {
    let mut best: Option<(Vec<usize>, Vec<Vec<Vec<u64>>>, Vec<u64>)> = None;
    let mut primes = word_primes();
    let batch = rayon::current_num_threads().clamp(2, 8);
    for _round in 0..64 {
        let ps: Vec<u64> = (&mut primes).take(batch).collect();
        let results: Vec<(u64, Vec<usize>, Vec<Vec<u64>>)> = ps
            .par_iter()
            .map(|&p| {
                let mut a = modp(p);
                let piv = rref_mod(&mut a, p);
                let k = kernel_from_rref(&a, &piv, cols, p);
                (p, piv, k)
            })
            .collect();
        for (p, piv, k) in results {
            let better = match &best {
                None => true,
                Some((bp, _, _)) => piv.len() > bp.len() || (piv.len() == bp.len() && piv < *bp),
            };
            if better {
                best = Some((piv.clone(), vec![], vec![]));
            }
            let (bp, ks, bps) = best.as_mut().unwrap();
            if *bp == piv {
                ks.push(k);
                bps.push(p);
            }
        }
        let (_, ks, bps) = best.as_ref().unwrap();
        if ks.is_empty() {
            continue;
        }
        let dim = ks[0].len();
        if dim == 0 {
            return Ok(vec![]);
        }
        let modulus: BigInt = bps.iter().map(|&p| BigInt::from(p)).product();
        let mut basis = Vec::with_capacity(dim);
        let mut ok = true;
        'vec: for v in 0..dim {
            let mut entries = Vec::with_capacity(cols);
            for c in 0..cols {
                let res: Vec<u64> = ks.iter().map(|k| k[v][c]).collect();
                let (x, _) = crt(&res, bps);
                match rational_reconstruct(&x, &modulus) {
                    Some(q) => entries.push(q),
                    None => {
                        ok = false;
                        break 'vec;
                    }
                }
            }
            basis.push(clear_denominators(&entries));
        }
        if ok && check(&basis) {
            return Ok(basis);
        }
    }
    Err(inconsistent!("modular nullspace did not stabilise"))
}

/// Primitive integer vector proportional to a rational vector.
pub fn clear_denominators(v: &[BigRational]) -> Vec<BigInt> {
    let l = v.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let ints: Vec<BigInt> = v.iter().map(|q| q.numer() * (&l / q.denom())).collect();
    make_primitive(&ints)
}

pub fn make_primitive(v: &[BigInt]) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

/// Kernel over ℚ of an integer matrix; primitive integer basis vectors.
pub fn nullspace_int(m: &IntMatrix) -> Result<Vec<Vec<BigInt>>> {
    nullspace_modular(
        m.cols,
        |p| m.mod_p(p),
        |basis| basis.iter().all(|v| m.mul_vec_big(v).iter().all(|x| x.is_zero())),
    )
}

// ---------------------------------------------------------------- saturation

/// Saturation (ℚ-span ∩ ℤⁿ) of the lattice spanned by the given integer column vectors,
/// which must be linearly independent.
///
/// With C the n×k matrix of columns and T a basis of the lattice spanned by the rows of C,
/// C = C_sat·Tᵀ for a saturated basis C_sat; we solve for C_sat.
pub fn saturate(vectors: &[Vec<BigInt>]) -> Result<Vec<Vec<BigInt>>> {
    let k = vectors.len();
    if k == 0 {
        return Ok(vec![]);
    }
    let n = vectors[0].len();
    // rows of C as vectors in ℤ^k
    let rows: Vec<Vec<BigInt>> = (0..n).map(|i| vectors.iter().map(|v| v[i].clone()).collect()).collect();
    let t = row_lattice_basis(&rows, k).ok_or_else(|| inconsistent!("saturate: vectors dependent"))?;
    // t is lower-triangular-by-echelon (row r has pivot at column r); solve X·Tᵀ = C row by row:
    // for each row c of C, find x with Σ_r x_r·t_r = c, i.e. c expressed in the basis t.
    let mut out = vec![vec![BigInt::zero(); n]; k];
    for (i, c) in rows.iter().enumerate() {
        let mut rem = c.clone();
        for r in 0..k {
            // echelon: t[r] has zeros before column r and pivot t[r][r]
            if rem[r].is_zero() {
                continue;
            }
            let (q, m) = rem[r].div_rem(&t[r][r]);
            if !m.is_zero() {
                return Err(inconsistent!("saturate: non-integral coordinates"));
            }
            for j in r..k {
                let d = &q * &t[r][j];
                rem[j] -= d;
            }
            out[r][i] = q;
        }
    }
    Ok(out)
}

/// Echelon basis of the full-rank lattice in ℤ^k spanned by `gens`.
fn row_lattice_basis(gens: &[Vec<BigInt>], k: usize) -> Option<Vec<Vec<BigInt>>> {
    let mut rows: Vec<Vec<BigInt>> = gens.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let mut out = Vec::with_capacity(k);
    for c in 0..k {
        loop {
            let nz: Vec<usize> = (0..rows.len()).filter(|&r| !rows[r][c].is_zero()).collect();
            if nz.len() <= 1 {
                break;
            }
            let piv = *nz.iter().min_by_key(|&&r| rows[r][c].abs()).unwrap();
            let pr = rows[piv].clone();
            for &r in &nz {
                if r != piv {
                    let q = rows[r][c].div_floor(&pr[c]);
                    for j in c..k {
                        let d = &q * &pr[j];
                        rows[r][j] -= d;
                    }
                }
            }
        }
        let piv = (0..rows.len()).find(|&r| !rows[r][c].is_zero())?;
        let mut pr = rows.swap_remove(piv);
        if pr[c].is_negative() {
            pr.iter_mut().for_each(|x| *x = -x.clone());
        }
        out.push(pr);
        rows.retain(|r| r.iter().any(|x| !x.is_zero()));
    }
    Some(out)
}

/// Saturated integer basis of ker(M) over ℚ.
pub fn integer_kernel(m: &IntMatrix) -> Result<Vec<Vec<BigInt>>> {
    saturate(&nullspace_int(m)?)
}


#[cfg(test)]
pub(crate) fn modinv_big(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.extended_gcd(m);
    e.x.mod_floor(m)
}
