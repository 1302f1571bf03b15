//! Spaces of algebraic modular forms over a genus and the Hecke operators T(p), T₁(p²).
//!
//! A form is a tuple (f_i) with f_i ∈ W_i, where W_i is W_{a,b} built on the Hessian of class
//! i, subject to θ_d(u)·ρ(u)·f_i = f_i for u ∈ SO(L_i). Coordinates are taken in per-class
//! block bases E_i. The operator is (T f)_i = Σ_{L′} θ_d(γ)·ρ(γ)·f_j over neighbours L′ of
//! L_i, where γ: L_j → L′ ⊂ L_i ⊗ ℚ is a proper isometry; block (i, j) of the matrix collects
//! neighbours of class i landing in class j, and the matrix acts on column vectors.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{mod_inv, prime_divisors};
use crate::eigen::{self, CharPoly};
use crate::error::{inconsistent, invalid, Result};
use crate::form::{self, RadicalGenerator};
use crate::linalg::{self, IntMatrix};
use crate::mat5::{self, Mat5, Vec5, N};
use crate::neighbours::{self, ClassIndex, GenusData, Neighbour};
use crate::poly::ZPoly;
use crate::weights::{self, RatMat5, RatMatrix, WeightRep};

/// Modulus on which θ_q is read off: q for odd q, 4 for q = 2.
fn sign_modulus(q: u64) -> i64 {
    if q == 2 {
        4
    } else {
        q as i64
    }
}

/// θ_q(γ) for γ = num/den mapping the source lattice into the target's rational space:
/// γ·v₀(source) ≡ ±v₀(target) on the q-primary part of the radical.
pub fn theta_sign(gamma: &RatMat5, src: &RadicalGenerator, dst: &RadicalGenerator) -> Result<i8> {
    if src.p != dst.p {
        return Err(invalid!("radical generators at different primes"));
    }
    let m = sign_modulus(src.p);
    let dinv = mod_inv(gamma.den.rem_euclid(m), m).ok_or_else(|| invalid!("denominator not prime to {m}"))?;
    let img = mat5::mul_vec(&gamma.num, &src.vector);
    let img: Vec5 = std::array::from_fn(|i| (img[i] % m * dinv).rem_euclid(m));
    let t: Vec5 = std::array::from_fn(|i| dst.vector[i].rem_euclid(m));
    if img == t {
        Ok(1)
    } else if (0..N).all(|i| img[i] == (-t[i]).rem_euclid(m)) {
        Ok(-1)
    } else {
        Err(inconsistent!("isometry does not map the radical at {} to ±the target generator", src.p))
    }
}

/// θ_d = Π_{q | d} θ_q.
fn theta_d(gamma: &RatMat5, src: &[RadicalGenerator], dst: &[RadicalGenerator]) -> Result<i8> {
    src.iter().zip(dst).try_fold(1i8, |s, (a, b)| Ok(s * theta_sign(gamma, a, b)?))
}

/// Basis (columns, W-coordinates) of {w : θ_d(u)ρ(u)w = w for all u in `proper_gens`}.
pub fn character_subspace(w: &WeightRep, proper_gens: &[Mat5], signs: &[i8]) -> Result<Vec<Vec<BigInt>>> {
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    for (u, &s) in proper_gens.iter().zip(signs) {
        let r = weights::weight_action(w, u)?;
        for i in 0..w.dim {
            rows.push(
                (0..w.dim)
                    .map(|j| {
                        let diag = if i == j { r.den.clone() } else { BigInt::zero() };
                        &r.num[i][j] * s as i64 - diag
                    })
                    .collect(),
            );
        }
    }
    if rows.is_empty() {
        return Ok((0..w.dim).map(|i| (0..w.dim).map(|j| BigInt::from((i == j) as i64)).collect()).collect());
    }
    let basis = linalg::nullspace_modular(
        w.dim,
        |p| {
            let pb = BigInt::from(p);
            rows.iter().map(|r| r.iter().map(|x| x.mod_floor(&pb).to_u64().unwrap()).collect()).collect()
        },
        |basis| {
            basis.iter().all(|v| rows.iter().all(|r| r.iter().zip(v).map(|(a, b)| a * b).sum::<BigInt>().is_zero()))
        },
    )?;
    linalg::saturate(&basis)
}

/// Per-class block of an [`OMFSpace`].
#[derive(Clone, Debug)]
struct ClassBlock {
    weight: WeightRep,
    radicals: Vec<RadicalGenerator>,
    /// E_i as a dim_W × k_i matrix.
    basis: RatMatrix,
    /// Left inverse data: pivot rows of E_i and the inverse of that k×k block.
    pivots: Vec<usize>,
    pivot_inv: RatMatrix,
}

impl ClassBlock {
    fn rank(&self) -> usize {
        self.basis.cols()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpaceDescriptor {
    pub d_minus: u64,
    pub d_plus: u64,
    pub a: u32,
    pub b: u32,
    pub d: u64,
}

/// The θ_d-isotypic space of weight W_{a,b} algebraic modular forms over a genus.
#[derive(Clone, Debug)]
pub struct OMFSpace {
    pub genus: GenusData,
    pub descriptor: SpaceDescriptor,
    pub offsets: Vec<usize>,
    pub dim: usize,
    blocks: Vec<ClassBlock>,
}

pub fn valid_character(d: u64, big_d: u64) -> bool {
    d > 0 && big_d % d == 0 && d.gcd(&(big_d / d)) == 1
}

pub fn build_space(genus: &GenusData, a: i64, b: i64, d: u64) -> Result<OMFSpace> {
    let big_d = genus.d();
    if !valid_character(d, big_d) {
        return Err(invalid!("d = {d} is not a Hall divisor of D = {big_d}"));
    }
    weights::weight_dimension(a, b)?;
    if (a - b) % 2 != 0 {
        return Err(invalid!("W_{{{a},{b}}} needs a ≡ b mod 2"));
    }
    let qs = prime_divisors(d);
    let blocks: Vec<ClassBlock> = genus
        .classes
        .par_iter()
        .zip(&genus.auts)
        .map(|(c, aut)| -> Result<ClassBlock> {
            let weight = weights::build_weight_for(a, b, c.hessian())?;
            let radicals: Vec<RadicalGenerator> = qs.iter().map(|&q| form::radical_generator(c, q)).collect::<Result<_>>()?;
            let gens = aut.proper_generators();
            let signs: Vec<i8> =
                gens.iter().map(|u| theta_d(&RatMat5::integral(*u), &radicals, &radicals)).collect::<Result<_>>()?;
            let e = character_subspace(&weight, &gens, &signs)?;
            let basis = RatMatrix::from_columns(&e, weight.dim);
            let (pivots, pivot_inv) = left_inverse(&basis)?;
            Ok(ClassBlock { weight, radicals, basis, pivots, pivot_inv })
        })
        .collect::<Result<_>>()?;
    let mut offsets = Vec::with_capacity(blocks.len() + 1);
    let mut dim = 0;
    for blk in &blocks {
        offsets.push(dim);
        dim += blk.rank();
    }
    offsets.push(dim);
    let descriptor = SpaceDescriptor { d_minus: genus.d_minus, d_plus: genus.d_plus, a: a as u32, b: b as u32, d };
    Ok(OMFSpace { genus: genus.clone(), descriptor, offsets, dim, blocks })
}

/// Pivot rows P of a full-column-rank matrix E and E[P]⁻¹.
fn left_inverse(e: &RatMatrix) -> Result<(Vec<usize>, RatMatrix)> {
    let k = e.cols();
    if k == 0 {
        return Ok((vec![], RatMatrix::zeros(0, 0)));
    }
    for p in crate::arith::word_primes().take(4) {
        let pb = BigInt::from(p);
        let mut t: Vec<Vec<u64>> =
            (0..k).map(|j| (0..e.rows()).map(|i| e.num[i][j].mod_floor(&pb).to_u64().unwrap()).collect()).collect();
        let piv = linalg::rref_mod(&mut t, p);
        if piv.len() == k {
            let sub: Vec<Vec<BigInt>> = piv.iter().map(|&r| e.num[r].clone()).collect();
            let inv = RatMatrix { num: sub, den: e.den.clone() }.inverse().ok_or_else(|| inconsistent!("singular block"))?;
            return Ok((piv, inv));
        }
    }
    Err(inconsistent!("block basis is not of full rank"))
}

impl OMFSpace {
    pub fn block_dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.rank()).collect()
    }

    pub fn weight_dim(&self) -> usize {
        self.blocks.first().map_or(0, |b| b.weight.dim)
    }

    pub fn radicals(&self, class: usize) -> &[RadicalGenerator] {
        &self.blocks[class].radicals
    }

    /// Coordinates c with E_i·c = x, checked exactly.
    fn block_coords(&self, i: usize, x: &RatMatrix) -> Result<RatMatrix> {
        let blk = &self.blocks[i];
        let at = RatMatrix { num: blk.pivots.iter().map(|&r| x.num[r].clone()).collect(), den: x.den.clone() };
        let c = blk.pivot_inv.mul(&at);
        if blk.basis.mul(&c) != x.clone().normalize() {
            return Err(inconsistent!("Hecke image leaves the θ-invariant subspace of class {i}"));
        }
        Ok(c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HeckeKind {
    /// T(p), from p-neighbours.
    #[serde(rename = "T")]
    T,
    /// T₁(p²), from (p,p)-neighbours.
    #[serde(rename = "T1")]
    T1,
}

impl fmt::Display for HeckeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HeckeKind::T => write!(f, "T"),
            HeckeKind::T1 => write!(f, "T1"),
        }
    }
}

impl std::str::FromStr for HeckeKind {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "T" | "t" => Ok(HeckeKind::T),
            "T1" | "t1" => Ok(HeckeKind::T1),
            _ => Err(invalid!("unknown operator kind {s:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OperatorDescriptor {
    #[serde(rename = "D_minus")]
    pub d_minus: u64,
    #[serde(rename = "D_plus")]
    pub d_plus: u64,
    pub a: u32,
    pub b: u32,
    pub d: u64,
    pub p: u64,
    pub kind: HeckeKind,
}

/// Hecke operator; `matrix` = scale × (rational operator), `scale` the least integral scaling.
/// The rational operator is the neighbour operator times p^{(a+b)/2} (T) or p^{a+b} (T₁).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeckeOperator {
    pub descriptor: OperatorDescriptor,
    pub scale: u64,
    pub matrix: IntMatrix,
}

impl HeckeOperator {
    /// Characteristic polynomial of the rational operator (the matrix divided by `scale`).
    pub fn charpoly(&self) -> Result<CharPoly> {
        let mut cp = eigen::charpoly(&self.matrix)?;
        if self.scale != 1 {
            let n = self.matrix.rows;
            let s = BigInt::from(self.scale);
            let coeffs: Vec<BigInt> = cp
                .poly
                .coeffs()
                .iter()
                .enumerate()
                .map(|(k, c)| {
                    let d = s.pow((n - k) as u32);
                    if (c % &d).is_zero() {
                        Ok(c / d)
                    } else {
                        Err(inconsistent!("operator eigenvalues are not algebraic integers"))
                    }
                })
                .collect::<Result<_>>()?;
            cp.poly = ZPoly::new(coeffs);
        }
        cp.provenance = Some(serde_json::to_string(&self.descriptor).unwrap());
        Ok(cp)
    }
}

/// For each class in parallel: list of (target class, proper γ) over the neighbours.
fn neighbour_isometries(genus: &GenusData, p: u64, kind: HeckeKind) -> Result<Vec<Vec<(usize, RatMat5)>>> {
    let index = ClassIndex::from_classes(&genus.classes);
    genus
        .classes
        .par_iter()
        .map(|c| -> Result<Vec<(usize, RatMat5)>> {
            let nbrs: Vec<Neighbour> = match kind {
                HeckeKind::T => neighbours::isotropic_lines(c, p)?
                    .iter()
                    .map(|l| neighbours::p_neighbour(c, p, l))
                    .collect::<Result<_>>()?,
                HeckeKind::T1 => neighbours::pp_neighbours(c, p)?,
            };
            nbrs.iter()
                .map(|n| {
                    let (j, g) = index.locate(&n.form).ok_or_else(|| inconsistent!("neighbour outside the known genus"))?;
                    // gᵀ·H_j·g = H′, so g⁻¹ maps L_j-coordinates to L′-coordinates
                    let phi = mat5::inverse_unimodular(&g).ok_or_else(|| inconsistent!("non-unimodular isometry"))?;
                    let mut num = mat5::mul(&n.basis, &phi);
                    if mat5::det(&num) < 0 {
                        num = mat5::neg(&num);
                    }
                    Ok((j, RatMat5 { num, den: n.scale }))
                })
                .collect()
        })
        .collect()
}

pub fn hecke_matrix(space: &OMFSpace, p: u64, kind: HeckeKind) -> Result<HeckeOperator> {
    let big_d = space.genus.d();
    if !crate::arith::is_prime(p) || big_d % p == 0 || (p == 2 && big_d % 2 == 0) {
        return Err(invalid!("Hecke operators need a prime p ∤ 2D (p = 2 allowed for odd D), got {p}"));
    }
    let h = space.genus.len();
    let isos = neighbour_isometries(&space.genus, p, kind)?;
    let trivial_weight = space.weight_dim() == 1;
    // classical normalisation: the similitude twist ν^{−(a+b)/2} contributes p^{(a+b)/2} per p
    let (a, b) = (space.descriptor.a, space.descriptor.b);
    let twist = match kind {
        HeckeKind::T => (p as i64).pow((a + b) / 2),
        HeckeKind::T1 => (p as i64).pow(a + b),
    };
    // block rows, computed per source class
    let rows: Vec<Vec<RatMatrix>> = (0..h)
        .into_par_iter()
        .map(|i| -> Result<Vec<RatMatrix>> {
            let bi = &space.blocks[i];
            let mut sums: Vec<Option<RatMatrix>> = vec![None; h];
            let mut scalar = vec![0i64; h];
            for (j, gamma) in &isos[i] {
                let bj = &space.blocks[*j];
                if bi.rank() == 0 || bj.rank() == 0 {
                    continue;
                }
                let s = theta_d(gamma, &bj.radicals, &bi.radicals)?;
                if trivial_weight {
                    scalar[*j] += s as i64;
                } else {
                    let r = weights::weight_map(&bj.weight, &bi.weight, gamma)?.scale(s as i64);
                    sums[*j] = Some(match sums[*j].take() {
                        None => r,
                        Some(acc) => acc.add(&r),
                    });
                }
            }
            (0..h)
                .map(|j| {
                    let bj = &space.blocks[j];
                    if bi.rank() == 0 || bj.rank() == 0 {
                        return Ok(RatMatrix::zeros(bi.rank(), bj.rank()));
                    }
                    let s = if trivial_weight {
                        RatMatrix::identity(1).scale(scalar[j])
                    } else {
                        match &sums[j] {
                            Some(m) => m.clone(),
                            None => return Ok(RatMatrix::zeros(bi.rank(), bj.rank())),
                        }
                    };
                    Ok(space.block_coords(i, &s.mul(&bj.basis))?.scale(twist))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    // common denominator
    let den = rows.iter().flatten().fold(BigInt::one(), |acc, m| acc.lcm(&m.den));
    let n = space.dim;
    let mut mat = IntMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        for (j, blk) in row.iter().enumerate() {
            let f = &den / &blk.den;
            for r in 0..blk.rows() {
                for c in 0..blk.cols() {
                    let v = &blk.num[r][c] * &f;
                    mat[(space.offsets[i] + r, space.offsets[j] + c)] =
                        v.to_i64().ok_or_else(|| inconsistent!("Hecke matrix entry overflows i64"))?;
                }
            }
        }
    }
    let d = &space.descriptor;
    Ok(HeckeOperator {
        descriptor: OperatorDescriptor { d_minus: d.d_minus, d_plus: d.d_plus, a: d.a, b: d.b, d: d.d, p, kind },
        scale: den.to_u64().ok_or_else(|| inconsistent!("operator scale overflows"))?,
        matrix: mat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::QuinaryForm;

    fn genus61() -> GenusData {
        let q = QuinaryForm::from_coefficients(&[1, 0, 0, 1, 1, 1, 0, 1, 0, 1, 0, 0, 1, 0, 8]).unwrap();
        neighbours::enumerate_genus(&q, 2).unwrap()
    }

    #[test]
    fn d61_trivial_weight() {
        let g = genus61();
        let s = build_space(&g, 0, 0, 1).unwrap();
        assert_eq!(s.dim, 8);
        let t2 = hecke_matrix(&s, 2, HeckeKind::T).unwrap();
        assert_eq!(t2.scale, 1);
        for i in 0..8 {
            assert_eq!(t2.matrix.row(i).iter().sum::<i64>(), 15);
        }
        let expected = ZPoly::product(&[
            ZPoly::linear(15),
            ZPoly::linear(-7),
            ZPoly::from_i64(&[2026, -5205, 4471, -1714, 322, -29, 1]),
        ]);
        assert_eq!(t2.charpoly().unwrap().poly, expected);
    }

    #[test]
    fn identity_sign() {
        let g = genus61();
        let r = form::radical_generator(&g.classes[0], 61).unwrap();
        assert_eq!(theta_sign(&RatMat5::integral(mat5::IDENTITY), &r, &r).unwrap(), 1);
        assert_eq!(theta_sign(&RatMat5::integral(mat5::neg(&mat5::IDENTITY)), &r, &r).unwrap(), -1);
    }

    #[test]
    fn rejects_bad_inputs() {
        let g = genus61();
        assert!(build_space(&g, 1, 0, 1).is_err());
        assert!(build_space(&g, 0, 0, 7).is_err());
        let s = build_space(&g, 0, 0, 1).unwrap();
        assert!(hecke_matrix(&s, 61, HeckeKind::T).is_err());
    }
}
