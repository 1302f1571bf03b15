//! Kneser p- and (p,p)-neighbours, and genus enumeration by neighbour closure.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{self, mod_inv};
use crate::error::{inconsistent, invalid, Result};
use crate::form::{self, Place, QuinaryForm};
use crate::isometry::{self, IsometryGroup, Prepared};
use crate::mat5::{self, Mat5, Vec5, N};

/// Theta-series precision used to bucket classes before isometry testing.
pub const THETA_PREC: usize = 6;

fn check_prime(q: &QuinaryForm, p: u64) -> Result<()> {
    if !arith::is_prime(p) {
        return Err(invalid!("{p} is not prime"));
    }
    if (q.det() / 2) % p as i64 == 0 {
        return Err(invalid!("{p} divides D = {}", q.det() / 2));
    }
    Ok(())
}

fn pm(x: i64, p: i64) -> i64 {
    x.rem_euclid(p)
}

/// Normalised projective points of P⁴(𝔽_p) (first nonzero coordinate 1), in lexicographic order.
fn projective_points(p: i64) -> Vec<Vec5> {
    let mut pts = Vec::new();
    for lead in 0..N {
        let free = N - lead - 1;
        let count = (p as usize).pow(free as u32);
        for mut idx in 0..count {
            let mut v = [0i64; N];
            v[lead] = 1;
            for k in (lead + 1..N).rev() {
                v[k] = (idx % p as usize) as i64;
                idx /= p as usize;
            }
            pts.push(v);
        }
    }
    pts
}

/// Isotropic lines of Q mod p, as normalised representatives with entries in [0, p).
pub fn isotropic_lines(q: &QuinaryForm, p: u64) -> Result<Vec<Vec5>> {
    check_prime(q, p)?;
    let p = p as i64;
    Ok(projective_points(p).into_iter().filter(|v| q.eval(v) % p == 0).collect())
}

/// A neighbour lattice together with its basis in the coordinates of the parent lattice.
#[derive(Debug, Clone)]
pub struct Neighbour {
    /// Reduced form of the neighbour.
    pub form: QuinaryForm,
    /// Integer matrix whose columns, divided by `scale`, are the reduced basis in parent coordinates.
    pub basis: Mat5,
    pub scale: i64,
}

/// Lattice spanned by `gens`/p (gens in parent coordinates), reduced.
fn lattice_from_generators(q: &QuinaryForm, gens: &[[i128; N]], p: i64) -> Result<Neighbour> {
    let rows = mat5::lattice_basis(gens).ok_or_else(|| inconsistent!("neighbour generators not of full rank"))?;
    let b: Mat5 = std::array::from_fn(|i| std::array::from_fn(|j| rows[j][i] as i64));
    let hb = mat5::congruence(q.hessian(), &b);
    let p2 = p * p;
    let mut h = [[0i64; N]; N];
    for i in 0..N {
        for j in 0..N {
            if hb[i][j] % p2 != 0 {
                return Err(inconsistent!("neighbour lattice not integral"));
            }
            h[i][j] = hb[i][j] / p2;
        }
        if h[i][i] % 2 != 0 {
            return Err(inconsistent!("neighbour lattice not even"));
        }
    }
    let nf = QuinaryForm::new(h)?;
    if nf.det() != q.det() {
        return Err(inconsistent!("neighbour determinant {} ≠ {}", nf.det(), q.det()));
    }
    let (red, g) = nf.reduced();
    Ok(Neighbour { form: red, basis: mat5::mul(&b, &g), scale: p })
}

/// ⟨v, e_i⟩ mod p for all i.
fn pairing_row(q: &QuinaryForm, v: &Vec5, p: i64) -> Vec5 {
    let hv = mat5::mul_vec(q.hessian(), v);
    std::array::from_fn(|i| pm(hv[i], p))
}

/// Basis generators (scaled by p) of {w ∈ L : ⟨x,w⟩ ≡ 0 mod p for x in `xs`}, xs independent mod p.
fn orthogonal_generators(q: &QuinaryForm, xs: &[Vec5], p: i64) -> Result<Vec<[i128; N]>> {
    // Gaussian elimination of the pairing rows mod p
    let mut rows: Vec<Vec5> = xs.iter().map(|x| pairing_row(q, x, p)).collect();
    let mut pivots = Vec::new();
    for r in 0..rows.len() {
        let c = (0..N)
            .find(|&c| rows[r][c] != 0 && !pivots.contains(&c))
            .ok_or_else(|| inconsistent!("pairing rows dependent mod {p}"))?;
        let inv = mod_inv(rows[r][c], p).unwrap();
        rows[r] = std::array::from_fn(|k| pm(rows[r][k] * inv, p));
        for s in 0..rows.len() {
            if s != r && rows[s][c] != 0 {
                let f = rows[s][c];
                rows[s] = std::array::from_fn(|k| pm(rows[s][k] - f * rows[r][k], p));
            }
        }
        pivots.push(c);
    }
    let mut gens = Vec::new();
    for k in 0..N {
        let mut w = [0i128; N];
        if pivots.contains(&k) {
            w[k] = p as i128;
        } else {
            w[k] = 1;
            for (r, &c) in pivots.iter().enumerate() {
                w[c] = pm(-rows[r][k], p) as i128;
            }
        }
        gens.push(w.map(|x| x * p as i128));
    }
    Ok(gens)
}

/// Lift an isotropic vector mod p to v with Q(v) ≡ 0 mod p².
fn lift_isotropic(q: &QuinaryForm, line: &Vec5, p: i64) -> Result<Vec5> {
    let v = *line;
    if q.eval(&v) % p != 0 {
        return Err(invalid!("line {v:?} is not isotropic mod {p}"));
    }
    let qv = q.eval(&v);
    if qv % (p * p) == 0 {
        return Ok(v);
    }
    let row = pairing_row(q, &v, p);
    let j = (0..N).find(|&j| row[j] != 0).ok_or_else(|| inconsistent!("isotropic vector in the radical mod {p}"))?;
    let c = pm(-(qv / p) * mod_inv(row[j], p).unwrap(), p);
    let mut w = v;
    w[j] += p * c;
    debug_assert_eq!(q.eval(&w) % (p * p), 0);
    Ok(w)
}

/// The p-neighbour L′ = ℤ·v/p + {w ∈ L : ⟨v,w⟩ ≡ 0 mod p} attached to an isotropic line.
pub fn p_neighbour(q: &QuinaryForm, p: u64, line: &Vec5) -> Result<Neighbour> {
    check_prime(q, p)?;
    let p = p as i64;
    let v = lift_isotropic(q, line, p)?;
    let mut gens = orthogonal_generators(q, &[v], p)?;
    gens.push(v.map(|x| x as i128));
    lattice_from_generators(q, &gens, p)
}

/// Totally isotropic planes mod p, each as a reduced-echelon pair of basis vectors.
pub fn isotropic_planes(q: &QuinaryForm, p: u64) -> Result<Vec<[Vec5; 2]>> {
    let lines = isotropic_lines(q, p)?;
    let pi = p as i64;
    let mut planes: Vec<[Vec5; 2]> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (a, x) in lines.iter().enumerate() {
        for y in &lines[a + 1..] {
            if q.inner(x, y) % pi != 0 {
                continue;
            }
            let plane = echelon_plane(x, y, pi);
            if seen.insert(plane) {
                planes.push(plane);
            }
        }
    }
    planes.sort();
    Ok(planes)
}

fn echelon_plane(x: &Vec5, y: &Vec5, p: i64) -> [Vec5; 2] {
    let mut r = [*x, *y];
    let c0 = (0..N).find(|&c| r[0][c] != 0 || r[1][c] != 0).unwrap();
    if r[0][c0] == 0 {
        r.swap(0, 1);
    }
    let inv = mod_inv(r[0][c0], p).unwrap();
    r[0] = r[0].map(|t| pm(t * inv, p));
    let f = r[1][c0];
    r[1] = std::array::from_fn(|k| pm(r[1][k] - f * r[0][k], p));
    let c1 = (0..N).find(|&c| r[1][c] != 0).unwrap();
    let inv = mod_inv(r[1][c1], p).unwrap();
    r[1] = r[1].map(|t| pm(t * inv, p));
    let f = r[0][c1];
    r[0] = std::array::from_fn(|k| pm(r[0][k] - f * r[1][k], p));
    r
}

/// All (p,p)-neighbours: for each totally isotropic plane ⟨x,y⟩ mod p, the p lattices
/// ℤx̃/p + ℤỹ/p + {w : ⟨x,w⟩ ≡ ⟨y,w⟩ ≡ 0 mod p} over lifts with Q(x̃), Q(ỹ), ⟨x̃,ỹ⟩ ≡ 0 mod p².
pub fn pp_neighbours(q: &QuinaryForm, p: u64) -> Result<Vec<Neighbour>> {
    let planes = isotropic_planes(q, p)?;
    let pi = p as i64;
    let mut out = Vec::with_capacity(planes.len() * p as usize);
    for [x, y] in planes {
        out.extend(plane_neighbours(q, &x, &y, pi)?);
    }
    Ok(out)
}

fn plane_neighbours(q: &QuinaryForm, x: &Vec5, y: &Vec5, p: i64) -> Result<Vec<Neighbour>> {
    let p2 = p * p;
    let (qx, qy, bxy) = (q.eval(x), q.eval(y), q.inner(x, y));
    if qx % p != 0 || qy % p != 0 || bxy % p != 0 {
        return Err(invalid!("plane is not totally isotropic mod {p}"));
    }
    // x̃ = x + p·a, ỹ = y + p·b; conditions on (⟨x,a⟩,⟨y,a⟩,⟨x,b⟩,⟨y,b⟩) mod p
    let ax = pm(-(qx / p), p);
    let by = pm(-(qy / p), p);
    let c = pm(-(bxy / p), p);
    let rx = pairing_row(q, x, p);
    let ry = pairing_row(q, y, p);
    // a 2×2 invertible minor of the pairing rows
    let (i, j, det_inv) = (0..N)
        .flat_map(|i| (i + 1..N).map(move |j| (i, j)))
        .find_map(|(i, j)| {
            let d = pm(rx[i] * ry[j] - rx[j] * ry[i], p);
            mod_inv(d, p).map(|inv| (i, j, inv))
        })
        .ok_or_else(|| inconsistent!("plane pairing rows dependent mod {p}"))?;
    // solve ⟨x,u⟩ ≡ s, ⟨y,u⟩ ≡ t with u supported on {i, j}
    let solve = |s: i64, t: i64| -> Vec5 {
        let ui = pm((s * ry[j] - t * rx[j]) * det_inv, p);
        let uj = pm((t * rx[i] - s * ry[i]) * det_inv, p);
        let mut u = [0; N];
        u[i] = ui;
        u[j] = uj;
        u
    };
    let base = orthogonal_generators(q, &[*x, *y], p)?;
    let mut out = Vec::with_capacity(p as usize);
    for t in 0..p {
        let a = solve(ax, t);
        let b = solve(pm(c - t, p), by);
        let xt: Vec5 = std::array::from_fn(|k| x[k] + p * a[k]);
        let yt: Vec5 = std::array::from_fn(|k| y[k] + p * b[k]);
        debug_assert!(q.eval(&xt) % p2 == 0 && q.eval(&yt) % p2 == 0 && q.inner(&xt, &yt) % p2 == 0);
        let mut gens = base.clone();
        gens.push(xt.map(|z| z as i128));
        gens.push(yt.map(|z| z as i128));
        out.push(lattice_from_generators(q, &gens, p)?);
    }
    Ok(out)
}

/// The genus of a lattice, with classes in deterministic BFS order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenusData {
    pub seed: QuinaryForm,
    pub d_minus: u64,
    pub d_plus: u64,
    pub classes: Vec<QuinaryForm>,
    pub auts: Vec<IsometryGroup>,
    pub theta: Vec<Vec<u64>>,
    pub traversal_prime: u64,
}

impl GenusData {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn d(&self) -> u64 {
        self.d_minus * self.d_plus
    }

    /// Σ 1/|Aut(L_i)| as a reduced fraction.
    pub fn mass(&self) -> (u128, u128) {
        use num_integer::Integer;
        let (mut n, mut d) = (0u128, 1u128);
        for a in &self.auts {
            let o = a.order as u128;
            n = n * o + d;
            d *= o;
            let g = n.gcd(&d);
            n /= g;
            d /= g;
        }
        (n, d)
    }
}

/// Theta-prefix-indexed class lookup with prepared short-vector data.
pub struct ClassIndex {
    pub classes: Vec<QuinaryForm>,
    prepared: Vec<Prepared>,
    buckets: HashMap<Vec<u64>, Vec<usize>>,
}

impl ClassIndex {
    pub fn new() -> Self {
        ClassIndex { classes: vec![], prepared: vec![], buckets: HashMap::new() }
    }

    pub fn from_classes(classes: &[QuinaryForm]) -> Self {
        let mut idx = Self::new();
        for c in classes {
            idx.push(c.clone());
        }
        idx
    }

    pub fn push(&mut self, q: QuinaryForm) -> usize {
        let key = isometry::theta_series(&q, THETA_PREC);
        let i = self.classes.len();
        self.prepared.push(Prepared::for_basis_of(&q));
        self.classes.push(q);
        self.buckets.entry(key).or_default().push(i);
        i
    }

    /// Find (class index, g) with gᵀ·H_class·g = H_q, if q is in a known class.
    /// Expects a reduced q (as produced by neighbour construction); see [`Self::locate_any`].
    pub fn locate(&self, q: &QuinaryForm) -> Option<(usize, Mat5)> {
        let key = isometry::theta_series(q, THETA_PREC);
        self.locate_with_key(q, &key)
    }

    /// As [`Self::locate`] for a form in an arbitrary basis: reduces first.
    pub fn locate_any(&self, q: &QuinaryForm) -> Option<(usize, Mat5)> {
        let (r, g) = q.reduced();
        let (i, phi) = self.locate(&r)?;
        Some((i, mat5::mul(&phi, &mat5::inverse_unimodular(&g)?)))
    }

    pub fn locate_with_key(&self, q: &QuinaryForm, key: &[u64]) -> Option<(usize, Mat5)> {
        let cands = self.buckets.get(key)?;
        let pq = Prepared::for_basis_of(q);
        for &i in cands {
            let pc = &self.prepared[i];
            let found = if pc.bound() >= pq.bound() {
                isometry::isometry_map_prepared(pc, &pq)
            } else {
                isometry::isometry_map_prepared(&Prepared::new(&self.classes[i], pq.bound()), &pq)
            };
            if let Some(g) = found {
                return Some((i, g));
            }
        }
        None
    }
}

impl Default for ClassIndex {
    fn default() -> Self {
        Self::new()
    }
}

/// Local data every class of the genus must share.
fn genus_signature(q: &QuinaryForm) -> Result<Vec<(Place, i8, Option<i8>)>> {
    let d = (q.det() / 2) as u64;
    let mut sig = vec![(Place::Infinity, form::hasse_witt(q, Place::Infinity)?, None)];
    for p in arith::prime_divisors(2 * d) {
        let e = if d % p == 0 { Some(form::eichler_invariant(q, p)?) } else { None };
        sig.push((Place::Finite(p), form::hasse_witt(q, Place::Finite(p))?, e));
    }
    Ok(sig)
}

/// Smallest prime not dividing D.
pub fn default_prime(q: &QuinaryForm) -> u64 {
    let d = (q.det() / 2) as u64;
    arith::primes_from(2).find(|p| d % p != 0).unwrap()
}

/// BFS closure of the p-neighbour relation from `seed`.
pub fn enumerate_genus(seed: &QuinaryForm, p: u64) -> Result<GenusData> {
    check_prime(seed, p)?;
    if !form::is_special(seed) {
        return Err(invalid!("seed lattice is not special"));
    }
    let sig = genus_signature(seed)?;
    let d = (seed.det() / 2) as u64;
    let d_minus: u64 = sig
        .iter()
        .filter_map(|&(pl, hw, _)| match pl {
            Place::Finite(q) if hw == -1 && d % q == 0 => Some(q),
            _ => None,
        })
        .product();
    let mut index = ClassIndex::new();
    index.push(seed.reduced().0);
    let mut next = 0;
    while next < index.classes.len() {
        let frontier: Vec<QuinaryForm> = index.classes[next..].to_vec();
        next = index.classes.len();
        // neighbours of the frontier in parallel, registered serially in canonical order
        let found: Vec<Vec<(QuinaryForm, Vec<u64>)>> = frontier
            .par_iter()
            .map(|c| -> Result<Vec<(QuinaryForm, Vec<u64>)>> {
                isotropic_lines(c, p)?
                    .iter()
                    .map(|l| {
                        let n = p_neighbour(c, p, l)?;
                        let key = isometry::theta_series(&n.form, THETA_PREC);
                        Ok((n.form, key))
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        for (nf, key) in found.into_iter().flatten() {
            if index.locate_with_key(&nf, &key).is_none() {
                if genus_signature(&nf)? != sig {
                    return Err(inconsistent!("neighbour left the genus"));
                }
                index.push(nf);
            }
        }
    }
    let classes = index.classes;
    let auts: Vec<IsometryGroup> = classes.par_iter().map(isometry::automorphism_group).collect();
    let theta = classes.iter().map(|c| isometry::theta_series(c, THETA_PREC)).collect();
    Ok(GenusData { seed: seed.clone(), d_minus, d_plus: d / d_minus, classes, auts, theta, traversal_prime: p })
}

/// Checks that every p-neighbour of every class is already a known class.
pub fn verify_closure(genus: &GenusData, p: u64) -> Result<bool> {
    let index = ClassIndex::from_classes(&genus.classes);
    let ok: Vec<bool> = genus
        .classes
        .par_iter()
        .map(|c| -> Result<bool> {
            for l in isotropic_lines(c, p)? {
                let n = p_neighbour(c, p, &l)?;
                if index.locate(&n.form).is_none() {
                    return Ok(false);
                }
            }
            Ok(true)
        })
        .collect::<Result<_>>()?;
    Ok(ok.into_iter().all(|b| b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q61() -> QuinaryForm {
        QuinaryForm::from_coefficients(&[1, 0, 0, 1, 1, 1, 0, 1, 0, 1, 0, 0, 1, 0, 8]).unwrap()
    }

    #[test]
    fn line_counts() {
        let q = q61();
        assert_eq!(isotropic_lines(&q, 2).unwrap().len(), 15);
        assert_eq!(isotropic_lines(&q, 3).unwrap().len(), 40);
        for p in [5u64, 7] {
            assert_eq!(isotropic_lines(&q, p).unwrap().len() as u64, (p + 1) * (p * p + 1));
        }
        assert!(isotropic_lines(&q, 61).is_err());
    }

    #[test]
    fn neighbours_keep_determinant() {
        let q = q61();
        for l in isotropic_lines(&q, 2).unwrap() {
            let n = p_neighbour(&q, 2, &l).unwrap();
            assert_eq!(n.form.det(), 122);
            // basis/scale maps the neighbour Gram into q's coordinates
            let hb = mat5::congruence(q.hessian(), &n.basis);
            assert!((0..N).all(|i| (0..N).all(|j| hb[i][j] == 4 * n.form.hessian()[i][j])));
        }
        assert!(p_neighbour(&q, 2, &[1, 0, 0, 0, 0]).is_err());
    }

    #[test]
    fn plane_counts() {
        let q = q61();
        assert_eq!(isotropic_planes(&q, 2).unwrap().len(), 15);
        assert_eq!(isotropic_planes(&q, 3).unwrap().len(), 40);
        let nb = pp_neighbours(&q, 2).unwrap();
        assert_eq!(nb.len(), 30);
        assert!(nb.iter().all(|n| n.form.det() == 122));
    }

    #[test]
    fn genus_61() {
        let g = enumerate_genus(&q61(), 2).unwrap();
        assert_eq!(g.len(), 8);
        assert_eq!(g.d_minus, 61);
        assert!(verify_closure(&g, 3).unwrap());
    }
}
