//! Short vectors, theta series, automorphism groups and isometry testing.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::form::QuinaryForm;
use crate::mat5::{self, Mat5, Vec5, IDENTITY, N};

/// Upper-triangular "square completion" Q(x) = Σ_i q_ii (x_i + Σ_{j>i} q_ij x_j)².
fn completion(h: &Mat5) -> [[f64; N]; N] {
    let mut q = [[0f64; N]; N];
    for i in 0..N {
        for j in 0..N {
            q[i][j] = h[i][j] as f64 / 2.0;
        }
    }
    for i in 0..N {
        for j in i + 1..N {
            q[j][i] = q[i][j];
            q[i][j] /= q[i][i];
        }
        for k in i + 1..N {
            for l in k..N {
                q[k][l] -= q[k][i] * q[i][l];
            }
        }
    }
    q
}

fn enumerate(q: &[[f64; N]; N], i: usize, rem: f64, eps: f64, x: &mut Vec5, out: &mut dyn FnMut(&Vec5)) {
    let c: f64 = -(i + 1..N).map(|j| q[i][j] * x[j] as f64).sum::<f64>();
    let r = ((rem + eps).max(0.0) / q[i][i]).sqrt();
    let lo = (c - r).ceil() as i64;
    let hi = (c + r).floor() as i64;
    for xi in lo..=hi {
        let t = q[i][i] * (xi as f64 - c).powi(2);
        if t > rem + eps {
            continue;
        }
        x[i] = xi;
        if i == 0 {
            out(x);
        } else {
            enumerate(q, i - 1, rem - t, eps, x, out);
        }
    }
    x[i] = 0;
}

/// Visits every nonzero v with Q(v) ≤ bound (both signs); exact acceptance on integers.
fn for_each_short(form: &QuinaryForm, bound: i64, mut f: impl FnMut(&Vec5, i64)) {
    let q = completion(form.hessian());
    let eps = 1e-7 * (bound as f64 + 1.0);
    let mut x = [0i64; N];
    enumerate(&q, N - 1, bound as f64, eps, &mut x, &mut |v| {
        if v.iter().any(|&c| c != 0) {
            let val = form.eval(v);
            if val <= bound {
                f(v, val);
            }
        }
    });
}

/// All v ≠ 0 with Q(v) ≤ bound, one per ±pair (first nonzero coordinate positive).
pub fn short_vectors(form: &QuinaryForm, bound: i64) -> Vec<(Vec5, i64)> {
    let mut out = Vec::new();
    for_each_short(form, bound, |v, val| {
        if v.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0) {
            out.push((*v, val));
        }
    });
    out.sort_by(|a, b| (a.1, a.0).cmp(&(b.1, b.0)));
    out
}

/// r_Q(0..=prec).
pub fn theta_series(form: &QuinaryForm, prec: usize) -> Vec<u64> {
    let mut r = vec![0u64; prec + 1];
    r[0] = 1;
    for_each_short(form, prec as i64, |_, val| r[val as usize] += 1);
    r
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsometryGroup {
    pub generators: Vec<Mat5>,
    pub order: u64,
    pub proper_subgroup_order: u64,
}

impl IsometryGroup {
    pub fn proper_generators(&self) -> Vec<Mat5> {
        proper_generators(&self.generators)
    }
}

/// Short vectors (both signs) of a form up to a Hessian-norm bound, with fingerprint data.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub form: QuinaryForm,
    bound: i64,
    vectors: Vec<Vec5>,
    norms: Vec<i64>,
}

impl Prepared {
    /// `bound` is on Q-values.
    pub fn new(form: &QuinaryForm, bound: i64) -> Self {
        let mut vectors = Vec::new();
        let mut norms = Vec::new();
        for_each_short(form, bound, |v, val| {
            vectors.push(*v);
            norms.push(2 * val);
        });
        let mut idx: Vec<usize> = (0..vectors.len()).collect();
        idx.sort_by_key(|&i| (norms[i], vectors[i]));
        let vectors = idx.iter().map(|&i| vectors[i]).collect();
        let norms = idx.iter().map(|&i| norms[i]).collect();
        Prepared { form: form.clone(), bound, vectors, norms }
    }

    fn max_diag(form: &QuinaryForm) -> i64 {
        (0..N).map(|i| form.hessian()[i][i] / 2).max().unwrap()
    }

    /// Prepared data sufficient for mapping the basis of any form with the same diagonal bound.
    pub fn for_basis_of(form: &QuinaryForm) -> Self {
        Self::new(form, Self::max_diag(form))
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    /// Counts of vectors per Hessian norm up to 2·bound (the theta prefix, halved).
    fn norm_counts(&self) -> HashMap<i64, usize> {
        let mut m = HashMap::new();
        for &n in &self.norms {
            *m.entry(n).or_default() += 1;
        }
        m
    }

    /// Fingerprint of v: for each target (norm, inner product) pair, the number of short vectors.
    fn fingerprint(&self, v: &Vec5, specs: &[(i64, i64)]) -> Vec<u32> {
        let h = self.form.hessian();
        let hv = mat5::mul_vec(h, v);
        let mut out = vec![0u32; specs.len()];
        for (w, &n) in self.vectors.iter().zip(&self.norms) {
            let ip: i64 = (0..N).map(|i| hv[i] * w[i]).sum();
            for (slot, &(sn, sip)) in specs.iter().enumerate() {
                if n == sn && ip == sip {
                    out[slot] += 1;
                }
            }
        }
        out
    }
}

enum Mode {
    First,
    All,
}

/// Backtracking for g with gᵀ·H_to·g = H_from; columns of g are images of the basis of `from`.
fn search(to: &Prepared, from: &Prepared, mode: Mode) -> Vec<Mat5> {
    let h_to = to.form.hessian();
    let h_from = from.form.hessian();
    if to.form.det() != from.form.det() {
        return vec![];
    }
    let need = Prepared::max_diag(&from.form);
    debug_assert!(to.bound >= need && from.bound >= need);
    // theta prefix comparison up to the needed norm
    let ca = to.norm_counts();
    let cb = from.norm_counts();
    for n in 1..=2 * need {
        if ca.get(&n) != cb.get(&n) {
            return vec![];
        }
    }
    // fingerprint specs for basis vector k: (norm of e_l, ⟨e_k, e_l⟩) for each l
    let mut cands: Vec<Vec<Vec5>> = Vec::with_capacity(N);
    for k in 0..N {
        let specs: Vec<(i64, i64)> = (0..N).map(|l| (h_from[l][l], h_from[k][l])).collect();
        let e_k: Vec5 = std::array::from_fn(|i| (i == k) as i64);
        let fp = from.fingerprint(&e_k, &specs);
        let c: Vec<Vec5> = to
            .vectors
            .iter()
            .zip(&to.norms)
            .filter(|(_, &n)| n == h_from[k][k])
            .map(|(v, _)| *v)
            .filter(|v| to.fingerprint(v, &specs) == fp)
            .collect();
        if c.is_empty() {
            return vec![];
        }
        cands.push(c);
    }
    let mut order: Vec<usize> = (0..N).collect();
    order.sort_by_key(|&k| (cands[k].len(), k));
    let mut out = Vec::new();
    let mut imgs: [Vec5; N] = [[0; N]; N];
    let mut himgs: [Vec5; N] = [[0; N]; N]; // H_to · image, for fast inner products
    dfs(0, &order, &cands, h_to, h_from, &mut imgs, &mut himgs, &mode, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    depth: usize,
    order: &[usize],
    cands: &[Vec<Vec5>],
    h_to: &Mat5,
    h_from: &Mat5,
    imgs: &mut [Vec5; N],
    himgs: &mut [Vec5; N],
    mode: &Mode,
    out: &mut Vec<Mat5>,
) -> bool {
    if depth == N {
        let g = mat5::from_columns(imgs);
        assert_eq!(mat5::congruence(h_to, &g), *h_from, "isometry search produced a non-isometry");
        out.push(g);
        return matches!(mode, Mode::First);
    }
    let k = order[depth];
    'cand: for v in &cands[k] {
        for &s in &order[..depth] {
            let ip: i64 = (0..N).map(|i| himgs[s][i] * v[i]).sum();
            if ip != h_from[k][s] {
                continue 'cand;
            }
        }
        imgs[k] = *v;
        himgs[k] = mat5::mul_vec(h_to, v);
        if dfs(depth + 1, order, cands, h_to, h_from, imgs, himgs, mode, out) {
            return true;
        }
    }
    false
}

/// g with g maps L₂-coordinates to L₁-coordinates: gᵀ·H₁·g = H₂.
pub fn isometry_map(q1: &QuinaryForm, q2: &QuinaryForm) -> Option<Mat5> {
    let need = Prepared::max_diag(q2);
    isometry_map_prepared(&Prepared::new(q1, need), &Prepared::new(q2, need))
}

/// As [`isometry_map`], reusing prepared short-vector data (each must cover q2's diagonal).
pub fn isometry_map_prepared(p1: &Prepared, p2: &Prepared) -> Option<Mat5> {
    search(p1, p2, Mode::First).into_iter().next()
}

/// Every element of O(L), in deterministic search order.
pub fn automorphisms(form: &QuinaryForm) -> Vec<Mat5> {
    let p = Prepared::for_basis_of(form);
    automorphisms_prepared(&p)
}

pub fn automorphisms_prepared(p: &Prepared) -> Vec<Mat5> {
    search(p, p, Mode::All)
}

/// Closure of a generating set under multiplication.
pub fn group_closure(gens: &[Mat5]) -> Vec<Mat5> {
    let mut seen: HashSet<Mat5> = HashSet::from([IDENTITY]);
    let mut elems = vec![IDENTITY];
    let mut i = 0;
    while i < elems.len() {
        let x = elems[i];
        for g in gens {
            let y = mat5::mul(&x, g);
            if seen.insert(y) {
                elems.push(y);
            }
        }
        i += 1;
    }
    elems
}

/// Greedy generating subset of a finite group given as an element list.
pub fn extract_generators(elements: &[Mat5]) -> Vec<Mat5> {
    let mut gens: Vec<Mat5> = Vec::new();
    let mut span: HashSet<Mat5> = HashSet::from([IDENTITY]);
    for g in elements {
        if !span.contains(g) {
            gens.push(*g);
            span = group_closure(&gens).into_iter().collect();
            if span.len() == elements.len() {
                break;
            }
        }
    }
    gens
}

/// Generators of SO(L) from generators of O(L) (−I is central of determinant −1 in rank 5).
pub fn proper_generators(gens: &[Mat5]) -> Vec<Mat5> {
    gens.iter().map(|g| if mat5::det(g) == 1 { *g } else { mat5::neg(g) }).filter(|g| *g != IDENTITY).collect()
}

pub fn automorphism_group(form: &QuinaryForm) -> IsometryGroup {
    group_from_elements(&automorphisms(form))
}

pub fn group_from_elements(elements: &[Mat5]) -> IsometryGroup {
    let order = elements.len() as u64;
    let proper = elements.iter().filter(|g| mat5::det(g) == 1).count() as u64;
    IsometryGroup { generators: extract_generators(elements), order, proper_subgroup_order: proper }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q61() -> QuinaryForm {
        QuinaryForm::from_coefficients(&[1, 0, 0, 1, 1, 1, 0, 1, 0, 1, 0, 0, 1, 0, 8]).unwrap()
    }

    #[test]
    fn unit_squares() {
        let q = QuinaryForm::diagonal([2; 5]).unwrap();
        let sv = short_vectors(&q, 1);
        assert_eq!(sv.len(), 5);
        assert_eq!(theta_series(&q, 2), vec![1, 10, 40]);
        let g = automorphism_group(&q);
        assert_eq!(g.order, 3840);
        assert_eq!(g.proper_subgroup_order, 1920);
        assert_eq!(group_closure(&g.generators).len(), 3840);
        assert!(g.generators.iter().all(|x| mat5::congruence(q.hessian(), x) == *q.hessian()));
    }

    #[test]
    fn theta_matches_enumeration() {
        let q = q61();
        let th = theta_series(&q, 5);
        let sv = short_vectors(&q, 5);
        for m in 1..=5 {
            assert_eq!(th[m] as usize, 2 * sv.iter().filter(|x| x.1 == m as i64).count());
        }
        // brute force over a box large enough for Q ≤ 2
        let mut r2 = 0;
        let range = -4i64..=4;
        for a in range.clone() {
            for b in range.clone() {
                for c in range.clone() {
                    for d in range.clone() {
                        for e in -1i64..=1 {
                            let v = [a, b, c, d, e];
                            if q.eval(&v) == 2 {
                                r2 += 1;
                            }
                        }
                    }
                }
            }
        }
        assert_eq!(th[2], r2);
    }

    #[test]
    fn isometry_of_transformed_form() {
        let q = q61();
        let p: Mat5 = [[0, 1, 0, 0, 0], [-1, 0, 0, 0, 0], [0, 0, 0, 0, 1], [0, 0, 1, 0, 0], [0, 0, 0, -1, 0]];
        let q2 = q.transform(&p).unwrap();
        let g = isometry_map(&q, &q2).unwrap();
        assert_eq!(mat5::congruence(q.hessian(), &g), *q2.hessian());
        assert_eq!(isometry_map(&q, &q).map(|g| mat5::congruence(q.hessian(), &g)), Some(*q.hessian()));
        let other = QuinaryForm::from_coefficients(&[1, 1, 0, 0, 0, 1, 1, 0, 0, 1, 1, 0, 1, 0, 8]);
        if let Ok(o) = other {
            if o.det() == 122 && theta_series(&o, 3) != theta_series(&q, 3) {
                assert!(isometry_map(&q, &o).is_none());
            }
        }
    }
}
