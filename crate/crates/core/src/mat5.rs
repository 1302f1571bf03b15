//! Fixed-size integer linear algebra for rank-5 lattices.

pub const N: usize = 5;
pub type Vec5 = [i64; N];
pub type Mat5 = [[i64; N]; N];

pub const IDENTITY: Mat5 = [
    [1, 0, 0, 0, 0],
    [0, 1, 0, 0, 0],
    [0, 0, 1, 0, 0],
    [0, 0, 0, 1, 0],
    [0, 0, 0, 0, 1],
];

pub fn neg(a: &Mat5) -> Mat5 {
    let mut r = *a;
    r.iter_mut().flatten().for_each(|x| *x = -*x);
    r
}

pub fn transpose(a: &Mat5) -> Mat5 {
    let mut t = [[0; N]; N];
    for i in 0..N {
        for j in 0..N {
            t[j][i] = a[i][j];
        }
    }
    t
}

pub fn mul(a: &Mat5, b: &Mat5) -> Mat5 {
    let mut c = [[0i64; N]; N];
    for i in 0..N {
        for k in 0..N {
            let aik = a[i][k];
            if aik == 0 {
                continue;
            }
            for j in 0..N {
                c[i][j] += aik * b[k][j];
            }
        }
    }
    c
}

pub fn mul_vec(a: &Mat5, v: &Vec5) -> Vec5 {
    let mut r = [0i64; N];
    for i in 0..N {
        r[i] = (0..N).map(|j| a[i][j] * v[j]).sum();
    }
    r
}

/// gᵀ·H·g.
pub fn congruence(h: &Mat5, g: &Mat5) -> Mat5 {
    mul(&transpose(g), &mul(h, g))
}

/// uᵀ·H·v.
pub fn bilinear(h: &Mat5, u: &Vec5, v: &Vec5) -> i64 {
    let mut s = 0;
    for i in 0..N {
        if u[i] == 0 {
            continue;
        }
        let row: i64 = (0..N).map(|j| h[i][j] * v[j]).sum();
        s += u[i] * row;
    }
    s
}

pub fn column(a: &Mat5, j: usize) -> Vec5 {
    std::array::from_fn(|i| a[i][j])
}

pub fn from_columns(cols: &[Vec5; N]) -> Mat5 {
    std::array::from_fn(|i| std::array::from_fn(|j| cols[j][i]))
}

/// Exact determinant of an n×n integer matrix via fraction-free (Bareiss) elimination.
pub fn det_i128(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    let mut a: Vec<Vec<i128>> = m.to_vec();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

pub fn det(a: &Mat5) -> i64 {
    let m: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    det_i128(&m) as i64
}

/// Adjugate: adj(A)·A = det(A)·I.
pub fn adjugate(a: &Mat5) -> Mat5 {
    let mut adj = [[0i64; N]; N];
    for i in 0..N {
        for j in 0..N {
            let minor: Vec<Vec<i128>> = (0..N)
                .filter(|&r| r != j)
                .map(|r| (0..N).filter(|&c| c != i).map(|c| a[r][c] as i128).collect())
                .collect();
            let s = if (i + j) % 2 == 0 { 1 } else { -1 };
            adj[i][j] = s * det_i128(&minor) as i64;
        }
    }
    adj
}

/// Inverse of a unimodular matrix.
pub fn inverse_unimodular(a: &Mat5) -> Option<Mat5> {
    match det(a) {
        1 => Some(adjugate(a)),
        -1 => Some(neg(&adjugate(a))),
        _ => None,
    }
}

/// Smith normal form of a square integer matrix: returns (U, S, V) with U·A·V = S diagonal,
/// S[i][i] ≥ 0 and S[i][i] | S[i+1][i+1]; U and V unimodular.
pub fn smith_form(a: &[Vec<i128>]) -> (Vec<Vec<i128>>, Vec<Vec<i128>>, Vec<Vec<i128>>) {
    let n = a.len();
    let ident = |n: usize| -> Vec<Vec<i128>> {
        (0..n).map(|i| (0..n).map(|j| (i == j) as i128).collect()).collect()
    };
    let mut s = a.to_vec();
    let mut u = ident(n);
    let mut v = ident(n);
    for k in 0..n {
        loop {
            // pivot: smallest nonzero |entry| in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in k..n {
                for j in k..n {
                    if s[i][j] != 0 && best.is_none_or(|(bi, bj)| s[i][j].abs() < s[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { return (u, s, v) };
            s.swap(k, pi);
            u.swap(k, pi);
            for row in s.iter_mut() {
                row.swap(k, pj);
            }
            for row in v.iter_mut() {
                row.swap(k, pj);
            }
            let mut clean = true;
            for i in k + 1..n {
                let q = s[i][k].div_euclid(s[k][k]);
                if q != 0 {
                    for j in 0..n {
                        s[i][j] -= q * s[k][j];
                        u[i][j] -= q * u[k][j];
                    }
                }
                clean &= s[i][k] == 0;
            }
            for j in k + 1..n {
                let q = s[k][j].div_euclid(s[k][k]);
                if q != 0 {
                    for i in 0..n {
                        s[i][j] -= q * s[i][k];
                        v[i][j] -= q * v[i][k];
                    }
                }
                clean &= s[k][j] == 0;
            }
            if !clean {
                continue;
            }
            // divisibility of the trailing block by the pivot
            let bad = (k + 1..n).find(|&i| (k + 1..n).any(|j| s[i][j] % s[k][k] != 0));
            match bad {
                Some(i) => {
                    for j in 0..n {
                        s[k][j] += s[i][j];
                        u[k][j] += u[i][j];
                    }
                }
                None => break,
            }
        }
        if s[k][k] < 0 {
            for j in 0..n {
                s[k][j] = -s[k][j];
                u[k][j] = -u[k][j];
            }
        }
    }
    (u, s, v)
}

/// Basis (echelon form, as row vectors) of the full-rank lattice spanned by `gens` in ℤ⁵.
pub fn lattice_basis(gens: &[[i128; N]]) -> Option<[[i128; N]; N]> {
    let mut rows: Vec<[i128; N]> = gens.to_vec();
    let mut out = [[0i128; N]; N];
    for c in 0..N {
        // Euclid on column c among the remaining rows
        loop {
            let nz: Vec<usize> = (0..rows.len()).filter(|&r| rows[r][c] != 0).collect();
            if nz.len() <= 1 {
                break;
            }
            let piv = *nz.iter().min_by_key(|&&r| rows[r][c].abs()).unwrap();
            let pr = rows[piv];
            for &r in &nz {
                if r != piv {
                    let q = rows[r][c].div_euclid(pr[c]);
                    for k in 0..N {
                        rows[r][k] -= q * pr[k];
                    }
                }
            }
        }
        let piv = (0..rows.len()).find(|&r| rows[r][c] != 0)?;
        let mut pr = rows.swap_remove(piv);
        if pr[c] < 0 {
            pr.iter_mut().for_each(|x| *x = -*x);
        }
        out[c] = pr;
        rows.retain(|r| r.iter().any(|&x| x != 0));
    }
    // reduce entries above the pivots
    for c in 0..N {
        for r in 0..c {
            let q = out[r][c].div_euclid(out[c][c]);
            if q != 0 {
                for k in 0..N {
                    out[r][k] -= q * out[c][k];
                }
            }
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn to128(a: &Mat5) -> Vec<Vec<i128>> {
        a.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect()
    }

    fn mm(a: &[Vec<i128>], b: &[Vec<i128>]) -> Vec<Vec<i128>> {
        let n = a.len();
        (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
    }

    #[test]
    fn smith_of_q61() {
        let h: Mat5 = [[2, 0, 0, 1, 1], [0, 2, 0, 1, 0], [0, 0, 2, 0, 0], [1, 1, 0, 2, 0], [1, 0, 0, 0, 16]];
        assert_eq!(det(&h), 122);
        let (u, s, v) = smith_form(&to128(&h));
        let d: Vec<i128> = (0..N).map(|i| s[i][i]).collect();
        assert_eq!(d, vec![1, 1, 1, 1, 122]);
        assert_eq!(mm(&mm(&u, &to128(&h)), &v), s);
    }

    #[test]
    fn echelon_basis() {
        let gens = [[2i128, 0, 0, 0, 0], [0, 1, 0, 0, 0], [0, 0, 1, 0, 0], [0, 0, 0, 1, 0], [0, 0, 0, 0, 2], [1, 0, 0, 0, 1]];
        let b = lattice_basis(&gens).unwrap();
        let m: Vec<Vec<i128>> = b.iter().map(|r| r.to_vec()).collect();
        assert_eq!(det_i128(&m).abs(), 2);
        assert!(lattice_basis(&gens[..4]).is_none());
    }

    #[test]
    fn adjugate_inverts() {
        let a: Mat5 = [[1, 2, 0, 0, 1], [0, 1, 0, 3, 0], [0, 0, 1, 0, 0], [0, 0, 0, 1, 0], [0, 0, 0, 0, 1]];
        let inv = inverse_unimodular(&a).unwrap();
        assert_eq!(mul(&a, &inv), IDENTITY);
    }
}
