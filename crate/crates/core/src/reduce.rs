//! LLL reduction of positive-definite Gram matrices, followed by pairwise shortening.

use num_rational::Ratio;
use num_traits::One;

use crate::mat5::{self, Mat5, N};

type Q = Ratio<i128>;

fn gram_schmidt(g: &[[i128; N]; N]) -> ([[Q; N]; N], [Q; N]) {
    let mut mu: [[Q; N]; N] = Default::default();
    let mut bstar: [Q; N] = Default::default();
    for i in 0..N {
        for j in 0..i {
            let mut s = Q::from_integer(g[i][j]);
            for k in 0..j {
                s -= mu[j][k] * mu[i][k] * bstar[k];
            }
            mu[i][j] = s / bstar[j];
        }
        let mut s = Q::from_integer(g[i][i]);
        for k in 0..i {
            s -= mu[i][k] * mu[i][k] * bstar[k];
        }
        bstar[i] = s;
        mu[i][i] = Q::one();
    }
    (mu, bstar)
}

fn round(q: &Q) -> i128 {
    (q + Q::new(1, 2)).floor().to_integer()
}

/// Basis state: columns of `b` are the current basis in original coordinates; `g` its Gram.
struct Basis {
    b: [[i128; N]; N],
    g: [[i128; N]; N],
}

impl Basis {
    fn new(h: &Mat5) -> Self {
        let mut b = [[0i128; N]; N];
        let mut g = [[0i128; N]; N];
        for i in 0..N {
            b[i][i] = 1;
            for j in 0..N {
                g[i][j] = h[i][j] as i128;
            }
        }
        Basis { b, g }
    }

    /// b_k ← b_k − q·b_j
    fn sub(&mut self, k: usize, j: usize, q: i128) {
        for r in 0..N {
            self.b[r][k] -= q * self.b[r][j];
        }
        let gkk = self.g[k][k] - 2 * q * self.g[k][j] + q * q * self.g[j][j];
        for r in 0..N {
            if r != k {
                self.g[k][r] -= q * self.g[j][r];
                self.g[r][k] = self.g[k][r];
            }
        }
        self.g[k][k] = gkk;
    }

    fn swap(&mut self, i: usize, j: usize) {
        for r in 0..N {
            self.b[r].swap(i, j);
        }
        self.g.swap(i, j);
        for r in 0..N {
            self.g[r].swap(i, j);
        }
    }
}

fn lll(basis: &mut Basis) {
    let delta = Q::new(99, 100);
    let mut k = 1;
    while k < N {
        for j in (0..k).rev() {
            let (mu, _) = gram_schmidt(&basis.g);
            let q = round(&mu[k][j]);
            if q != 0 {
                basis.sub(k, j, q);
            }
        }
        let (mu, bstar) = gram_schmidt(&basis.g);
        if bstar[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * bstar[k - 1] {
            k += 1;
        } else {
            basis.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
}

/// Pairwise reduction: replace b_i by b_i − q·b_j whenever that strictly shortens b_i.
fn pairwise(basis: &mut Basis) {
    loop {
        let mut changed = false;
        for i in 0..N {
            for j in 0..N {
                if i == j {
                    continue;
                }
                let gij = basis.g[i][j];
                let gjj = basis.g[j][j];
                if 2 * gij.abs() > gjj {
                    let q = round(&Q::new(gij, gjj));
                    if q != 0 {
                        basis.sub(i, j, q);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
}

/// Reduce a positive-definite Hessian. Returns (H', g) with gᵀ·H·g = H' and g unimodular.
pub fn reduce(h: &Mat5) -> (Mat5, Mat5) {
    let mut basis = Basis::new(h);
    lll(&mut basis);
    pairwise(&mut basis);
    // stable sort by norm (selection via swaps keeps b and g consistent)
    for i in 0..N {
        let mut m = i;
        for j in i + 1..N {
            if basis.g[j][j] < basis.g[m][m] {
                m = j;
            }
        }
        if m != i {
            // rotate to keep relative order of the others
            for t in (i..m).rev() {
                basis.swap(t, t + 1);
            }
        }
    }
    // sign normalisation: non-negative inner products with the first basis vector
    for i in 1..N {
        if basis.g[0][i] < 0 {
            for r in 0..N {
                basis.b[r][i] = -basis.b[r][i];
            }
            for r in 0..N {
                basis.g[r][i] = -basis.g[r][i];
                basis.g[i][r] = -basis.g[i][r];
            }
        }
    }
    let g: Mat5 = std::array::from_fn(|i| std::array::from_fn(|j| basis.b[i][j] as i64));
    let hr: Mat5 = std::array::from_fn(|i| std::array::from_fn(|j| basis.g[i][j] as i64));
    debug_assert_eq!(mat5::congruence(h, &g), hr);
    (hr, g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_skewed_basis() {
        let h: Mat5 = [[2, 0, 0, 1, 1], [0, 2, 0, 1, 0], [0, 0, 2, 0, 0], [1, 1, 0, 2, 0], [1, 0, 0, 0, 16]];
        let p: Mat5 = [[1, 3, 0, 0, 2], [0, 1, 5, 0, 0], [0, 0, 1, -4, 0], [0, 0, 0, 1, 7], [0, 0, 0, 0, 1]];
        let skew = mat5::congruence(&h, &p);
        let (r, g) = reduce(&skew);
        assert_eq!(mat5::congruence(&skew, &g), r);
        assert_eq!(mat5::det(&g).abs(), 1);
        let trace: i64 = (0..N).map(|i| r[i][i]).sum();
        assert!(trace <= 24, "reduced trace {trace}");
    }
}
