//! Dense univariate polynomials over ℤ and over 𝔽_p (coefficients low degree first).

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{mod_inv, mul_mod};

/// Integer polynomial, coefficients in increasing degree; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ZPoly {
    #[serde(with = "bigint_vec")]
    coeffs: Vec<BigInt>,
}

mod bigint_vec {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let raw: Vec<serde_json::Value> = Deserialize::deserialize(d)?;
        raw.into_iter()
            .map(|x| match x {
                serde_json::Value::String(s) => s.parse().map_err(serde::de::Error::custom),
                serde_json::Value::Number(n) => n.to_string().parse().map_err(serde::de::Error::custom),
                _ => Err(serde::de::Error::custom("expected integer")),
            })
            .collect()
    }
}

impl ZPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        ZPoly { coeffs }
    }

    pub fn from_i64(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    /// x − r.
    pub fn linear(r: i64) -> Self {
        Self::from_i64(&[-r, 1])
    }

    pub fn one() -> Self {
        Self::from_i64(&[1])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn lead(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn is_monic(&self) -> bool {
        self.lead().is_one()
    }

    pub fn mul(&self, o: &ZPoly) -> ZPoly {
        if self.is_zero() || o.is_zero() {
            return ZPoly::new(vec![]);
        }
        let mut r = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                r[i + j] += a * b;
            }
        }
        ZPoly::new(r)
    }

    pub fn sub(&self, o: &ZPoly) -> ZPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let z = BigInt::zero();
        ZPoly::new(
            (0..n).map(|i| self.coeffs.get(i).unwrap_or(&z) - o.coeffs.get(i).unwrap_or(&z)).collect(),
        )
    }

    pub fn product(fs: &[ZPoly]) -> ZPoly {
        fs.iter().fold(ZPoly::one(), |acc, f| acc.mul(f))
    }

    /// Exact division by a monic divisor; None if the remainder is nonzero.
    pub fn div_exact(&self, d: &ZPoly) -> Option<ZPoly> {
        let (q, r) = self.divrem_monic(d);
        r.is_zero().then_some(q)
    }

    pub fn divrem_monic(&self, d: &ZPoly) -> (ZPoly, ZPoly) {
        assert!(d.is_monic(), "divisor must be monic");
        if self.coeffs.len() < d.coeffs.len() {
            return (ZPoly::new(vec![]), self.clone());
        }
        let mut r = self.coeffs.clone();
        let dd = d.degree();
        let mut q = vec![BigInt::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = r[k + dd].clone();
            if c.is_zero() {
                continue;
            }
            for (j, dj) in d.coeffs.iter().enumerate() {
                r[k + j] -= &c * dj;
            }
            q[k] = c;
        }
        r.truncate(dd);
        (ZPoly::new(q), ZPoly::new(r))
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// f(x + c).
    pub fn shift(&self, c: &BigInt) -> ZPoly {
        let xc = ZPoly::new(vec![c.clone(), BigInt::one()]);
        self.coeffs.iter().rev().fold(ZPoly::new(vec![]), |acc, a| acc.mul(&xc).add_const(a))
    }

    fn add_const(mut self, a: &BigInt) -> ZPoly {
        if self.coeffs.is_empty() {
            self.coeffs.push(BigInt::zero());
        }
        self.coeffs[0] += a;
        ZPoly::new(self.coeffs)
    }

    pub fn derivative(&self) -> ZPoly {
        ZPoly::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect())
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    pub fn primitive(&self) -> ZPoly {
        let c = self.content();
        if c.is_zero() {
            return self.clone();
        }
        let sgn = if self.lead().is_negative() { -BigInt::one() } else { BigInt::one() };
        ZPoly::new(self.coeffs.iter().map(|x| x / &c * &sgn).collect())
    }

    pub fn mod_p(&self, p: u64) -> PPoly {
        let pb = BigInt::from(p);
        PPoly::new(self.coeffs.iter().map(|c| c.mod_floor(&pb).to_u64().unwrap()).collect(), p)
    }

    /// Cauchy-type bound: every complex root has |z| < 1 + max|c_i|/|c_n|, sharpened by Fujiwara.
    pub fn root_bound(&self) -> BigInt {
        let n = self.degree();
        let lead = self.lead().abs();
        let mut best = BigInt::zero();
        for (i, c) in self.coeffs[..n].iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            // (|c_i|/|lead|)^{1/(n−i)}, rounded up; doubled per Fujiwara
            let ratio = (c.abs() + &lead - 1u32) / &lead;
            let k = (n - i) as u32;
            let mut r = ratio.nth_root(k);
            if r.pow(k) < ratio {
                r += 1u32;
            }
            if r > best {
                best = r;
            }
        }
        best * 2u32 + 1u32
    }

    /// Integer roots of a monic polynomial (with repetition removed).
    pub fn integer_roots(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return vec![];
        }
        let b = self.root_bound();
        let mut roots = Vec::new();
        if self.coeffs[0].is_zero() {
            roots.push(BigInt::zero());
        }
        let c0 = self.coeffs.iter().find(|c| !c.is_zero()).unwrap().clone();
        let mut x = BigInt::one();
        while x <= b {
            for s in [x.clone(), -x.clone()] {
                if (&c0 % &s).is_zero() && self.eval(&s).is_zero() {
                    roots.push(s);
                }
            }
            x += 1u32;
        }
        roots.sort();
        roots
    }

    /// Square-free test: gcd(f, f′) = 1 modulo some prime not dividing the leading coefficient
    /// and preserving the degree of f′ certifies square-freeness over ℚ.
    pub fn is_squarefree(&self) -> bool {
        let d = self.derivative();
        for p in crate::arith::word_primes().take(8) {
            let fp = self.mod_p(p);
            let dp = d.mod_p(p);
            if fp.degree() != self.degree() || dp.degree() != d.degree() {
                continue;
            }
            if fp.gcd(&dp).degree() == 0 {
                return true;
            }
        }
        false
    }

    pub fn gcd_q(&self, o: &ZPoly) -> ZPoly {
        // primitive pseudo-remainder sequence
        let (mut a, mut b) = (self.primitive(), o.primitive());
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b);
            a = b;
            b = if r.is_zero() { r } else { r.primitive() };
        }
        a.primitive()
    }

    fn pseudo_rem(&self, d: &ZPoly) -> ZPoly {
        let mut r = self.coeffs.clone();
        let dd = d.degree();
        let lc = d.lead();
        while r.len() > dd && !r.is_empty() {
            let c = r.last().unwrap().clone();
            let shift = r.len() - 1 - dd;
            for x in r.iter_mut() {
                *x *= &lc;
            }
            for (j, dj) in d.coeffs.iter().enumerate() {
                r[shift + j] -= &c * dj;
            }
            r.pop();
            while r.last().is_some_and(|x| x.is_zero()) {
                r.pop();
            }
        }
        ZPoly::new(r)
    }
}

impl fmt::Display for ZPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            let show_coeff = !a.is_one() || i == 0;
            if show_coeff {
                write!(f, "{a}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "{}x", if show_coeff { "*" } else { "" })?,
                _ => write!(f, "{}x^{i}", if show_coeff { "*" } else { "" })?,
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for ZPoly {
    type Err = String;

    /// Parses sums of terms like `3*x^2`, `-x`, `7` (variable `x`, optional spaces).
    fn from_str(s: &str) -> Result<Self, String> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err("empty polynomial".into());
        }
        let mut terms = Vec::new();
        let mut cur = String::new();
        for (i, ch) in s.chars().enumerate() {
            if (ch == '+' || ch == '-') && i > 0 && !cur.ends_with('^') {
                terms.push(std::mem::take(&mut cur));
            }
            cur.push(ch);
        }
        terms.push(cur);
        let mut coeffs: Vec<BigInt> = Vec::new();
        for t in terms {
            let (sign, body) = match t.strip_prefix('-') {
                Some(b) => (-1, b),
                None => (1, t.strip_prefix('+').unwrap_or(&t)),
            };
            let (c, deg) = match body.find('x') {
                None => (body.parse::<BigInt>().map_err(|e| e.to_string())?, 0usize),
                Some(pos) => {
                    let cs = body[..pos].trim_end_matches('*');
                    let c = if cs.is_empty() { BigInt::one() } else { cs.parse().map_err(|_| format!("bad term {t}"))? };
                    let rest = &body[pos + 1..];
                    let d = if rest.is_empty() {
                        1
                    } else {
                        rest.strip_prefix('^').ok_or(format!("bad term {t}"))?.parse().map_err(|_| format!("bad term {t}"))?
                    };
                    (c, d)
                }
            };
            if coeffs.len() <= deg {
                coeffs.resize(deg + 1, BigInt::zero());
            }
            coeffs[deg] += c * sign;
        }
        Ok(ZPoly::new(coeffs))
    }
}

/// Polynomial over 𝔽_p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PPoly {
    pub c: Vec<u64>,
    pub p: u64,
}

impl PPoly {
    pub fn new(mut c: Vec<u64>, p: u64) -> Self {
        while c.last() == Some(&0) {
            c.pop();
        }
        PPoly { c, p }
    }

    pub fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    fn monic(&self) -> PPoly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = mod_inv(*self.c.last().unwrap() as i64, self.p as i64).unwrap() as u64;
        PPoly::new(self.c.iter().map(|&x| mul_mod(x, inv, self.p)).collect(), self.p)
    }

    pub fn rem(&self, d: &PPoly) -> PPoly {
        let p = self.p;
        let mut r = self.c.clone();
        let dd = d.degree();
        let inv = mod_inv(*d.c.last().unwrap() as i64, p as i64).unwrap() as u64;
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1 - dd;
            let c = mul_mod(*r.last().unwrap(), inv, p);
            if c != 0 {
                for (j, &dj) in d.c.iter().enumerate() {
                    r[k + j] = (r[k + j] + p - mul_mod(c, dj, p)) % p;
                }
            }
            r.pop();
            while r.last() == Some(&0) {
                r.pop();
            }
        }
        PPoly::new(r, p)
    }

    pub fn mul(&self, o: &PPoly) -> PPoly {
        if self.is_zero() || o.is_zero() {
            return PPoly::new(vec![], self.p);
        }
        let p = self.p;
        let mut r = vec![0u64; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                r[i + j] = (r[i + j] + mul_mod(a, b, p)) % p;
            }
        }
        PPoly::new(r, p)
    }

    pub fn sub(&self, o: &PPoly) -> PPoly {
        let p = self.p;
        let n = self.c.len().max(o.c.len());
        PPoly::new(
            (0..n).map(|i| (self.c.get(i).copied().unwrap_or(0) + p - o.c.get(i).copied().unwrap_or(0)) % p).collect(),
            p,
        )
    }

    pub fn gcd(&self, o: &PPoly) -> PPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn mulmod(&self, o: &PPoly, m: &PPoly) -> PPoly {
        self.mul(o).rem(m)
    }

    pub fn powmod(&self, mut e: u64, m: &PPoly) -> PPoly {
        let mut r = PPoly::new(vec![1], self.p).rem(m);
        let mut b = self.rem(m);
        while e > 0 {
            if e & 1 == 1 {
                r = r.mulmod(&b, m);
            }
            b = b.mulmod(&b, m);
            e >>= 1;
        }
        r
    }

    pub fn eval(&self, x: u64) -> u64 {
        self.c.iter().rev().fold(0, |acc, &c| (mul_mod(acc, x, self.p) + c) % self.p)
    }

    /// Distinct-degree factorisation of a square-free monic f: (degree, number of factors).
    pub fn ddf_pattern(&self) -> Vec<(usize, usize)> {
        let p = self.p;
        let mut f = self.monic();
        let x = PPoly::new(vec![0, 1], p);
        let mut h = x.clone();
        let mut out = Vec::new();
        let mut i = 0;
        while f.degree() >= 2 * (i + 1) {
            i += 1;
            h = h.powmod(p, &f);
            let g = f.gcd(&h.sub(&x));
            if g.degree() > 0 {
                out.push((i, g.degree() / i));
                f = div_exact_p(&f, &g);
                h = h.rem(&f);
            }
        }
        if f.degree() > 0 {
            out.push((f.degree(), 1));
        }
        out
    }

    /// Roots in 𝔽_p by exhaustive evaluation (small p only).
    pub fn roots(&self) -> Vec<u64> {
        (0..self.p).filter(|&x| self.eval(x) == 0).collect()
    }
}

fn div_exact_p(f: &PPoly, g: &PPoly) -> PPoly {
    let p = f.p;
    let g = g.monic();
    let dg = g.degree();
    let mut r = f.c.clone();
    let mut q = vec![0u64; r.len() - dg];
    for k in (0..q.len()).rev() {
        let c = r[k + dg];
        q[k] = c;
        if c != 0 {
            for (j, &gj) in g.c.iter().enumerate() {
                r[k + j] = (r[k + j] + p - mul_mod(c, gj, p)) % p;
            }
        }
    }
    PPoly::new(q, p)
}

/// Possible degrees of factors over ℚ of a square-free f of degree n, given mod-ℓ DDF patterns.
pub fn admissible_factor_degrees(n: usize, patterns: &[Vec<(usize, usize)>]) -> Vec<usize> {
    let mut allowed = vec![true; n + 1];
    for pat in patterns {
        let mut reach = vec![false; n + 1];
        reach[0] = true;
        for &(d, cnt) in pat {
            for _ in 0..cnt {
                for s in (d..=n).rev() {
                    if reach[s - d] {
                        reach[s] = true;
                    }
                }
            }
        }
        for s in 0..=n {
            allowed[s] &= reach[s];
        }
    }
    (0..=n).filter(|&s| allowed[s]).collect()
}

/// Irreducibility certificate over ℚ from DDF patterns at small primes; returns the primes used.
pub fn irreducibility_certificate(f: &ZPoly, max_primes: usize) -> Option<Vec<u64>> {
    let n = f.degree();
    if n <= 1 {
        return Some(vec![]);
    }
    let mut pats = Vec::new();
    let mut used = Vec::new();
    for p in crate::arith::primes_from(3).take(max_primes * 4) {
        let fp = f.mod_p(p);
        if fp.degree() != n || fp.gcd(&f.derivative().mod_p(p)).degree() != 0 {
            continue;
        }
        pats.push(fp.ddf_pattern());
        used.push(p);
        if admissible_factor_degrees(n, &pats) == vec![0, n] {
            return Some(used);
        }
        if used.len() >= max_primes {
            break;
        }
    }
    None
}
