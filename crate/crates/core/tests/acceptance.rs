//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
//! `OMF5_SKIP_SLOW=1` skips criterion 6 (the D = 61·37 run, a few minutes in release).

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use itertools::Itertools;
use num_bigint::BigInt;

use common::{basis_mod, ensure_eq, genus, Check};
use omf5::eigen::{
    block_eigenvectors_mod, block_split_with, congruence_report_mod, digits, in_span_mod, mod_ell_kernel,
    padic_eigenvector_mod, padic_roots, proportional, reduce_vectors, Verdict,
};
use omf5::fixtures::{load_named, sk_block_poly, yoshida_block_poly, yoshida_eigenvalue};
use omf5::hecke::{build_space, hecke_matrix, HeckeKind};
use omf5::linalg::rank_mod;
use omf5::poly::{irreducibility_certificate, ZPoly};
use omf5::weights::{build_weight, weight_dimension};

fn zp(s: &str) -> ZPoly {
    s.parse().unwrap()
}

/// Integer roots with multiplicity and the cofactor.
fn split_rational(f: &ZPoly) -> (Vec<BigInt>, ZPoly) {
    let mut rest = f.clone();
    let mut roots = Vec::new();
    for r in f.integer_roots() {
        let lin = ZPoly::new(vec![-r.clone(), BigInt::from(1)]);
        while let Some(q) = rest.div_exact(&lin) {
            rest = q;
            roots.push(r.clone());
        }
    }
    (roots, rest)
}

fn c1_golden_61() -> Check {
    let g = genus(61, 1);
    ensure_eq(g.len(), 8, "class count")?;
    let s = build_space(&g, 0, 0, 1).map_err(|e| e.to_string())?;
    let t2 = hecke_matrix(&s, 2, HeckeKind::T).map_err(|e| e.to_string())?;
    let chi = t2.charpoly().map_err(|e| e.to_string())?.poly;
    let want = zp("x-15").mul(&zp("x+7")).mul(&zp("x^6-29*x^5+322*x^4-1714*x^3+4471*x^2-5205*x+2026"));
    ensure_eq(&chi, &want, "T(2) charpoly")?;
    Ok(format!("h=8, T(2) charpoly = {chi}"))
}

/// T(2) on D=61 in the class order of the reference transcript.
const REFERENCE_T2_61: [[i64; 8]; 8] = [
    [7, 4, 4, 0, 0, 0, 0, 0],
    [1, 4, 3, 3, 3, 1, 0, 0],
    [1, 3, 3, 0, 0, 0, 2, 6],
    [0, 2, 0, 5, 0, 2, 2, 4],
    [0, 6, 0, 0, 1, 0, 4, 4],
    [0, 1, 0, 3, 0, 9, 0, 2],
    [0, 0, 4, 6, 4, 0, 1, 0],
    [0, 0, 3, 3, 1, 1, 0, 7],
];

/// All σ with ours[σ(i)][σ(j)] = reference[i][j].
fn relabellings(ours: &[i64], n: usize, reference: &[[i64; 8]; 8]) -> Vec<Vec<usize>> {
    (0..n)
        .permutations(n)
        .filter(|s| (0..n).all(|i| (0..n).all(|j| ours[s[i] * n + s[j]] == reference[i][j])))
        .collect()
}

fn c2_congruence_61_43() -> Check {
    let g = genus(61, 1);
    let s = build_space(&g, 0, 0, 1).map_err(|e| e.to_string())?;
    let t2 = hecke_matrix(&s, 2, HeckeKind::T).map_err(|e| e.to_string())?;
    let chi = t2.charpoly().map_err(|e| e.to_string())?.poly;
    // class order is an enumeration artefact: match the reference matrix exactly up to relabelling
    let sigmas = relabellings(&t2.matrix.data, 8, &REFERENCE_T2_61);
    ensure_eq(sigmas.len(), 1, "relabellings onto the reference T(2)")?;
    let sigma = &sigmas[0];
    let lin = block_split_with(&t2.matrix, &zp("x+7"), &chi).map_err(|e| e.to_string())?;
    ensure_eq(lin.len(), 1, "(x+7)-kernel rank")?;
    let relabelled: Vec<BigInt> = sigma.iter().map(|&k| lin[0][k].clone()).collect();
    let want: Vec<BigInt> = [0, 6, -6, -4, -12, 0, 12, 3].iter().map(|&x| BigInt::from(x)).collect();
    let neg: Vec<BigInt> = want.iter().map(|x| -x).collect();
    if relabelled != want && relabelled != neg {
        return Err(format!("(x+7)-kernel spanned by {relabelled:?} in reference order"));
    }
    let deg6 = block_split_with(&t2.matrix, &zp("x^6-29*x^5+322*x^4-1714*x^3+4471*x^2-5205*x+2026"), &chi)
        .map_err(|e| e.to_string())?;
    let ev = block_eigenvectors_mod(&t2.matrix, &deg6, -7, 43);
    ensure_eq(ev.len(), 1, "deg-6 eigenvectors ≡ −7 mod 43")?;
    let v = reduce_vectors(&lin, 43).map_err(|e| e.to_string())?;
    ensure_eq(proportional(&v[0], &ev[0], 43), true, "collinear mod 43")?;
    Ok(format!(
        "T(2) equals the reference matrix under class relabelling {sigma:?}; kernel ±{relabelled:?}; collinear with the deg-6 eigenvector mod 43"
    ))
}

fn c3_d89() -> Check {
    let g = genus(89, 1);
    // frozen regression values from the first verified run
    ensure_eq(g.len(), 10, "class count")?;
    ensure_eq(g.mass(), (11, 16), "mass")?;
    let s = build_space(&g, 0, 0, 1).map_err(|e| e.to_string())?;
    let t2 = hecke_matrix(&s, 2, HeckeKind::T).map_err(|e| e.to_string())?;
    let chi = t2.charpoly().map_err(|e| e.to_string())?.poly;
    let rest = chi.div_exact(&zp("x-15")).ok_or("no Eisenstein line x−15")?;
    let (roots, deg6) = split_rational(&rest);
    let mut degrees: Vec<usize> = vec![1; roots.len()];
    degrees.push(deg6.degree());
    ensure_eq(degrees, vec![1, 1, 1, 6], "block degrees")?;
    irreducibility_certificate(&deg6, 40).ok_or("deg-6 block not certified irreducible")?;
    // the lines attached to classical forms, and the remaining general-type line
    let mut lifted = Vec::new();
    for label in ["89.4.a.o1", "89.4.a.o2", "89.4.a.o3"] {
        let f = load_named(label).map_err(|e| e.to_string())?;
        lifted.push(sk_block_poly(&f.charpoly_of_ap(2).unwrap(), 2, 3, 0));
    }
    ensure_eq(&lifted[2], &deg6, "deg-6 block is the lift of the degree-6 newform")?;
    let lifted_roots: Vec<BigInt> = lifted[..2].iter().map(|f| -&f.coeffs()[0]).collect();
    let general: Vec<&BigInt> = roots.iter().filter(|r| !lifted_roots.contains(r)).collect();
    ensure_eq(general.len(), 1, "general-type lines")?;
    let c = i64::try_from(general[0]).unwrap();
    let line = block_split_with(&t2.matrix, &ZPoly::linear(c), &chi).map_err(|e| e.to_string())?;
    let block = block_split_with(&t2.matrix, &deg6, &chi).map_err(|e| e.to_string())?;
    let ev = block_eigenvectors_mod(&t2.matrix, &block, c, 29);
    ensure_eq(ev.len(), 1, "deg-6 eigenvectors mod 29")?;
    let v = reduce_vectors(&line, 29).map_err(|e| e.to_string())?;
    ensure_eq(proportional(&v[0], &ev[0], 29), true, "general line collinear mod 29")?;
    Ok(format!("h=10, mass 11/16; T(2) = (x−15)·{}; general line x{:+} ≡ deg-6 mod 29", rest, -c))
}

fn c4_weights() -> Check {
    for (a, b, d) in [(0, 0, 1), (1, 1, 5), (2, 0, 10), (4, 0, 35)] {
        ensure_eq(weight_dimension(a, b).map_err(|e| e.to_string())?, d, &format!("dim W_{{{a},{b}}}"))?;
    }
    let mut n = 0;
    // W_{a,b} exists for a ≥ b ≥ 0 with a ≡ b mod 2
    for a in 0..=6i64 {
        for b in (a % 2..=a).step_by(2) {
            let formula = weight_dimension(a, b).map_err(|e| e.to_string())?;
            let built = build_weight(a, b).map_err(|e| e.to_string())?.dim as u64;
            ensure_eq(built, formula, &format!("constructed W_{{{a},{b}}}"))?;
            n += 1;
        }
    }
    Ok(format!("4 pinned values; {n} constructed representations match the formula"))
}

/// One genus of level 13·19: the given line, a Yoshida block, and the complement.
fn mod7_side(dm: u64, dp: u64, lam: &BigInt, y_block: (&str, &str), want_block: &str) -> Result<(String, ZPoly), String> {
    let g = genus(dm, dp);
    let s = build_space(&g, 2, 0, dp).map_err(|e| e.to_string())?;
    let t2 = hecke_matrix(&s, 2, HeckeKind::T).map_err(|e| e.to_string())?;
    let chi = t2.charpoly().map_err(|e| e.to_string())?.poly;
    let l1 = ZPoly::new(vec![-lam.clone(), BigInt::from(1)]);
    let (gb, hb) = (load_named(y_block.0).map_err(|e| e.to_string())?, load_named(y_block.1).map_err(|e| e.to_string())?);
    let b2 = yoshida_block_poly(&gb.charpoly_of_ap(2).unwrap(), &hb.charpoly_of_ap(2).unwrap(), 2, 0)
        .map_err(|e| e.to_string())?;
    ensure_eq(&b2, &zp(want_block), "Yoshida block polynomial")?;
    let b3 = chi.div_exact(&l1).and_then(|r| r.div_exact(&b2)).ok_or("line or Yoshida block does not divide the charpoly")?;
    ensure_eq(b3.gcd_q(&l1).degree(), 0, "line is simple")?;
    let v1 = block_split_with(&t2.matrix, &l1, &chi).map_err(|e| e.to_string())?;
    let v3 = block_split_with(&t2.matrix, &b3, &chi).map_err(|e| e.to_string())?;
    let a1 = reduce_vectors(&v1, 7).map_err(|e| e.to_string())?;
    let a3 = basis_mod(&v3, 7);
    ensure_eq(rank_mod(&a3, 7), v3.len(), "complement basis rank mod 7")?;
    ensure_eq(in_span_mod(&a1[0], &a3, 7), true, "line inside the complement mod 7")?;
    let summary = format!(
        "({dm},{dp}) θ{dp}: dim {}, blocks 1+{}+{}, line T(2)={lam} ⊂ complement mod 7",
        s.dim,
        b2.degree(),
        b3.degree()
    );
    Ok((summary, b3))
}

fn c5_mod7_247() -> Check {
    // A₁: Yoshida lift of 13.4.a.a and 19.6.a.a
    let h = load_named("13.4.a.a").map_err(|e| e.to_string())?;
    let gf = load_named("19.6.a.a").map_err(|e| e.to_string())?;
    let lam_a = yoshida_eigenvalue(2, &BigInt::from(h.ap[&2]), &BigInt::from(gf.ap[&2]), 0);
    ensure_eq(lam_a.clone(), BigInt::from(-16), "Yoshida eigenvalue")?;
    // B₁: oldform from the one-dimensional D=19 space in W(2,0)
    let s19 = build_space(&genus(19, 1), 2, 0, 1).map_err(|e| e.to_string())?;
    ensure_eq(s19.dim, 1, "dim of the D=19 W(2,0) space")?;
    let t19 = hecke_matrix(&s19, 2, HeckeKind::T).map_err(|e| e.to_string())?;
    ensure_eq(t19.scale, 1, "scale")?;
    let lam_b = BigInt::from(t19.matrix.data[0]);
    ensure_eq((&lam_a - &lam_b) % 7, BigInt::from(0), "A₁ and B₁ eigenvalues mod 7")?;

    let (sa, a3) = mod7_side(13, 19, &lam_a, ("13.4.a.a", "19.6.a.d"), "x^4+31*x^3+258*x^2+634*x+400")?;
    let (sb, b3) = mod7_side(19, 13, &lam_b, ("19.4.a.a", "13.6.a.b"), "x^3+11*x^2-60*x-96")?;
    ensure_eq(a3.degree(), 29, "deg A3")?;
    ensure_eq(&a3, &b3, "A3 and B3 charpolys")?;
    Ok(format!("{sa}; {sb}; χ(A3) = χ(B3); {lam_a} ≡ {lam_b} mod 7"))
}

fn c6_mod19_2257() -> Check {
    let g = genus(61, 37);
    let s = build_space(&g, 0, 0, 37).map_err(|e| e.to_string())?;
    ensure_eq(s.dim, 224, "dimension")?;
    let t2 = hecke_matrix(&s, 2, HeckeKind::T).map_err(|e| e.to_string())?;
    let chi = t2.charpoly().map_err(|e| e.to_string())?.poly;
    let gf = load_named("61.2.a.b").map_err(|e| e.to_string())?;
    let hf = load_named("37.4.a.a").map_err(|e| e.to_string())?;
    let f12 = yoshida_block_poly(&gf.charpoly_of_ap(2).unwrap(), &hf.charpoly_of_ap(2).unwrap(), 2, 0)
        .map_err(|e| e.to_string())?;
    let lin = ZPoly::linear(-7);
    let f211 = chi.div_exact(&lin).and_then(|r| r.div_exact(&f12)).ok_or("x+7 or f12 does not divide")?;
    ensure_eq(f211.degree(), 211, "degree of the remaining block")?;
    irreducibility_certificate(&f12, 40).ok_or("f12 not certified irreducible")?;
    irreducibility_certificate(&f211, 40).ok_or("f211 not certified irreducible")?;
    ensure_eq(mod_ell_kernel(&t2.matrix, -7, 19).map_err(|e| e.to_string())?.len(), 2, "dim ker(T(2)+7) mod 19")?;

    let c1 = block_split_with(&t2.matrix, &lin, &chi).map_err(|e| e.to_string())?;
    let mut vectors = reduce_vectors(&c1, 19).map_err(|e| e.to_string())?;
    let mut digit_pairs = vec![(0u64, 0u64)];
    let mut origin = vec![0usize; 3];
    for (k, f) in [(1, &f12), (2, &f211)] {
        for r in padic_roots(f, 19, -7, 8) {
            origin[k] += 1;
            let d = digits(&(&r + 7), 19, 3);
            ensure_eq(d[0], 0, "root ≡ −7 mod 19")?;
            digit_pairs.push((d[1], d[2]));
            vectors.push(padic_eigenvector_mod(&t2.matrix, &r, 19, 6).map_err(|e| e.to_string())?);
        }
    }
    origin[0] = 1;
    digit_pairs.sort_unstable();
    ensure_eq(digit_pairs.clone(), vec![(0, 0), (10, 8), (15, 2), (18, 10)], "19-adic digits of λ+7")?;
    let t3 = hecke_matrix(&s, 3, HeckeKind::T).map_err(|e| e.to_string())?;
    let t14 = hecke_matrix(&s, 2, HeckeKind::T1).map_err(|e| e.to_string())?;
    let rep = congruence_report_mod(vectors, 19, &[t2.matrix.clone(), t3.matrix, t14.matrix])
        .map_err(|e| e.to_string())?;
    ensure_eq(rep.verdict, Verdict::CommonEigenspaceForced, "verdict")?;
    for i in 0..rep.vectors.len() {
        for j in i + 1..rep.vectors.len() {
            ensure_eq(proportional(&rep.vectors[i], &rep.vectors[j], 19), false, "no two vectors collinear")?;
        }
    }
    Ok(format!(
        "h={}, dim 224, T(2) blocks 1+12+211, ker dim 2, roots ≡ −7 per block {:?}, λ+7 digits {:?}, verdict {:?}",
        g.len(),
        origin,
        &digit_pairs[1..],
        rep.verdict
    ))
}

fn c7_properties() -> Check {
    let parts = [
        ("reciprocity", common::hilbert_reciprocity(1000)),
        ("HW–Eichler", common::hw_eichler_seeds()),
        ("neighbour counts", common::neighbour_counts()),
        ("commutation", common::commutation_61()),
        ("mass", common::mass_two_primes()),
        ("base point", common::base_point_independence()),
    ];
    let mut out = Vec::new();
    for (name, r) in parts {
        out.push(format!("{name}: {}", r.map_err(|e| format!("{name}: {e}"))?));
    }
    Ok(out.join("; "))
}

fn main() {
    let skip_slow = std::env::var("OMF5_SKIP_SLOW").is_ok_and(|v| v == "1");
    let criteria: [(&str, fn() -> Check, bool); 7] = [
        ("1 D=61 golden run", c1_golden_61, false),
        ("2 61/43 congruence", c2_congruence_61_43, false),
        ("3 D=89 blocks and 29-congruence", c3_d89, false),
        ("4 weight dimensions", c4_weights, false),
        ("5 mod-7 congruences (13·19, W(2,0))", c5_mod7_247, false),
        ("6 mod-19 (61·37, θ37)", c6_mod19_2257, true),
        ("7 property suites", c7_properties, false),
    ];
    let mut failed = 0;
    for (name, f, slow) in criteria {
        if slow && skip_slow {
            println!("SKIP criterion {name}: OMF5_SKIP_SLOW=1");
            continue;
        }
        let t = Instant::now();
        let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = t.elapsed().as_secs_f64();
        match r {
            Ok(detail) => println!("PASS criterion {name} [{secs:.1}s]: {detail}"),
            Err(e) => {
                failed += 1;
                println!("FAIL criterion {name} [{secs:.1}s]: {e}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
