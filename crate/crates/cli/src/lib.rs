//! Pipeline driver behind the `omf5` binary: configuration, content-hashed caches and output
//! documents. Everything here is deterministic; re-running a command against a warm cache
//! reproduces its output byte for byte.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use omf5::eigen::{self, Verdict};
use omf5::form::{self, GenusDescriptor, Place, QuinaryForm};
use omf5::hecke::{self, HeckeKind, HeckeOperator};
use omf5::neighbours::{self, GenusData};
use omf5::poly::{irreducibility_certificate, ZPoly};
use omf5::{weights, Error};

pub mod cache;

pub use cache::Cache;

/// Environment variable naming the default cache directory.
pub const CACHE_ENV: &str = "OMF5_CACHE_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Seed,
    Genus,
    Space,
    Hecke,
    Charpoly,
    Congruence,
    Dims,
}

impl CommandKind {
    fn allowed(self) -> &'static [&'static str] {
        const GENUS: &[&str] = &["dminus", "dplus", "lattice", "prime", "bound"];
        match self {
            CommandKind::Seed => &["dminus", "dplus", "bound"],
            CommandKind::Genus => GENUS,
            CommandKind::Space => &["dminus", "dplus", "lattice", "prime", "bound", "weight", "char"],
            CommandKind::Hecke | CommandKind::Charpoly => {
                &["dminus", "dplus", "lattice", "prime", "bound", "weight", "char", "p", "kind", "op"]
            }
            CommandKind::Congruence => &[
                "dminus", "dplus", "lattice", "prime", "bound", "weight", "char", "p", "kind", "op", "ell", "blocks",
                "eigenvalue", "ops", "precision",
            ],
            CommandKind::Dims => &["max_a"],
        }
    }
}

/// A complete, serializable description of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandKind,
    #[serde(default)]
    pub parameters: Map<String, Value>,
    #[serde(default)]
    pub cache_dir: Option<PathBuf>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
    /// Worker bound; never affects output.
    #[serde(default)]
    pub threads: Option<usize>,
}

/// Typed view of the parameter map (every command uses a subset).
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Params {
    dminus: Option<u64>,
    dplus: Option<u64>,
    lattice: Option<PathBuf>,
    prime: Option<u64>,
    bound: Option<i64>,
    weight: Option<String>,
    #[serde(rename = "char")]
    character: Option<u64>,
    p: Option<u64>,
    kind: Option<String>,
    op: Option<PathBuf>,
    ell: Option<u64>,
    blocks: Option<Vec<String>>,
    eigenvalue: Option<i64>,
    ops: Option<Vec<u64>>,
    precision: Option<u32>,
    max_a: Option<i64>,
}

/// Exit code and output document of a run.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub code: i32,
    pub document: Value,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NoGenus(_) => 3,
        Error::Inconsistency(_) => 4,
        _ => 2,
    }
}

/// Run a command; failures become an exit code plus an error document.
pub fn run_command(config: &RunConfig) -> Outcome {
    let run = || execute(config);
    let result = match config.threads {
        Some(n) if n > 0 => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(run),
            Err(e) => Err(Error::InvalidInput(format!("thread pool: {e}"))),
        },
        _ => run(),
    };
    match result {
        Ok(document) => Outcome { code: 0, document },
        Err(e) => Outcome { code: exit_code(&e), document: json!({ "error": e.to_string(), "config": config }) },
    }
}

fn execute(config: &RunConfig) -> omf5::Result<Value> {
    let allowed = config.command.allowed();
    if let Some(k) = config.parameters.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(Error::InvalidInput(format!("unknown parameter {k:?} for this command")));
    }
    let params: Params = serde_json::from_value(Value::Object(config.parameters.clone()))
        .map_err(|e| Error::InvalidInput(format!("parameters: {e}")))?;
    let cache = Cache::new(config.cache_dir.clone());
    let body = match config.command {
        CommandKind::Seed => cmd_seed(&params)?,
        CommandKind::Genus => cmd_genus(&params, &cache)?,
        CommandKind::Space => cmd_space(&params, &cache)?,
        CommandKind::Hecke => cmd_hecke(&params, &cache)?,
        CommandKind::Charpoly => cmd_charpoly(&params, &cache)?,
        CommandKind::Congruence => cmd_congruence(&params, &cache)?,
        CommandKind::Dims => cmd_dims(&params)?,
    };
    let mut doc = Map::new();
    doc.insert("command".into(), serde_json::to_value(config.command).unwrap());
    doc.insert("parameters".into(), Value::Object(config.parameters.clone()));
    doc.insert("versions".into(), versions());
    if let Value::Object(m) = body {
        doc.extend(m);
    }
    Ok(Value::Object(doc))
}

fn versions() -> Value {
    Value::Object(omf5::ALGORITHM_VERSIONS.iter().map(|(k, v)| (k.to_string(), json!(v))).collect())
}

// ---------------------------------------------------------------- lattice files

/// `{"dim":5,"hessian":[[..]..]}` or `{"dim":5,"coefficients":[15 upper-triangular values]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeFile {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hessian: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<i64>>,
}

impl LatticeFile {
    pub fn from_form(q: &QuinaryForm) -> Self {
        LatticeFile { dim: 5, hessian: Some(q.hessian().iter().map(|r| r.to_vec()).collect()), coefficients: None }
    }

    pub fn to_form(&self) -> omf5::Result<QuinaryForm> {
        if self.dim != 5 {
            return Err(Error::InvalidInput(format!("only dimension 5 is supported, got {}", self.dim)));
        }
        match (&self.hessian, &self.coefficients) {
            (Some(h), None) => {
                if h.len() != 5 || h.iter().any(|r| r.len() != 5) {
                    return Err(Error::InvalidInput("hessian must be 5×5".into()));
                }
                QuinaryForm::new(std::array::from_fn(|i| std::array::from_fn(|j| h[i][j])))
            }
            (None, Some(c)) => QuinaryForm::from_coefficients(c),
            _ => Err(Error::InvalidInput("give exactly one of hessian / coefficients".into())),
        }
    }
}

pub fn read_lattice(path: &Path) -> omf5::Result<QuinaryForm> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::MissingFile(format!("{}: {e}", path.display())))?;
    // a lattice file, or any output document carrying one under "lattice"
    let v: Value = serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    let v = v.get("lattice").cloned().unwrap_or(v);
    let lf: LatticeFile = serde_json::from_value(v).map_err(|e| Error::InvalidInput(format!("lattice file: {e}")))?;
    lf.to_form()
}

// ---------------------------------------------------------------- shared stages

fn descriptor(p: &Params) -> omf5::Result<GenusDescriptor> {
    match (p.dminus, p.dplus) {
        (Some(a), Some(b)) => GenusDescriptor::new(a, b),
        (Some(a), None) => GenusDescriptor::new(a, 1),
        _ => Err(Error::InvalidInput("need --dminus (and optionally --dplus) or --lattice".into())),
    }
}

fn seed_of(p: &Params) -> omf5::Result<QuinaryForm> {
    match &p.lattice {
        Some(path) => {
            let q = read_lattice(path)?;
            if !form::is_special(&q) {
                return Err(Error::InvalidInput("lattice is not special".into()));
            }
            Ok(q)
        }
        None => form::seed_search(&descriptor(p)?, p.bound.unwrap_or(16)),
    }
}

fn local_data(q: &QuinaryForm) -> omf5::Result<Value> {
    let d = (q.det() / 2) as u64;
    let mut hw = BTreeMap::new();
    hw.insert("inf".to_string(), form::hasse_witt(q, Place::Infinity)?);
    let mut eich = BTreeMap::new();
    for p in omf5::arith::prime_divisors(2 * d) {
        hw.insert(p.to_string(), form::hasse_witt(q, Place::Finite(p))?);
        if d % p == 0 {
            eich.insert(p.to_string(), form::eichler_invariant(q, p)?);
        }
    }
    Ok(json!({ "det": q.det(), "D": d, "hasse_witt": hw, "eichler": eich }))
}

/// Genus from cache, or enumerated (with a closure check at a second prime) and stored.
fn load_genus(p: &Params, cache: &Cache) -> omf5::Result<(GenusData, String)> {
    let seed = seed_of(p)?;
    let prime = p.prime.unwrap_or_else(|| neighbours::default_prime(&seed));
    let key = cache::genus_key(&seed, prime);
    if let Some(g) = cache.get::<GenusData>("genus", &key)? {
        return Ok((g, key));
    }
    let g = neighbours::enumerate_genus(&seed, prime)?;
    let d = g.d();
    let second = omf5::arith::primes_from(prime + 1).find(|q| d % q != 0).unwrap();
    if !neighbours::verify_closure(&g, second)? {
        return Err(Error::Inconsistency(format!("{second}-neighbours leave the classes found at {prime}")));
    }
    cache.put("genus", &key, &g)?;
    Ok((g, key))
}

fn parse_weight(p: &Params) -> omf5::Result<(i64, i64)> {
    let w = p.weight.as_deref().unwrap_or("0,0");
    let parts: Vec<&str> = w.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(Error::InvalidInput(format!("weight {w:?} is not of the form a,b")));
    }
    let a = parts[0].parse().map_err(|_| Error::InvalidInput(format!("bad weight {w:?}")))?;
    let b = parts[1].parse().map_err(|_| Error::InvalidInput(format!("bad weight {w:?}")))?;
    Ok((a, b))
}

fn load_operator(p: &Params, cache: &Cache) -> omf5::Result<(HeckeOperator, String)> {
    if let Some(path) = &p.op {
        return cache::read_operator_file(path);
    }
    let (genus, gkey) = load_genus(p, cache)?;
    let (a, b) = parse_weight(p)?;
    let d = p.character.unwrap_or(1);
    let prime = p.p.ok_or_else(|| Error::InvalidInput("missing -p".into()))?;
    let kind: HeckeKind = p.kind.as_deref().unwrap_or("T").parse()?;
    let key = cache::operator_key(&gkey, a, b, d, prime, kind);
    if let Some(op) = cache.get::<HeckeOperator>("operator", &key)? {
        return Ok((op, key));
    }
    let space = hecke::build_space(&genus, a, b, d)?;
    let op = hecke::hecke_matrix(&space, prime, kind)?;
    cache.put("operator", &key, &op)?;
    Ok((op, key))
}

// ---------------------------------------------------------------- commands

fn cmd_seed(p: &Params) -> omf5::Result<Value> {
    let desc = descriptor(p)?;
    let q = form::seed_search(&desc, p.bound.unwrap_or(16))?;
    Ok(json!({
        "descriptor": desc,
        "lattice": LatticeFile::from_form(&q),
        "coefficients": q.coefficients(),
        "invariants": local_data(&q)?,
    }))
}

fn cmd_genus(p: &Params, cache: &Cache) -> omf5::Result<Value> {
    let (g, key) = load_genus(p, cache)?;
    let (mn, md) = g.mass();
    Ok(json!({
        "descriptor": { "d_minus": g.d_minus, "d_plus": g.d_plus },
        "cache_key": key,
        "seed": LatticeFile::from_form(&g.seed),
        "traversal_prime": g.traversal_prime,
        "class_count": g.len(),
        "mass": [mn.to_string(), md.to_string()],
        "aut_orders": g.auts.iter().map(|a| a.order).collect::<Vec<_>>(),
        "classes": g.classes.iter().map(|c| c.coefficients()).collect::<Vec<_>>(),
    }))
}

fn cmd_space(p: &Params, cache: &Cache) -> omf5::Result<Value> {
    let (genus, key) = load_genus(p, cache)?;
    let (a, b) = parse_weight(p)?;
    let s = hecke::build_space(&genus, a, b, p.character.unwrap_or(1))?;
    Ok(json!({
        "descriptor": s.descriptor,
        "genus_key": key,
        "weight_dim": s.weight_dim(),
        "dim": s.dim,
        "block_dims": s.block_dims(),
    }))
}

fn cmd_hecke(p: &Params, cache: &Cache) -> omf5::Result<Value> {
    let (op, key) = load_operator(p, cache)?;
    Ok(json!({ "descriptor": op.descriptor, "cache_key": key, "operator": op }))
}

/// Factorization into integer roots (with multiplicity) and the remaining cofactor.
fn split_rational(f: &ZPoly) -> (Vec<(BigInt, usize)>, ZPoly) {
    let mut rest = f.clone();
    let mut roots = Vec::new();
    for r in f.integer_roots() {
        let lin = ZPoly::new(vec![-r.clone(), BigInt::from(1)]);
        let mut m = 0;
        while let Some(q) = rest.div_exact(&lin) {
            rest = q;
            m += 1;
        }
        roots.push((r, m));
    }
    (roots, rest)
}

fn cmd_charpoly(p: &Params, cache: &Cache) -> omf5::Result<Value> {
    let (op, key) = load_operator(p, cache)?;
    let cp = op.charpoly()?;
    let (roots, rest) = split_rational(&cp.poly);
    let cert = if rest.degree() > 0 { irreducibility_certificate(&rest, 40) } else { None };
    Ok(json!({
        "descriptor": op.descriptor,
        "operator_key": key,
        "charpoly": cp.poly.to_string(),
        "coefficients": cp.poly.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "rational_roots": roots.iter().map(|(r, m)| json!({"root": r.to_string(), "multiplicity": m})).collect::<Vec<_>>(),
        "cofactor": rest.to_string(),
        "cofactor_degree": rest.degree(),
        "cofactor_irreducible_by": cert,
    }))
}

/// `x+7` style polynomials, or `degN` for the cofactor of degree N left after removing rational roots.
fn resolve_block(spec: &str, chi: &ZPoly) -> omf5::Result<ZPoly> {
    if let Some(n) = spec.strip_prefix("deg") {
        let n: usize = n.parse().map_err(|_| Error::InvalidInput(format!("bad block {spec:?}")))?;
        let (_, rest) = split_rational(chi);
        if rest.degree() != n {
            return Err(Error::InvalidInput(format!("no cofactor of degree {n} (have {})", rest.degree())));
        }
        return Ok(rest);
    }
    spec.parse::<ZPoly>().map_err(|e| Error::InvalidInput(format!("block {spec:?}: {e}")))
}

fn cmd_congruence(p: &Params, cache: &Cache) -> omf5::Result<Value> {
    let (op, key) = load_operator(p, cache)?;
    if op.scale != 1 {
        return Err(Error::Unsupported("congruence analysis needs an integral operator (scale 1)".into()));
    }
    let ell = p.ell.ok_or_else(|| Error::InvalidInput("missing --ell".into()))?;
    if !omf5::arith::is_prime(ell) {
        return Err(Error::InvalidInput(format!("ℓ = {ell} is not prime")));
    }
    let specs = p.blocks.clone().ok_or_else(|| Error::InvalidInput("missing --blocks".into()))?;
    let chi = op.charpoly()?.poly;
    let blocks: Vec<ZPoly> = specs.iter().map(|s| resolve_block(s, &chi)).collect::<omf5::Result<_>>()?;
    // the eigenvalue mod ℓ being matched: explicit, or the root of the first linear block
    let c = match (p.eigenvalue, blocks.iter().find(|b| b.degree() == 1)) {
        (Some(c), _) => c,
        (None, Some(lin)) => {
            use num_traits::ToPrimitive;
            (-&lin.coeffs()[0]).to_i64().ok_or_else(|| Error::InvalidInput("eigenvalue too large".into()))?
        }
        (None, None) => return Err(Error::InvalidInput("give --eigenvalue or a linear block".into())),
    };
    let prec = p.precision.unwrap_or(6);
    let mut vectors = Vec::new();
    let mut sources = Vec::new();
    for (spec, f) in specs.iter().zip(&blocks) {
        let basis = eigen::block_split_with(&op.matrix, f, &chi)?;
        if f.degree() == 1 {
            vectors.extend(eigen::reduce_vectors(&basis, ell)?);
            sources.push(json!({ "block": spec, "eigenvalue": (-&f.coeffs()[0]).to_string() }));
            continue;
        }
        for r in eigen::padic_roots(f, ell, c, prec + 2) {
            vectors.push(eigen::padic_eigenvector_mod(&op.matrix, &r, ell, prec)?);
            let shifted = &r - BigInt::from(c);
            sources.push(json!({
                "block": spec,
                "eigenvalue_minus_c_digits": eigen::digits(&shifted, ell, prec as usize),
            }));
        }
    }
    if vectors.is_empty() {
        return Err(Error::NotFound(format!("no eigenvalue ≡ {c} mod {ell} in the requested blocks")));
    }
    let mut ops = vec![op.matrix.clone()];
    let mut op_desc = vec![op.descriptor];
    if let Some(extra) = &p.ops {
        for &q in extra {
            let mut pp = p.clone();
            pp.p = Some(q);
            pp.op = None;
            let (o, _) = load_operator(&pp, cache)?;
            op_desc.push(o.descriptor);
            ops.push(o.matrix);
        }
    }
    let kernel_dim = eigen::mod_ell_kernel(&op.matrix, c, ell)?.len();
    let report = eigen::congruence_report_mod(vectors, ell, &ops)?;
    Ok(json!({
        "descriptor": op.descriptor,
        "operator_key": key,
        "operators": op_desc,
        "ell": ell,
        "c": c,
        "kernel_dim_of_first_operator": kernel_dim,
        "sources": sources,
        "report": report,
        "collinear": report.verdict == Verdict::Collinear,
    }))
}

fn cmd_dims(p: &Params) -> omf5::Result<Value> {
    let max_a = p.max_a.unwrap_or(weights::MAX_A as i64);
    let mut rows = Vec::new();
    for a in 0..=max_a {
        for b in (a % 2..=a).step_by(2) {
            rows.push(json!({ "a": a, "b": b, "dim": weights::weight_dimension(a, b)? }));
        }
    }
    Ok(json!({ "weights": rows }))
}

// ---------------------------------------------------------------- rendering

/// Serialize a document in the requested format (newline-terminated).
pub fn render(doc: &Value, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(doc).unwrap() + "\n",
        Format::Csv => render_csv(doc),
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "none".into(),
        other => other.to_string(),
    }
}

/// Rows of the CSV view: eigenvalue tables are `p, eigenvalue-or-residue, block`.
fn csv_rows(doc: &Value) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    if let Some(roots) = doc.get("rational_roots").and_then(Value::as_array) {
        let p = cell(&doc["descriptor"]["p"]);
        rows.push(vec!["p".into(), "eigenvalue".into(), "block".into()]);
        for (i, r) in roots.iter().enumerate() {
            rows.push(vec![p.clone(), cell(&r["root"]), i.to_string()]);
        }
        if doc["cofactor_degree"].as_u64().unwrap_or(0) > 0 {
            rows.push(vec![p, cell(&doc["cofactor"]), roots.len().to_string()]);
        }
    } else if let Some(rep) = doc.get("report") {
        rows.push(vec!["p".into(), "residue".into(), "block".into()]);
        let ops = doc["operators"].as_array().cloned().unwrap_or_default();
        if let Some(evs) = rep["eigenvalues"].as_array() {
            for (o, row) in ops.iter().zip(evs) {
                for (i, e) in row.as_array().into_iter().flatten().enumerate() {
                    rows.push(vec![cell(&o["p"]), cell(e), i.to_string()]);
                }
            }
        }
    } else if let Some(ws) = doc.get("weights").and_then(Value::as_array) {
        rows.push(vec!["a".into(), "b".into(), "dim".into()]);
        for w in ws {
            rows.push(vec![cell(&w["a"]), cell(&w["b"]), cell(&w["dim"])]);
        }
    } else {
        rows.push(vec!["key".into(), "value".into()]);
        if let Value::Object(m) = doc {
            for (k, v) in m {
                rows.push(vec![k.clone(), cell(v)]);
            }
        }
    }
    rows
}

fn render_csv(doc: &Value) -> String {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
    for row in csv_rows(doc) {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}
