use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use omf5_cli::{render, run_command, CommandKind, Format, RunConfig, CACHE_ENV};

#[derive(Parser, Debug)]
#[command(name = "omf5", version, about = "Algebraic modular forms for special quinary lattices")]
struct Cli {
    /// Read the whole run from a JSON RunConfig instead of the subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Cache directory for genera and operators.
    #[arg(long, global = true, env = CACHE_ENV)]
    cache_dir: Option<PathBuf>,
    /// Write the document here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Fmt::Json)]
    format: Fmt,
    /// Worker threads (does not change results).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Option<Cmd>,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Fmt {
    Json,
    Csv,
}

#[derive(Args, Debug, Default)]
struct GenusArgs {
    #[arg(long)]
    dminus: Option<u64>,
    #[arg(long)]
    dplus: Option<u64>,
    /// Lattice file ({"dim":5,"hessian":[..]}) instead of a descriptor.
    #[arg(long)]
    lattice: Option<PathBuf>,
    /// Traversal prime (default: smallest prime not dividing D).
    #[arg(long)]
    prime: Option<u64>,
    /// Coefficient bound for the seed search.
    #[arg(long)]
    bound: Option<i64>,
}

#[derive(Args, Debug, Default)]
struct SpaceArgs {
    #[command(flatten)]
    genus: GenusArgs,
    /// Weight as "a,b".
    #[arg(long)]
    weight: Option<String>,
    /// Character divisor d of D.
    #[arg(long = "char")]
    character: Option<u64>,
}

#[derive(Args, Debug, Default)]
struct OpArgs {
    #[command(flatten)]
    space: SpaceArgs,
    #[arg(short)]
    p: Option<u64>,
    /// T or T1.
    #[arg(long)]
    kind: Option<String>,
    /// Previously written operator (hecke output or cache entry).
    #[arg(long)]
    op: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Find a seed lattice for a genus.
    Seed {
        #[arg(long)]
        dminus: u64,
        #[arg(long)]
        dplus: Option<u64>,
        #[arg(long)]
        bound: Option<i64>,
    },
    /// Enumerate a genus.
    Genus(GenusArgs),
    /// Dimension of a space of forms.
    Space(SpaceArgs),
    /// Compute a Hecke operator.
    Hecke(OpArgs),
    /// Characteristic polynomial and rational factorisation.
    Charpoly(OpArgs),
    /// Eigenvector congruences mod ℓ.
    Congruence {
        #[command(flatten)]
        op: OpArgs,
        #[arg(long)]
        ell: u64,
        /// Comma-separated blocks: polynomials such as x+7, or degN for the non-rational cofactor.
        #[arg(long, value_delimiter = ',')]
        blocks: Vec<String>,
        #[arg(long)]
        eigenvalue: Option<i64>,
        /// Further primes whose operators are tested on the same vectors.
        #[arg(long, value_delimiter = ',')]
        ops: Vec<u64>,
        #[arg(long)]
        precision: Option<u32>,
    },
    /// Table of weight dimensions.
    Dims {
        #[arg(long)]
        max_a: Option<i64>,
    },
}

fn put<T: serde::Serialize>(m: &mut Map<String, Value>, k: &str, v: Option<T>) {
    if let Some(v) = v {
        m.insert(k.into(), json!(v));
    }
}

fn genus_params(m: &mut Map<String, Value>, g: GenusArgs) {
    put(m, "dminus", g.dminus);
    put(m, "dplus", g.dplus);
    put(m, "lattice", g.lattice);
    put(m, "prime", g.prime);
    put(m, "bound", g.bound);
}

fn space_params(m: &mut Map<String, Value>, s: SpaceArgs) {
    genus_params(m, s.genus);
    put(m, "weight", s.weight);
    put(m, "char", s.character);
}

fn op_params(m: &mut Map<String, Value>, o: OpArgs) {
    space_params(m, o.space);
    put(m, "p", o.p);
    put(m, "kind", o.kind);
    put(m, "op", o.op);
}

fn to_config(cli: Cli) -> Result<RunConfig, String> {
    let format = match cli.format {
        Fmt::Json => Format::Json,
        Fmt::Csv => Format::Csv,
    };
    if let Some(path) = cli.config {
        let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        let mut cfg: RunConfig = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        cfg.cache_dir = cfg.cache_dir.or(cli.cache_dir);
        cfg.output = cfg.output.or(cli.output);
        cfg.threads = cfg.threads.or(cli.threads);
        return Ok(cfg);
    }
    let mut m = Map::new();
    let command = match cli.command.ok_or("no command given")? {
        Cmd::Seed { dminus, dplus, bound } => {
            put(&mut m, "dminus", Some(dminus));
            put(&mut m, "dplus", dplus);
            put(&mut m, "bound", bound);
            CommandKind::Seed
        }
        Cmd::Genus(g) => {
            genus_params(&mut m, g);
            CommandKind::Genus
        }
        Cmd::Space(s) => {
            space_params(&mut m, s);
            CommandKind::Space
        }
        Cmd::Hecke(o) => {
            op_params(&mut m, o);
            CommandKind::Hecke
        }
        Cmd::Charpoly(o) => {
            op_params(&mut m, o);
            CommandKind::Charpoly
        }
        Cmd::Congruence { op, ell, blocks, eigenvalue, ops, precision } => {
            op_params(&mut m, op);
            put(&mut m, "ell", Some(ell));
            put(&mut m, "blocks", Some(blocks));
            put(&mut m, "eigenvalue", eigenvalue);
            if !ops.is_empty() {
                put(&mut m, "ops", Some(ops));
            }
            put(&mut m, "precision", precision);
            CommandKind::Congruence
        }
        Cmd::Dims { max_a } => {
            put(&mut m, "max_a", max_a);
            CommandKind::Dims
        }
    };
    Ok(RunConfig { command, parameters: m, cache_dir: cli.cache_dir, output: cli.output, format, threads: cli.threads })
}

fn main() -> ExitCode {
    let cfg = match to_config(Cli::parse()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let outcome = run_command(&cfg);
    if outcome.code != 0 {
        eprintln!("error: {}", outcome.document["error"].as_str().unwrap_or("unknown"));
        return ExitCode::from(outcome.code as u8);
    }
    let text = render(&outcome.document, cfg.format);
    match &cfg.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::SUCCESS
}
