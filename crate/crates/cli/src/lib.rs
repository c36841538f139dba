//! Command logic behind the `tgamma` binary.
//!
//! Every command produces one JSON document on standard output. Failures
//! produce `{"error":{"kind":..,"message":..}}` and a nonzero exit code:
//! 2 for domain and parse errors, 3 for resource guards (including a Gamma
//! product that does not stabilize), 4 for an inconclusive certification.

pub mod cache;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use thakur_gamma::bracket::{
    gauss_vector, is_bracket_relation, reflection_vector, sigma_plus, translation_vector, ExponentVector,
};
use thakur_gamma::cm_analyzer::{approx_equiv, classify, isogenous};
use thakur_gamma::ffpoly::{make_field, parse_poly, Fq, Poly};
use thakur_gamma::recog::{certify_relation, DEFAULT_DMAX};
use thakur_gamma::special_values::{carlitz_period, gamma, RationalArg};
use thakur_gamma::Error;

use cache::{key_for, Cache};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_GUARD: i32 = 3;
pub const EXIT_INCONCLUSIVE: i32 = 4;

#[derive(Parser, Debug, Clone)]
#[command(name = "tgamma", version, about = "Gamma values, Carlitz periods and bracket relations over F_q[t]")]
pub struct Cli {
    #[command(flatten)]
    pub opts: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct GlobalOpts {
    /// Do not read or write the result cache.
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// Cache directory (default: $TGAMMA_CACHE_DIR, then the user cache dir).
    #[arg(long, global = true, env = cache::CACHE_DIR_ENV)]
    pub cache_dir: Option<PathBuf>,
    /// Report cache use and timing on standard error.
    #[arg(long, global = true)]
    pub explain: bool,
}

#[derive(Args, Debug, Clone)]
pub struct FieldArgs {
    /// Field size, a prime power.
    #[arg(long)]
    pub q: u32,
    /// Defining polynomial of F_q over F_p in the generator `g`, e.g. "g^2+g+1".
    #[arg(long)]
    pub field_modulus: Option<String>,
}

impl FieldArgs {
    fn field(&self) -> thakur_gamma::Result<Fq> {
        make_field(self.q, self.field_modulus.as_deref())
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Reflection,
    Gauss,
    Translation,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Gamma(a/f) as a series in 1/theta.
    Gamma {
        #[command(flatten)]
        field: FieldArgs,
        /// Argument "a/f".
        #[arg(long)]
        arg: String,
        #[arg(long, default_value_t = 32)]
        prec: i64,
    },
    /// The Carlitz period as a series in 1/eta.
    Pi {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = 32)]
        prec: i64,
    },
    /// Decide whether an exponent vector is a bracket relation.
    Bracket {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        f: String,
        /// Vector "rep:exp,rep:exp,...".
        #[arg(long)]
        vec: String,
    },
    /// Monic set, stabilizer and Gamma-value classes for modulus f.
    Classify {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        f: String,
    },
    /// Search for b with Gamma(1/f) ≈ Gamma(b/g).
    Isogeny {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
    },
    /// Decide Gamma(a/f) ≈ Gamma(b/g).
    Equiv {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        a: String,
        #[arg(long)]
        f: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        g: String,
    },
    /// Recognize prod Gamma(a/f)^m_a / pi^Sigma_+ as a rational function of eta.
    Certify {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        f: String,
        #[arg(long)]
        vec: String,
        /// Coefficients of the ratio used for recognition (doubled for the stability check).
        #[arg(long, default_value_t = 80)]
        prec: usize,
        #[arg(long, default_value_t = DEFAULT_DMAX)]
        dmax: usize,
    },
    /// Build a functional-equation vector and check it.
    Verify {
        #[arg(long, value_enum)]
        rel: Relation,
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        f: String,
        #[arg(long, default_value = "1")]
        a: String,
        /// Multiplier modulus (gauss).
        #[arg(long)]
        g: Option<String>,
        /// Shift (translation).
        #[arg(long)]
        b: Option<String>,
        /// Also certify numerically with this many coefficients.
        #[arg(long)]
        prec: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_DMAX)]
        dmax: usize,
    },
    /// Run every task of a JSON manifest.
    Batch {
        #[arg(long)]
        manifest: PathBuf,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Gamma { .. } => "gamma",
            Command::Pi { .. } => "pi",
            Command::Bracket { .. } => "bracket",
            Command::Classify { .. } => "classify",
            Command::Isogeny { .. } => "isogeny",
            Command::Equiv { .. } => "equiv",
            Command::Certify { .. } => "certify",
            Command::Verify { .. } => "verify",
            Command::Batch { .. } => "batch",
        }
    }
}

/// A failure with its exit code.
#[derive(Debug, Clone)]
pub struct Failure {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
}

impl Failure {
    fn json(&self) -> Value {
        json!({ "error": { "kind": self.kind, "message": self.message } })
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let (code, kind) = match &e {
            Error::Domain(_) => (EXIT_DOMAIN, "domain"),
            Error::Parse(_) => (EXIT_DOMAIN, "parse"),
            Error::ZeroToPrecision { .. } | Error::InsufficientPrecision { .. } => (EXIT_DOMAIN, "precision"),
            Error::ResourceGuard(_) => (EXIT_GUARD, "resource_guard"),
            Error::NonConvergence(_) => (EXIT_GUARD, "non_convergence"),
        };
        Failure { code, kind, message: e.to_string() }
    }
}

type Outcome = Result<(Value, i32), Failure>;

fn poly(field: &Fq, s: &str) -> Result<Poly, Failure> {
    Ok(parse_poly(field, s)?)
}

fn field_material(field: &Fq) -> Value {
    json!({ "q": field.q(), "field_modulus": field.format_modulus() })
}

/// Canonical key material: parameters after parsing and normalization, so
/// spelling differences ("1 / t" vs "1/t") share an entry.
fn key_material(cmd: &Command) -> Result<Value, Failure> {
    let m = match cmd {
        Command::Gamma { field, arg, prec } => {
            let fq = field.field()?;
            let z = RationalArg::parse(&fq, arg)?;
            json!({ "command": "gamma", "field": field_material(&fq), "arg": z.to_string(), "prec": prec })
        }
        Command::Pi { field, prec } => {
            let fq = field.field()?;
            json!({ "command": "pi", "field": field_material(&fq), "prec": prec })
        }
        Command::Bracket { field, f, vec } => {
            let fq = field.field()?;
            let f = poly(&fq, f)?;
            let v = ExponentVector::parse(&f, vec)?;
            json!({ "command": "bracket", "field": field_material(&fq), "f": f.to_string(), "vec": v.to_string() })
        }
        Command::Classify { field, f } => {
            let fq = field.field()?;
            json!({ "command": "classify", "field": field_material(&fq), "f": poly(&fq, f)?.to_string() })
        }
        Command::Isogeny { field, f, g } => {
            let fq = field.field()?;
            json!({ "command": "isogeny", "field": field_material(&fq),
                    "f": poly(&fq, f)?.to_string(), "g": poly(&fq, g)?.to_string() })
        }
        Command::Equiv { field, a, f, b, g } => {
            let fq = field.field()?;
            json!({ "command": "equiv", "field": field_material(&fq),
                    "a": poly(&fq, a)?.to_string(), "f": poly(&fq, f)?.to_string(),
                    "b": poly(&fq, b)?.to_string(), "g": poly(&fq, g)?.to_string() })
        }
        Command::Certify { field, f, vec, prec, dmax } => {
            let fq = field.field()?;
            let f = poly(&fq, f)?;
            let v = ExponentVector::parse(&f, vec)?;
            json!({ "command": "certify", "field": field_material(&fq), "f": f.to_string(),
                    "vec": v.to_string(), "prec": prec, "dmax": dmax })
        }
        Command::Verify { rel, field, f, a, g, b, prec, dmax } => {
            let fq = field.field()?;
            let opt = |s: &Option<String>| -> Result<Value, Failure> {
                Ok(match s {
                    Some(s) => Value::String(poly(&fq, s)?.to_string()),
                    None => Value::Null,
                })
            };
            json!({ "command": "verify", "rel": format!("{rel:?}").to_lowercase(), "field": field_material(&fq),
                    "f": poly(&fq, f)?.to_string(), "a": poly(&fq, a)?.to_string(),
                    "g": opt(g)?, "b": opt(b)?, "prec": prec, "dmax": dmax })
        }
        Command::Batch { .. } => unreachable!("batch is not cached as a whole"),
    };
    Ok(m)
}

fn compute(cmd: &Command) -> Outcome {
    match cmd {
        Command::Gamma { field, arg, prec } => {
            let fq = field.field()?;
            let z = RationalArg::parse(&fq, arg)?;
            Ok((gamma(&z, *prec)?.to_json(), EXIT_OK))
        }
        Command::Pi { field, prec } => {
            let fq = field.field()?;
            Ok((serde_json::to_value(carlitz_period(&fq, *prec).to_json()).expect("json"), EXIT_OK))
        }
        Command::Bracket { field, f, vec } => {
            let fq = field.field()?;
            let f = poly(&fq, f)?;
            Ok((is_bracket_relation(&ExponentVector::parse(&f, vec)?)?.to_json(), EXIT_OK))
        }
        Command::Classify { field, f } => {
            let fq = field.field()?;
            Ok((classify(&poly(&fq, f)?)?.to_json(), EXIT_OK))
        }
        Command::Isogeny { field, f, g } => {
            let fq = field.field()?;
            let found = isogenous(&poly(&fq, f)?, &poly(&fq, g)?)?;
            let witness = found.map(|(a, b)| json!({ "a": a.to_string(), "b": b.to_string() }));
            Ok((json!({ "isogenous": witness.is_some(), "witness": witness }), EXIT_OK))
        }
        Command::Equiv { field, a, f, b, g } => {
            let fq = field.field()?;
            let eq = approx_equiv(&poly(&fq, a)?, &poly(&fq, f)?, &poly(&fq, b)?, &poly(&fq, g)?)?;
            Ok((json!({ "equivalent": eq }), EXIT_OK))
        }
        Command::Certify { field, f, vec, prec, dmax } => {
            let fq = field.field()?;
            let f = poly(&fq, f)?;
            let report = certify_relation(&ExponentVector::parse(&f, vec)?, *prec, *dmax)?;
            let code = if report.stable { EXIT_OK } else { EXIT_INCONCLUSIVE };
            Ok((report.to_json(), code))
        }
        Command::Verify { rel, field, f, a, g, b, prec, dmax } => {
            let fq = field.field()?;
            let f = poly(&fq, f)?;
            let a = poly(&fq, a)?;
            let q = fq.q() as i64;
            let (vector, expected) = match rel {
                Relation::Reflection => (reflection_vector(&a, &f)?, 1),
                Relation::Translation => {
                    let b = poly(&fq, b.as_deref().unwrap_or("1"))?;
                    (translation_vector(&a, &b, &f)?, 0)
                }
                Relation::Gauss => {
                    let g = g.as_deref().ok_or_else(|| Failure {
                        code: EXIT_DOMAIN,
                        kind: "domain",
                        message: "verify --rel gauss needs --g".into(),
                    })?;
                    let g = poly(&fq, g)?;
                    let d = g.deg() as u32;
                    (gauss_vector(&a, &f, &g)?, (q.pow(d) - 1) / (q - 1))
                }
            };
            let report = is_bracket_relation(&vector)?;
            let mut ok = report.is_relation && report.sigma_plus == Some(expected) && sigma_plus(&vector) == expected;
            let mut out = Map::new();
            out.insert("rel".into(), json!(format!("{rel:?}").to_lowercase()));
            out.insert("modulus".into(), json!(vector.modulus().to_string()));
            out.insert("vector".into(), json!(vector.to_string()));
            out.insert("is_relation".into(), json!(report.is_relation));
            out.insert("sigma_plus".into(), json!(report.sigma_plus));
            out.insert("expected_sigma_plus".into(), json!(expected));
            if let Some(prec) = prec {
                let cert = certify_relation(&vector, *prec, *dmax)?;
                ok &= cert.stable;
                out.insert("certificate".into(), cert.to_json());
            }
            out.insert("ok".into(), json!(ok));
            Ok((Value::Object(out), if ok { EXIT_OK } else { EXIT_INCONCLUSIVE }))
        }
        Command::Batch { .. } => unreachable!("handled by run_batch"),
    }
}

/// How a single command was served, for `--explain`.
#[derive(Debug, Clone)]
pub struct Explain {
    pub cache: &'static str,
    pub key: Option<String>,
    pub elapsed_us: u128,
}

/// Runs one non-batch command through the cache.
pub fn execute(cmd: &Command, opts: &GlobalOpts) -> (Outcome, Explain) {
    let start = Instant::now();
    let material = match key_material(cmd) {
        Ok(m) => m,
        Err(e) => return (Err(e), Explain { cache: "none", key: None, elapsed_us: start.elapsed().as_micros() }),
    };
    let key = key_for(&material);
    let cache = (!opts.no_cache).then(|| Cache::new(opts.cache_dir.clone().unwrap_or_else(Cache::default_dir)));
    if let Some(c) = &cache {
        if let Some((value, code)) = c.get(&key) {
            let ex = Explain { cache: "hit", key: Some(key), elapsed_us: start.elapsed().as_micros() };
            return (Ok((value, code)), ex);
        }
    }
    let outcome = compute(cmd);
    let status = match (&cache, &outcome) {
        (None, _) => "disabled",
        (Some(c), Ok((value, code))) => match c.put(&key, value, *code) {
            Ok(()) => "miss",
            Err(_) => "write_failed",
        },
        (Some(_), Err(_)) => "miss",
    };
    (outcome, Explain { cache: status, key: Some(key), elapsed_us: start.elapsed().as_micros() })
}

/// Manifest file for `batch`.
#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(default)]
    pub global: ManifestGlobal,
    pub tasks: Vec<Task>,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
pub struct ManifestGlobal {
    pub q: Option<u32>,
    pub field_modulus: Option<String>,
    pub prec: Option<i64>,
    pub cache_dir: Option<PathBuf>,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct Task {
    pub command: String,
    #[serde(default)]
    pub params: Map<String, Value>,
}

const PREC_COMMANDS: [&str; 4] = ["gamma", "pi", "certify", "verify"];

/// Turns a manifest task into a parsed command, applying the global defaults.
pub fn task_command(task: &Task, global: &ManifestGlobal) -> Result<Command, String> {
    if task.command == "batch" {
        return Err("nested batch tasks are not allowed".into());
    }
    let mut argv: Vec<String> = vec!["tgamma".into(), task.command.clone()];
    let mut params = task.params.clone();
    if let Some(q) = global.q {
        params.entry("q").or_insert(json!(q));
    }
    if let Some(m) = &global.field_modulus {
        params.entry("field_modulus").or_insert(json!(m));
    }
    if let (Some(p), true) = (global.prec, PREC_COMMANDS.contains(&task.command.as_str())) {
        params.entry("prec").or_insert(json!(p));
    }
    for (k, v) in &params {
        let flag = format!("--{}", k.replace('_', "-"));
        match v {
            Value::Bool(true) => argv.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::String(s) => argv.extend([flag, s.clone()]),
            Value::Number(n) => argv.extend([flag, n.to_string()]),
            other => return Err(format!("parameter {k} has unsupported value {other}")),
        }
    }
    let cli = Cli::try_parse_from(&argv).map_err(|e| e.to_string().lines().next().unwrap_or_default().to_string())?;
    Ok(cli.command)
}

/// Validates every task, then runs them in parallel; records come back in
/// input order.
pub fn run_batch(manifest: &Manifest, opts: &GlobalOpts) -> Outcome {
    let commands = manifest
        .tasks
        .iter()
        .enumerate()
        .map(|(i, t)| {
            task_command(t, &manifest.global).map_err(|m| Failure {
                code: EXIT_DOMAIN,
                kind: "manifest",
                message: format!("task {i} ({}): {m}", t.command),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut opts = opts.clone();
    if opts.cache_dir.is_none() {
        opts.cache_dir = manifest.global.cache_dir.clone();
    }
    let results: Vec<(Value, i32)> = commands
        .par_iter()
        .map(|cmd| match execute(cmd, &opts).0 {
            Ok(r) => r,
            Err(f) => (f.json(), f.code),
        })
        .collect();
    let worst = results.iter().map(|(_, c)| *c).max().unwrap_or(EXIT_OK);
    let records: Vec<Value> = results
        .into_iter()
        .zip(&commands)
        .enumerate()
        .map(|(i, ((value, code), cmd))| json!({ "index": i, "command": cmd.name(), "exit_code": code, "result": value }))
        .collect();
    Ok((json!({ "results": records }), worst))
}

/// Everything the binary prints.
#[derive(Debug, Clone)]
pub struct Response {
    pub stdout: String,
    pub stderr: Vec<String>,
    pub code: i32,
}

fn failure_response(f: Failure, mut stderr: Vec<String>) -> Response {
    stderr.insert(0, format!("error: {}", f.message));
    Response { stdout: f.json().to_string(), stderr, code: f.code }
}

/// Parses the command line and runs it.
pub fn run_from<I, T>(args: I) -> Response
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            return Response { stdout: e.to_string(), stderr: vec![], code: EXIT_OK };
        }
        Err(e) => {
            let text = e.to_string();
            let message = text.trim().trim_start_matches("error: ").to_string();
            let f = Failure { code: EXIT_DOMAIN, kind: "usage", message };
            return failure_response(f, vec![]);
        }
    };
    run(&cli)
}

pub fn run(cli: &Cli) -> Response {
    let start = Instant::now();
    let (outcome, explain) = match &cli.command {
        Command::Batch { manifest } => {
            let loaded = std::fs::read_to_string(manifest)
                .map_err(|e| format!("cannot read {}: {e}", manifest.display()))
                .and_then(|text| serde_json::from_str::<Manifest>(&text).map_err(|e| format!("bad manifest: {e}")));
            let outcome = match loaded {
                Ok(m) => run_batch(&m, &cli.opts),
                Err(message) => Err(Failure { code: EXIT_DOMAIN, kind: "manifest", message }),
            };
            (outcome, Explain { cache: "per_task", key: None, elapsed_us: start.elapsed().as_micros() })
        }
        cmd => execute(cmd, &cli.opts),
    };
    let mut stderr = Vec::new();
    if explain.cache == "write_failed" {
        stderr.push("warning: could not write the result cache; result computed uncached".into());
    }
    if cli.opts.explain {
        stderr.push(
            json!({ "explain": { "command": cli.command.name(), "cache": explain.cache, "key": explain.key,
                                 "elapsed_us": explain.elapsed_us as u64 } })
            .to_string(),
        );
    }
    match outcome {
        Ok((value, code)) => {
            if code == EXIT_INCONCLUSIVE {
                stderr.push("inconclusive: no stable certificate".into());
            }
            Response { stdout: value.to_string(), stderr, code }
        }
        Err(f) => failure_response(f, stderr),
    }
}
