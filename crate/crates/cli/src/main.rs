//! Command-line front end for sl(3) web homology. Results go to stdout (or
//! `--out`) as JSON; a short human summary goes to stderr.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use sl3web::cube::build_cube_with;
use sl3web::homology::{homology, kuperberg_bracket, normalize_relative, Coefficients, Homology};
use sl3web::invariance::check_move;
use sl3web::pointed::{koszul_rank_bound_check, meridian_basis, pointed_complex_with, pointed_homology, theta_detection};
use sl3web::action::abstract_web;
use sl3web::state::BasisCache;
use sl3web::web::{candidate_moves, Move, MoveKind, WebDiagram};

#[derive(Parser, Debug)]
#[command(name = "sl3web", version, about = "sl(3) Khovanov homology of oriented spatial webs")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Coefficient ring.
    #[arg(long, global = true, value_enum, default_value_t = Coeffs::Z)]
    coefficients: Coeffs,

    /// Shift homology so the lowest h is 0 and the lowest q lies in 0..4.
    #[arg(long, global = true)]
    normalize: bool,

    /// Mark points as arc ids, e.g. `e1,e2` or `1,2`. Overrides the diagram's own.
    #[arg(long, global = true, value_delimiter = ',')]
    marks: Option<Vec<String>>,

    /// Write JSON here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Directory for cached results, keyed by a hash of input and options.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone)]
enum Command {
    /// Bigraded homology of a diagram.
    Homology { input: PathBuf },
    /// Pointed homology and the Koszul rank bound.
    Pointed { input: PathBuf },
    /// Graded Euler characteristic against the Kuperberg bracket.
    Euler { input: PathBuf },
    /// Theta detection verdicts over F2.
    CheckTheta { input: PathBuf },
    /// Compare homology across Reidemeister moves.
    Invariance {
        input: PathBuf,
        /// `RI`..`RV` for every site of that kind, `RV:3` for one site, or a
        /// JSON move. Without this flag every candidate move is checked.
        #[arg(long = "move")]
        moves: Vec<String>,
    },
    /// Run one task over many diagram files or directories of them.
    Batch {
        inputs: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Task::Homology)]
        task: Task,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Coeffs {
    Z,
    F2,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Task {
    Homology,
    Pointed,
    Euler,
    CheckTheta,
}

/// Failure of an identity the computation guarantees.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct Inconsistent(String);

struct Ctx {
    coeffs: Coefficients,
    normalize: bool,
    marks: Option<Vec<usize>>,
    cache_dir: Option<PathBuf>,
    bases: BasisCache,
}

fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if cause.downcast_ref::<Inconsistent>().is_some() {
            return 3;
        }
        if let Some(err) = cause.downcast_ref::<sl3web::Error>() {
            return if err.is_consistency() { 3 } else { 2 };
        }
    }
    2
}

fn parse_marks(raw: &[String]) -> Result<Vec<usize>> {
    raw.iter()
        .map(|s| {
            let t = s.trim();
            t.strip_prefix('e').unwrap_or(t).parse::<usize>().with_context(|| format!("bad mark point {s:?}"))
        })
        .collect()
}

fn read_diagram(path: &Path) -> Result<WebDiagram> {
    let s = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let d = WebDiagram::from_json(&s).map_err(sl3web::Error::from).with_context(|| format!("parsing {}", path.display()))?;
    d.validate().map_err(sl3web::Error::from).with_context(|| format!("validating {}", path.display()))?;
    Ok(d)
}

fn homology_json(h: &Homology, normalize: bool) -> Value {
    if normalize {
        normalize_relative(h).to_json()
    } else {
        h.to_json()
    }
}

impl Ctx {
    fn marks_for(&self, d: &WebDiagram) -> Vec<usize> {
        self.marks.clone().unwrap_or_else(|| d.markpoints.clone())
    }

    fn homology(&self, d: &WebDiagram) -> Result<Value> {
        let cube = build_cube_with(d, &self.bases)?;
        cube.complex.check_over(self.coeffs)?;
        let h = homology(&cube.complex, self.coeffs)?;
        eprintln!("homology: total rank {}, torsion {}", h.total_rank(), h.has_torsion());
        Ok(homology_json(&h, self.normalize))
    }

    fn pointed(&self, d: &WebDiagram) -> Result<Value> {
        let marks = self.marks_for(d);
        if marks.is_empty() {
            bail!(sl3web::Error::Invalid("no mark points: pass --marks or add markpoints to the diagram".into()));
        }
        let pc = pointed_complex_with(d, &marks, self.coeffs, &self.bases)?;
        if !meridian_basis(&abstract_web(d)?, &marks) {
            eprintln!("warning: the meridians of the marked edges do not form a basis of H1 of the complement; the homology is still computed");
        }
        let h = pointed_homology(&pc)?;
        let k = koszul_rank_bound_check(&pc)?;
        if !k.bound_holds {
            return Err(Inconsistent(format!("Koszul bound fails: {} < {}", k.koszul_rank, k.pointed_rank)).into());
        }
        eprintln!("pointed: rank {}, Koszul rank {}", k.pointed_rank, k.koszul_rank);
        Ok(json!({
            "marks": marks,
            "homology": homology_json(&h, self.normalize),
            "koszul_rank": k.koszul_rank,
            "pointed_rank": k.pointed_rank,
            "bound_holds": k.bound_holds,
        }))
    }

    fn euler(&self, d: &WebDiagram) -> Result<Value> {
        let cube = build_cube_with(d, &self.bases)?;
        let chi = cube.complex.euler_characteristic();
        let bracket = kuperberg_bracket(d);
        if chi != bracket {
            return Err(Inconsistent(format!("Euler characteristic {chi} differs from the bracket {bracket}")).into());
        }
        eprintln!("euler: {chi}");
        Ok(json!({"euler_characteristic": chi, "kuperberg_bracket": bracket, "agree": true}))
    }

    fn check_theta(&self, d: &WebDiagram) -> Result<Value> {
        let marks = self.marks.clone().or_else(|| (d.markpoints.len() == 2).then(|| d.markpoints.clone()));
        let r = theta_detection(d, marks.as_deref(), &self.bases)?;
        eprintln!("(b) H(Γ; F2) ≅ R_Θ as modules: {}", r.module_isomorphic);
        eprintln!("(c) rank H(Γ, δ; F2) = 4: {} (rank {})", r.rank_is_four, r.pointed_rank);
        eprintln!("planar theta signature detected: {}", r.planar_theta_signature);
        Ok(serde_json::to_value(r)?)
    }

    fn invariance(&self, d: &WebDiagram, specs: &[String]) -> Result<Value> {
        let moves = select_moves(d, specs)?;
        if moves.is_empty() {
            bail!(sl3web::Error::Invalid("no applicable moves".into()));
        }
        let reports = moves
            .par_iter()
            .map(|m| check_move(d, m, self.coeffs, &self.bases))
            .collect::<sl3web::Result<Vec<_>>>()?;
        let failed: Vec<_> = reports.iter().filter(|r| !r.passed()).collect();
        eprintln!("{}: {} moves, {} failed", if failed.is_empty() { "PASS" } else { "FAIL" }, reports.len(), failed.len());
        let out = json!({"verdict": if failed.is_empty() { "PASS" } else { "FAIL" }, "moves": reports});
        if let Some(r) = failed.first() {
            return Err(Inconsistent(format!("invariance fails for {:?}: {}", r.mv, out)).into());
        }
        Ok(out)
    }

    fn run_task(&self, task: Task, d: &WebDiagram) -> Result<Value> {
        match task {
            Task::Homology => self.homology(d),
            Task::Pointed => self.pointed(d),
            Task::Euler => self.euler(d),
            Task::CheckTheta => self.check_theta(d),
        }
    }

    /// Run `f`, going through the on-disk cache when one is configured.
    fn cached(&self, key: Value, f: impl FnOnce() -> Result<Value>) -> Result<Value> {
        let Some(dir) = &self.cache_dir else { return f() };
        let digest = Sha256::digest(serde_json::to_vec(&json!([env!("CARGO_PKG_VERSION"), key]))?);
        let path = dir.join(format!("{}.json", hex::encode(digest)));
        if let Ok(s) = std::fs::read_to_string(&path) {
            if let Ok(v) = serde_json::from_str(&s) {
                log::info!("cache hit {}", path.display());
                return Ok(v);
            }
        }
        let v = f()?;
        std::fs::write(&path, serde_json::to_string(&v)?).with_context(|| format!("writing {}", path.display()))?;
        Ok(v)
    }

    fn key(&self, command: &str, d: &WebDiagram, extra: Value) -> Value {
        json!({
            "command": command,
            "diagram": d.to_json_value(),
            "coefficients": self.coeffs,
            "normalize": self.normalize,
            "marks": self.marks,
            "extra": extra,
        })
    }
}

fn parse_kind(s: &str) -> Option<MoveKind> {
    let s = s.to_ascii_uppercase();
    Some(match s.strip_prefix('R').unwrap_or(&s) {
        "I" => MoveKind::I,
        "II" => MoveKind::II,
        "III" => MoveKind::III,
        "IV" => MoveKind::IV,
        "V" => MoveKind::V,
        _ => return None,
    })
}

fn select_moves(d: &WebDiagram, specs: &[String]) -> Result<Vec<Move>> {
    let candidates = candidate_moves(d);
    if specs.is_empty() {
        return Ok(candidates);
    }
    let mut out = Vec::new();
    for spec in specs {
        if spec.trim_start().starts_with('{') {
            let m: Move = serde_json::from_str(spec).map_err(|e| sl3web::Error::Invalid(format!("bad move {spec:?}: {e}")))?;
            out.push(m);
            continue;
        }
        let (kind, site) = spec.split_once(':').map_or((spec.as_str(), None), |(k, s)| (k, Some(s)));
        let kind = parse_kind(kind).ok_or_else(|| sl3web::Error::Invalid(format!("unknown move kind in {spec:?}")))?;
        let sites: Vec<Move> = candidates.iter().copied().filter(|m| m.kind() == kind).collect();
        match site {
            None => out.extend(sites),
            Some(s) => {
                let i: usize = s.parse().map_err(|_| sl3web::Error::Invalid(format!("bad site in {spec:?}")))?;
                let m = sites.get(i).ok_or_else(|| {
                    sl3web::Error::Invalid(format!("{spec}: the diagram has {} sites for this move", sites.len()))
                })?;
                out.push(*m);
            }
        }
    }
    Ok(out)
}

fn expand_inputs(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut v: Vec<PathBuf> = std::fs::read_dir(p)
                .with_context(|| format!("reading {}", p.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "json"))
                .collect();
            v.sort();
            files.extend(v);
        } else {
            files.push(p.clone());
        }
    }
    if files.is_empty() {
        bail!(sl3web::Error::Invalid("no input files".into()));
    }
    Ok(files)
}

fn run(cli: &Cli) -> Result<(Value, u8)> {
    if let Some(n) = cli.jobs {
        if n == 0 {
            bail!(sl3web::Error::Invalid("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| anyhow!(e))?;
    }
    if let Some(dir) = &cli.cache {
        std::fs::create_dir_all(dir).with_context(|| format!("creating cache directory {}", dir.display()))?;
    }
    let ctx = Ctx {
        coeffs: match cli.coefficients {
            Coeffs::Z => Coefficients::Integers,
            Coeffs::F2 => Coefficients::F2,
        },
        normalize: cli.normalize,
        marks: cli.marks.as_deref().map(parse_marks).transpose().map_err(|e| anyhow!(sl3web::Error::Invalid(e.to_string())))?,
        cache_dir: cli.cache.clone(),
        bases: BasisCache::new(),
    };
    let single = |name: &str, input: &Path, task: Task| -> Result<(Value, u8)> {
        let d = read_diagram(input)?;
        Ok((ctx.cached(ctx.key(name, &d, Value::Null), || ctx.run_task(task, &d))?, 0))
    };
    match &cli.command {
        Command::Homology { input } => single("homology", input, Task::Homology),
        Command::Pointed { input } => single("pointed", input, Task::Pointed),
        Command::Euler { input } => single("euler", input, Task::Euler),
        Command::CheckTheta { input } => single("check-theta", input, Task::CheckTheta),
        Command::Invariance { input, moves } => {
            let d = read_diagram(input)?;
            let v = ctx.cached(ctx.key("invariance", &d, json!(moves)), || ctx.invariance(&d, moves))?;
            Ok((v, 0))
        }
        Command::Batch { inputs, task } => {
            let files = expand_inputs(inputs)?;
            let results: Vec<(Value, u8)> = files
                .par_iter()
                .map(|f| {
                    let name = f.display().to_string();
                    match read_diagram(f).and_then(|d| ctx.cached(ctx.key(&format!("{task:?}"), &d, Value::Null), || ctx.run_task(*task, &d))) {
                        Ok(v) => (json!({"file": name, "result": v}), 0),
                        Err(e) => {
                            let code = exit_code(&e);
                            eprintln!("{name}: {e:#}");
                            (json!({"file": name, "error": format!("{e:#}"), "exit_code": code}), code)
                        }
                    }
                })
                .collect();
            let code = results.iter().map(|r| r.1).max().unwrap_or(0);
            Ok((Value::Array(results.into_iter().map(|r| r.0).collect()), code))
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok((v, code)) => {
            let text = serde_json::to_string_pretty(&v).expect("JSON values serialize") + "\n";
            let written = match &cli.out {
                Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
