//! Command-line front end: argument and config parsing, report and curve
//! serialization, OBJ export and the verification suites.
//!
//! Field specs use the grammar of [`FieldSpec`]'s `FromStr`:
//!
//! ```text
//! spec := "hopf+" | "hopf-" | "seifert:" INT "," INT | "xn:" INT | "ms:" INT
//!       | "R(" spec ")" | "perturb(" spec [";seed=" INT] [";amp=" FLOAT] ")"
//! ```

pub mod verify;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extract::{collinearity_links, ExtractionParams, LinkSet, OrientedLoop, SignClass};
use crate::fields::FieldSpec;
use crate::invar::{check_diffeo_invariance, distance_with, homotopy_number, DiffeoReport, InvariantReport, Retry};
use crate::quat::{Chart, S3Point};

/// Version of every JSON document written by the CLI.
pub const SCHEMA: u32 = 1;

/// Environment variable capping worker threads.
pub const THREADS_ENV: &str = "COMBING_THREADS";

#[derive(Debug, Parser)]
#[command(name = "combing", version, about = "Homotopy classes of non-singular vector fields on S³")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Grid vertices per axis and chart.
    #[arg(long, global = true)]
    pub resolution: Option<usize>,
    /// Newton residual tolerance.
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    /// Perturb the second field with this amplitude before extraction.
    #[arg(long, global = true)]
    pub perturb: Option<f64>,
    /// Seed of the perturbation.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output path of the JSON report or curve file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output path of the OBJ polylines (extract only).
    #[arg(long, global = true)]
    pub obj: Option<PathBuf>,
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Homotopy distance D(X, Y).
    Distance(PairArgs),
    /// Homotopy number I(X) and its invariance under R.
    Invariant(SingleArgs),
    /// Collinearity links of X and Y as curves.
    Extract(PairArgs),
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct PairArgs {
    #[arg(long)]
    pub x: Option<String>,
    #[arg(long)]
    pub y: Option<String>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SingleArgs {
    #[arg(long)]
    pub x: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// Every acceptance criterion.
    Paper,
    /// Linking-number oracles (Gauss against crossings).
    Oracles,
    /// Fast subset.
    Quick,
}

/// Everything a run needs, merged from a config file and flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: String,
    pub x: Option<String>,
    pub y: Option<String>,
    pub params: ExtractionParams,
    pub perturb: Option<f64>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub obj: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: String::new(),
            x: None,
            y: None,
            params: ExtractionParams::default(),
            perturb: None,
            seed: 1,
            out: None,
            obj: None,
        }
    }
}

impl RunConfig {
    /// Reads a config file; unknown keys are rejected.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Config file values overridden by flags.
    pub fn resolve(cli: &Cli) -> Result<Self> {
        let mut cfg = match &cli.common.config {
            Some(p) => Self::from_file(p)?,
            None => Self::default(),
        };
        let c = &cli.common;
        let (name, x, y) = match &cli.command {
            Command::Distance(a) => ("distance", a.x.clone(), a.y.clone()),
            Command::Extract(a) => ("extract", a.x.clone(), a.y.clone()),
            Command::Invariant(a) => ("invariant", a.x.clone(), None),
            Command::Verify { .. } => ("verify", None, None),
        };
        cfg.command = name.to_string();
        cfg.x = x.or(cfg.x);
        cfg.y = y.or(cfg.y);
        if let Some(r) = c.resolution {
            cfg.params.resolution = r;
        }
        if let Some(e) = c.eps {
            cfg.params.eps = e;
        }
        cfg.perturb = c.perturb.or(cfg.perturb);
        if let Some(s) = c.seed {
            cfg.seed = s;
        }
        cfg.out = c.out.clone().or(cfg.out);
        cfg.obj = c.obj.clone().or(cfg.obj);
        cfg.params.validate()?;
        if cfg.perturb.is_some_and(|a| !(a.is_finite() && a > 0.0)) {
            return Err(Error::Config("--perturb must be a positive amplitude".into()));
        }
        Ok(cfg)
    }

    fn field(&self, which: &str, s: &Option<String>) -> Result<FieldSpec> {
        s.as_deref().ok_or_else(|| Error::Config(format!("missing --{which}")))?.parse()
    }

    pub fn x_spec(&self) -> Result<FieldSpec> {
        self.field("x", &self.x)
    }

    /// The second field, wrapped in the requested perturbation.
    pub fn y_spec(&self) -> Result<FieldSpec> {
        let y = self.field("y", &self.y)?;
        Ok(match self.perturb {
            Some(amp) => y.perturbed(self.seed, amp),
            None => y,
        })
    }
}

/// Outcome of a command: text for stdout and an optional JSON document.
#[derive(Debug, Clone)]
pub struct Output {
    pub summary: String,
    pub json: Option<serde_json::Value>,
    pub success: bool,
}

fn with_schema<T: Serialize>(v: &T) -> serde_json::Value {
    let mut obj = serde_json::Map::new();
    obj.insert("schema".into(), SCHEMA.into());
    match serde_json::to_value(v).expect("report serializes") {
        serde_json::Value::Object(m) => obj.extend(m),
        other => {
            obj.insert("data".into(), other);
        }
    }
    serde_json::Value::Object(obj)
}

/// `D(x, y)` without the automatic perturbed retry; degenerate pairs fail.
pub fn cmd_distance(cfg: &RunConfig) -> Result<Output> {
    let (x, y) = (cfg.x_spec()?, cfg.y_spec()?);
    let r = distance_with(&x, &y, &cfg.params, Retry::Never)?;
    let d = r.d.unwrap_or(0);
    let verdict = r.verdict.map(|v| v.yes_no()).unwrap_or("no");
    Ok(Output {
        summary: format!("D({x},{y}) = {d} — homotopic: {verdict}"),
        json: Some(with_schema(&r)),
        success: true,
    })
}

#[derive(Debug, Clone, Serialize)]
struct InvariantDocument {
    invariant: InvariantReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    diffeo: Option<DiffeoReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    diffeo_error: Option<String>,
}

/// `I(x)` plus the `R_*` invariance check.
pub fn cmd_invariant(cfg: &RunConfig) -> Result<Output> {
    let x = cfg.x_spec()?;
    let inv = homotopy_number(&x, &cfg.params)?;
    let i = inv.i.unwrap_or(0);
    let (diffeo, diffeo_error) = match check_diffeo_invariance(&x, &cfg.params) {
        Ok(d) => (Some(d), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let mut summary = format!("I({x}) = {i}");
    if let Some(d) = &diffeo {
        summary.push_str(&format!("\nI(R_*{x}) = {}, D(X, R_*X) = {} (2I+1 = {})", d.i_r, d.d_x_rx, 2 * i + 1));
    }
    Ok(Output {
        summary,
        json: Some(with_schema(&InvariantDocument { invariant: inv, diffeo, diffeo_error })),
        success: true,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveLoop {
    pub sign_class: SignClass,
    pub points: Vec<[f64; 4]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrientationConventions {
    pub frame: String,
    pub rule: String,
    pub sphere: String,
}

impl Default for OrientationConventions {
    fn default() -> Self {
        Self {
            frame: "right-invariant (i·q, j·q, k·q)".into(),
            rule: "traverse along sign(X·Y)·(grad h1 × grad h2), h = coordinates of Y in a positive basis of T_X S²"
                .into(),
            sphere: "S² oriented by the outward normal; at the antipode the positive basis is (e2, e1)".into(),
        }
    }
}

/// The curve file written by `extract`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveFile {
    pub schema: u32,
    pub x: String,
    pub y: String,
    pub orientation_conventions: OrientationConventions,
    pub loops: Vec<CurveLoop>,
}

impl CurveFile {
    pub fn new(x: &FieldSpec, y: &FieldSpec, sets: &[&LinkSet]) -> Self {
        let loops = sets
            .iter()
            .flat_map(|s| {
                s.loops.iter().map(|l| CurveLoop {
                    sign_class: s.sign_class,
                    points: l.points.iter().map(|p| p.coords()).collect(),
                })
            })
            .collect();
        Self { schema: SCHEMA, x: x.to_string(), y: y.to_string(), orientation_conventions: Default::default(), loops }
    }

    pub fn count(&self, class: SignClass) -> usize {
        self.loops.iter().filter(|l| l.sign_class == class).count()
    }

    /// Stereographic chart centred opposite the coordinate axis point
    /// farthest from every curve.
    pub fn projection_chart(&self) -> Chart {
        let mut best = (f64::NEG_INFINITY, S3Point::ONE);
        for k in 0..8 {
            let mut c = [0.0; 4];
            c[k / 2] = if k % 2 == 0 { 1.0 } else { -1.0 };
            let pole = S3Point::normalize(c);
            let d = self
                .loops
                .iter()
                .flat_map(|l| l.points.iter())
                .map(|p| pole.chord(&S3Point::normalize(*p)))
                .fold(f64::INFINITY, f64::min);
            if d > best.0 {
                best = (d, pole);
            }
        }
        Chart::new(best.1.antipode(), f64::INFINITY)
    }

    /// Stereographic polylines as OBJ vertices and closed line elements.
    pub fn to_obj(&self) -> Result<String> {
        let chart = self.projection_chart();
        let mut s = String::new();
        s.push_str(&format!("# {} vs {}\n", self.x, self.y));
        s.push_str(&format!("# projected from {:?}\n", chart.pole.antipode().coords()));
        let mut next = 1usize;
        for (k, l) in self.loops.iter().enumerate() {
            s.push_str(&format!(
                "o loop{k}_{}\n",
                match l.sign_class {
                    SignClass::Positive => "positive",
                    SignClass::Negative => "negative",
                }
            ));
            for p in &l.points {
                let v = chart.project(&S3Point::normalize(*p))?;
                s.push_str(&format!("v {} {} {}\n", v[0], v[1], v[2]));
            }
            let idx: Vec<String> = (next..next + l.points.len()).chain([next]).map(|i| i.to_string()).collect();
            s.push_str(&format!("l {}\n", idx.join(" ")));
            next += l.points.len();
        }
        Ok(s)
    }
}

/// Polylines of an OBJ file: vertex lists of each `l` element, with the
/// repeated closing index of a closed polyline dropped.
pub fn read_obj_polylines(text: &str) -> Result<Vec<Vec<[f64; 3]>>> {
    let mut verts = Vec::new();
    let mut lines = Vec::new();
    for raw in text.lines() {
        let mut it = raw.split_whitespace();
        match it.next() {
            Some("v") => {
                let c: Vec<f64> = it
                    .map(|t| t.parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| Error::Config(format!("obj vertex: {e}")))?;
                if c.len() < 3 {
                    return Err(Error::Config("obj vertex needs 3 coordinates".into()));
                }
                verts.push([c[0], c[1], c[2]]);
            }
            Some("l") => {
                let mut idx: Vec<usize> = it
                    .map(|t| t.parse::<usize>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| Error::Config(format!("obj line: {e}")))?;
                if idx.len() > 1 && idx.first() == idx.last() {
                    idx.pop();
                }
                let pts = idx
                    .iter()
                    .map(|&i| {
                        verts
                            .get(i.wrapping_sub(1))
                            .copied()
                            .ok_or_else(|| Error::Config(format!("obj index {i} out of range")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                lines.push(pts);
            }
            _ => {}
        }
    }
    Ok(lines)
}

fn loops_of(file: &CurveFile) -> Vec<OrientedLoop> {
    file.loops.iter().map(|l| OrientedLoop::new(l.points.iter().map(|p| S3Point::normalize(*p)).collect())).collect()
}

/// C± of `(x, y)` as a curve file and optional OBJ.
pub fn cmd_extract(cfg: &RunConfig) -> Result<Output> {
    let (x, y) = (cfg.x_spec()?, cfg.y_spec()?);
    let (plus, minus) = collinearity_links(&x, &y, &cfg.params)?;
    let file = CurveFile::new(&x, &y, &[&plus, &minus]);
    if let Some(path) = &cfg.obj {
        write_file(path, &file.to_obj()?)?;
    }
    let points: usize = loops_of(&file).iter().map(OrientedLoop::len).sum();
    Ok(Output {
        summary: format!("C+({x},{y}): {} loop(s), C-: {} loop(s), {points} points", plus.len(), minus.len()),
        json: Some(serde_json::to_value(&file).expect("curve file serializes")),
        success: true,
    })
}

/// Runs a suite and tabulates the outcomes.
pub fn cmd_verify(suite: Suite) -> Output {
    let outcomes = verify::run_suite(suite);
    let summary = outcomes.iter().map(|o| o.line()).collect::<Vec<_>>().join("\n");
    let success = outcomes.iter().all(|o| o.passed);
    Output { summary, json: Some(with_schema(&serde_json::json!({ "suite": suite, "criteria": outcomes }))), success }
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// Caps rayon's global pool from [`THREADS_ENV`].
pub fn init_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0) {
        // a second initialization (tests, embedding) keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

pub fn dispatch(cli: &Cli) -> Result<(Output, RunConfig)> {
    let cfg = RunConfig::resolve(cli)?;
    let out = match &cli.command {
        Command::Distance(_) => cmd_distance(&cfg)?,
        Command::Invariant(_) => cmd_invariant(&cfg)?,
        Command::Extract(_) => cmd_extract(&cfg)?,
        Command::Verify { suite } => cmd_verify(*suite),
    };
    Ok((out, cfg))
}

/// Entry point; returns the process exit code (0 ok, 1 usage, 2 numerical).
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if e.use_stderr() { write!(stderr, "{e}") } else { write!(stdout, "{e}") };
            return code;
        }
    };
    init_threads();
    match dispatch(&cli) {
        Ok((out, cfg)) => {
            let _ = writeln!(stdout, "{}", out.summary);
            if let (Some(json), Some(path)) = (&out.json, &cfg.out) {
                let text = serde_json::to_string_pretty(json).expect("json serializes");
                if let Err(e) = write_file(path, &text) {
                    let _ = writeln!(stderr, "error: {e}");
                    return 1;
                }
            }
            if out.success {
                0
            } else {
                2
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_usage() {
                1
            } else {
                2
            }
        }
    }
}
