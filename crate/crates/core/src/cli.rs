//! The `wg` command line: `run`, `convergence`, `compare` and `example8`.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::mesh::{MeshSpec, PolygonalMesh};
use crate::polybasis::Coefficient;
use crate::schemes::{Scheme, SchemeConfig, Tau, DEFAULT_K};
use crate::verify::{self, ManufacturedProblem};

pub const QUAD_ORDER_ENV: &str = "WG_QUAD_ORDER";

#[derive(Debug, Parser)]
#[command(name = "wg", about = "Weak Galerkin and HDG solvers on polygonal meshes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve on each mesh and report errors.
    Run(RunArgs),
    /// Convergence study over a mesh sequence.
    Convergence(RunArgs),
    /// Solve with two schemes and compare the discrete solutions.
    Compare(CompareArgs),
    /// Single-cell counterexample with a = 1 + x.
    Example8(Example8Args),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// `--tau`: a positive number, `mixed` for `rho^-1 h^-alpha` or `primal`
/// for `rho h^-1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauArg(pub Tau);

impl FromStr for TauArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "mixed" => Ok(Self(Tau::MatchMixed)),
            "primal" => Ok(Self(Tau::MatchPrimal)),
            _ => s
                .parse::<f64>()
                .map(|v| Self(Tau::Constant(v)))
                .map_err(|_| format!("expected a number, 'mixed' or 'primal', got '{s}'")),
        }
    }
}

fn parse_scheme(s: &str) -> std::result::Result<Scheme, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_coeff(s: &str) -> std::result::Result<Coefficient, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Comma-separated mesh descriptors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeshList(pub Vec<MeshSpec>);

fn parse_meshes(s: &str) -> std::result::Result<MeshList, String> {
    let v = MeshSpec::parse_list(s).map_err(|e| e.to_string())?;
    if v.is_empty() {
        return Err(format!("no mesh given; expected one of {}", MeshSpec::FORMS));
    }
    Ok(MeshList(v))
}

fn parse_problem(s: &str) -> std::result::Result<String, String> {
    if ManufacturedProblem::BUILTIN.contains(&s) {
        Ok(s.to_string())
    } else {
        Err(format!("unknown problem '{s}', expected one of {}", ManufacturedProblem::BUILTIN.join(", ")))
    }
}

/// Degrees and stabilization; unset values take the scheme defaults.
#[derive(Debug, Clone, Args)]
pub struct SchemeArgs {
    #[arg(long, default_value_t = DEFAULT_K)]
    pub k: usize,
    #[arg(long)]
    pub s: Option<usize>,
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub tau: Option<TauArg>,
    /// Quadrature order; overrides the WG_QUAD_ORDER environment variable.
    #[arg(long)]
    pub quad_order: Option<usize>,
}

impl SchemeArgs {
    pub fn config(&self, scheme: Scheme, default_tau: Option<Tau>) -> SchemeConfig {
        let mut c = SchemeConfig::new(scheme, self.k);
        if let Some(s) = self.s {
            c.s = s;
        }
        if let Some(r) = self.r {
            c.r = r;
            c.m = r;
        }
        if let Some(m) = self.m {
            c.m = m;
        }
        if let Some(rho) = self.rho {
            c.rho = rho;
        }
        if let Some(alpha) = self.alpha {
            c.alpha = alpha;
        }
        if let Some(t) = self.tau.map(|t| t.0).or(default_tau) {
            c.tau = t;
        }
        c.quad_order = self.quad_order.or_else(quad_order_from_env);
        c
    }
}

fn quad_order_from_env() -> Option<usize> {
    std::env::var(QUAD_ORDER_ENV).ok().and_then(|v| v.trim().parse().ok())
}

#[derive(Debug, Clone, Args)]
pub struct ProblemArgs {
    /// Coefficient: const:<v> or affine:<a0>,<ax>,<ay>.
    #[arg(long, default_value = "const:1", value_parser = parse_coeff)]
    pub coeff: Coefficient,
    /// Comma-separated: grid:N, grid:NxM, poly:N, brick:N, file:<path>.
    #[arg(long, value_parser = parse_meshes)]
    pub meshes: Option<MeshList>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Record wall times; without it the seconds column is zero so that
    /// output is reproducible.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, value_parser = parse_scheme)]
    pub scheme: Scheme,
    /// sinsin, quad or zero.
    #[arg(long, value_parser = parse_problem)]
    pub problem: String,
    #[command(flatten)]
    pub degrees: SchemeArgs,
    #[command(flatten)]
    pub io: ProblemArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[arg(long, value_parser = parse_scheme, default_value = "hdg")]
    pub scheme: Scheme,
    #[arg(long, value_parser = parse_scheme, default_value = "hybrid-mixed-wg")]
    pub against: Scheme,
    #[arg(long, value_parser = parse_problem, default_value = "sinsin")]
    pub problem: String,
    #[command(flatten)]
    pub degrees: SchemeArgs,
    #[command(flatten)]
    pub io: ProblemArgs,
}

#[derive(Debug, Clone, Args)]
pub struct Example8Args {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

const DEFAULT_RUN_MESHES: &str = "grid:4";
const DEFAULT_CONVERGENCE_MESHES: &str = "grid:4,grid:8,grid:16,grid:32";

fn meshes(specs: &Option<MeshList>, default: &str) -> Result<Vec<PolygonalMesh>> {
    let specs = match specs {
        Some(v) => v.0.clone(),
        None => MeshSpec::parse_list(default)?,
    };
    specs.iter().map(MeshSpec::build).collect()
}

fn emit(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn validated(cfg: &SchemeConfig, stderr: &mut dyn Write) -> Result<()> {
    for w in cfg.validate()? {
        writeln!(stderr, "warning: {w}")?;
    }
    Ok(())
}

fn run(args: &RunArgs, convergence: bool, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let cfg = args.degrees.config(args.scheme, None);
    validated(&cfg, stderr)?;
    let problem = ManufacturedProblem::builtin(&args.problem, args.io.coeff.clone())?;
    let default = if convergence { DEFAULT_CONVERGENCE_MESHES } else { DEFAULT_RUN_MESHES };
    let meshes = meshes(&args.io.meshes, default)?;
    let mut report = if convergence {
        verify::run_convergence(&meshes, &cfg, &problem)?
    } else {
        verify::run_levels(&meshes, &cfg, &problem)?
    };
    if !args.io.timing {
        report = report.without_timing();
    }
    let text = match args.io.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            report.write_csv(&mut buf)?;
            String::from_utf8(buf).expect("csv output is utf-8")
        }
        Format::Json => report.to_json() + "\n",
    };
    emit(&args.io.out, &text, stdout)
}

/// Matched stabilization for HDG when compared against another scheme.
fn matched_tau(other: Scheme) -> Option<Tau> {
    match other {
        Scheme::PrimalWg | Scheme::PrimalMixedWg => Some(Tau::MatchPrimal),
        Scheme::MixedWg | Scheme::HybridMixedWg => Some(Tau::MatchMixed),
        Scheme::Hdg | Scheme::HdgV2 => None,
    }
}

fn compare(args: &CompareArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let a = args.degrees.config(args.scheme, matched_tau(args.against));
    let b = args.degrees.config(args.against, matched_tau(args.scheme));
    validated(&a, stderr)?;
    validated(&b, stderr)?;
    let problem = ManufacturedProblem::builtin(&args.problem, args.io.coeff.clone())?;
    let specs = match &args.io.meshes {
        Some(v) => v.0.clone(),
        None => MeshSpec::parse_list(DEFAULT_RUN_MESHES)?,
    };
    let mut reports = Vec::new();
    for (level, spec) in specs.iter().enumerate() {
        let mesh = spec.build()?;
        let r = verify::check_equivalence(&mesh, &problem, &a, &b)
            .map_err(|e| if matches!(e, Error::Incomparable(_)) { e } else { Error::AtLevel { level, source: Box::new(e) } })?;
        reports.push((spec.to_string(), r));
    }
    let text = match args.io.format {
        Some(Format::Json) => {
            let v: Vec<_> = reports
                .iter()
                .map(|(m, r)| serde_json::json!({ "mesh": m, "report": r }))
                .collect();
            serde_json::to_string_pretty(&v).expect("serializable") + "\n"
        }
        Some(Format::Csv) => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let err = |e: csv::Error| Error::Io(std::io::Error::other(e));
            w.write_record(["mesh", "scheme_a", "scheme_b", "verdict", "max_diff", "relative_l2_u", "error_eqn1", "error_eqn4"])
                .map_err(err)?;
            for (m, r) in &reports {
                let opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:.6e}"));
                w.write_record([
                    m.clone(),
                    r.scheme_a.clone(),
                    r.scheme_b.clone(),
                    r.verdict.to_string(),
                    format!("{:.6e}", r.max_diff),
                    format!("{:.6e}", r.relative_l2_u),
                    opt(r.error_eqn1),
                    opt(r.error_eqn4),
                ])
                .map_err(err)?;
            }
            String::from_utf8(w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?)
                .expect("csv output is utf-8")
        }
        None => reports.iter().map(|(m, r)| format!("{m} {r}\n")).collect(),
    };
    emit(&args.io.out, &text, stdout)
}

fn example8(args: &Example8Args, stdout: &mut dyn Write) -> Result<()> {
    let e = verify::paper_example_8();
    match args.format {
        Some(Format::Json) => writeln!(stdout, "{}", serde_json::to_string_pretty(&e).expect("serializable"))?,
        _ => {
            writeln!(stdout, "hdg={:.10}", e.hdg_value)?;
            writeln!(stdout, "wg={:.10}", e.wg_value)?;
            writeln!(stdout, "{}", if e.equal { "EQUAL" } else { "NOT EQUAL" })?;
        }
    }
    Ok(())
}

/// Exit code for an error: 2 for bad input, 1 for numerical failures.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidArgument(_) | Error::Parse { .. } | Error::Incomparable(_) | Error::InvalidMesh(_) => 2,
        Error::AtLevel { source, .. } => exit_code(source),
        _ => 1,
    }
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Run(a) => run(a, false, stdout, stderr),
        Command::Convergence(a) => run(a, true, stdout, stderr),
        Command::Compare(a) => compare(a, stdout, stderr),
        Command::Example8(a) => example8(a, stdout),
    }
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn main_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().ansi().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}
