//! Command-line front end. [`run`] takes the argument list and returns the
//! exit code together with what should go to stdout and stderr, so the
//! binary is a thin wrapper and the commands are testable in-process.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bodies::ConvexPolytope;
use crate::error::{GeomError, Result};
use crate::functionals::{self, Functional, V1Options};
use crate::inequalities::{self, InequalityReport};
use crate::oracle::{self, OracleComparison};
use crate::spherical::{self, PaperConstants};
use crate::sweeps::{self, Family, Grid, SweepOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Settings shared by every command; echoed into every output.
#[derive(Debug, Clone, Args, Serialize)]
pub struct RunConfig {
    /// Root seed for all randomness.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Tolerance on deficits and bound checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tolerance: f64,
    /// First refinement level of the sphere quadrature.
    #[arg(long, global = true, default_value_t = 1)]
    pub quadrature_level: u32,
    /// Monte Carlo sample count.
    #[arg(long, global = true, default_value_t = 100_000)]
    pub mc_samples: usize,
    /// Largest reverse Minkowski deficit accepted for certification.
    #[arg(long, global = true, default_value_t = inequalities::DEFAULT_EPS0)]
    pub eps0: f64,
    #[arg(long = "format", global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub output_format: OutputFormat,
}

impl RunConfig {
    fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) || !(self.eps0 > 0.0) || self.mc_samples == 0 {
            return Err(GeomError::InvalidParameter(
                "tolerance, eps0 and mc-samples must be positive".into(),
            ));
        }
        Ok(())
    }

    fn v1_options(&self) -> V1Options {
        let d = V1Options::default();
        V1Options {
            start_level: self.quadrature_level,
            max_level: d.max_level.max(self.quadrature_level + 2),
            ..d
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "mixedvol", version, about = "Mixed volumes, intrinsic volumes and stability certificates for convex polytopes")]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckName {
    Minkowski,
    BetkeWeil,
    BetkeWeilSelf,
    ReverseMinkowski,
    Linhart,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CertifyName {
    Linhart,
    Reverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepFamily {
    Isosceles,
    PerturbedSegment,
    ThinBox,
    Remark,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Functionals of one body.
    Compute {
        #[arg(long)]
        body: String,
        /// Comma-separated subset of vol,f,v1,vn1,r,diam.
        #[arg(long)]
        functionals: Option<String>,
    },
    /// Mixed volume V(K, M[n-1]).
    Mixed {
        #[arg(long)]
        k: String,
        #[arg(long)]
        m: String,
        /// Compare against the polynomial-fit oracle.
        #[arg(long)]
        oracle: bool,
    },
    /// Evaluate one inequality.
    Check {
        name: CheckName,
        #[arg(long)]
        k: String,
        #[arg(long)]
        m: Option<String>,
    },
    /// Build a stability certificate.
    Certify {
        name: CertifyName,
        #[arg(long)]
        k: String,
        #[arg(long)]
        m: Option<String>,
    },
    /// Sweep a family over a parameter grid.
    Sweep {
        family: SweepFamily,
        /// a:b:n
        #[arg(long)]
        grid: String,
        /// Geometric instead of linear spacing.
        #[arg(long)]
        log: bool,
        /// Ambient dimension (isosceles is always 2).
        #[arg(long)]
        dim: Option<usize>,
        /// Fixed epsilon of the remark family.
        #[arg(long, default_value_t = 0.01)]
        remark_eps: f64,
    },
    /// Dimensional constants and the cap profile table.
    Constants {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 200)]
        alpha_steps: usize,
    },
    /// The cap profile f(alpha) on (0, pi/2].
    SphereProfile {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 200)]
        alpha_steps: usize,
    },
    /// Compare fast functionals with the brute-force references.
    Oracle {
        #[arg(long)]
        body: String,
        #[arg(long)]
        m: Option<String>,
    },
}

/// What a command produced.
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn error_outcome(e: &GeomError) -> Outcome {
    Outcome {
        code: EXIT_INPUT,
        stdout: String::new(),
        stderr: format!("{}\n", json!({"error": e.kind(), "message": e.to_string()})),
    }
}

fn read_body(path: &str) -> Result<ConvexPolytope> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| GeomError::InvalidParameter(format!("cannot read '{path}': {e}")))?;
    ConvexPolytope::from_json(&text)
}

fn need_m(m: &Option<String>) -> Result<ConvexPolytope> {
    match m {
        Some(p) => read_body(p),
        None => Err(GeomError::InvalidParameter("this command needs --m".into())),
    }
}

/// Flatten a JSON value into (dotted key, scalar text) pairs.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                flatten(&key(k), x, out);
            }
        }
        Value::Array(xs) => {
            for (i, x) in xs.iter().enumerate() {
                flatten(&key(&i.to_string()), x, out);
            }
        }
        Value::Null => out.push((prefix.to_string(), String::new())),
        Value::String(s) => out.push((prefix.to_string(), s.replace([',', '\n'], ";"))),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn config_line(cfg: &RunConfig) -> String {
    format!("# config {}\n", serde_json::to_string(cfg).expect("config serialises"))
}

/// Emit `result` with the config, as JSON or as a two-row CSV.
fn render(cfg: &RunConfig, result: Value) -> String {
    match cfg.output_format {
        OutputFormat::Json => {
            let doc = json!({"config": cfg, "result": result});
            format!("{}\n", serde_json::to_string(&doc).expect("output serialises"))
        }
        OutputFormat::Csv => {
            let mut pairs = Vec::new();
            flatten("", &result, &mut pairs);
            let mut s = config_line(cfg);
            let keys: Vec<&str> = pairs.iter().map(|p| p.0.as_str()).collect();
            let vals: Vec<&str> = pairs.iter().map(|p| p.1.as_str()).collect();
            let _ = writeln!(s, "{}", keys.join(","));
            let _ = writeln!(s, "{}", vals.join(","));
            s
        }
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("result serialises")
}

fn check_report(name: CheckName, k: &ConvexPolytope, m: &Option<String>, tol: f64) -> Result<InequalityReport> {
    match name {
        CheckName::Minkowski => inequalities::check_minkowski(k, &need_m(m)?, tol),
        CheckName::BetkeWeil => inequalities::check_betke_weil(k, &need_m(m)?, tol),
        CheckName::BetkeWeilSelf => inequalities::check_betke_weil_self(k, tol),
        CheckName::ReverseMinkowski => inequalities::check_reverse_minkowski(k, &need_m(m)?, tol),
        CheckName::Linhart => inequalities::check_linhart(k, tol),
    }
}

#[derive(Serialize)]
struct ConstantsOut {
    #[serde(flatten)]
    constants: PaperConstants,
    f_table: Vec<[f64; 2]>,
}

fn oracle_comparisons(cfg: &RunConfig, k: &ConvexPolytope, m: Option<&ConvexPolytope>) -> Result<(Vec<OracleComparison>, bool)> {
    let mut out = Vec::new();
    let mut ok = true;
    let n = k.dim();
    if n >= 2 {
        let fast = functionals::v1_with(k, &cfg.v1_options())?.value;
        let mc = oracle::mc_v1(k, cfg.mc_samples.max(10_000), cfg.seed)?;
        ok &= (fast - mc.value).abs() <= 4.0 * mc.std_error + 1e-12;
        out.push(OracleComparison::new("v1", fast, mc.value, cfg.mc_samples.max(10_000) as u64).with_std_error(mc.std_error));
    }
    if n <= 4 && k.vertices().len() <= 40 {
        let fast = functionals::circumradius(k);
        let (_, slow) = oracle::meb_exhaustive(k.vertices());
        let c = OracleComparison::new("circumradius", fast, slow, oracle::meb_budget(k.vertices().len(), n));
        ok &= (fast - slow).abs() <= 1e-9;
        out.push(c);
    }
    if k.affine_dim() == n {
        let fast = functionals::volume(k);
        let mc = oracle::volume_mc(k, cfg.mc_samples, cfg.seed)?;
        ok &= (fast - mc.value).abs() <= 4.0 * mc.std_error + 1e-12;
        out.push(OracleComparison::new("volume", fast, mc.value, cfg.mc_samples as u64).with_std_error(mc.std_error));
    }
    if let Some(m) = m {
        if n <= 4 {
            let fast = functionals::mixed_volume_1(k, m)?;
            let slow = functionals::mixed_volume_oracle(k, m)?;
            let c = OracleComparison::new("mixed_volume", fast, slow, (n + 1) as u64);
            ok &= c.rel_err <= 1e-7 || (fast - slow).abs() <= 1e-12;
            out.push(c);
        }
    }
    Ok((out, ok))
}

fn execute(cli: &Cli) -> Result<Outcome> {
    let cfg = &cli.config;
    cfg.validate()?;
    let ok = |stdout: String| Outcome { code: EXIT_OK, stdout, stderr: String::new() };
    let verdict = |pass: bool, stdout: String| Outcome {
        code: if pass { EXIT_OK } else { EXIT_CHECK_FAILED },
        stdout,
        stderr: String::new(),
    };
    match &cli.command {
        Command::Compute { body, functionals: which } => {
            let k = read_body(body)?;
            let which = match which {
                Some(list) => list.split(',').map(Functional::parse).collect::<Result<Vec<_>>>()?,
                None => Functional::ALL.to_vec(),
            };
            let rep = functionals::functional_report(&k, &which, &cfg.v1_options())?;
            Ok(ok(render(cfg, to_value(&rep))))
        }
        Command::Mixed { k, m, oracle: with_oracle } => {
            let (k, m) = (read_body(k)?, read_body(m)?);
            let v = functionals::mixed_volume_1(&k, &m)?;
            let mut res = json!({"mixed_volume": v});
            let mut pass = true;
            if *with_oracle {
                let slow = functionals::mixed_volume_oracle(&k, &m)?;
                let c = OracleComparison::new("mixed_volume", v, slow, (k.dim() + 1) as u64);
                pass = c.rel_err <= 1e-7 || (v - slow).abs() <= 1e-12;
                res["oracle"] = to_value(&c);
            }
            Ok(verdict(pass, render(cfg, res)))
        }
        Command::Check { name, k, m } => {
            let k = read_body(k)?;
            let rep = check_report(*name, &k, m, cfg.tolerance)?;
            Ok(verdict(rep.satisfied, render(cfg, to_value(&rep))))
        }
        Command::Certify { name, k, m } => {
            let k = read_body(k)?;
            let cert = match name {
                CertifyName::Linhart => inequalities::linhart_certificate(&k, cfg.tolerance)?,
                CertifyName::Reverse => inequalities::reverse_certificate(&k, &need_m(m)?, cfg.eps0, cfg.tolerance)?,
            };
            Ok(verdict(cert.passed(), render(cfg, to_value(&cert))))
        }
        Command::Sweep { family, grid, log, dim, remark_eps } => {
            let family = match family {
                SweepFamily::Isosceles => Family::Isosceles,
                SweepFamily::PerturbedSegment => Family::PerturbedSegment,
                SweepFamily::ThinBox => Family::ThinBox,
                SweepFamily::Remark => Family::Remark,
            };
            let default_dim = if family == Family::Isosceles { 2 } else { 3 };
            let opts = SweepOptions {
                dim: dim.unwrap_or(default_dim),
                seed: cfg.seed,
                tol: cfg.tolerance,
                eps0: cfg.eps0,
                remark_eps: *remark_eps,
            };
            let res = sweeps::run_sweep(family, &Grid::parse(grid, *log)?, &opts)?;
            let text = match cfg.output_format {
                OutputFormat::Csv => format!("{}{}", config_line(cfg), res.to_csv()),
                OutputFormat::Json => render(cfg, to_value(&res)),
            };
            Ok(verdict(res.all_passed(), text))
        }
        Command::Constants { dim, alpha_steps } => {
            let out = ConstantsOut {
                constants: PaperConstants::compute(*dim)?,
                f_table: spherical::f_table(*dim, *alpha_steps)?,
            };
            Ok(ok(render(cfg, to_value(&out))))
        }
        Command::SphereProfile { dim, alpha_steps } => {
            let table = spherical::f_table(*dim, *alpha_steps)?;
            let text = match cfg.output_format {
                OutputFormat::Csv => {
                    let mut s = config_line(cfg);
                    s.push_str("alpha,f\n");
                    for [a, f] in &table {
                        let _ = writeln!(s, "{a:?},{f:?}");
                    }
                    s
                }
                OutputFormat::Json => render(cfg, json!({"n": dim, "f_table": table})),
            };
            Ok(ok(text))
        }
        Command::Oracle { body, m } => {
            let k = read_body(body)?;
            let m = m.as_deref().map(read_body).transpose()?;
            let (cmp, pass) = oracle_comparisons(cfg, &k, m.as_ref())?;
            let mut by_name = BTreeMap::new();
            for c in &cmp {
                by_name.insert(c.quantity.clone(), to_value(c));
            }
            Ok(verdict(pass, render(cfg, to_value(&by_name))))
        }
    }
}

/// Parse `args` (including the program name) and run the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: EXIT_OK,
                    stdout: e.to_string(),
                    stderr: String::new(),
                },
                _ => Outcome {
                    code: EXIT_INPUT,
                    stdout: String::new(),
                    stderr: format!("{}\n", json!({"error": "usage", "message": e.to_string()})),
                },
            };
        }
    };
    match execute(&cli) {
        Ok(o) => o,
        Err(e) => error_outcome(&e),
    }
}
