//! Configuration-driven runner behind the `conjlab` binary.
//!
//! Configs are TOML documents:
//!
//! ```toml
//! [settings]
//! grid_size = 2048             # norm grid, default 2048
//! output_dir = "out"           # relative to the config file
//! refinement_growth = 1.25     # allowed growth of the ratio sup on a 4x longer n grid
//!
//! [[experiments]]
//! id = "cesaro-cos"
//! function = "cos:nu=1"
//! matrix = "cesaro"
//! model = "power:alpha=1"
//! space = "sup"                # or "lp:p=2"
//! r = 1
//! n_values = [8, 16, 32, 64, 128, 256]
//! theorem = "T1"               # T1 T2 T3 T4 C1 TA TB
//! variant = "full_conjugate"   # or truncated_pi_over_rn, truncated_Anr_over_r
//!
//! [experiments.assert]
//! slope = [-1.05, -0.95]
//! refinement = true
//! hypotheses = true
//! ```
//!
//! Functions: `cos:nu=`, `sin:nu=`, `const:c=`, `trig:a=1;0.5,b=0;2`,
//! `weierstrass:alpha=,terms=`. Matrices: `cesaro`, `identity`, `borel`,
//! `square-shift`, `euler:q=`, `plateau:height=`, `riesz:…`, `norlund:…` with
//! one of `power=β`, `geometric=ρ`, `weights=w0;w1;…`. Models: `power:alpha=`,
//! `lipschitz-log`, `log-inverse`, `zero`.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::deviation_harness::{
    refinement_check, DeviationReport, Experiment, ExperimentSpec, FunctionSpec, HypothesisCheck, RefinementCheck,
    Theorem, Variant, DEFAULT_N_VALUES, REFINEMENT_GROWTH_LIMIT,
};
use crate::error::{Error, Result};
use crate::fit::FitReport;
use crate::function_space::{NormSpace, DEFAULT_GRID_SIZE};
use crate::matrix_lab::{self, MatrixFamily, SummabilityMatrix, WeightLaw};
use crate::modulus_models::ModulusModel;

/// Overrides `settings.output_dir`.
pub const OUTPUT_DIR_ENV: &str = "CONJLAB_OUTPUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "conjlab", version, about = "Matrix means of conjugate Fourier series: deviation experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the experiments of a config file and write CSV and plot data.
    Run {
        config: PathBuf,
    },
    /// Check the window-mass, first-moment and difference-tail conditions for one matrix.
    Check {
        /// Matrix spec, e.g. `cesaro` or `euler:q=1`.
        matrix: String,
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(long, default_value_t = 8)]
        n_min: usize,
        #[arg(long, default_value_t = 1024)]
        n_max: usize,
        /// The constant c > 1 of the difference-tail condition.
        #[arg(long, default_value_t = 2.0)]
        c: f64,
    },
}

/// Global settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Settings {
    pub grid_size: usize,
    pub output_dir: PathBuf,
    pub refinement_growth: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            grid_size: DEFAULT_GRID_SIZE,
            output_dir: PathBuf::from("conjlab-out"),
            refinement_growth: REFINEMENT_GROWTH_LIMIT,
        }
    }
}

/// Declared expectations of one experiment.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Assertions {
    /// Inclusive range for the fitted slope.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope: Option<[f64; 2]>,
    /// `constant_ratio_max` must be refinement-stable.
    #[serde(default)]
    pub refinement: bool,
    /// All hypothesis checks must pass.
    #[serde(default)]
    pub hypotheses: bool,
}

fn default_space() -> String {
    "sup".into()
}

fn default_r() -> usize {
    1
}

fn default_n_values() -> Vec<usize> {
    DEFAULT_N_VALUES.to_vec()
}

fn default_variant() -> String {
    Variant::FullConjugate.id().into()
}

/// One `[[experiments]]` table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub id: String,
    pub function: String,
    pub matrix: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(default = "default_space")]
    pub space: String,
    #[serde(default = "default_r")]
    pub r: usize,
    #[serde(default = "default_n_values")]
    pub n_values: Vec<usize>,
    pub theorem: String,
    #[serde(default = "default_variant")]
    pub variant: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_size: Option<usize>,
    #[serde(default, rename = "assert", skip_serializing_if = "Option::is_none")]
    pub assertions: Option<Assertions>,
}

/// A whole config document.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Config {
    #[serde(default)]
    pub settings: Settings,
    #[serde(default)]
    pub experiments: Vec<ExperimentConfig>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    settings: Settings,
    #[serde(default)]
    experiments: Vec<toml::Table>,
}

impl Config {
    /// Parses a config. Experiment tables are decoded one at a time so errors
    /// name the offending experiment.
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut experiments = Vec::with_capacity(raw.experiments.len());
        for (i, table) in raw.experiments.into_iter().enumerate() {
            let name = match table.get("id").and_then(|v| v.as_str()) {
                Some(id) => format!("experiment '{id}'"),
                None => format!("experiment #{}", i + 1),
            };
            let exp: ExperimentConfig = table
                .try_into()
                .map_err(|e: toml::de::Error| Error::Config(format!("{name}: {}", e.message())))?;
            experiments.push(exp);
        }
        Ok(Self {
            settings: raw.settings,
            experiments,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// `name[:key=value,...]`.
fn split_spec(spec: &str) -> (String, BTreeMap<String, String>) {
    let (name, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let params = rest
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| match p.split_once('=') {
            Some((k, v)) => (k.trim().to_ascii_lowercase(), v.trim().to_string()),
            None => (p.trim().to_ascii_lowercase(), String::new()),
        })
        .collect();
    (name.trim().to_ascii_lowercase(), params)
}

struct Params<'a> {
    what: &'a str,
    spec: &'a str,
    map: BTreeMap<String, String>,
}

impl Params<'_> {
    fn take(&mut self, key: &str) -> Option<String> {
        self.map.remove(key)
    }

    fn bad(&self, msg: impl std::fmt::Display) -> Error {
        Error::Config(format!("{} '{}': {msg}", self.what, self.spec))
    }

    fn number<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let v = self.take(key).ok_or_else(|| self.bad(format!("missing parameter '{key}'")))?;
        v.parse().map_err(|_| self.bad(format!("bad value '{v}' for '{key}'")))
    }

    fn list(&mut self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => v
                .split(';')
                .map(|x| x.trim().parse::<f64>().map_err(|_| self.bad(format!("bad list entry '{x}'"))))
                .collect::<Result<Vec<_>>>()
                .map(Some),
        }
    }

    fn finish<T>(self, value: T) -> Result<T> {
        match self.map.keys().next() {
            Some(k) => Err(self.bad(format!("unknown parameter '{k}'"))),
            None => Ok(value),
        }
    }
}

fn params<'a>(what: &'a str, spec: &'a str) -> (String, Params<'a>) {
    let (name, map) = split_spec(spec);
    (name, Params { what, spec, map })
}

fn wrap(what: &str, spec: &str, e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(format!("{what} '{spec}': {other}")),
    }
}

pub fn parse_matrix(spec: &str) -> Result<SummabilityMatrix> {
    let (name, mut p) = params("matrix", spec);
    let family = match name.as_str() {
        "cesaro" => MatrixFamily::Cesaro,
        "identity" => MatrixFamily::Identity,
        "borel" => MatrixFamily::Borel,
        "square-shift" => MatrixFamily::SquareShift,
        "euler" => MatrixFamily::Euler(p.number("q")?),
        "plateau" => MatrixFamily::Plateau(p.number("height")?),
        "riesz" | "norlund" => {
            let law = if p.map.contains_key("power") {
                WeightLaw::Power(p.number("power")?)
            } else if p.map.contains_key("geometric") {
                WeightLaw::Geometric(p.number("geometric")?)
            } else if let Some(w) = p.list("weights")? {
                WeightLaw::Explicit(w)
            } else {
                return Err(p.bad("expected one of power=, geometric=, weights="));
            };
            if name == "riesz" {
                MatrixFamily::Riesz(law)
            } else {
                MatrixFamily::Norlund(law)
            }
        }
        _ => return Err(Error::Config(format!("unknown matrix '{name}'"))),
    };
    let family = p.finish(family)?;
    SummabilityMatrix::new(family).map_err(|e| wrap("matrix", spec, e))
}

pub fn parse_function(spec: &str) -> Result<FunctionSpec> {
    let (name, mut p) = params("function", spec);
    let f = match name.as_str() {
        "cos" | "cosine" => FunctionSpec::Cosine(p.number("nu")?),
        "sin" | "sine" => FunctionSpec::Sine(p.number("nu")?),
        "const" | "constant" => FunctionSpec::Constant(p.number("c")?),
        "trig" => FunctionSpec::Trig {
            a: p.list("a")?.unwrap_or_default(),
            b: p.list("b")?.unwrap_or_default(),
        },
        "weierstrass" => FunctionSpec::Weierstrass {
            alpha: p.number("alpha")?,
            terms: p.number("terms")?,
        },
        _ => return Err(Error::Config(format!("unknown function '{name}'"))),
    };
    let f = p.finish(f)?;
    f.build().map_err(|e| wrap("function", spec, e))?;
    Ok(f)
}

pub fn parse_model(spec: &str) -> Result<ModulusModel> {
    let (name, mut p) = params("model", spec);
    let m = match name.as_str() {
        "power" => ModulusModel::power(p.number("alpha")?).map_err(|e| wrap("model", spec, e))?,
        "lipschitz-log" => ModulusModel::lipschitz_log(),
        "log-inverse" => ModulusModel::log_inverse(),
        "zero" => ModulusModel::zero(),
        _ => return Err(Error::Config(format!("unknown model '{name}'"))),
    };
    p.finish(m)
}

pub fn parse_space(spec: &str, grid_size: usize) -> Result<NormSpace> {
    let (name, mut p) = params("space", spec);
    let space = match name.as_str() {
        "sup" | "c" => NormSpace::sup(grid_size),
        "lp" => NormSpace::lp(p.number("p")?, grid_size),
        _ => return Err(Error::Config(format!("unknown space '{name}'"))),
    }
    .map_err(|e| wrap("space", spec, e))?;
    p.finish(space)
}

fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.')) && id != "summary"
}

impl ExperimentConfig {
    /// Resolves every id into an [`ExperimentSpec`]; errors name the experiment.
    pub fn resolve(&self, settings: &Settings) -> Result<ExperimentSpec> {
        let named = |e: Error| match e {
            Error::Config(msg) => Error::Config(format!("experiment '{}': {msg}", self.id)),
            other => Error::Config(format!("experiment '{}': {other}", self.id)),
        };
        if !valid_id(&self.id) {
            return Err(named(Error::Config("id must be non-empty [A-Za-z0-9._-]".into())));
        }
        let theorem =
            Theorem::parse(&self.theorem).ok_or_else(|| named(Error::Config(format!("unknown theorem '{}'", self.theorem))))?;
        let variant =
            Variant::parse(&self.variant).ok_or_else(|| named(Error::Config(format!("unknown variant '{}'", self.variant))))?;
        let spec = ExperimentSpec {
            id: self.id.clone(),
            function: parse_function(&self.function).map_err(named)?,
            matrix: Arc::new(parse_matrix(&self.matrix).map_err(named)?),
            space: parse_space(&self.space, self.grid_size.unwrap_or(settings.grid_size)).map_err(named)?,
            r: self.r,
            n_values: self.n_values.clone(),
            theorem,
            variant,
            model: self.model.as_deref().map(parse_model).transpose().map_err(named)?,
        };
        spec.validate().map_err(|e| match e {
            Error::Config(msg) => Error::Config(msg),
            other => named(other),
        })?;
        Ok(spec)
    }
}

/// Everything measured for one experiment.
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub id: String,
    pub report: Option<DeviationReport>,
    pub hypotheses: Vec<HypothesisCheck>,
    pub refinement: Option<RefinementCheck>,
    pub assertion_failures: Vec<String>,
    pub error: Option<String>,
}

impl ExperimentOutcome {
    pub fn hypotheses_ok(&self) -> bool {
        self.hypotheses.iter().all(|h| h.report.ok)
    }

    pub fn passed(&self) -> bool {
        self.error.is_none() && self.assertion_failures.is_empty()
    }
}

fn execute(spec: &ExperimentSpec, assertions: &Assertions, growth_limit: f64) -> ExperimentOutcome {
    let mut out = ExperimentOutcome {
        id: spec.id.clone(),
        report: None,
        hypotheses: Vec::new(),
        refinement: None,
        assertion_failures: Vec::new(),
        error: None,
    };
    let result = (|| -> Result<()> {
        let experiment = Experiment::new(spec.clone())?;
        let report = experiment.run()?;
        out.hypotheses = experiment.hypothesis_checks()?;
        if let Some([lo, hi]) = assertions.slope {
            match report.fitted_slope {
                Some(s) if s >= lo && s <= hi => {}
                Some(s) => out.assertion_failures.push(format!("slope {s:.4} outside [{lo}, {hi}]")),
                None => out.assertion_failures.push("no fitted slope".into()),
            }
        }
        if assertions.hypotheses {
            for h in out.hypotheses.iter().filter(|h| !h.report.ok) {
                out.assertion_failures.push(format!("hypothesis {} failed: {}", h.name, h.report));
            }
        }
        out.report = Some(report);
        if assertions.refinement {
            let check = refinement_check(spec)?;
            if !(check.growth <= growth_limit) {
                out.assertion_failures
                    .push(format!("ratio sup grows by {:.4} on the extended grid", check.growth));
            }
            out.refinement = Some(check);
        }
        Ok(())
    })();
    if let Err(e) = result {
        out.error = Some(format!("experiment '{}': {e}", spec.id));
    }
    out
}

/// How a `run` ended.
#[derive(Debug)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub output_dir: PathBuf,
    pub config_errors: Vec<String>,
    pub experiments: Vec<ExperimentOutcome>,
}

fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Config(format!("{}: {e}", path.display()))
}

fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_error(path, e))?;
    w.write_record(header).map_err(|e| io_error(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| io_error(path, e))?;
    }
    w.flush().map_err(|e| io_error(path, e))
}

fn write_dat(path: &Path, points: impl IntoIterator<Item = (usize, f64)>) -> Result<()> {
    let mut text = String::from("# ln(n+1) ln(value)\n");
    for (n, v) in points {
        if v > 0.0 && v.is_finite() {
            let _ = writeln!(text, "{} {}", fmt_f64(((n + 1) as f64).ln()), fmt_f64(v.ln()));
        }
    }
    fs::write(path, text).map_err(|e| io_error(path, e))
}

fn write_outputs(dir: &Path, outcomes: &[ExperimentOutcome]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    for o in outcomes {
        let Some(report) = &o.report else { continue };
        let rows = report.rows.iter().map(|r| {
            vec![
                r.n.to_string(),
                fmt_f64(r.deviation),
                fmt_f64(r.bound_value),
                fmt_f64(r.ratio),
                fmt_opt(r.epsilon_used),
            ]
        });
        write_csv(
            &dir.join(format!("{}.csv", o.id)),
            &["n", "deviation", "bound_value", "ratio", "epsilon_used"],
            rows,
        )?;
        write_dat(&dir.join(format!("{}.dat", o.id)), report.rows.iter().map(|r| (r.n, r.deviation)))?;
        write_dat(
            &dir.join(format!("{}_bound.dat", o.id)),
            report.rows.iter().map(|r| (r.n, r.bound_value)),
        )?;
    }
    let pass_fail = |ok: bool| if ok { "pass" } else { "fail" }.to_string();
    let summary = outcomes.iter().map(|o| {
        let r = o.report.as_ref();
        vec![
            o.id.clone(),
            fmt_opt(r.and_then(|r| r.fitted_slope)),
            fmt_opt(r.and_then(|r| r.bound_slope)),
            fmt_opt(r.map(|r| r.constant_ratio_max)),
            pass_fail(o.error.is_none() && o.hypotheses_ok()),
            pass_fail(o.passed()),
            o.error.clone().unwrap_or_default(),
        ]
    });
    write_csv(
        &dir.join("summary.csv"),
        &[
            "experiment",
            "fitted_slope",
            "bound_slope",
            "constant_ratio_max",
            "hypotheses",
            "assertions",
            "error",
        ],
        summary,
    )
}

/// Runs a config: resolves every experiment, runs the valid ones in parallel
/// and writes their outputs. The exit code is [`EXIT_CONFIG`] when anything
/// failed to resolve, else [`EXIT_ASSERTION`] when an experiment errored or
/// an assertion failed, else [`EXIT_OK`].
pub fn run_config(path: &Path, output_override: Option<PathBuf>) -> RunOutcome {
    let fail = |msg: String| RunOutcome {
        exit_code: EXIT_CONFIG,
        output_dir: PathBuf::new(),
        config_errors: vec![msg],
        experiments: Vec::new(),
    };
    let config = match Config::load(path) {
        Ok(c) => c,
        Err(e) => return fail(e.to_string()),
    };
    let output_dir = output_override.unwrap_or_else(|| {
        let base = path.parent().unwrap_or(Path::new("."));
        base.join(&config.settings.output_dir)
    });

    let mut config_errors = Vec::new();
    let mut seen = HashSet::new();
    let mut resolved = Vec::new();
    for exp in &config.experiments {
        if !seen.insert(exp.id.clone()) {
            config_errors.push(format!("configuration error: duplicate experiment id '{}'", exp.id));
            continue;
        }
        match exp.resolve(&config.settings) {
            Ok(spec) => resolved.push((spec, exp.assertions.clone().unwrap_or_default())),
            Err(e) => config_errors.push(e.to_string()),
        }
    }
    let growth_limit = config.settings.refinement_growth;
    let experiments: Vec<ExperimentOutcome> = resolved
        .par_iter()
        .map(|(spec, assertions)| execute(spec, assertions, growth_limit))
        .collect();
    if let Err(e) = write_outputs(&output_dir, &experiments) {
        config_errors.push(e.to_string());
    }
    let exit_code = if !config_errors.is_empty() {
        EXIT_CONFIG
    } else if experiments.iter().all(ExperimentOutcome::passed) {
        EXIT_OK
    } else {
        EXIT_ASSERTION
    };
    RunOutcome {
        exit_code,
        output_dir,
        config_errors,
        experiments,
    }
}

/// Reports of the `check` verb.
#[derive(Debug, Clone)]
pub struct MatrixCheck {
    pub label: String,
    pub lower_triangular: bool,
    pub n_values: Vec<usize>,
    pub conditions: Vec<(&'static str, FitReport)>,
}

impl MatrixCheck {
    pub fn ok(&self) -> bool {
        self.conditions.iter().all(|(_, r)| r.ok)
    }
}

/// Doubling grid from `n_min` up to and including `n_max`.
pub fn doubling_grid(n_min: usize, n_max: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut n = n_min.max(1);
    while n < n_max {
        out.push(n);
        n *= 2;
    }
    out.push(n_max);
    out
}

pub fn check_matrix(spec: &str, r: usize, n_min: usize, n_max: usize, c: f64) -> Result<MatrixCheck> {
    let a = parse_matrix(spec)?;
    if n_min > n_max {
        return Err(Error::Config(format!("n-min {n_min} exceeds n-max {n_max}")));
    }
    let ns = doubling_grid(n_min, n_max);
    let conditions = vec![
        ("window-mass", matrix_lab::check_window_mass(&a, &ns, r).map_err(|e| Error::Config(e.to_string()))?),
        ("first-moment", matrix_lab::check_first_moment(&a, &ns)),
        ("difference-tail", matrix_lab::check_difference_tail(&a, &ns, r, c).map_err(|e| Error::Config(e.to_string()))?),
    ];
    Ok(MatrixCheck {
        label: a.label().to_string(),
        lower_triangular: a.is_lower_triangular(),
        n_values: ns,
        conditions,
    })
}

fn print_run(outcome: &RunOutcome, out: &mut impl io::Write) -> io::Result<()> {
    for e in &outcome.config_errors {
        writeln!(out, "error: {e}")?;
    }
    for o in &outcome.experiments {
        let status = if o.passed() { "PASS" } else { "FAIL" };
        let slope = o
            .report
            .as_ref()
            .and_then(|r| r.fitted_slope)
            .map_or("-".into(), |s| format!("{s:.4}"));
        let crm = o
            .report
            .as_ref()
            .map_or("-".into(), |r| format!("{:.4e}", r.constant_ratio_max));
        let hyp = if o.hypotheses_ok() { "pass" } else { "fail" };
        writeln!(out, "{status} {}: slope={slope} ratio_max={crm} hypotheses={hyp}", o.id)?;
        if let Some(r) = &o.refinement {
            writeln!(out, "    refinement growth {:.4}", r.growth)?;
        }
        for f in &o.assertion_failures {
            writeln!(out, "    {f}")?;
        }
        if let Some(e) = &o.error {
            writeln!(out, "    error: {e}")?;
        }
    }
    writeln!(out, "outputs in {}", outcome.output_dir.display())
}

/// Entry point of the binary; returns the process exit code.
pub fn run_cli(cli: Cli) -> i32 {
    use std::io::Write as _;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Run { config } => {
            let override_dir = std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from);
            let outcome = run_config(&config, override_dir);
            let _ = print_run(&outcome, &mut out);
            outcome.exit_code
        }
        Command::Check {
            matrix,
            r,
            n_min,
            n_max,
            c,
        } => match check_matrix(&matrix, r, n_min, n_max, c) {
            Ok(check) => {
                let _ = writeln!(
                    out,
                    "{} (lower triangular: {}), r = {r}, n = {:?}",
                    check.label, check.lower_triangular, check.n_values
                );
                for (name, report) in &check.conditions {
                    let _ = writeln!(out, "{name} {report}");
                }
                if check.ok() {
                    EXIT_OK
                } else {
                    EXIT_ASSERTION
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_CONFIG
            }
        },
    }
}
