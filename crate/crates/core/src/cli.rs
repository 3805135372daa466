//! Command-line front end and manifold file ingestion.
//!
//! Manifold files are JSON:
//!
//! ```json
//! {
//!   "name": "flat C^1",
//!   "dimension": 2,
//!   "metric": [["1", "0"], ["0", "1"]],
//!   "complex_structure": [["0", "-1"], ["1", "0"]],
//!   "domain": "1",
//!   "sample_box": { "center": [0, 0], "half_width": [1, 1] }
//! }
//! ```
//!
//! `complex_structure` row `i`, column `j` holds `Jⁱ_j`; it and `domain` are optional.
//!
//! Exit codes: 0 all checks pass, 1 some check failed, 2 usage or schema
//! error, 3 evaluation-domain error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use crate::error::{CurvError, Result};
use crate::exprlang::parse;
use crate::geometry::{ManifoldSpec, SampleBox, TensorField, SYMMETRY_TOL};
use crate::modelspaces::{Model, MODEL_NAMES};
use crate::report::Report;
use crate::verify::{full_report, Suite, Tag, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_EVALUATION: i32 = 3;

fn field<'v>(root: &'v Value, key: &str) -> Result<&'v Value> {
    root.get(key).ok_or_else(|| CurvError::Schema {
        pointer: format!("/{key}"),
        message: "missing required field".into(),
    })
}

fn schema(pointer: String, message: impl Into<String>) -> CurvError {
    CurvError::Schema {
        pointer,
        message: message.into(),
    }
}

fn expr_matrix(v: &Value, pointer: &str, dim: usize) -> Result<TensorField> {
    let rows = v
        .as_array()
        .ok_or_else(|| schema(pointer.into(), "expected an array of rows"))?;
    if rows.len() != dim {
        return Err(schema(
            pointer.into(),
            format!("expected {dim} rows, found {}", rows.len()),
        ));
    }
    let mut out = Vec::with_capacity(dim);
    for (i, row) in rows.iter().enumerate() {
        let rp = format!("{pointer}/{i}");
        let cells = row
            .as_array()
            .ok_or_else(|| schema(rp.clone(), "expected an array of expressions"))?;
        if cells.len() != dim {
            return Err(schema(
                rp,
                format!("expected {dim} entries, found {}", cells.len()),
            ));
        }
        let mut parsed = Vec::with_capacity(dim);
        for (j, cell) in cells.iter().enumerate() {
            let cp = format!("{rp}/{j}");
            let src = match cell {
                Value::String(s) => s.clone(),
                Value::Number(n) => n.to_string(),
                _ => return Err(schema(cp, "expected an expression string")),
            };
            parsed.push(parse(&src, dim).map_err(|e| CurvError::InField {
                pointer: cp,
                source: Box::new(e),
            })?);
        }
        out.push(parsed);
    }
    Ok(TensorField::Expressions(out))
}

fn number_vec(v: &Value, pointer: &str, dim: usize) -> Result<Vec<f64>> {
    let arr = v
        .as_array()
        .ok_or_else(|| schema(pointer.into(), "expected an array of numbers"))?;
    if arr.len() != dim {
        return Err(schema(
            pointer.into(),
            format!("expected {dim} numbers, found {}", arr.len()),
        ));
    }
    arr.iter()
        .enumerate()
        .map(|(i, x)| {
            x.as_f64()
                .ok_or_else(|| schema(format!("{pointer}/{i}"), "expected a number"))
        })
        .collect()
}

/// Parses and validates a manifold description.
///
/// Metric symmetry and positive definiteness are checked at the sample box
/// center. Hermitian compatibility of `J` is left to the report, so a broken
/// `J` loads and then fails validation there.
pub fn parse_manifold_json(text: &str) -> Result<ManifoldSpec> {
    let root: Value =
        serde_json::from_str(text).map_err(|e| schema(String::new(), e.to_string()))?;
    if !root.is_object() {
        return Err(schema(String::new(), "expected a JSON object"));
    }
    let name = field(&root, "name")?
        .as_str()
        .ok_or_else(|| schema("/name".into(), "expected a string"))?
        .to_string();
    let dim = field(&root, "dimension")?
        .as_u64()
        .ok_or_else(|| schema("/dimension".into(), "expected a non-negative integer"))?
        as usize;
    if dim < 2 || !dim.is_multiple_of(2) {
        return Err(CurvError::Dimension(format!(
            "dimension must be even and at least 2, got {dim}"
        )));
    }
    let metric = expr_matrix(field(&root, "metric")?, "/metric", dim)?;
    let j = match root.get("complex_structure") {
        None | Some(Value::Null) => None,
        Some(v) => Some(expr_matrix(v, "/complex_structure", dim)?),
    };
    let domain = match root.get("domain") {
        None | Some(Value::Null) => parse("1", dim)?,
        Some(Value::String(s)) => parse(s, dim).map_err(|e| CurvError::InField {
            pointer: "/domain".into(),
            source: Box::new(e),
        })?,
        Some(_) => return Err(schema("/domain".into(), "expected an expression string")),
    };
    let sb = field(&root, "sample_box")?;
    let center = number_vec(
        sb.get("center")
            .ok_or_else(|| schema("/sample_box/center".into(), "missing required field"))?,
        "/sample_box/center",
        dim,
    )?;
    let half_width = number_vec(
        sb.get("half_width")
            .ok_or_else(|| schema("/sample_box/half_width".into(), "missing required field"))?,
        "/sample_box/half_width",
        dim,
    )?;

    let raw = metric.values(&center)?;
    let spec = ManifoldSpec::new(
        name,
        dim,
        metric,
        j,
        domain,
        SampleBox { center, half_width },
    )?;
    let mut asym: f64 = 0.0;
    for a in 0..dim {
        for b in 0..a {
            asym = asym.max((raw[(a, b)] - raw[(b, a)]).abs());
        }
    }
    if asym > SYMMETRY_TOL {
        return Err(CurvError::InvariantViolation {
            what: "metric is not symmetric at the sample box center".into(),
            residual: asym,
        });
    }
    let v = spec.validate_at(&spec.sample_box.center)?;
    if !v.positive_definite {
        return Err(CurvError::InvariantViolation {
            what: "metric is not positive definite at the sample box center".into(),
            residual: raw.symmetric_eigenvalues().min(),
        });
    }
    Ok(spec)
}

pub fn load_manifold_file(path: &Path) -> Result<ManifoldSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CurvError::Io(format!("{}: {e}", path.display())))?;
    parse_manifold_json(&text)
}

/// Exit code for an error that aborted a run.
pub fn exit_code_for(err: &CurvError) -> i32 {
    match err {
        CurvError::InField { source, .. } => exit_code_for(source),
        CurvError::EvaluationDomain { .. }
        | CurvError::OutsideDomain { .. }
        | CurvError::DegenerateMetric { .. }
        | CurvError::Sampling(_)
        | CurvError::FormulaDomain(_)
        | CurvError::FrameConstruction(_)
        | CurvError::DerivativeExhausted
        | CurvError::JetMismatch { .. }
        | CurvError::UnsupportedOrder(_) => EXIT_EVALUATION,
        CurvError::HypothesisNotMet { .. } | CurvError::NotAlmostHermitian(_) => EXIT_CHECK_FAILED,
        _ => EXIT_USAGE,
    }
}

/// Where the manifold comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum ManifoldSource {
    Builtin(Model),
    File(PathBuf),
}

impl ManifoldSource {
    pub fn load(&self) -> Result<ManifoldSpec> {
        match self {
            ManifoldSource::Builtin(m) => m.build(),
            ManifoldSource::File(p) => load_manifold_file(p),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub manifold: ManifoldSource,
    pub verify: VerifyConfig,
    pub output: Option<PathBuf>,
    pub suite: Suite,
}

/// Result of [`run`]: the exit code plus whatever was produced on the way.
#[derive(Debug)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub report: Option<Report>,
    pub json: Option<String>,
    pub error: Option<CurvError>,
}

impl RunOutcome {
    fn failed(err: CurvError) -> RunOutcome {
        RunOutcome {
            exit_code: exit_code_for(&err),
            report: None,
            json: None,
            error: Some(err),
        }
    }
}

/// Loads the manifold, builds the report and writes it to the output path.
pub fn run(config: &RunConfig) -> RunOutcome {
    let result = (|| {
        config.verify.validate()?;
        let spec = config.manifold.load()?;
        let report = full_report(&spec, &config.verify, &config.suite)?;
        let json = report.to_json()?;
        if let Some(path) = &config.output {
            std::fs::write(path, &json)
                .map_err(|e| CurvError::Io(format!("{}: {e}", path.display())))?;
        }
        Ok((report, json))
    })();
    match result {
        Ok((report, json)) => RunOutcome {
            exit_code: if report.all_passed {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            },
            report: Some(report),
            json: Some(json),
            error: None,
        },
        Err(e) => RunOutcome::failed(e),
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "curvlab",
    version,
    about = "Curvature checks for almost-Hermitian manifolds in a chart"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the built-in model spaces.
    ListManifolds,
    /// Validate the spec and classify the structure (Kaehler, NK, QK, QK2, AH3).
    Classify(RunArgs),
    /// Check curvature identities.
    Identities(IdentityArgs),
    /// Constancy statistics for nu, tau, tau'.
    Schur(RunArgs),
    /// Everything: validation, classes, identities and constancy statistics.
    Report(RunArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Built-in manifold (see list-manifolds).
    #[arg(long, conflicts_with = "file", required_unless_present = "file")]
    pub manifold: Option<String>,
    /// Manifold JSON file.
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Complex dimension for flat, cpn, cdn, perturbed.
    #[arg(long)]
    pub n: Option<usize>,
    /// Holomorphic sectional curvature for cpn (> 0) and cdn (< 0).
    #[arg(long, allow_negative_numbers = true)]
    pub c: Option<f64>,
    #[arg(long, default_value_t = 8)]
    pub points: usize,
    #[arg(long, default_value_t = 32)]
    pub planes: usize,
    #[arg(long, default_value_t = 32)]
    pub vectors: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IdentityArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Comma-separated tags, e.g. EQ6,EQ8. Defaults to all but SCHUR.
    #[arg(long)]
    pub suite: Option<String>,
}

impl RunArgs {
    pub fn to_config(&self, suite: Suite, threads: Option<usize>) -> Result<RunConfig> {
        let manifold = match (&self.manifold, &self.file) {
            (_, Some(f)) => ManifoldSource::File(f.clone()),
            (Some(name), None) => ManifoldSource::Builtin(Model::from_name(name, self.n, self.c)?),
            (None, None) => {
                return Err(CurvError::Precondition(
                    "one of --manifold or --file is required".into(),
                ))
            }
        };
        Ok(RunConfig {
            manifold,
            verify: VerifyConfig {
                points: self.points,
                planes: self.planes,
                vectors: self.vectors,
                seed: self.seed,
                tolerance: self.tol,
                threads,
            },
            output: self.json.clone(),
            suite,
        })
    }
}

pub fn parse_tags(list: &str) -> Result<Vec<Tag>> {
    let mut tags = Vec::new();
    for part in list.split(',').filter(|s| !s.trim().is_empty()) {
        let t: Tag = part.parse()?;
        if !tags.contains(&t) {
            tags.push(t);
        }
    }
    if tags.is_empty() {
        return Err(CurvError::Precondition("--suite lists no tags".into()));
    }
    Ok(tags)
}

/// Worker cap from `CURVLAB_THREADS`.
pub fn threads_from_env() -> Option<usize> {
    std::env::var("CURVLAB_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&t| t > 0)
}

/// Parses arguments, runs, prints the summary to stderr and returns the exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            if code == EXIT_OK {
                let _ = write!(stdout, "{e}");
            } else {
                let _ = write!(stderr, "{e}");
            }
            return code;
        }
    };
    let threads = threads_from_env();
    let config = match &cli.command {
        Command::ListManifolds => {
            for (name, about) in MODEL_NAMES {
                let _ = writeln!(stdout, "{name:<10} {about}");
            }
            return EXIT_OK;
        }
        Command::Classify(a) => a.to_config(Suite::Classify, threads),
        Command::Schur(a) => a.to_config(Suite::Schur, threads),
        Command::Report(a) => a.to_config(Suite::All, threads),
        Command::Identities(a) => a
            .suite
            .as_deref()
            .map(parse_tags)
            .transpose()
            .and_then(|tags| a.run.to_config(Suite::Identities(tags), threads)),
    };
    let config = match config {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return exit_code_for(&e);
        }
    };
    let outcome = run(&config);
    if let Some(report) = &outcome.report {
        for line in report.summary_lines() {
            let _ = writeln!(stderr, "{line}");
        }
        if config.output.is_none() {
            if let Some(json) = &outcome.json {
                let _ = stdout.write_all(json.as_bytes());
            }
        }
    }
    if let Some(e) = &outcome.error {
        let _ = writeln!(stderr, "error: {e}");
    }
    outcome.exit_code
}

#[cfg(test)]
mod tests {
    use super::*;

    const FLAT_C1: &str = r#"{
        "name": "flat C^1",
        "dimension": 2,
        "metric": [["1", "0"], ["0", "1"]],
        "complex_structure": [["0", "-1"], ["1", "0"]],
        "sample_box": {"center": [0, 0], "half_width": [1, 1]}
    }"#;

    #[test]
    fn loads_minimal_file() {
        let spec = parse_manifold_json(FLAT_C1).unwrap();
        assert_eq!(spec.dim, 2);
        assert!(spec.is_hermitian());
    }

    #[test]
    fn schema_errors_carry_pointers() {
        let bad = FLAT_C1.replace(r#"["0", "1"]]"#, r#"["0", 1, "2"]]"#);
        match parse_manifold_json(&bad) {
            Err(CurvError::Schema { pointer, .. }) => assert_eq!(pointer, "/metric/1"),
            other => panic!("{other:?}"),
        }
        let bad = FLAT_C1.replace(r#""1", "0"], ["0""#, r#""1", "0"], ["x3""#);
        match parse_manifold_json(&bad) {
            Err(CurvError::InField { pointer, source }) => {
                assert_eq!(pointer, "/metric/1/0");
                assert!(matches!(
                    *source,
                    CurvError::VariableOutOfRange { offset: 0, .. }
                ));
            }
            other => panic!("{other:?}"),
        }
        let bad = FLAT_C1.replace(r#""name": "flat C^1","#, "");
        assert!(matches!(
            parse_manifold_json(&bad),
            Err(CurvError::Schema { pointer, .. }) if pointer == "/name"
        ));
    }

    #[test]
    fn asymmetric_metric_is_rejected() {
        let bad = FLAT_C1.replace(
            r#"[["1", "0"], ["0", "1"]]"#,
            r#"[["1", "0.001"], ["0", "1"]]"#,
        );
        match parse_manifold_json(&bad) {
            Err(CurvError::InvariantViolation { residual, .. }) => {
                assert!((residual - 1e-3).abs() < 1e-15)
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn odd_dimension_is_rejected() {
        let text = r#"{"name": "odd", "dimension": 3,
            "metric": [["1","0","0"],["0","1","0"],["0","0","1"]],
            "sample_box": {"center": [0,0,0], "half_width": [1,1,1]}}"#;
        assert!(matches!(
            parse_manifold_json(text),
            Err(CurvError::Dimension(_))
        ));
    }

    #[test]
    fn exit_codes_follow_error_kind() {
        assert_eq!(
            exit_code_for(&CurvError::Syntax {
                offset: 0,
                message: String::new()
            }),
            2
        );
        assert_eq!(
            exit_code_for(&CurvError::OutsideDomain {
                point: vec![],
                value: -1.0
            }),
            3
        );
        assert_eq!(
            exit_code_for(&CurvError::InField {
                pointer: "/metric/0/0".into(),
                source: Box::new(CurvError::EvaluationDomain {
                    func: "log".into(),
                    value: -1.0,
                    location: "log(x1)".into()
                })
            }),
            3
        );
    }

    #[test]
    fn suite_tags_parse() {
        assert_eq!(
            parse_tags("EQ6, eq8,EQ6").unwrap(),
            vec![Tag::EQ6, Tag::EQ8]
        );
        assert!(parse_tags("EQ99").is_err());
        assert!(parse_tags(",").is_err());
    }
}
