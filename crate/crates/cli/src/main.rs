mod artifact;
mod error;
mod render;
mod spec;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use sato_darboux::darboux::{compose_transforms, spectral_algebra};
use sato_darboux::plane::PlaneSpec;
use sato_darboux::verify::{check_inclusion_transform, default_deg_bound, run_suite, SuiteConfig, Verdict, VerifyReport, Witness};
use sato_darboux::Error;

use artifact::{SpectralRecord, TransformRecord, VerifyRecord, COMPOSE_SCHEMA, TRANSFORM_SCHEMA};
use error::CliError;
use spec::{BaseKindSpec, Format, Overrides, SpecFile};

#[derive(Parser)]
#[command(name = "sato-darboux", version, about = "Exact Darboux transformations of planes and their tau functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a transform and write tau_W, the Psi_W tail, P, Q, f, g and h.
    Transform {
        spec: String,
        #[command(flatten)]
        common: Common,
    },
    /// Build a transform and run the verification suite.
    Verify {
        spec: String,
        /// Comma-separated checks to run, in registry order; all by default.
        #[arg(long, value_delimiter = ',')]
        suite: Option<Vec<String>>,
        /// Degree bound for the spectral-algebra checks.
        #[arg(long)]
        deg_bound: Option<usize>,
        /// Spectral parameters in the Fay check, minus one.
        #[arg(long, default_value_t = 1)]
        fay_n: usize,
        /// Compare a regenerated artifact against this golden file.
        #[arg(long)]
        golden: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Spectral algebra A_W up to a degree bound, with its rank and operators.
    Spectral {
        spec: String,
        #[arg(long)]
        deg_bound: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Compose two transforms; the second spec's base is the first's output.
    Compose {
        first: String,
        second: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Weight bound D of the time series.
    #[arg(long)]
    t_order: Option<u32>,
    /// Number M of time variables in the output.
    #[arg(long)]
    t_vars: Option<usize>,
    /// Depth K of the z-tail.
    #[arg(long)]
    z_order: Option<u32>,
    /// Cyclotomic index m for the scalars.
    #[arg(long)]
    cyclotomic: Option<u32>,
    /// Base point x0, an exact scalar.
    #[arg(long, allow_hyphen_values = true)]
    base_point: Option<String>,
    /// Allow a tau function that vanishes at the base point.
    #[arg(long)]
    unnormalized: bool,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<String>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            t_order: self.t_order,
            t_vars: self.t_vars,
            z_order: self.z_order,
            cyclotomic: self.cyclotomic,
            base_point: self.base_point.clone(),
            unnormalized: self.unnormalized,
        }
    }

    fn format(&self, spec: &SpecFile) -> Format {
        self.format.or(spec.format()).unwrap_or(Format::Text)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !matches!(e, CliError::Failed) {
                eprintln!("{e}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Transform { spec, common } => {
            let raw = spec::load(&spec)?;
            let eff = raw.effective(&common.overrides())?;
            let rec = transform_record(&eff)?;
            let text = match common.format(&raw) {
                Format::Text => render::transform_text(&rec),
                Format::Json => json(&rec),
                Format::Latex => render::transform_latex(&rec),
            };
            emit(&common, &text)
        }
        Command::Verify { spec, suite, deg_bound, fay_n, golden, common } => {
            let raw = spec::load(&spec)?;
            let eff = raw.effective(&common.overrides())?;
            let t = spec::build(&eff, "")?;
            let orders = eff.orders();
            let cfg = SuiteConfig { orders, deg_bound, fay_n };
            let mut reports = run_suite(&t, suite.as_deref(), &cfg)?;
            if let Some(path) = golden {
                reports.push(golden_report(&path)?);
            }
            let rec = VerifyRecord::new(&orders, reports);
            let text = match common.format(&raw) {
                Format::Text => render::verify_text(&rec),
                Format::Json => json(&rec),
                Format::Latex => render::verify_latex(&rec),
            };
            emit(&common, &text)?;
            if rec.failures > 0 {
                return Err(CliError::Failed);
            }
            Ok(())
        }
        Command::Spectral { spec, deg_bound, common } => {
            let raw = spec::load(&spec)?;
            let eff = raw.effective(&common.overrides())?;
            let t = spec::build(&eff, "")?;
            let bound = deg_bound.unwrap_or_else(|| default_deg_bound(&t));
            let rec = SpectralRecord::new(&spectral_algebra(&t, bound)?);
            let text = match common.format(&raw) {
                Format::Text => render::spectral_text(&rec),
                Format::Json => json(&rec),
                Format::Latex => render::spectral_latex(&rec),
            };
            emit(&common, &text)
        }
        Command::Compose { first, second, common } => {
            let a = spec::load(&first)?.effective(&common.overrides())?;
            let b = spec::load(&second)?;
            let joined = join_specs(&a, &b)?;
            let rec = compose_record(&joined)?;
            let text = match common.format(&b) {
                Format::Text => render::transform_text(&rec),
                Format::Json => json(&rec),
                Format::Latex => render::transform_latex(&rec),
            };
            emit(&common, &text)?;
            match rec.inclusion.as_ref().map(|r| &r.verdict) {
                Some(Verdict::Fail { .. }) => Err(CliError::Failed),
                _ => Ok(()),
            }
        }
    }
}

fn transform_record(eff: &SpecFile) -> Result<TransformRecord, CliError> {
    let t = spec::build(eff, "")?;
    Ok(TransformRecord::new(eff, &t))
}

/// The second spec with its base bound to the first, sharing its orders,
/// field index and base point.
fn join_specs(a: &SpecFile, b: &SpecFile) -> Result<SpecFile, CliError> {
    if b.base.kind != BaseKindSpec::Transformed {
        return Err(Error::Precondition("the second spec must declare a transformed base".into()).into());
    }
    if let Some(declared) = &b.base.from {
        let declared = spec::inherit(declared, a).effective(&Overrides::default())?;
        if declared.base != a.base || declared.conditions != a.conditions || declared.kernel != a.kernel {
            return Err(Error::Precondition("incompatible bases: the second spec is not built over the first".into()).into());
        }
    }
    let mut joined = spec::inherit(b, a);
    joined.base.from = Some(Box::new(a.clone()));
    joined.base.unnormalized |= a.base.unnormalized;
    joined.output = None;
    Ok(joined)
}

/// Rebuilds both halves of a joined spec and composes them.
fn compose_record(joined: &SpecFile) -> Result<TransformRecord, CliError> {
    let a = joined.base.from.as_deref().ok_or_else(|| CliError::Usage("composite spec without a base".into()))?;
    let t1 = spec::build(a, "/base/from")?;
    let t2 = spec::build_over_plane(joined, PlaneSpec::transformed(t1.clone()), "")?;
    let t = compose_transforms(&t1, &t2)?;
    let orders = joined.orders();
    let inclusion = check_inclusion_transform(&t, &orders);
    if let Verdict::Skipped { reason } = &inclusion.verdict {
        return Err(Error::TruncationTooShallow(format!("combined inclusion untestable: {reason}")).into());
    }
    let mut rec = TransformRecord::new(joined, &t);
    rec.schema = COMPOSE_SCHEMA;
    rec.inclusion = Some(inclusion);
    Ok(rec)
}

fn regenerate(golden: &Value) -> Result<Value, CliError> {
    let schema = golden.get("schema").and_then(Value::as_str).unwrap_or("");
    let text = golden.to_string();
    let eff = spec::parse(&text)?;
    let rec = match schema {
        TRANSFORM_SCHEMA => transform_record(&eff)?,
        COMPOSE_SCHEMA => compose_record(&eff)?,
        other => return Err(CliError::Schema { pointer: "/schema".into(), message: format!("not a transform artifact: `{other}`") }),
    };
    Ok(serde_json::to_value(&rec).expect("records serialize"))
}

/// Rebuilds a stored artifact from its embedded spec and compares.
fn golden_report(path: &str) -> Result<VerifyReport, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{path}: {e}")))?;
    let golden: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Schema { pointer: String::new(), message: format!("{path}: malformed JSON: {e}") })?;
    let fresh = regenerate(&golden)?;
    let verdict = match first_difference(&golden, &fresh, String::new()) {
        None => Verdict::ExactPass,
        Some((ptr, stored, rebuilt)) => {
            Verdict::Fail { witness: Witness::new(if ptr.is_empty() { "/".into() } else { ptr }, rebuilt, stored) }
        }
    };
    Ok(VerifyReport::new("golden", "stored artifact = rebuilt artifact", path.to_string(), verdict))
}

/// First JSON pointer where the stored and rebuilt documents disagree, with
/// (stored, rebuilt) values.
fn first_difference(a: &Value, b: &Value, at: String) -> Option<(String, String, String)> {
    match (a, b) {
        (Value::Object(x), Value::Object(y)) => {
            let mut keys: Vec<&String> = x.keys().chain(y.keys()).collect();
            keys.sort();
            keys.dedup();
            keys.into_iter().find_map(|k| match (x.get(k), y.get(k)) {
                (Some(u), Some(v)) => first_difference(u, v, format!("{at}/{k}")),
                (u, v) => Some((format!("{at}/{k}"), show(u), show(v))),
            })
        }
        (Value::Array(x), Value::Array(y)) => (0..x.len().max(y.len())).find_map(|i| match (x.get(i), y.get(i)) {
            (Some(u), Some(v)) => first_difference(u, v, format!("{at}/{i}")),
            (u, v) => Some((format!("{at}/{i}"), show(u), show(v))),
        }),
        _ if a == b => None,
        _ => Some((at, a.to_string(), b.to_string())),
    }
}

fn show(v: Option<&Value>) -> String {
    v.map_or_else(|| "(absent)".into(), Value::to_string)
}

fn json<T: Serialize>(rec: &T) -> String {
    let mut s = serde_json::to_string_pretty(rec).expect("records serialize");
    s.push('\n');
    s
}

fn emit(common: &Common, text: &str) -> Result<(), CliError> {
    match &common.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Usage(format!("{path}: {e}"))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| CliError::Usage(format!("stdout: {e}")))
        }
    }
}
