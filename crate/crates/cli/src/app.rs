//! Command-line surface. `run` is the whole program minus process exit, so
//! tests can drive it in-process.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::battery::{default_battery, run_battery};
use crate::construct::construct;
use crate::doc::{Bundle, Document};
use crate::error::{CliError, CliResult, EXIT_FAIL, EXIT_INPUT};
use crate::load::{parse_scalar, Resolver};
use crate::pipeline::roundtrip;
use crate::report::{Limits, RunReport};

pub const DEFAULT_MAX_ARITY: usize = 4;
pub const DEFAULT_MAX_WORD: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "homalg", version, about = "Exact checks and constructions for homotopy algebra structures over ℚ")]
pub struct Cli {
    /// Largest arity at which identities are evaluated [default: 4]
    #[arg(long, global = true)]
    pub max_arity: Option<usize>,
    /// Word-length truncation for symmetric algebras [default: 3]
    #[arg(long, global = true)]
    pub max_word: Option<usize>,
    /// Worker threads for the checkers
    #[arg(long, global = true, env = "HOMALG_JOBS")]
    pub jobs: Option<usize>,
    /// Report format on stdout
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a checker battery on one bundle
    Check {
        doc: PathBuf,
        /// Bundle to check
        #[arg(long)]
        bundle: String,
        /// Override the battery implied by the bundle kind
        #[arg(long)]
        battery: Option<String>,
        /// Also write the JSON report to this file
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Build a new structure and write it as a document with a certificate
    Construct {
        doc: PathBuf,
        /// Construction name (trivial-extension, dualize, cyclic-completion, lift,
        /// rb-extension, precy, psi-brackets, extract-brackets, schedler, sym-poisson)
        #[arg(long)]
        op: String,
        /// Source bundle; may be omitted when only one bundle fits
        #[arg(long)]
        bundle: Option<String>,
        /// Construction parameter, `key=value`
        #[arg(long = "param", value_parser = parse_param)]
        params: Vec<(String, String)>,
        /// Output document; without it the document goes to stdout and the report to stderr
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Push a structure through an equivalence and back
    Roundtrip {
        doc: PathBuf,
        /// rb-aybe-double-lie or psi-precy
        #[arg(long)]
        pipeline: String,
        /// Source bundle; may be omitted when only one bundle fits
        #[arg(long)]
        bundle: Option<String>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Print a document in canonical form
    Fmt {
        doc: PathBuf,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
}

fn parse_param(s: &str) -> Result<(String, String), String> {
    s.split_once('=')
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .ok_or_else(|| format!("expected key=value, found `{s}`"))
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Execution {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Execution {
    fn error(e: &CliError) -> Self {
        Execution { code: e.exit_code(), stdout: String::new(), stderr: format!("{e}\n") }
    }
}

pub fn read_document(path: &Path) -> CliResult<Document> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    Document::parse(&text).map_err(|e| match e {
        CliError::Input(m) => CliError::Input(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

/// Flag, then document, then default.
fn limits(cli: &Cli, doc: &Document) -> Limits {
    Limits {
        max_arity: cli.max_arity.or(doc.cutoffs.max_arity).unwrap_or(DEFAULT_MAX_ARITY),
        max_word: cli.max_word.or(doc.cutoffs.max_word).unwrap_or(DEFAULT_MAX_WORD),
    }
}

/// Coefficients in lowest terms; everything else as written.
pub fn canonicalize(doc: &Document) -> CliResult<Document> {
    Resolver::new(doc)?;
    let mut out = doc.clone();
    for (i, op) in out.operations.iter_mut().enumerate() {
        for (j, e) in op.entries.iter_mut().enumerate() {
            let at = format!("operations[{i}] `{}` entries[{j}] field c", op.name);
            e.c = parse_scalar(&e.c, &at)?.to_string();
        }
    }
    for (name, b) in out.bundles.iter_mut() {
        if let Bundle::TensorFamily { elements, .. } = b {
            for (k, terms) in elements.iter_mut() {
                for (j, t) in terms.iter_mut().enumerate() {
                    let at = format!("bundles[`{name}`] elements[`{k}`][{j}] field c");
                    t.c = parse_scalar(&t.c, &at)?.to_string();
                }
            }
        }
    }
    Ok(out)
}

fn emit(report: &RunReport, format: Format, path: Option<&PathBuf>) -> CliResult<Execution> {
    if let Some(p) = path {
        write_file(p, &report.json())?;
    }
    let stdout = match format {
        Format::Text => report.text(),
        Format::Json => report.json(),
    };
    Ok(Execution { code: if report.passed() { 0 } else { EXIT_FAIL }, stdout, stderr: String::new() })
}

fn dispatch(cli: &Cli) -> CliResult<Execution> {
    match &cli.command {
        Command::Check { doc, bundle, battery, report } => {
            let d = read_document(doc)?;
            let res = Resolver::new(&d)?;
            let lim = limits(cli, &d);
            let b =
                d.bundles.get(bundle).ok_or_else(|| CliError::input(format!("--bundle: unknown bundle `{bundle}`")))?;
            let battery = battery.clone().unwrap_or_else(|| default_battery(b).to_string());
            let out = run_battery(&res, bundle, &battery, lim)?;
            let command = vec![
                "check".into(),
                doc.display().to_string(),
                "--bundle".into(),
                bundle.clone(),
                "--battery".into(),
                battery,
            ];
            emit(&RunReport::new(command, lim, out.reports, out.notes), cli.format, report.as_ref())
        }
        Command::Construct { doc, op, bundle, params, output } => {
            let d = read_document(doc)?;
            let res = Resolver::new(&d)?;
            let lim = limits(cli, &d);
            let params: BTreeMap<String, String> = params.iter().cloned().collect();
            let built = construct(&res, op, bundle.as_deref(), &params, lim)?;
            let mut command = vec![
                "construct".into(),
                doc.display().to_string(),
                "--op".into(),
                op.clone(),
                "--bundle".into(),
                built.source.clone(),
            ];
            for (k, v) in &params {
                command.push("--param".into());
                command.push(format!("{k}={v}"));
            }
            let report = RunReport::new(command, lim, built.reports, built.notes);
            let text = built.document.print();
            let mut exec = emit(&report, cli.format, None)?;
            if !report.passed() {
                exec.stderr = "the constructed structure failed its re-check; nothing written\n".into();
                return Ok(exec);
            }
            match output {
                Some(p) => write_file(p, &text)?,
                None => {
                    exec.stderr = exec.stdout;
                    exec.stdout = text;
                }
            }
            Ok(exec)
        }
        Command::Roundtrip { doc, pipeline, bundle, report } => {
            let d = read_document(doc)?;
            let res = Resolver::new(&d)?;
            let lim = limits(cli, &d);
            let (reports, notes) = roundtrip(&res, pipeline, bundle.as_deref(), lim)?;
            let mut command =
                vec!["roundtrip".into(), doc.display().to_string(), "--pipeline".into(), pipeline.clone()];
            if let Some(b) = bundle {
                command.push("--bundle".into());
                command.push(b.clone());
            }
            let mut r = RunReport::new(command, lim, reports, notes);
            if r.notes.iter().any(|n| n.starts_with("refused")) {
                r.verdict = homalg::multiop::Verdict::Fail;
            }
            emit(&r, cli.format, report.as_ref())
        }
        Command::Fmt { doc, output } => {
            let text = canonicalize(&read_document(doc)?)?.print();
            match output {
                Some(p) => {
                    write_file(p, &text)?;
                    Ok(Execution { code: 0, stdout: String::new(), stderr: String::new() })
                }
                None => Ok(Execution { code: 0, stdout: text, stderr: String::new() }),
            }
        }
    }
}

/// Parse arguments (the first is the program name) and execute.
pub fn run<I, T>(args: I) -> Execution
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Execution { code, stdout: text, stderr: String::new() }
            } else {
                Execution { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let go = || dispatch(&cli).unwrap_or_else(|e| Execution::error(&e));
    match cli.jobs {
        Some(0) => Execution::error(&CliError::input("--jobs: must be at least 1")),
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(go),
            Err(e) => Execution::error(&CliError::input(format!("--jobs: {e}"))),
        },
        None => go(),
    }
}
