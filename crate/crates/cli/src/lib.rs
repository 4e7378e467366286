//! Command-line front end for `bicheck`.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use bicheck::dsl;
use bicheck::model::Hierarchy;
use bicheck::refinement::{CheckConfig, Checker, Mode};
use bicheck::report::{Command, ErrorKind, Report, ReportConfig, ReportError, ReportFinding};
use bicheck::semantics::{DumpError, Semantics, SemanticsError, DEFAULT_STATE_CAP};
use bicheck::system::{compare_substitutability, lint_freeness, ConstraintCheck, SimConfig, SystemError};

#[derive(Debug, Parser)]
#[command(name = "bicheck", version, about = "Behavioural-inheritance conformance checker")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Discharge the refinement obligations of every subclass edge.
    Check {
        spec: PathBuf,
        #[command(flatten)]
        opts: CheckOpts,
        /// Also write the operation relations to this directory.
        #[arg(long, value_name = "DIR")]
        dump_relations: Option<PathBuf>,
    },
    /// Flag global constraints that may break substitutability.
    Lint {
        spec: PathBuf,
        /// Treat constraints below a concrete ancestor as errors.
        #[arg(long)]
        strict: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Compare a fresh object of each class over all call sequences.
    Trace {
        spec: PathBuf,
        class_a: String,
        class_b: String,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = CliMode::Nonblocking)]
        mode: CliMode,
        /// When global constraints are enforced: before a call (as a
        /// guard) or on the state it produces.
        #[arg(long, value_enum, default_value_t = CliCheck::Pre)]
        constraint_check: CliCheck,
        /// Deepest trace accepted.
        #[arg(long, default_value_t = SimConfig::default().max_depth)]
        max_depth: usize,
        #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
        state_cap: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Write every operation relation as `<Class>.<op>.rel`.
    Dump {
        spec: PathBuf,
        #[arg(long, value_name = "DIR")]
        dump_relations: PathBuf,
        #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
        state_cap: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Debug, Args)]
pub struct CheckOpts {
    #[arg(long, value_enum, default_value_t = CliMode::Nonblocking)]
    mode: CliMode,
    /// Comma-separated relaxations.
    #[arg(long, value_enum, value_delimiter = ',')]
    relax: Vec<Relax>,
    #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
    state_cap: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CliMode {
    Nonblocking,
    Blocking,
}

impl From<CliMode> for Mode {
    fn from(m: CliMode) -> Self {
        match m {
            CliMode::Nonblocking => Mode::Nonblocking,
            CliMode::Blocking => Mode::Blocking,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Relax {
    VirtualOps,
    AbstractClasses,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CliCheck {
    Pre,
    Post,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// What a run printed and how it ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn load(path: &Path, report: &mut Report) -> Option<Hierarchy> {
    let source = match fs::read_to_string(path) {
        Ok(s) => s,
        Err(e) => {
            report
                .errors
                .push(ReportError::new(ErrorKind::Io, format!("{}: {e}", path.display())));
            return None;
        }
    };
    match dsl::parse_named(&source, &path.display().to_string()) {
        Ok(h) => Some(h),
        Err(errs) => {
            report.errors.extend(errs.iter().map(ReportError::from_parse));
            None
        }
    }
}

fn semantics_error(e: &SemanticsError) -> ReportError {
    let kind = match e {
        SemanticsError::StateSpaceTooLarge { .. } => ErrorKind::Cap,
        _ => ErrorKind::Internal,
    };
    ReportError::new(kind, e.to_string())
}

fn system_error(e: &SystemError) -> ReportError {
    match e {
        SystemError::Semantics(s) => semantics_error(s),
        e if e.is_cap() => ReportError::new(ErrorKind::Cap, e.to_string()),
        e => ReportError::new(ErrorKind::Validation, e.to_string()),
    }
}

fn dump(sem: &Semantics<'_>, dir: &Path, report: &mut Report) {
    match sem.dump_relations(dir) {
        Ok(files) => report
            .findings
            .extend(files.into_iter().map(|file| ReportFinding::Relation { file })),
        Err(DumpError::Semantics(e)) => report.errors.push(semantics_error(&e)),
        Err(DumpError::Io(e)) => report.errors.push(ReportError::new(ErrorKind::Io, e.to_string())),
    }
}

fn finish(report: Report, format: Format) -> Outcome {
    let code = report.exit_code();
    let (stdout, stderr) = match format {
        Format::Json => (report.to_json() + "\n", String::new()),
        Format::Text => (report.to_text(), report.errors_text()),
    };
    Outcome { code, stdout, stderr }
}

pub fn run(cli: Cli) -> Outcome {
    match cli.command {
        Cmd::Check {
            spec,
            opts,
            dump_relations,
        } => {
            let config = CheckConfig {
                mode: opts.mode.into(),
                relax_virtual_ops: opts.relax.contains(&Relax::VirtualOps),
                relax_abstract_classes: opts.relax.contains(&Relax::AbstractClasses),
                state_cap: opts.state_cap,
            };
            let mut report = Report::new(Command::Check, ReportConfig::from_check(&config));
            let Some(h) = load(&spec, &mut report) else {
                return finish(report, opts.format);
            };
            let checker = Checker::new(&h, config);
            report = match checker.check_hierarchy() {
                Ok(r) => report.with_check(&r),
                Err(e) => {
                    report.errors.push(semantics_error(&e));
                    report
                }
            };
            if let Some(dir) = dump_relations {
                if report.errors.is_empty() {
                    dump(checker.semantics(), &dir, &mut report);
                }
            }
            finish(report, opts.format)
        }
        Cmd::Lint { spec, strict, format } => {
            let config = ReportConfig {
                strict: Some(strict),
                ..ReportConfig::default()
            };
            let mut report = Report::new(Command::Lint, config);
            let Some(h) = load(&spec, &mut report) else {
                return finish(report, format);
            };
            let findings = lint_freeness(&h, strict);
            finish(report.with_lint(&findings), format)
        }
        Cmd::Trace {
            spec,
            class_a,
            class_b,
            depth,
            mode,
            constraint_check,
            max_depth,
            state_cap,
            format,
        } => {
            let sim = SimConfig {
                mode: mode.into(),
                constraint_check: match constraint_check {
                    CliCheck::Pre => ConstraintCheck::BeforeCall,
                    CliCheck::Post => ConstraintCheck::AfterState,
                },
                max_depth,
                ..SimConfig::default()
            };
            let config = ReportConfig {
                mode: Some(sim.mode.to_string()),
                state_cap: Some(state_cap),
                classes: Some([class_a.clone(), class_b.clone()]),
                depth: Some(depth),
                constraint_check: Some(sim.constraint_check),
                ..ReportConfig::default()
            };
            let mut report = Report::new(Command::Trace, config);
            let Some(h) = load(&spec, &mut report) else {
                return finish(report, format);
            };
            let sem = Semantics::new(&h, state_cap);
            match compare_substitutability(&sem, &class_a, &class_b, depth, &sim) {
                Ok(c) => report = report.with_comparison(&c),
                Err(e) => report.errors.push(system_error(&e)),
            }
            finish(report, format)
        }
        Cmd::Dump {
            spec,
            dump_relations,
            state_cap,
            format,
        } => {
            let config = ReportConfig {
                state_cap: Some(state_cap),
                ..ReportConfig::default()
            };
            let mut report = Report::new(Command::Dump, config);
            let Some(h) = load(&spec, &mut report) else {
                return finish(report, format);
            };
            let sem = Semantics::new(&h, state_cap);
            dump(&sem, &dump_relations, &mut report);
            finish(report, format)
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let (stdout, stderr) = if e.use_stderr() {
                (String::new(), rendered)
            } else {
                (rendered, String::new())
            };
            Outcome { code, stdout, stderr }
        }
    }
}
