//! The `encg` command-line surface.
//!
//! Everything here returns a [`CommandOutcome`] instead of touching the
//! process, so the binary is a thin wrapper and tests drive commands
//! in-process. Exit codes: 0 success, 1 user or input error, 2 an oracle or
//! invariant check failed.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::experiment::{
    run_batch, CountRange, ExperimentConfig, ExperimentError, ExperimentSeries, PileMode, Preset,
    SourcePolicy, TargetChoice,
};
use crate::graph::{
    configuration_efficiency, hidden_stddev, mpe, violational_stddev, EncapsulatedGraph,
};
use crate::persistence::{ingest_manifest, read_graph, write_graph, write_series_csv};
use crate::transform::{CheckError, Checker, Transformation};
use crate::verify::{run_verification, Property, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USER: i32 = 1;
pub const EXIT_CHECK: i32 = 2;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CommandOutcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CommandOutcome {
    fn ok(stdout: String) -> Self {
        CommandOutcome {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn user_error(message: impl std::fmt::Display) -> Self {
        CommandOutcome {
            code: EXIT_USER,
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
        }
    }

    fn check_failure(stdout: String, message: impl std::fmt::Display) -> Self {
        CommandOutcome {
            code: EXIT_CHECK,
            stdout,
            stderr: format!("check failed: {message}\n"),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "encg",
    version,
    about = "Maximum potential edges of encapsulated graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a seeded random graph file.
    Gen(GenArgs),
    /// Print node totals, MPE split, distribution spreads and efficiency.
    Mpe { graph: PathBuf },
    /// Print the closed-form MPE change of one transformation.
    Predict {
        graph: PathBuf,
        #[command(subcommand)]
        transformation: TransformArgs,
    },
    /// Apply one transformation (oracle-checked) and write the result.
    Apply {
        graph: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(subcommand)]
        transformation: TransformArgs,
    },
    /// Run pile experiments and write one CSV series per run.
    Experiment(ExperimentArgs),
    /// Randomized differential check of every delta formula.
    Verify(VerifyArgs),
    /// Turn a node manifest into a graph file.
    Ingest {
        manifest: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, default_value_t = 100)]
    pub regions: usize,
    #[arg(long, default_value_t = 0)]
    pub hidden_min: u64,
    #[arg(long, default_value_t = 30)]
    pub hidden_max: u64,
    #[arg(long, default_value_t = 1)]
    pub viol_min: u64,
    #[arg(long, default_value_t = 1)]
    pub viol_max: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Graph file to write; printed to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum TransformArgs {
    AddViolational {
        #[arg(long)]
        region: usize,
        #[arg(short, allow_hyphen_values = true)]
        m: i64,
    },
    AddHidden {
        #[arg(long)]
        region: usize,
        #[arg(short, allow_hyphen_values = true)]
        m: i64,
    },
    TranslateViolational {
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
        #[arg(short, allow_hyphen_values = true)]
        m: i64,
    },
    TranslateHidden {
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
        #[arg(short, allow_hyphen_values = true)]
        m: i64,
    },
    Convert {
        #[arg(long)]
        region: usize,
        #[arg(short, allow_hyphen_values = true)]
        m: i64,
    },
}

impl From<TransformArgs> for Transformation {
    fn from(args: TransformArgs) -> Self {
        match args {
            TransformArgs::AddViolational { region, m } => {
                Transformation::AddViolational { region, m }
            }
            TransformArgs::AddHidden { region, m } => Transformation::AddHidden { region, m },
            TransformArgs::TranslateViolational { from, to, m } => {
                Transformation::TranslateViolational { from, to, m }
            }
            TransformArgs::TranslateHidden { from, to, m } => {
                Transformation::TranslateHidden { from, to, m }
            }
            TransformArgs::Convert { region, m } => Transformation::Convert { region, m },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Hidden,
    Violational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Drain,
    RoundRobin,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long, default_value = "fig1")]
    pub preset: Preset,
    /// Overrides the preset's pile mode.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long)]
    pub regions: Option<usize>,
    #[arg(long)]
    pub hidden_min: Option<u64>,
    #[arg(long)]
    pub hidden_max: Option<u64>,
    #[arg(long)]
    pub viol_min: Option<u64>,
    #[arg(long)]
    pub viol_max: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub runs: usize,
    /// Region index, or `random`.
    #[arg(long, default_value = "random")]
    pub target: String,
    #[arg(long, value_enum, default_value_t = PolicyArg::Drain)]
    pub policy: PolicyArg,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 1000)]
    pub cases: u64,
    #[arg(long, default_value_t = 10)]
    pub max_regions: usize,
    #[arg(long, default_value_t = 8)]
    pub max_count: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> CommandOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with_checker(args, &Checker::default())
}

/// Like [`run`], with the checker used by `apply` and `verify` supplied by
/// the caller.
pub fn run_with_checker<I, T>(args: I, checker: &Checker) -> CommandOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli.command, checker),
        Err(e) => {
            let rendered = e.render().to_string();
            if e.use_stderr() {
                CommandOutcome {
                    code: EXIT_USER,
                    stdout: String::new(),
                    stderr: rendered,
                }
            } else {
                CommandOutcome::ok(rendered)
            }
        }
    }
}

pub fn execute(command: Command, checker: &Checker) -> CommandOutcome {
    match command {
        Command::Gen(args) => cmd_gen(args),
        Command::Mpe { graph } => {
            load_graph(&graph).map_or_else(|e| e, |g| CommandOutcome::ok(summary(&g)))
        }
        Command::Predict {
            graph,
            transformation,
        } => cmd_predict(&graph, transformation.into()),
        Command::Apply {
            graph,
            out,
            transformation,
        } => cmd_apply(&graph, &out, transformation.into(), checker),
        Command::Experiment(args) => cmd_experiment(args),
        Command::Verify(args) => cmd_verify(args, checker),
        Command::Ingest { manifest, out } => cmd_ingest(&manifest, out.as_deref()),
    }
}

fn read_text(path: &Path) -> Result<String, CommandOutcome> {
    fs::read_to_string(path)
        .map_err(|e| CommandOutcome::user_error(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), CommandOutcome> {
    fs::write(path, text)
        .map_err(|e| CommandOutcome::user_error(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<EncapsulatedGraph, CommandOutcome> {
    let text = read_text(path)?;
    read_graph(&text).map_err(|e| CommandOutcome::user_error(format!("{}: {e}", path.display())))
}

/// The metrics block printed by `mpe` and `ingest`.
pub fn summary(graph: &EncapsulatedGraph) -> String {
    let breakdown = mpe(graph);
    let spread =
        |stats: Result<crate::graph::DistributionStats, _>| stats.map(|s| s.stddev).unwrap_or(0.0);
    let mut out = String::new();
    let _ = writeln!(out, "regions      {}", graph.region_count());
    let _ = writeln!(out, "nodes        {}", graph.node_count());
    let _ = writeln!(out, "violational  {}", graph.violational_count());
    let _ = writeln!(out, "s_in         {}", breakdown.internal);
    let _ = writeln!(out, "s_ex         {}", breakdown.external);
    let _ = writeln!(out, "s            {}", breakdown.total);
    let _ = writeln!(out, "hidden_sd    {:.6}", spread(hidden_stddev(graph)));
    let _ = writeln!(out, "viol_sd      {:.6}", spread(violational_stddev(graph)));
    let _ = writeln!(out, "ce           {:.6}", configuration_efficiency(graph));
    out
}

fn cmd_gen(args: GenArgs) -> CommandOutcome {
    let config = ExperimentConfig {
        regions: args.regions,
        hidden: CountRange::new(args.hidden_min, args.hidden_max),
        violational: CountRange::new(args.viol_min, args.viol_max),
        seed: args.seed,
        ..ExperimentConfig::preset(Preset::Fig1, args.seed)
    };
    let graph = match crate::experiment::generate_random_graph(&config) {
        Ok(g) => g,
        Err(e) => return CommandOutcome::user_error(e),
    };
    let text = write_graph(&graph);
    match args.out {
        Some(path) => match write_text(&path, &text) {
            Ok(()) => CommandOutcome::ok(format!(
                "wrote {} regions to {}\n",
                graph.region_count(),
                path.display()
            )),
            Err(e) => e,
        },
        None => CommandOutcome::ok(text),
    }
}

fn delta_lines(
    out: &mut String,
    t: &Transformation,
    report: &crate::transform::DeltaReport,
    before: u64,
) {
    let _ = writeln!(out, "transformation {t}");
    let _ = writeln!(out, "delta {:+}", report.total);
    if let (Some(internal), Some(external)) = (report.internal, report.external) {
        let _ = writeln!(out, "delta_in {internal:+}");
        let _ = writeln!(out, "delta_ex {external:+}");
    }
    let _ = writeln!(out, "s_before {before}");
    let _ = writeln!(out, "s_after {}", before as i64 + report.total);
}

fn cmd_predict(path: &Path, t: Transformation) -> CommandOutcome {
    let graph = match load_graph(path) {
        Ok(g) => g,
        Err(e) => return e,
    };
    match crate::transform::predict_delta(&graph, &t) {
        Ok(report) => {
            let mut out = String::new();
            delta_lines(&mut out, &t, &report, mpe(&graph).total);
            CommandOutcome::ok(out)
        }
        Err(e) => CommandOutcome::user_error(e),
    }
}

fn cmd_apply(path: &Path, out_path: &Path, t: Transformation, checker: &Checker) -> CommandOutcome {
    let graph = match load_graph(path) {
        Ok(g) => g,
        Err(e) => return e,
    };
    match checker.apply_checked(&graph, &t) {
        Ok((after, report)) => {
            if let Err(e) = write_text(out_path, &write_graph(&after)) {
                return e;
            }
            let mut out = String::new();
            delta_lines(&mut out, &t, &report, mpe(&graph).total);
            let _ = writeln!(out, "wrote {}", out_path.display());
            CommandOutcome::ok(out)
        }
        Err(CheckError::Invalid(e)) => CommandOutcome::user_error(e),
        Err(CheckError::Mismatch(m)) => CommandOutcome::check_failure(String::new(), m),
    }
}

fn experiment_config(args: &ExperimentArgs) -> Result<ExperimentConfig, String> {
    let mut config = ExperimentConfig::preset(args.preset, args.seed);
    if let Some(mode) = args.mode {
        config.mode = match mode {
            ModeArg::Hidden => PileMode::Hidden,
            ModeArg::Violational => PileMode::Violational,
        };
    }
    if let Some(regions) = args.regions {
        config.regions = regions;
    }
    config.hidden.min = args.hidden_min.unwrap_or(config.hidden.min);
    config.hidden.max = args.hidden_max.unwrap_or(config.hidden.max);
    config.violational.min = args.viol_min.unwrap_or(config.violational.min);
    config.violational.max = args.viol_max.unwrap_or(config.violational.max);
    config.policy = match args.policy {
        PolicyArg::Drain => SourcePolicy::Drain,
        PolicyArg::RoundRobin => SourcePolicy::RoundRobin,
    };
    config.target =
        match args.target.as_str() {
            "random" => TargetChoice::Random,
            index => TargetChoice::Index(index.parse().map_err(|_| {
                format!("--target must be a region index or `random`, got `{index}`")
            })?),
        };
    Ok(config)
}

/// CSV file name for run `index` of an experiment batch.
pub fn series_file_name(index: usize) -> String {
    format!("series_{index:03}.csv")
}

fn cmd_experiment(args: ExperimentArgs) -> CommandOutcome {
    let config = match experiment_config(&args) {
        Ok(c) => c,
        Err(e) => return CommandOutcome::user_error(e),
    };
    let batch: Vec<ExperimentSeries> = match run_batch(&config, args.runs) {
        Ok(b) => b,
        Err(ExperimentError::Engine { step, source }) => {
            return CommandOutcome::check_failure(String::new(), format!("step {step}: {source}"))
        }
        Err(e) => return CommandOutcome::user_error(e),
    };
    if let Err(e) = fs::create_dir_all(&args.out_dir) {
        return CommandOutcome::user_error(format!("{}: {e}", args.out_dir.display()));
    }
    let mut out = String::new();
    let _ = writeln!(out, "run  seed  target  steps  ce_initial  ce_final");
    for (index, series) in batch.iter().enumerate() {
        let path = args.out_dir.join(series_file_name(index));
        if let Err(e) = write_text(&path, &write_series_csv(series)) {
            return e;
        }
        let seed = series.config.map_or(0, |c| c.seed);
        let _ = writeln!(
            out,
            "{index:<4} {seed:<5} {:<7} {:<6} {:.6}    {:.6}",
            series.target,
            series.steps(),
            series.first().ce,
            series.last().ce
        );
    }
    let _ = writeln!(
        out,
        "wrote {} series to {}",
        batch.len(),
        args.out_dir.display()
    );
    CommandOutcome::ok(out)
}

fn cmd_verify(args: VerifyArgs, checker: &Checker) -> CommandOutcome {
    if args.cases == 0 {
        return CommandOutcome::user_error("--cases must be at least 1");
    }
    if args.max_regions == 0 {
        return CommandOutcome::user_error("--max-regions must be at least 1");
    }
    let config = VerifyConfig {
        cases: args.cases,
        max_regions: args.max_regions,
        max_count: args.max_count,
        seed: args.seed,
    };
    match run_verification(&config, checker) {
        Ok(report) => {
            let mut out = String::new();
            for p in Property::ALL {
                let _ = writeln!(out, "{:<14} {} passed", p.name(), report.passed(p));
            }
            let _ = writeln!(out, "all {} cases passed", report.cases);
            CommandOutcome::ok(out)
        }
        Err(failure) => CommandOutcome::check_failure(String::new(), failure),
    }
}

fn cmd_ingest(path: &Path, out: Option<&Path>) -> CommandOutcome {
    let text = match read_text(path) {
        Ok(t) => t,
        Err(e) => return e,
    };
    let graph = match ingest_manifest(&text) {
        Ok(g) => g,
        Err(e) => return CommandOutcome::user_error(format!("{}: {e}", path.display())),
    };
    let mut stdout = summary(&graph);
    if let Some(out) = out {
        if let Err(e) = write_text(out, &write_graph(&graph)) {
            return e;
        }
        let _ = writeln!(stdout, "wrote {}", out.display());
    }
    CommandOutcome::ok(stdout)
}
