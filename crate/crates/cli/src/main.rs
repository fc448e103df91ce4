mod manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use neurosym_core::datasets::{
    balanced_sample, load_folio, load_proofwriter, read_records, validate_folio, write_records, FilterReason,
    ProblemRecord,
};
use neurosym_core::generation::{GenConfig, GeneratorClient, HttpClient, Mode, ReplayClient, StubClient};
use neurosym_core::metrics::{compare, evaluate, line_chart_svg, LabeledRun, McNemarVariant, ReportOptions, Series};
use neurosym_core::pipeline::{read_run_records, run_dataset, RunConfig, RunRecord};
use neurosym_core::prover::{decide, ProofLimits};
use neurosym_core::syntax::{check_signature, parse_closed, Dialect, ParseOptions};
use serde_json::json;

use manifest::Manifest;

#[derive(Parser)]
#[command(name = "neurosym", version, about = "FOL parsing, proving and sampled-translation evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse one FOL expression and print its canonical form.
    Parse {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[command(flatten)]
        syntax: SyntaxArgs,
        /// Print the syntax tree as JSON instead.
        #[arg(long)]
        json: bool,
    },
    /// Decide whether premises entail a conclusion (True / False / Uncertain).
    Prove {
        /// File with one premise expression per line; blank lines and lines
        /// starting with `#` are skipped.
        #[arg(long)]
        premises: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        conclusion: String,
        #[arg(long, default_value_t = 10.0)]
        max_seconds: f64,
        #[command(flatten)]
        syntax: SyntaxArgs,
    },
    /// Drop FOLIO records whose gold annotation is unusable.
    FilterFolio {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        report: PathBuf,
        /// Prover time limit per record for the gold-label check.
        #[arg(long, default_value_t = 60.0)]
        max_seconds: f64,
    },
    /// Draw a depth × label balanced subset of ProofWriter OWA questions.
    SampleProofwriter {
        /// A ProofWriter .jsonl file or a directory of them.
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 20)]
        per_cell: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Generate, label and vote over a dataset.
    Run(RunArgs),
    /// Compute accuracy, confusion, per-depth and comparison statistics.
    Report(ReportArgs),
}

#[derive(Args)]
struct SyntaxArgs {
    #[arg(long, value_enum, default_value_t = DialectArg::Standard)]
    dialect: DialectArg,
    /// Close free variables universally instead of rejecting them.
    #[arg(long)]
    lenient: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum DialectArg {
    Standard,
    Folio,
}

impl SyntaxArgs {
    fn options(&self) -> ParseOptions {
        ParseOptions {
            dialect: match self.dialect {
                DialectArg::Standard => Dialect::Standard,
                DialectArg::Folio => Dialect::Folio,
            },
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ClientKind {
    Http,
    Replay,
    Stub,
}

#[derive(Clone, Copy, ValueEnum)]
enum DatasetFormat {
    /// Normalized records as written by filter-folio / sample-proofwriter.
    Records,
    Folio,
    Proofwriter,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_parser = parse_mode)]
    mode: Mode,
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long, value_enum, default_value_t = DatasetFormat::Records)]
    dataset_format: DatasetFormat,
    #[arg(long, value_enum)]
    client: ClientKind,
    /// Samples per problem.
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Few-shot examples in the prompt (1-8).
    #[arg(long, default_value_t = 8)]
    k_shot: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Predictions file; also the resume checkpoint.
    #[arg(long)]
    out: PathBuf,
    /// Replay fixture (JSONL) for `--client replay`.
    #[arg(long)]
    fixture: Option<PathBuf>,
    /// Completion returned by `--client stub` (repeatable; cycled).
    #[arg(long = "stub-completion")]
    stub_completions: Vec<String>,
    #[arg(long, default_value_t = 4)]
    parallelism: usize,
    #[arg(long)]
    lenient: bool,
    /// Prover time limit per sample.
    #[arg(long, default_value_t = 10.0)]
    max_seconds: f64,
    #[arg(long, default_value_t = 0.8)]
    temperature: f64,
    /// Token cap per completion; defaults to 1024 (FOLIO) or 4096 (ProofWriter).
    #[arg(long)]
    max_tokens: Option<u32>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    predictions: PathBuf,
    /// Further prediction files compared against the first.
    #[arg(long)]
    compare: Vec<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long, default_value_t = 1000)]
    bootstrap: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Use the exact binomial McNemar test instead of the corrected χ².
    #[arg(long)]
    exact_mcnemar: bool,
    /// Write an accuracy-vs-depth SVG chart here.
    #[arg(long)]
    plot_depth: Option<PathBuf>,
    /// Write an accuracy-vs-K SVG chart here.
    #[arg(long)]
    plot_k_sweep: Option<PathBuf>,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse()
}

/// Failure inside the tool rather than in its input.
#[derive(Debug)]
struct Internal(anyhow::Error);

impl std::fmt::Display for Internal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "internal error: {:#}", self.0)
    }
}

impl std::error::Error for Internal {}

fn internal(e: impl Into<anyhow::Error>) -> anyhow::Error {
    anyhow::Error::new(Internal(e.into()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<Internal>() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Parse { expr, syntax, json } => cmd_parse(&expr, &syntax, json),
        Command::Prove { premises, conclusion, max_seconds, syntax } => {
            cmd_prove(&premises, &conclusion, max_seconds, &syntax)
        }
        Command::FilterFolio { input, out, report, max_seconds } => cmd_filter(&input, &out, &report, max_seconds),
        Command::SampleProofwriter { input, out, per_cell, seed } => cmd_sample(&input, &out, per_cell, seed),
        Command::Run(args) => cmd_run(&args),
        Command::Report(args) => cmd_report(&args),
    }
}

fn cmd_parse(expr: &str, syntax: &SyntaxArgs, as_json: bool) -> Result<()> {
    let f = parse_closed(expr, syntax.options(), syntax.lenient).map_err(|d| anyhow::anyhow!("{d}"))?;
    if let Err(diags) = check_signature(std::slice::from_ref(&f)) {
        bail!("{}", diags.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n"));
    }
    if as_json {
        println!("{}", serde_json::to_string_pretty(&f).map_err(internal)?);
    } else {
        println!("{f}");
    }
    Ok(())
}

fn cmd_prove(premises: &Path, conclusion: &str, max_seconds: f64, syntax: &SyntaxArgs) -> Result<()> {
    let text = std::fs::read_to_string(premises).with_context(|| format!("reading {}", premises.display()))?;
    let mut formulas = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let f = parse_closed(line, syntax.options(), syntax.lenient)
            .map_err(|d| anyhow::anyhow!("{}:{}: {d}", premises.display(), i + 1))?;
        formulas.push(f);
    }
    let goal = parse_closed(conclusion, syntax.options(), syntax.lenient).map_err(|d| anyhow::anyhow!("conclusion: {d}"))?;
    formulas.push(goal);
    if let Err(diags) = check_signature(&formulas) {
        bail!("{}", diags.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n"));
    }
    let goal = formulas.pop().expect("conclusion pushed");
    let verdict = decide(&formulas, &goal, &ProofLimits::with_seconds(max_seconds))?;
    println!("{}", verdict.label);
    let mut flags = Vec::new();
    if verdict.flags.resource_limited {
        flags.push("resource-limited");
    }
    if verdict.flags.premises_inconsistent {
        flags.push("premises-inconsistent");
    }
    if !flags.is_empty() {
        println!("flags: {}", flags.join(", "));
    }
    Ok(())
}

fn cmd_filter(input: &Path, out: &Path, report_path: &Path, max_seconds: f64) -> Result<()> {
    let records = load_folio(input)?;
    let (kept, report) = validate_folio(&records, &ProofLimits::with_seconds(max_seconds));
    write_records(out, &kept)?;
    let body = json!({
        "input_records": records.len(),
        "kept": kept.len(),
        "removed": report.removed_ids.len(),
        "by_reason": {
            "unbalanced-parens": report.count(FilterReason::UnbalancedParens),
            "label-mismatch": report.count(FilterReason::LabelMismatch),
            "count-mismatch": report.count(FilterReason::CountMismatch),
            "parse-error": report.count(FilterReason::ParseError),
        },
        "report": report,
    });
    write_json(report_path, &body)?;
    eprintln!("kept {} of {} records", kept.len(), records.len());
    let manifest = Manifest::new("filter-folio", json!({ "max_seconds": max_seconds }), &[input])?;
    manifest.write_for(out)?;
    manifest.write_for(report_path)
}

fn cmd_sample(input: &Path, out: &Path, per_cell: usize, seed: u64) -> Result<()> {
    let records = load_proofwriter(input)?;
    let sample = balanced_sample(&records, per_cell, seed)?;
    write_records(out, &sample)?;
    eprintln!("sampled {} of {} records", sample.len(), records.len());
    let inputs: Vec<PathBuf> = if input.is_dir() {
        let mut files: Vec<PathBuf> = std::fs::read_dir(input)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
            .collect();
        files.sort();
        files
    } else {
        vec![input.to_owned()]
    };
    let inputs: Vec<&Path> = inputs.iter().map(PathBuf::as_path).collect();
    Manifest::new("sample-proofwriter", json!({ "per_cell": per_cell, "seed": seed }), &inputs)?.write_for(out)
}

fn load_dataset(path: &Path, format: DatasetFormat) -> Result<Vec<ProblemRecord>> {
    Ok(match format {
        DatasetFormat::Records => read_records(path)?,
        DatasetFormat::Folio => load_folio(path)?,
        DatasetFormat::Proofwriter => load_proofwriter(path)?,
    })
}

fn cmd_run(args: &RunArgs) -> Result<()> {
    let problems = load_dataset(&args.dataset, args.dataset_format)?;
    let mut generation = match problems.first() {
        Some(p) => GenConfig::for_source(p.source),
        None => GenConfig::default(),
    };
    generation.n_samples = args.k;
    generation.k_shot = args.k_shot;
    generation.temperature = args.temperature;
    generation.seed = Some(args.seed);
    if let Some(m) = args.max_tokens {
        generation.max_tokens = m;
    }
    if args.k == 0 {
        bail!("--k must be at least 1");
    }
    let client: Box<dyn GeneratorClient> = match args.client {
        ClientKind::Http => Box::new(HttpClient::from_env()?),
        ClientKind::Replay => {
            let fixture = args.fixture.as_deref().context("--client replay needs --fixture")?;
            Box::new(ReplayClient::from_path(fixture)?)
        }
        ClientKind::Stub => {
            if args.stub_completions.is_empty() {
                bail!("--client stub needs at least one --stub-completion");
            }
            Box::new(StubClient::new(args.stub_completions.clone()))
        }
    };
    let mut cfg = RunConfig::new(args.mode, generation);
    cfg.limits = ProofLimits::with_seconds(args.max_seconds);
    cfg.lenient = args.lenient;
    cfg.parallelism = args.parallelism;

    let records = run_dataset(client.as_ref(), &cfg, &problems, Some(&args.out)).map_err(internal)?;
    let failures = records.iter().filter(|r| matches!(r, RunRecord::Failure(_))).count();
    eprintln!("{} problems, {} failed", records.len(), failures);

    let config = json!({
        "mode": args.mode,
        "k": args.k,
        "k_shot": args.k_shot,
        "seed": args.seed,
        "temperature": cfg.generation.temperature,
        "max_tokens": cfg.generation.max_tokens,
        "limits": cfg.limits,
        "lenient": args.lenient,
        "parallelism": args.parallelism,
        "client": client.kind(),
        "model": client.model(),
        "stub_completions": args.stub_completions,
    });
    let mut inputs = vec![args.dataset.as_path()];
    inputs.extend(args.fixture.as_deref());
    Manifest::new("run", config, &inputs)?.write_for(&args.out)
}

fn run_name(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn cmd_report(args: &ReportArgs) -> Result<()> {
    let opts = ReportOptions { k: args.k, bootstrap: args.bootstrap, seed: args.seed, ..ReportOptions::default() };
    let mut runs = Vec::new();
    for path in std::iter::once(&args.predictions).chain(&args.compare) {
        let records = read_run_records(path).with_context(|| format!("reading {}", path.display()))?;
        runs.push((run_name(path), LabeledRun::from_records(&records)));
    }
    let mut reports = Vec::new();
    for (name, run) in &runs {
        reports.push((name.clone(), evaluate(run, &opts).with_context(|| format!("evaluating {name}"))?));
    }
    let variant = if args.exact_mcnemar { McNemarVariant::Exact } else { McNemarVariant::Corrected };
    let comparison = (runs.len() > 1).then(|| compare(&runs, variant));
    let listed: Vec<_> = reports.iter().map(|(name, r)| json!({ "name": name, "report": r })).collect();
    let body = json!({ "options": opts, "runs": listed, "comparison": comparison });
    write_json(&args.out, &body)?;

    if let Some(svg) = &args.plot_depth {
        let mut series = Vec::new();
        for (name, report) in &reports {
            let per_depth = report.per_depth.as_ref().with_context(|| format!("{name}: predictions carry no depths"))?;
            let points = per_depth.iter().map(|(d, (m, s))| (*d as f64, *m, *s)).collect();
            series.push(Series { name: name.clone(), points });
        }
        write_text(svg, &line_chart_svg("Accuracy per proof depth", "depth", &series, Some(1.0 / 3.0)))?;
    }
    if let Some(svg) = &args.plot_k_sweep {
        let series: Vec<Series> = reports
            .iter()
            .map(|(name, r)| Series {
                name: name.clone(),
                points: r.k_sweep.iter().map(|(k, (m, s))| (*k as f64, *m, *s)).collect(),
            })
            .collect();
        write_text(svg, &line_chart_svg("Accuracy vs. samples per vote", "K", &series, None))?;
    }
    let inputs: Vec<&Path> = std::iter::once(args.predictions.as_path()).chain(args.compare.iter().map(PathBuf::as_path)).collect();
    Manifest::new("report", serde_json::to_value(&opts).map_err(internal)?, &inputs)?.write_for(&args.out)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(internal)?;
    text.push('\n');
    write_text(path, &text)
}
