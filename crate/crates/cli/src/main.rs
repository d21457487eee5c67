//! `hybridmbt` command-line front end.
//!
//! Exit codes: 0 success, 2 validation failure, 3 I/O failure, 4 stage
//! failure.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hybridmbt::appspec::{parse_app_spec, AppSpec, Diagnostic};
use hybridmbt::crawler::{export_model_dot, run_strategy, CrawlConfig, FsmModel, Strategy};
use hybridmbt::event_tracking::track_events;
use hybridmbt::fixtures;
use hybridmbt::mutation::{generate_mutants, run_mutation, select_mutants};
use hybridmbt::pipeline::{compare, run_pipeline, CompareError, PipelineConfig};
use hybridmbt::static_analysis::{build_wtg, export_wtg_dot};
use hybridmbt::testgen::{generate_tests, run_suite, translate, Criterion, RunOptions, TestSuite};

#[derive(Parser)]
#[command(name = "hybridmbt", version, about = "Model-based GUI testing over declarative app specifications")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Seed for text inputs, random exploration and mutant sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Maximum number of fired events per crawl.
    #[arg(long, global = true, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    budget: u64,
    /// Output file, or output directory for `pipeline`. Standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Text,
}

/// A spec is a JSON file path or `fixture:<name>` for a bundled app.
#[derive(Subcommand)]
enum Command {
    /// Check a specification; diagnostics go to standard error.
    Validate { spec: String },
    /// Build the windows transition graph (dot, json).
    Wtg { spec: String },
    /// Order the graph's events for the crawler (json, text).
    Track { spec: String },
    /// Explore the app into a state model (json, dot, text).
    Crawl {
        spec: String,
        #[arg(long, default_value = "hybrid")]
        strategy: Strategy,
    },
    /// Derive a test suite from a model file (json, text).
    GenTests {
        model: PathBuf,
        #[arg(long, default_value = "all_edges")]
        criterion: Criterion,
    },
    /// Execute a suite against a spec (json, text).
    RunTests {
        spec: String,
        suite: PathBuf,
        /// Run even if the suite was generated from a different spec.
        #[arg(long)]
        allow_digest_mismatch: bool,
    },
    /// Score a suite against spec mutants (json, text).
    Mutate {
        spec: String,
        suite: PathBuf,
        /// Number of mutants to sample; all when omitted.
        #[arg(long)]
        mutants: Option<usize>,
    },
    /// Average crawl statistics of several strategies over seeds (text, json).
    Compare {
        spec: String,
        #[arg(long, value_delimiter = ',', default_value = "hybrid,random")]
        strategies: Vec<Strategy>,
        /// Comma list and inclusive ranges, e.g. `0-9` or `1,4,7`.
        #[arg(long, default_value = "0-9", value_parser = parse_seeds)]
        seeds: SeedList,
    },
    /// Run every stage and write the artifacts to `--out` (default `out`).
    Pipeline {
        spec: String,
        #[arg(long, default_value = "hybrid")]
        strategy: Strategy,
        #[arg(long, default_value = "all_edges")]
        criterion: Criterion,
        /// Also run mutation analysis.
        #[arg(long)]
        mutate: bool,
        #[arg(long)]
        mutants: Option<usize>,
    },
}

#[derive(Clone)]
struct SeedList(Vec<u64>);

fn parse_seeds(text: &str) -> Result<SeedList, String> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((a, b)) => {
                let a: u64 = a.trim().parse().map_err(|_| format!("bad seed `{a}`"))?;
                let b: u64 = b.trim().parse().map_err(|_| format!("bad seed `{b}`"))?;
                if a > b {
                    return Err(format!("empty seed range `{part}`"));
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse().map_err(|_| format!("bad seed `{part}`"))?),
        }
    }
    if out.is_empty() {
        return Err("no seeds given".into());
    }
    Ok(SeedList(out))
}

enum Failure {
    Validation(String),
    Io(String),
    Stage(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Io(_) => 3,
            Failure::Stage(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Io(m) | Failure::Stage(m) => m,
        }
    }
}

fn stage_failure(stage: &str) -> impl Fn(&dyn std::fmt::Display) -> Failure + '_ {
    move |e| Failure::Stage(format!("stage `{stage}` failed: {e}"))
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message().is_empty() {
                eprintln!("error: {}", f.message());
            }
            ExitCode::from(f.code())
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))
}

fn render_diagnostics(diags: &[Diagnostic]) -> String {
    diags.iter().map(|d| format!("{d}\n")).collect()
}

fn load_spec(arg: &str) -> Result<AppSpec, Failure> {
    let text = match arg.strip_prefix("fixture:") {
        Some(name) => match fixtures::by_name(name) {
            Some(spec) => return Ok(spec),
            None => return Err(Failure::Validation(format!("unknown fixture `{name}`"))),
        },
        None => read(Path::new(arg))?,
    };
    parse_app_spec(&text).map_err(|diags| {
        eprint!("{}", render_diagnostics(&diags));
        Failure::Validation(format!("{arg} is not a valid specification"))
    })
}

fn load_json<T>(path: &Path, what: &str, parse: impl Fn(&str) -> Result<T, serde_json::Error>) -> Result<T, Failure> {
    let text = read(path)?;
    parse(&text).map_err(|e| Failure::Validation(format!("{} is not a valid {what}: {e}", path.display())))
}

fn emit(global: &Global, content: &str) -> CliResult {
    match &global.out {
        Some(path) => std::fs::write(path, content).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn unsupported(format: Format, command: &str) -> Failure {
    let name = format.to_possible_value().map(|v| v.get_name().to_owned()).unwrap_or_default();
    Failure::Validation(format!("`{command}` has no {name} output"))
}

fn crawl_config(global: &Global) -> CrawlConfig {
    CrawlConfig::new(global.seed, global.budget as usize)
}

fn run(cli: Cli) -> CliResult {
    let g = &cli.global;
    match cli.command {
        Command::Validate { spec } => {
            let text = match spec.strip_prefix("fixture:") {
                Some(_) => return load_spec(&spec).map(|_| ()),
                None => read(Path::new(&spec))?,
            };
            match parse_app_spec(&text) {
                Ok(parsed) => {
                    let warnings = hybridmbt::appspec::validate(&parsed);
                    eprint!("{}", render_diagnostics(&warnings));
                    Ok(())
                }
                Err(diags) => {
                    eprint!("{}", render_diagnostics(&diags));
                    Err(Failure::Validation(String::new()))
                }
            }
        }
        Command::Wtg { spec } => {
            let spec = load_spec(&spec)?;
            let wtg = build_wtg(&spec).map_err(|e| stage_failure("wtg")(&e))?;
            match g.format.unwrap_or(Format::Dot) {
                Format::Dot => emit(g, &export_wtg_dot(&wtg)),
                Format::Json => emit(g, &with_newline(wtg.to_json())),
                f => Err(unsupported(f, "wtg")),
            }
        }
        Command::Track { spec } => {
            let spec = load_spec(&spec)?;
            let wtg = build_wtg(&spec).map_err(|e| stage_failure("wtg")(&e))?;
            let es = track_events(&wtg).map_err(|e| stage_failure("track")(&e))?;
            match g.format.unwrap_or(Format::Json) {
                Format::Json => emit(g, &with_newline(es.to_json())),
                Format::Text => {
                    let mut out = String::new();
                    for e in &es.entries {
                        let _ = writeln!(out, "{:>4} {}", e.sequence, e.event_id);
                    }
                    emit(g, &out)
                }
                f => Err(unsupported(f, "track")),
            }
        }
        Command::Crawl { spec, strategy } => {
            let spec = load_spec(&spec)?;
            let (model, report) = run_strategy(&spec, strategy, &crawl_config(g)).map_err(|e| stage_failure("crawl")(&e))?;
            eprintln!(
                "{}: {} states, {} windows, coverage {:.3}, {} fires",
                strategy, report.states, report.discovered_windows, report.coverage, report.fired
            );
            match g.format.unwrap_or(Format::Json) {
                Format::Json => emit(g, &with_newline(model.to_json())),
                Format::Dot => emit(g, &export_model_dot(&model)),
                Format::Text => emit(g, &with_newline(serde_json::to_string_pretty(&report).expect("report serializes"))),
            }
        }
        Command::GenTests { model, criterion } => {
            let model = load_json(&model, "model", FsmModel::from_json)?;
            model.check().map_err(Failure::Validation)?;
            let suite = generate_tests(&model, criterion).map_err(|e| stage_failure("gen-tests")(&e))?;
            match g.format.unwrap_or(Format::Json) {
                Format::Json => emit(g, &with_newline(suite.to_json())),
                Format::Text => {
                    let mut out = String::new();
                    for case in &suite.cases {
                        let _ = writeln!(out, "# {}", case.id);
                        out.push_str(&translate(case));
                    }
                    emit(g, &out)
                }
                f => Err(unsupported(f, "gen-tests")),
            }
        }
        Command::RunTests {
            spec,
            suite,
            allow_digest_mismatch,
        } => {
            let spec = load_spec(&spec)?;
            let suite = load_json(&suite, "suite", TestSuite::from_json)?;
            let result = run_suite(&spec, &suite, g.seed, RunOptions { allow_digest_mismatch })
                .map_err(|e| stage_failure("run-tests")(&e))?;
            match g.format.unwrap_or(Format::Json) {
                Format::Json => emit(g, &with_newline(result.to_json())),
                Format::Text => emit(
                    g,
                    &format!(
                        "{} passed, {} failed, {} crashed, coverage {:.3}\n",
                        result.passed, result.failed, result.crashed, result.coverage
                    ),
                ),
                f => Err(unsupported(f, "run-tests")),
            }
        }
        Command::Mutate { spec, suite, mutants } => {
            let spec = load_spec(&spec)?;
            let suite = load_json(&suite, "suite", TestSuite::from_json)?;
            let all = generate_mutants(&spec);
            let selection = select_mutants(&all, mutants.unwrap_or(all.len()), g.seed);
            let report = run_mutation(&spec, &suite, &all, &selection, g.seed).map_err(|e| stage_failure("mutate")(&e))?;
            match g.format.unwrap_or(Format::Json) {
                Format::Json => emit(g, &with_newline(report.to_json())),
                Format::Text => {
                    let mut out = format!(
                        "{} generated, {} selected, {} killed, score {:.3}\n",
                        report.total, report.selected, report.killed, report.final_ms
                    );
                    for (op, score) in &report.per_operator_score {
                        let _ = writeln!(out, "  {op}: {score:.3}");
                    }
                    emit(g, &out)
                }
                f => Err(unsupported(f, "mutate")),
            }
        }
        Command::Compare { spec, strategies, seeds } => {
            let spec = load_spec(&spec)?;
            let table = compare(&spec, &strategies, &seeds.0, g.budget as usize).map_err(|e| match e {
                CompareError::Stage(s) => Failure::Stage(s.to_string()),
                other => Failure::Validation(other.to_string()),
            })?;
            match g.format.unwrap_or(Format::Text) {
                Format::Text => emit(g, &table.to_text()),
                Format::Json => emit(g, &with_newline(serde_json::to_string_pretty(&table).expect("table serializes"))),
                f => Err(unsupported(f, "compare")),
            }
        }
        Command::Pipeline {
            spec,
            strategy,
            criterion,
            mutate,
            mutants,
        } => {
            let spec = load_spec(&spec)?;
            let config = PipelineConfig {
                crawl: crawl_config(g),
                strategy,
                criterion,
                mutate,
                mutant_budget: mutants,
            };
            let output = run_pipeline(&spec, &config).map_err(|e| Failure::Stage(e.to_string()))?;
            let dir = g.out.clone().unwrap_or_else(|| PathBuf::from("out"));
            output
                .write_to(&dir)
                .map_err(|e| Failure::Io(format!("cannot write to {}: {e}", dir.display())))?;
            let r = &output.crawl_report;
            let x = &output.execution;
            println!(
                "crawl: {} states, {} windows, coverage {:.3}, {} fires",
                r.states, r.discovered_windows, r.coverage, r.fired
            );
            println!("tests: {} cases, {} passed, {} failed, {} crashed", x.cases.len(), x.passed, x.failed, x.crashed);
            if let Some(m) = &output.mutation {
                println!("mutation: {} selected, {} killed, score {:.3}", m.selected, m.killed, m.final_ms);
            }
            println!("wrote {} files to {}", output.files.len(), dir.display());
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_lists_and_ranges() {
        assert_eq!(parse_seeds("0-3").unwrap().0, vec![0, 1, 2, 3]);
        assert_eq!(parse_seeds("5, 1,2-3").unwrap().0, vec![5, 1, 2, 3]);
        assert!(parse_seeds("3-1").is_err());
        assert!(parse_seeds("").is_err());
        assert!(parse_seeds("x").is_err());
    }

    #[test]
    fn failure_codes() {
        assert_eq!(Failure::Validation(String::new()).code(), 2);
        assert_eq!(Failure::Io(String::new()).code(), 3);
        assert_eq!(Failure::Stage(String::new()).code(), 4);
    }
}
