//! End-to-end runs and strategy comparison, shared by the CLI and tests.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::appspec::AppSpec;
use crate::crawler::{self, export_model_dot, export_model_json, CrawlConfig, CrawlReport, FsmModel, Strategy};
use crate::event_tracking::track_events;
use crate::mutation::{generate_mutants, run_mutation, select_mutants, MutationReport};
use crate::static_analysis::{build_wtg, export_wtg_dot};
use crate::testgen::{generate_tests, run_suite, Criterion, ExecutionResult, RunOptions, TestSuite};

#[derive(Debug, Error)]
#[error("stage `{stage}` failed: {message}")]
pub struct StageError {
    pub stage: &'static str,
    pub message: String,
}

fn stage<E: std::fmt::Display>(stage: &'static str) -> impl FnOnce(E) -> StageError {
    move |e| StageError {
        stage,
        message: e.to_string(),
    }
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub crawl: CrawlConfig,
    pub strategy: Strategy,
    pub criterion: Criterion,
    pub mutate: bool,
    /// Mutants to select; all when `None`.
    pub mutant_budget: Option<usize>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            crawl: CrawlConfig::default(),
            strategy: Strategy::Hybrid,
            criterion: Criterion::AllEdges,
            mutate: false,
            mutant_budget: None,
        }
    }
}

/// Everything a pipeline run produces. `files` maps artifact names to their
/// contents.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub files: BTreeMap<&'static str, String>,
    pub model: FsmModel,
    pub crawl_report: CrawlReport,
    pub suite: TestSuite,
    pub execution: ExecutionResult,
    pub mutation: Option<MutationReport>,
}

impl PipelineOutput {
    pub fn write_to(&self, dir: &Path) -> io::Result<()> {
        std::fs::create_dir_all(dir)?;
        for (name, content) in &self.files {
            std::fs::write(dir.join(name), content)?;
        }
        Ok(())
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("artifact serializes");
    s.push('\n');
    s
}

/// Static analysis, crawl, test generation, execution and optionally
/// mutation analysis. The event set is produced for the hybrid strategy
/// only.
pub fn run_pipeline(spec: &AppSpec, config: &PipelineConfig) -> Result<PipelineOutput, StageError> {
    let mut files = BTreeMap::new();
    let wtg = build_wtg(spec).map_err(stage("wtg"))?;
    files.insert("wtg.dot", export_wtg_dot(&wtg));

    let (model, crawl_report) = if config.strategy == Strategy::Hybrid {
        let es = track_events(&wtg).map_err(stage("track"))?;
        files.insert("events.json", json(&es));
        crawler::crawl(spec, &es, &config.crawl).map_err(stage("crawl"))?
    } else {
        crawler::baseline_crawl(spec, config.strategy, &config.crawl).map_err(stage("crawl"))?
    };
    files.insert("model.dot", export_model_dot(&model));
    files.insert("model.json", export_model_json(&model) + "\n");
    files.insert("crawl_report.json", json(&crawl_report));

    let suite = generate_tests(&model, config.criterion).map_err(stage("gen-tests"))?;
    files.insert("suite.json", json(&suite));
    let execution = run_suite(spec, &suite, config.crawl.seed, RunOptions::default()).map_err(stage("run-tests"))?;
    files.insert("exec_report.json", json(&execution));

    let mutation = if config.mutate {
        let mutants = generate_mutants(spec);
        let budget = config.mutant_budget.unwrap_or(mutants.len());
        let selection = select_mutants(&mutants, budget, config.crawl.seed);
        let report = run_mutation(spec, &suite, &mutants, &selection, config.crawl.seed).map_err(stage("mutate"))?;
        files.insert("mutation_report.json", json(&report));
        Some(report)
    } else {
        None
    };

    Ok(PipelineOutput {
        files,
        model,
        crawl_report,
        suite,
        execution,
        mutation,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub strategy: Strategy,
    pub runs: usize,
    pub mean_coverage: f64,
    pub mean_states: f64,
    pub mean_windows: f64,
    pub mean_fires: f64,
    pub mean_wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub app: String,
    pub budget: usize,
    pub seeds: Vec<u64>,
    pub rows: Vec<ComparisonRow>,
}

impl Comparison {
    pub fn row(&self, strategy: Strategy) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.strategy == strategy)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} (budget {}, {} seeds)\n", self.app, self.budget, self.seeds.len());
        let _ = writeln!(
            out,
            "{:<8} {:>9} {:>8} {:>8} {:>10} {:>10}",
            "strategy", "coverage", "states", "windows", "fires", "time_s"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<8} {:>9.3} {:>8.1} {:>8.1} {:>10.1} {:>10.4}",
                r.strategy.as_str(),
                r.mean_coverage,
                r.mean_states,
                r.mean_windows,
                r.mean_fires,
                r.mean_wall_time_s
            );
        }
        out
    }
}

#[derive(Debug, Error)]
pub enum CompareError {
    #[error("comparison needs at least two distinct strategies")]
    TooFewStrategies,
    #[error("comparison needs at least one seed")]
    NoSeeds,
    #[error(transparent)]
    Stage(#[from] StageError),
}

/// Crawls with every strategy and seed and averages the reports. Rows keep
/// the order of `strategies`.
pub fn compare(
    spec: &AppSpec,
    strategies: &[Strategy],
    seeds: &[u64],
    budget: usize,
) -> Result<Comparison, CompareError> {
    let mut distinct: Vec<Strategy> = Vec::new();
    for &s in strategies {
        if !distinct.contains(&s) {
            distinct.push(s);
        }
    }
    if distinct.len() < 2 {
        return Err(CompareError::TooFewStrategies);
    }
    if seeds.is_empty() {
        return Err(CompareError::NoSeeds);
    }
    let cells: Vec<(Strategy, u64)> = distinct
        .iter()
        .flat_map(|&st| seeds.iter().map(move |&seed| (st, seed)))
        .collect();
    let reports: Vec<CrawlReport> = cells
        .par_iter()
        .map(|&(st, seed)| {
            crawler::run_strategy(spec, st, &CrawlConfig::new(seed, budget))
                .map(|(_, r)| r)
                .map_err(stage("crawl"))
        })
        .collect::<Result<_, _>>()?;
    let rows = distinct
        .iter()
        .map(|&st| {
            let rs: Vec<&CrawlReport> = reports.iter().filter(|r| r.strategy == st).collect();
            let mean = |f: &dyn Fn(&CrawlReport) -> f64| rs.iter().map(|r| f(r)).sum::<f64>() / rs.len() as f64;
            ComparisonRow {
                strategy: st,
                runs: rs.len(),
                mean_coverage: mean(&|r| r.coverage),
                mean_states: mean(&|r| r.states as f64),
                mean_windows: mean(&|r| r.discovered_windows as f64),
                mean_fires: mean(&|r| r.fired as f64),
                mean_wall_time_s: mean(&|r| r.wall_time_s),
            }
        })
        .collect();
    Ok(Comparison {
        app: spec.name.clone(),
        budget,
        seeds: seeds.to_vec(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn default_pipeline_writes_seven_artifacts() {
        let out = run_pipeline(&fixtures::open_manager(), &PipelineConfig::default()).unwrap();
        let names: Vec<&str> = out.files.keys().copied().collect();
        assert_eq!(
            names,
            vec!["crawl_report.json", "events.json", "exec_report.json", "model.dot", "model.json", "suite.json", "wtg.dot"]
        );
        assert!(out.execution.all_passed());
    }

    #[test]
    fn random_pipeline_omits_event_set() {
        let config = PipelineConfig {
            strategy: Strategy::Random,
            crawl: CrawlConfig::new(1, 300),
            ..Default::default()
        };
        let out = run_pipeline(&fixtures::open_manager(), &config).unwrap();
        assert!(!out.files.contains_key("events.json"));
        assert_eq!(out.files.len(), 6);
    }

    #[test]
    fn mutation_stage_adds_report() {
        let config = PipelineConfig {
            mutate: true,
            mutant_budget: Some(10),
            ..Default::default()
        };
        let out = run_pipeline(&fixtures::calculator(), &config).unwrap();
        assert!(out.files.contains_key("mutation_report.json"));
        assert_eq!(out.mutation.unwrap().selected, 10);
    }

    #[test]
    fn pipeline_is_reproducible() {
        let config = PipelineConfig {
            mutate: true,
            mutant_budget: Some(15),
            ..Default::default()
        };
        let a = run_pipeline(&fixtures::open_manager(), &config).unwrap();
        let b = run_pipeline(&fixtures::open_manager(), &config).unwrap();
        for name in ["wtg.dot", "events.json", "model.json", "model.dot", "suite.json", "exec_report.json", "mutation_report.json"] {
            assert_eq!(a.files[name], b.files[name], "{name}");
        }
    }

    #[test]
    fn compare_needs_two_strategies() {
        let spec = fixtures::calculator();
        assert!(matches!(
            compare(&spec, &[Strategy::Hybrid, Strategy::Hybrid], &[0], 100),
            Err(CompareError::TooFewStrategies)
        ));
        assert!(matches!(compare(&spec, &[Strategy::Hybrid, Strategy::Dfs], &[], 100), Err(CompareError::NoSeeds)));
    }

    #[test]
    fn compare_on_chain() {
        let spec = fixtures::chain(8);
        let c = compare(&spec, &[Strategy::Hybrid, Strategy::Dfs], &[0, 1], 10_000).unwrap();
        let h = c.row(Strategy::Hybrid).unwrap();
        let d = c.row(Strategy::Dfs).unwrap();
        assert_eq!(h.mean_windows, d.mean_windows);
        assert!(h.mean_fires <= d.mean_fires);
        assert!(c.to_text().lines().count() == 4);
    }
}
