//! Dynamic exploration of a simulated app into a finite state model.
//!
//! The hybrid strategy walks a statically ordered event set and reaches each
//! event's host state along the shortest witnessed route. Random, DFS and
//! BFS baselines explore without static knowledge.

mod baseline;
mod hybrid;
mod route;
mod session;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::appspec::{validate, AppSpec, Trigger};
use crate::digest::json_digest;
use crate::event_tracking::{EventEntry, EventSet};
use crate::runtime::{AppStatus, Observation, Sign, UiEvent, WidgetView};

pub use baseline::baseline_crawl;
pub use hybrid::crawl;
pub use route::{plan, shortest_route, Route};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AbstractState {
    pub window: String,
    pub widget_signature: Vec<WidgetView>,
    pub env_digest: BTreeMap<String, Sign>,
    pub status: AppStatus,
}

impl AbstractState {
    pub fn from_observation(obs: &Observation) -> Self {
        AbstractState {
            window: obs.current_window.clone(),
            widget_signature: obs.visible_widgets.clone(),
            env_digest: obs.env_digest.iter().cloned().collect(),
            status: obs.status,
        }
    }

    pub fn is_terminal(&self) -> bool {
        self.status != AppStatus::Running
    }

    pub fn offers(&self, event: &UiEvent) -> bool {
        !self.is_terminal()
            && self
                .widget_signature
                .iter()
                .any(|w| w.id == event.widget && w.triggers.contains(&event.trigger))
    }

    /// `widget:trigger,...` in signature order.
    pub fn signature_string(&self) -> String {
        let mut out = String::new();
        for w in &self.widget_signature {
            for t in &w.triggers {
                if !out.is_empty() {
                    out.push(',');
                }
                let _ = write!(out, "{}:{}", w.id, t);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition {
    pub source: usize,
    pub target: usize,
    pub event: EventEntry,
    /// Text value used when the transition was witnessed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Hybrid,
    Random,
    Dfs,
    Bfs,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [Strategy::Hybrid, Strategy::Random, Strategy::Dfs, Strategy::Bfs];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Hybrid => "hybrid",
            Strategy::Random => "random",
            Strategy::Dfs => "dfs",
            Strategy::Bfs => "bfs",
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.as_str() == s)
            .ok_or_else(|| format!("unknown strategy `{s}` (expected hybrid, random, dfs or bfs)"))
    }
}

/// Crawl statistics stored with the model. Wall time is kept out so that the
/// model export stays reproducible.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelMetadata {
    pub spec_digest: String,
    pub strategy: Strategy,
    pub seed: u64,
    pub budget: usize,
    pub fired: usize,
    pub replayed: usize,
    pub relaunches: usize,
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FsmModel {
    pub app: String,
    /// Discovery order; the index is the state id.
    pub states: Vec<AbstractState>,
    pub initial: usize,
    pub transitions: Vec<Transition>,
    pub metadata: ModelMetadata,
}

impl FsmModel {
    pub fn state_id(&self, state: &AbstractState) -> Option<usize> {
        self.states.iter().position(|s| s == state)
    }

    pub fn outgoing(&self, state: usize) -> impl Iterator<Item = (usize, &Transition)> {
        self.transitions.iter().enumerate().filter(move |(_, t)| t.source == state)
    }

    pub fn windows(&self) -> BTreeSet<&str> {
        self.states.iter().map(|s| s.window.as_str()).collect()
    }

    pub fn digest(&self) -> String {
        json_digest(self)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Checks the structural invariants: endpoints in range and no duplicate
    /// states.
    pub fn check(&self) -> Result<(), String> {
        if self.initial >= self.states.len() {
            return Err(format!("initial state {} out of range", self.initial));
        }
        let mut seen = HashMap::new();
        for (i, s) in self.states.iter().enumerate() {
            if let Some(j) = seen.insert(s, i) {
                return Err(format!("states {j} and {i} are equal"));
            }
        }
        for (i, t) in self.transitions.iter().enumerate() {
            if t.source >= self.states.len() || t.target >= self.states.len() {
                return Err(format!("transition {i} has an endpoint out of range"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrawlReport {
    pub strategy: Strategy,
    pub fired: usize,
    pub replayed: usize,
    pub states: usize,
    pub discovered_windows: usize,
    pub transitions: usize,
    pub coverage: f64,
    pub wall_time_s: f64,
    pub unreachable_events: Vec<String>,
    pub guard_rejected: Vec<String>,
    pub relaunches: usize,
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrawlConfig {
    pub seed: u64,
    /// Maximum number of fired events, replays included.
    pub budget: usize,
    /// Lets baselines fire long clicks.
    pub include_long_click: bool,
    /// Lets baselines fire rotate, interrupt and menu.
    pub include_system_events: bool,
    /// Route recomputations allowed per event after a replay diverges.
    pub max_replans: usize,
}

impl Default for CrawlConfig {
    fn default() -> Self {
        CrawlConfig {
            seed: 0,
            budget: 10_000,
            include_long_click: false,
            include_system_events: false,
            max_replans: 3,
        }
    }
}

impl CrawlConfig {
    pub fn new(seed: u64, budget: usize) -> Self {
        CrawlConfig {
            seed,
            budget,
            ..Default::default()
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CrawlError {
    #[error("specification has errors: {0}")]
    InvalidSpec(String),
    #[error("budget must be at least 1")]
    ZeroBudget,
}

pub(crate) fn check_input(spec: &AppSpec, config: &CrawlConfig) -> Result<(), CrawlError> {
    if config.budget == 0 {
        return Err(CrawlError::ZeroBudget);
    }
    let errors: Vec<String> = validate(spec)
        .into_iter()
        .filter(|d| d.is_error())
        .map(|d| d.to_string())
        .collect();
    if errors.is_empty() {
        Ok(())
    } else {
        Err(CrawlError::InvalidSpec(errors.join("; ")))
    }
}

/// Runs the given strategy; the hybrid one derives its event set first.
pub fn run_strategy(
    spec: &AppSpec,
    strategy: Strategy,
    config: &CrawlConfig,
) -> Result<(FsmModel, CrawlReport), CrawlError> {
    match strategy {
        Strategy::Hybrid => {
            check_input(spec, config)?;
            let wtg = crate::static_analysis::build_wtg(spec).map_err(|e| CrawlError::InvalidSpec(e.to_string()))?;
            let es = crate::event_tracking::track_events(&wtg).map_err(|e| CrawlError::InvalidSpec(e.to_string()))?;
            crawl(spec, &es, config)
        }
        other => baseline_crawl(spec, other, config),
    }
}

/// Renders the model as DOT. States are numbered in discovery order.
pub fn export_model_dot(model: &FsmModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", escape(&model.app));
    out.push_str("  rankdir=LR;\n");
    for (i, s) in model.states.iter().enumerate() {
        let shape = match s.status {
            AppStatus::Running => "box",
            AppStatus::Terminated => "doublecircle",
            AppStatus::Crashed => "octagon",
        };
        let peripheries = if i == model.initial { ", peripheries=2" } else { "" };
        let _ = writeln!(
            out,
            "  s{i} [shape={shape}{peripheries}, label=\"s{i}\\n{}\"];",
            escape(&s.window)
        );
    }
    for t in &model.transitions {
        let _ = writeln!(
            out,
            "  s{} -> s{} [label=\"{}:{}\"];",
            t.source,
            t.target,
            escape(&t.event.widget),
            t.event.trigger
        );
    }
    out.push_str("}\n");
    out
}

pub fn export_model_json(model: &FsmModel) -> String {
    model.to_json()
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Events a dynamic-only explorer may fire in `state`: click, scroll and
/// text input on ordinary widgets plus the back key, widened by `config`.
pub(crate) fn dynamic_alphabet(
    state: &AbstractState,
    is_system: impl Fn(&str) -> bool,
    config: &CrawlConfig,
) -> Vec<UiEvent> {
    let mut out = Vec::new();
    if state.is_terminal() {
        return out;
    }
    for w in &state.widget_signature {
        let system = is_system(&w.id);
        for &t in &w.triggers {
            let allowed = if system {
                t == Trigger::Back || config.include_system_events
            } else {
                match t {
                    Trigger::LongClick => config.include_long_click,
                    _ => true,
                }
            };
            if allowed {
                out.push(UiEvent::new(w.id.clone(), t));
            }
        }
    }
    out
}

/// Looks up the event-set entry for each `(window, widget, trigger)`.
pub(crate) fn entry_table(es: &EventSet) -> HashMap<String, EventEntry> {
    es.entries.iter().map(|e| (e.event_id.clone(), e.clone())).collect()
}
