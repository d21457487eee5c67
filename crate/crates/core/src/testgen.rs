//! Test-case generation from an inferred model, script translation and
//! conformance execution against the simulator.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::appspec::{AppSpec, Trigger};
use crate::crawler::{AbstractState, FsmModel};
use crate::digest::json_digest;
use crate::event_tracking::EventEntry;
use crate::runtime::{coverage_of, AppStatus, Sign, Simulator, UiEvent, WidgetView};

/// Upper bound on the number of cases `full_paths` enumerates.
pub const MAX_FULL_PATHS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Criterion {
    AllEdges,
    AllStates,
    /// Maximal simple paths from the initial state, at most this many steps.
    FullPaths(usize),
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Criterion::AllEdges => f.write_str("all_edges"),
            Criterion::AllStates => f.write_str("all_states"),
            Criterion::FullPaths(n) => write!(f, "full_paths({n})"),
        }
    }
}

impl FromStr for Criterion {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all_edges" => Ok(Criterion::AllEdges),
            "all_states" => Ok(Criterion::AllStates),
            _ => s
                .strip_prefix("full_paths(")
                .and_then(|r| r.strip_suffix(')'))
                .and_then(|n| n.parse().ok())
                .map(Criterion::FullPaths)
                .ok_or_else(|| format!("unknown criterion `{s}` (expected all_edges, all_states or full_paths(N))")),
        }
    }
}

impl Serialize for Criterion {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Criterion {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub event: EventEntry,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<i64>,
    pub expect_window: String,
    pub expect_signature: Vec<WidgetView>,
    pub expect_env: BTreeMap<String, Sign>,
    pub expect_status: AppStatus,
}

impl Step {
    fn new(event: EventEntry, input: Option<i64>, target: &AbstractState) -> Self {
        Step {
            event,
            input,
            expect_window: target.window.clone(),
            expect_signature: target.widget_signature.clone(),
            expect_env: target.env_digest.clone(),
            expect_status: target.status,
        }
    }

    pub fn expected(&self) -> AbstractState {
        AbstractState {
            window: self.expect_window.clone(),
            widget_signature: self.expect_signature.clone(),
            env_digest: self.expect_env.clone(),
            status: self.expect_status,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseKind {
    /// Ends in a state with no way forward.
    FullPath,
    SubPath,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestCase {
    pub id: String,
    /// Model state the case starts from.
    pub origin: usize,
    pub kind: CaseKind,
    /// Model transitions the steps follow.
    pub transitions: Vec<usize>,
    pub steps: Vec<Step>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestSuite {
    pub app: String,
    pub model_digest: String,
    pub spec_digest: String,
    pub criterion: Criterion,
    pub initial: AbstractState,
    pub cases: Vec<TestCase>,
}

impl TestSuite {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("suite serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Transition ids exercised by at least one case.
    pub fn covered_transitions(&self) -> BTreeSet<usize> {
        self.cases.iter().flat_map(|c| c.transitions.iter().copied()).collect()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TestGenError {
    #[error("model has no initial state")]
    NoInitialState,
    #[error("transitions unreachable from the initial state: {0:?}")]
    Unreachable(Vec<usize>),
}

/// Builds a suite from `model` under `criterion`.
pub fn generate_tests(model: &FsmModel, criterion: Criterion) -> Result<TestSuite, TestGenError> {
    if model.initial >= model.states.len() {
        return Err(TestGenError::NoInitialState);
    }
    let tree = bfs_tree(model);
    let paths: Vec<Vec<usize>> = match criterion {
        Criterion::AllEdges => {
            let unreachable: Vec<usize> = model
                .transitions
                .iter()
                .enumerate()
                .filter(|(_, t)| tree[t.source].is_none())
                .map(|(i, _)| i)
                .collect();
            if !unreachable.is_empty() {
                return Err(TestGenError::Unreachable(unreachable));
            }
            let candidates = (0..model.transitions.len())
                .map(|t| {
                    let mut p = path_to(model, &tree, model.transitions[t].source);
                    p.push(t);
                    p
                })
                .collect();
            subsume_prefixes(candidates)
        }
        Criterion::AllStates => {
            let candidates = (0..model.states.len())
                .filter(|&s| s != model.initial && tree[s].is_some())
                .map(|s| path_to(model, &tree, s))
                .collect();
            subsume_prefixes(candidates)
        }
        Criterion::FullPaths(maxlen) => full_paths(model, maxlen),
    };
    let paths = if paths.is_empty() { vec![Vec::new()] } else { paths };

    let cases = paths
        .into_iter()
        .enumerate()
        .map(|(i, transitions)| {
            let steps = transitions
                .iter()
                .map(|&t| {
                    let tr = &model.transitions[t];
                    Step::new(tr.event.clone(), tr.input, &model.states[tr.target])
                })
                .collect();
            let end = transitions.last().map(|&t| model.transitions[t].target).unwrap_or(model.initial);
            let kind = if model.states[end].is_terminal() || model.outgoing(end).all(|(_, t)| t.target == end) {
                CaseKind::FullPath
            } else {
                CaseKind::SubPath
            };
            TestCase {
                id: format!("tc{}", i + 1),
                origin: model.initial,
                kind,
                transitions,
                steps,
            }
        })
        .collect();
    Ok(TestSuite {
        app: model.app.clone(),
        model_digest: model.digest(),
        spec_digest: model.metadata.spec_digest.clone(),
        criterion,
        initial: model.states[model.initial].clone(),
        cases,
    })
}

/// Incoming tree transition per state of a breadth-first search from the
/// initial state; the initial state maps to `Some(None)`.
fn bfs_tree(model: &FsmModel) -> Vec<Option<Option<usize>>> {
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); model.states.len()];
    for (i, t) in model.transitions.iter().enumerate() {
        adjacency[t.source].push(i);
    }
    let mut tree = vec![None; model.states.len()];
    tree[model.initial] = Some(None);
    let mut queue = VecDeque::from([model.initial]);
    while let Some(s) = queue.pop_front() {
        for &t in &adjacency[s] {
            let next = model.transitions[t].target;
            if tree[next].is_none() {
                tree[next] = Some(Some(t));
                queue.push_back(next);
            }
        }
    }
    tree
}

fn path_to(model: &FsmModel, tree: &[Option<Option<usize>>], state: usize) -> Vec<usize> {
    let mut path = Vec::new();
    let mut cur = state;
    while let Some(Some(t)) = tree[cur] {
        path.push(t);
        cur = model.transitions[t].source;
    }
    path.reverse();
    path
}

/// Drops every path that is a prefix of another one, keeping first-seen
/// order among the survivors.
fn subsume_prefixes(paths: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    let mut kept: Vec<Vec<usize>> = Vec::new();
    for (i, p) in paths.iter().enumerate() {
        let covered = paths.iter().enumerate().any(|(j, q)| {
            (q.len() > p.len() && q[..p.len()] == p[..]) || (q == p && j < i)
        });
        if !covered {
            kept.push(p.clone());
        }
    }
    kept
}

fn full_paths(model: &FsmModel, maxlen: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut on_path = vec![false; model.states.len()];
    let mut path = Vec::new();
    on_path[model.initial] = true;
    extend(model, model.initial, maxlen, &mut on_path, &mut path, &mut out);
    out
}

fn extend(
    model: &FsmModel,
    state: usize,
    maxlen: usize,
    on_path: &mut [bool],
    path: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if out.len() >= MAX_FULL_PATHS {
        return;
    }
    let next: Vec<(usize, usize)> = if path.len() < maxlen {
        model
            .outgoing(state)
            .filter(|(_, t)| !on_path[t.target])
            .map(|(i, t)| (i, t.target))
            .collect()
    } else {
        Vec::new()
    };
    if next.is_empty() {
        if !path.is_empty() {
            out.push(path.clone());
        }
        return;
    }
    for (t, target) in next {
        on_path[target] = true;
        path.push(t);
        extend(model, target, maxlen, on_path, path, out);
        path.pop();
        on_path[target] = false;
    }
}

/// One line of a runtime command script.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Launch,
    Fire {
        window: String,
        widget: String,
        trigger: Trigger,
        input: Option<i64>,
    },
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Command::Launch => f.write_str("launch"),
            Command::Fire {
                window,
                widget,
                trigger,
                input,
            } => {
                write!(f, "fire {window}/{widget}/{trigger}")?;
                if let Some(v) = input {
                    write!(f, " {v}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ScriptError {
    pub line: usize,
    pub message: String,
}

/// Renders a case as `launch` followed by one `fire` line per step.
pub fn translate(case: &TestCase) -> String {
    let mut out = format!("{}\n", Command::Launch);
    for step in &case.steps {
        let cmd = Command::Fire {
            window: step.event.source_window.clone(),
            widget: step.event.widget.clone(),
            trigger: step.event.trigger,
            input: step.input,
        };
        out.push_str(&cmd.to_string());
        out.push('\n');
    }
    out
}

pub fn parse_script(text: &str) -> Result<Vec<Command>, ScriptError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| ScriptError { line: i + 1, message };
        let mut words = line.split_whitespace();
        match words.next() {
            Some("launch") => {
                if words.next().is_some() {
                    return Err(err("`launch` takes no arguments".into()));
                }
                out.push(Command::Launch);
            }
            Some("fire") => {
                let target = words.next().ok_or_else(|| err("`fire` needs window/widget/trigger".into()))?;
                let parts: Vec<&str> = target.split('/').collect();
                let [window, widget, trigger] = parts[..] else {
                    return Err(err(format!("malformed event `{target}`")));
                };
                let trigger = Trigger::parse(trigger).ok_or_else(|| err(format!("unknown trigger `{trigger}`")))?;
                let input = match words.next() {
                    None => None,
                    Some(v) => Some(v.parse().map_err(|_| err(format!("bad input value `{v}`")))?),
                };
                if words.next().is_some() {
                    return Err(err("trailing words".into()));
                }
                out.push(Command::Fire {
                    window: window.into(),
                    widget: widget.into(),
                    trigger,
                    input,
                });
            }
            Some(other) => return Err(err(format!("unknown command `{other}`"))),
            None => {}
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    /// `step` is 1-based; 0 refers to the launch.
    Fail { step: usize, reason: String },
    Crash { step: usize },
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseResult {
    pub id: String,
    #[serde(flatten)]
    pub verdict: Verdict,
    /// Digest of the runtime state after the case, log included.
    pub trace_digest: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutionResult {
    pub app: String,
    pub seed: u64,
    pub passed: usize,
    pub failed: usize,
    pub crashed: usize,
    pub coverage: f64,
    pub covered_actions: usize,
    pub total_actions: usize,
    pub trace_digest: String,
    pub cases: Vec<CaseResult>,
}

impl ExecutionResult {
    pub fn all_passed(&self) -> bool {
        self.failed == 0 && self.crashed == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("execution result serializes")
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RunError {
    #[error("suite was generated for spec {expected}, not {actual}")]
    DigestMismatch { expected: String, actual: String },
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Runs the suite even if it was generated from another spec.
    pub allow_digest_mismatch: bool,
}

/// Replays every case on a fresh launch and checks each observed state
/// against the expected one.
pub fn run_suite(spec: &AppSpec, suite: &TestSuite, seed: u64, options: RunOptions) -> Result<ExecutionResult, RunError> {
    let actual = json_digest(spec);
    if actual != suite.spec_digest && !options.allow_digest_mismatch {
        return Err(RunError::DigestMismatch {
            expected: suite.spec_digest.clone(),
            actual,
        });
    }
    let sim = Simulator::new(spec);
    let runs: Vec<(CaseResult, BTreeSet<String>)> =
        suite.cases.par_iter().map(|case| run_case(&sim, suite, case, seed)).collect();

    let mut executed = sim.launch(seed).executed_actions;
    let mut cases = Vec::with_capacity(runs.len());
    for (result, actions) in runs {
        executed.extend(actions);
        cases.push(result);
    }
    let coverage = coverage_of(spec, &executed);
    let count = |f: fn(&Verdict) -> bool| cases.iter().filter(|c| f(&c.verdict)).count();
    let digests: Vec<&str> = cases.iter().map(|c| c.trace_digest.as_str()).collect();
    Ok(ExecutionResult {
        app: spec.name.clone(),
        seed,
        passed: count(|v| matches!(v, Verdict::Pass)),
        failed: count(|v| matches!(v, Verdict::Fail { .. })),
        crashed: count(|v| matches!(v, Verdict::Crash { .. })),
        coverage: coverage.ratio,
        covered_actions: coverage.covered,
        total_actions: coverage.total,
        trace_digest: json_digest(&digests),
        cases,
    })
}

fn run_case(sim: &Simulator, suite: &TestSuite, case: &TestCase, seed: u64) -> (CaseResult, BTreeSet<String>) {
    let mut rt = sim.launch(seed);
    let verdict = (|| {
        let launched = AbstractState::from_observation(&sim.observe(&rt));
        if launched != suite.initial {
            return mismatch(0, &suite.initial, &launched);
        }
        for (i, step) in case.steps.iter().enumerate() {
            let n = i + 1;
            let event = UiEvent::from(&step.event);
            let obs = match sim.fire_with_input(&mut rt, &event, step.input) {
                Ok(obs) => obs,
                Err(e) => {
                    return Verdict::Fail {
                        step: n,
                        reason: e.to_string(),
                    }
                }
            };
            if obs.status == AppStatus::Crashed && step.expect_status != AppStatus::Crashed {
                return Verdict::Crash { step: n };
            }
            let observed = AbstractState::from_observation(&obs);
            let expected = step.expected();
            if observed != expected {
                return mismatch(n, &expected, &observed);
            }
        }
        Verdict::Pass
    })();
    let result = CaseResult {
        id: case.id.clone(),
        verdict,
        trace_digest: rt.digest(),
    };
    (result, rt.executed_actions)
}

fn mismatch(step: usize, expected: &AbstractState, observed: &AbstractState) -> Verdict {
    let reason = if expected.window != observed.window {
        format!("expected window `{}`, observed `{}`", expected.window, observed.window)
    } else if expected.status != observed.status {
        format!("expected status {:?}, observed {:?}", expected.status, observed.status)
    } else if expected.widget_signature != observed.widget_signature {
        format!(
            "widget signature differs on `{}`: expected [{}], observed [{}]",
            expected.window,
            expected.signature_string(),
            observed.signature_string()
        )
    } else {
        format!("variable signs differ on `{}`", expected.window)
    };
    Verdict::Fail { step, reason }
}
