//! Deterministic simulator of an app described by an [`AppSpec`].
//!
//! The simulator keeps a window stack, integer variables, widget visibility
//! overrides and an action-level coverage trace. Text inputs come from a
//! seeded stream, so `(spec, seed, event sequence)` fully determines every
//! state.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::appspec::{Action, AppSpec, Effect, Env, ResolvedHandler, SpecIndex, Trigger, Value, WidgetKind, WidgetRef};
use crate::digest::json_digest;
use crate::event_tracking::EventEntry;

pub const INPUT_MIN: i64 = -100;
pub const INPUT_MAX: i64 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AppStatus {
    Running,
    Terminated,
    Crashed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(v: i64) -> Sign {
        match v {
            v if v < 0 => Sign::Negative,
            0 => Sign::Zero,
            _ => Sign::Positive,
        }
    }
}

/// A (widget, trigger) pair to fire.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UiEvent {
    pub widget: String,
    pub trigger: Trigger,
}

impl UiEvent {
    pub fn new(widget: impl Into<String>, trigger: Trigger) -> Self {
        UiEvent {
            widget: widget.into(),
            trigger,
        }
    }
}

impl From<&EventEntry> for UiEvent {
    fn from(e: &EventEntry) -> Self {
        UiEvent::new(e.widget.clone(), e.trigger)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FireError {
    #[error("app is not running")]
    NotRunning,
    #[error("event {widget}:{trigger} is not available on the current window")]
    EventNotAvailable { widget: String, trigger: Trigger },
    #[error("guard of {widget}:{trigger} rejected the event")]
    GuardRejected { widget: String, trigger: Trigger },
    #[error("`{0}` is not a text field")]
    NotATextField(String),
}

/// One accepted `fire` or `back` call.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogRecord {
    pub step: usize,
    pub event: String,
    pub window_before: String,
    pub window_after: String,
    pub actions: Vec<String>,
    pub status: AppStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<i64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub returned: Vec<Option<Value>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RuntimeState {
    pub window_stack: Vec<String>,
    /// Top window before the stack last emptied; equals the top while running.
    pub last_window: String,
    pub env: Env,
    pub visibility_overrides: BTreeMap<String, bool>,
    pub executed_actions: BTreeSet<String>,
    pub event_log: Vec<LogRecord>,
    pub status: AppStatus,
    pub seed: u64,
    /// Number of values drawn from the input stream so far.
    pub input_draws: u64,
    pub launches: u32,
    #[serde(skip)]
    rng: ChaCha8Rng,
}

impl RuntimeState {
    pub fn current_window(&self) -> &str {
        self.window_stack.last().unwrap_or(&self.last_window)
    }

    pub fn is_running(&self) -> bool {
        self.status == AppStatus::Running
    }

    /// Digest over every observable field, the input stream position included.
    pub fn digest(&self) -> String {
        json_digest(self)
    }

    /// One JSON object per line, one line per logged event.
    pub fn trace_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.event_log {
            out.push_str(&serde_json::to_string(r).expect("log record serializes"));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WidgetView {
    pub id: String,
    pub triggers: Vec<Trigger>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observation {
    pub current_window: String,
    pub visible_widgets: Vec<WidgetView>,
    pub env_digest: Vec<(String, Sign)>,
    pub status: AppStatus,
}

impl Observation {
    pub fn offers(&self, event: &UiEvent) -> bool {
        self.status == AppStatus::Running
            && self
                .visible_widgets
                .iter()
                .any(|w| w.id == event.widget && w.triggers.contains(&event.trigger))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ratio {
    pub covered: usize,
    pub total: usize,
}

impl Ratio {
    /// An empty domain counts as fully covered.
    pub fn value(&self) -> f64 {
        if self.total == 0 {
            1.0
        } else {
            self.covered as f64 / self.total as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub ratio: f64,
    pub covered: usize,
    pub total: usize,
    pub per_window: BTreeMap<String, Ratio>,
    /// Keyed by `widget:trigger`, or `window:lifecycle`.
    pub per_handler: BTreeMap<String, Ratio>,
}

/// Simulator bound to one app specification.
#[derive(Debug, Clone)]
pub struct Simulator<'a> {
    index: SpecIndex<'a>,
}

impl<'a> Simulator<'a> {
    pub fn new(spec: &'a AppSpec) -> Self {
        Simulator {
            index: SpecIndex::new(spec),
        }
    }

    pub fn spec(&self) -> &'a AppSpec {
        self.index.spec
    }

    pub fn index(&self) -> &SpecIndex<'a> {
        &self.index
    }

    /// Starts the app: pushes the entry window and runs its lifecycle.
    pub fn launch(&self, seed: u64) -> RuntimeState {
        let mut state = RuntimeState {
            window_stack: Vec::new(),
            last_window: self.spec().entry_window.clone(),
            env: Env::new(),
            visibility_overrides: BTreeMap::new(),
            executed_actions: BTreeSet::new(),
            event_log: Vec::new(),
            status: AppStatus::Running,
            seed,
            input_draws: 0,
            launches: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        };
        self.restart(&mut state);
        state
    }

    /// Kills and relaunches the app. Coverage, the event log and the input
    /// stream carry over.
    pub fn restart(&self, state: &mut RuntimeState) {
        state.window_stack.clear();
        state.env = self.spec().variables.iter().map(|v| (v.name.clone(), v.initial)).collect();
        state.visibility_overrides.clear();
        state.status = AppStatus::Running;
        state.launches += 1;
        let entry = self.spec().entry_window.clone();
        let mut executed = Vec::new();
        self.push_window(state, &entry, &mut executed);
    }

    pub fn observe(&self, state: &RuntimeState) -> Observation {
        self.observe_window(state, state.current_window(), state.status)
    }

    /// The observation `pops` implicit back presses would produce, without
    /// touching the state. `None` if that would empty the stack.
    pub fn observe_after_pops(&self, state: &RuntimeState, pops: usize) -> Option<Observation> {
        if !state.is_running() || pops >= state.window_stack.len() {
            return None;
        }
        let window = &state.window_stack[state.window_stack.len() - 1 - pops];
        Some(self.observe_window(state, window, AppStatus::Running))
    }

    /// Whether the back key on `window` only pops it.
    pub fn back_is_plain_pop(&self, window: &str) -> bool {
        self.index
            .window_index(window)
            .and_then(|wi| self.index.resolve(self.index.system_widget_id(wi), Trigger::Back))
            .map(|h| h.handler == ResolvedHandler::ImplicitBack)
            .unwrap_or(false)
    }

    fn observe_window(&self, state: &RuntimeState, window: &str, status: AppStatus) -> Observation {
        let mut visible_widgets: Vec<WidgetView> = Vec::new();
        if status == AppStatus::Running {
            if let Some(wi) = self.index.window_index(window) {
                for h in self.index.handlers_of(wi) {
                    if !self.is_visible(state, &h.widget_id) {
                        continue;
                    }
                    match visible_widgets.last_mut() {
                        Some(v) if v.id == h.widget_id => v.triggers.push(h.trigger),
                        _ => visible_widgets.push(WidgetView {
                            id: h.widget_id.clone(),
                            triggers: vec![h.trigger],
                        }),
                    }
                }
            }
        }
        Observation {
            current_window: window.to_string(),
            visible_widgets,
            env_digest: state.env.iter().map(|(k, v)| (k.clone(), Sign::of(*v))).collect(),
            status,
        }
    }

    pub fn is_visible(&self, state: &RuntimeState, widget: &str) -> bool {
        if let Some(&v) = state.visibility_overrides.get(widget) {
            return v;
        }
        match self.index.widget_ref(widget).and_then(|r| self.index.widget(r)) {
            // Synthesized system widget.
            None => true,
            Some(w) => match &w.visible_if {
                None => true,
                Some(cond) => matches!(cond.eval(&state.env), Ok(Value::Bool(true))),
            },
        }
    }

    pub fn fire(&self, state: &mut RuntimeState, event: &UiEvent) -> Result<Observation, FireError> {
        self.fire_with_input(state, event, None)
    }

    /// Fires an event. For text input, `input` replaces the generated value.
    pub fn fire_with_input(
        &self,
        state: &mut RuntimeState,
        event: &UiEvent,
        input: Option<i64>,
    ) -> Result<Observation, FireError> {
        if !state.is_running() {
            return Err(FireError::NotRunning);
        }
        let unavailable = || FireError::EventNotAvailable {
            widget: event.widget.clone(),
            trigger: event.trigger,
        };
        let top = self
            .index
            .window_index(state.current_window())
            .expect("stack holds declared windows");
        let wref = self.index.widget_ref(&event.widget).ok_or_else(unavailable)?;
        if wref.window != top || !self.is_visible(state, &event.widget) {
            return Err(unavailable());
        }
        let handler = self.index.resolve(&event.widget, event.trigger).ok_or_else(unavailable)?.handler;

        let window_before = state.current_window().to_string();
        let mut record = LogRecord {
            step: state.event_log.len(),
            event: format!("{}:{}", event.widget, event.trigger),
            window_before,
            window_after: String::new(),
            actions: Vec::new(),
            status: AppStatus::Running,
            input: None,
            returned: Vec::new(),
        };
        match handler {
            ResolvedHandler::ImplicitNoop => {}
            ResolvedHandler::ImplicitBack => self.pop_window(state),
            ResolvedHandler::Declared(h) => {
                if let Some(guard) = &h.guard {
                    match guard.eval(&state.env) {
                        Ok(Value::Bool(true)) => {}
                        Ok(_) => {
                            return Err(FireError::GuardRejected {
                                widget: event.widget.clone(),
                                trigger: event.trigger,
                            })
                        }
                        Err(_) => state.status = AppStatus::Crashed,
                    }
                }
                if state.is_running() {
                    if event.trigger == Trigger::TextInput {
                        let value = match input {
                            Some(v) => v,
                            None => self.draw(state),
                        };
                        record.input = Some(value);
                        if let Some(var) = self.index.widget(wref).and_then(|w| w.input.as_ref()) {
                            state.env.insert(var.clone(), value);
                        }
                    }
                    self.run_actions(state, &h.actions, &mut record);
                }
            }
        }
        record.window_after = state.current_window().to_string();
        record.status = state.status;
        state.event_log.push(record);
        Ok(self.observe(state))
    }

    /// Pops the top window, terminating the app when the stack empties.
    pub fn back(&self, state: &mut RuntimeState) -> Result<Observation, FireError> {
        if !state.is_running() {
            return Err(FireError::NotRunning);
        }
        let window_before = state.current_window().to_string();
        self.pop_window(state);
        state.event_log.push(LogRecord {
            step: state.event_log.len(),
            event: "back".into(),
            window_before,
            window_after: state.current_window().to_string(),
            actions: Vec::new(),
            status: state.status,
            input: None,
            returned: Vec::new(),
        });
        Ok(self.observe(state))
    }

    /// Draws the next generated value for a text field, uniform in
    /// `[INPUT_MIN, INPUT_MAX]`.
    pub fn random_input(&self, state: &mut RuntimeState, field: &str) -> Result<i64, FireError> {
        let is_field = self
            .index
            .widget_ref(field)
            .and_then(|r: WidgetRef| self.index.widget(r))
            .map(|w| w.widget_kind == WidgetKind::TextField)
            .unwrap_or(false);
        if !is_field {
            return Err(FireError::NotATextField(field.to_string()));
        }
        Ok(self.draw(state))
    }

    fn draw(&self, state: &mut RuntimeState) -> i64 {
        state.input_draws += 1;
        state.rng.gen_range(INPUT_MIN..=INPUT_MAX)
    }

    pub fn coverage(&self, state: &RuntimeState) -> CoverageReport {
        coverage_of(self.spec(), &state.executed_actions)
    }

    fn push_window(&self, state: &mut RuntimeState, window: &str, record: &mut Vec<String>) {
        state.window_stack.push(window.to_string());
        state.last_window = window.to_string();
        let lifecycle = &self.index.window(self.index.window_index(window).expect("declared window")).lifecycle;
        for action in lifecycle {
            if !state.is_running() {
                break;
            }
            state.executed_actions.insert(action.id.clone());
            record.push(action.id.clone());
            self.apply(state, action, &mut Vec::new());
        }
    }

    fn pop_window(&self, state: &mut RuntimeState) {
        if let Some(top) = state.window_stack.pop() {
            state.last_window = top;
        }
        if let Some(top) = state.window_stack.last() {
            state.last_window = top.clone();
        } else {
            state.status = AppStatus::Terminated;
        }
    }

    fn run_actions(&self, state: &mut RuntimeState, actions: &[Action], record: &mut LogRecord) {
        for action in actions {
            if !state.is_running() {
                break;
            }
            state.executed_actions.insert(action.id.clone());
            record.actions.push(action.id.clone());
            let mut nested = Vec::new();
            let returned = self.apply_recording(state, action, &mut nested);
            record.actions.extend(nested);
            if let Some(r) = returned {
                record.returned.push(r);
            }
        }
    }

    fn apply_recording(
        &self,
        state: &mut RuntimeState,
        action: &Action,
        nested: &mut Vec<String>,
    ) -> Option<Option<Value>> {
        let mut returned = Vec::new();
        self.apply_inner(state, action, nested, &mut returned);
        returned.pop()
    }

    fn apply(&self, state: &mut RuntimeState, action: &Action, nested: &mut Vec<String>) {
        self.apply_inner(state, action, nested, &mut Vec::new());
    }

    fn apply_inner(
        &self,
        state: &mut RuntimeState,
        action: &Action,
        nested: &mut Vec<String>,
        returned: &mut Vec<Option<Value>>,
    ) {
        match &action.effect {
            Effect::OpenWindow { window } => self.push_window(state, window, nested),
            Effect::CloseWindow => self.pop_window(state),
            Effect::TerminateApp => {
                state.window_stack.clear();
                state.status = AppStatus::Terminated;
            }
            Effect::Assign { variable, value } => match value.eval(&state.env) {
                Ok(Value::Int(v)) => {
                    state.env.insert(variable.clone(), v);
                }
                _ => state.status = AppStatus::Crashed,
            },
            Effect::Toggle { widget } => {
                let visible = self.is_visible(state, widget);
                state.visibility_overrides.insert(widget.clone(), !visible);
            }
            Effect::ReturnValue { value } => match value {
                None => returned.push(None),
                Some(e) => match e.eval(&state.env) {
                    Ok(v) => returned.push(Some(v)),
                    Err(_) => state.status = AppStatus::Crashed,
                },
            },
            Effect::Noop => {}
        }
    }
}

/// Starts a fresh simulation of `spec`.
pub fn launch(spec: &AppSpec, seed: u64) -> (Simulator<'_>, RuntimeState) {
    let sim = Simulator::new(spec);
    let state = sim.launch(seed);
    (sim, state)
}

/// Fraction of declared actions present in `executed`, with per-window and
/// per-handler breakdowns.
pub fn coverage_of(spec: &AppSpec, executed: &BTreeSet<String>) -> CoverageReport {
    let mut per_window = BTreeMap::new();
    let mut per_handler = BTreeMap::new();
    let ratio = |actions: &mut dyn Iterator<Item = &Action>| {
        let mut r = Ratio { covered: 0, total: 0 };
        for a in actions {
            r.total += 1;
            if executed.contains(&a.id) {
                r.covered += 1;
            }
        }
        r
    };
    let (mut covered, mut total) = (0, 0);
    for w in &spec.windows {
        let r = ratio(&mut w.actions());
        covered += r.covered;
        total += r.total;
        per_window.insert(w.id.clone(), r);
        if !w.lifecycle.is_empty() {
            per_handler.insert(format!("{}:lifecycle", w.id), ratio(&mut w.lifecycle.iter()));
        }
        for widget in &w.widgets {
            for h in &widget.handlers {
                per_handler.insert(format!("{}:{}", widget.id, h.trigger), ratio(&mut h.actions.iter()));
            }
        }
    }
    let overall = Ratio { covered, total };
    CoverageReport {
        ratio: overall.value(),
        covered,
        total,
        per_window,
        per_handler,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::appspec::parse_app_spec;
    use crate::fixtures;

    fn ev(w: &str, t: Trigger) -> UiEvent {
        UiEvent::new(w, t)
    }

    #[test]
    fn launch_shows_entry_window() {
        let spec = fixtures::open_manager();
        let (sim, state) = launch(&spec, 0);
        let obs = sim.observe(&state);
        assert_eq!(obs.current_window, "main");
        assert_eq!(obs.status, AppStatus::Running);
        assert!(state.event_log.is_empty());
    }

    #[test]
    fn lifecycle_crash() {
        let spec = parse_app_spec(
            r#"{"format": 1, "name": "t", "entry_window": "m", "variables": [{"name": "x", "initial": 0}],
                "windows": [{"id": "m", "kind": "activity", "lifecycle": [
                    {"id": "boom", "effect": {"type": "assign", "variable": "x", "value": "(/ 1 0)"}}]}]}"#,
        )
        .unwrap();
        let (_, state) = launch(&spec, 0);
        assert_eq!(state.status, AppStatus::Crashed);
        assert!(state.executed_actions.contains("boom"));
    }

    #[test]
    fn same_seed_same_digest() {
        let spec = fixtures::open_manager();
        let (sim, mut a) = launch(&spec, 42);
        let mut b = sim.launch(42);
        assert_eq!(a.digest(), b.digest());
        for s in [&mut a, &mut b] {
            sim.fire(s, &ev("file_list", Trigger::LongClick)).unwrap();
            sim.fire(s, &ev("rename_file_item", Trigger::Click)).unwrap();
            sim.fire(s, &ev("rename_field", Trigger::TextInput)).unwrap();
        }
        assert_eq!(a.digest(), b.digest());
        assert_ne!(a.digest(), sim.launch(43).digest());
    }

    #[test]
    fn help_button_opens_dialog() {
        let spec = fixtures::open_manager();
        let (sim, mut state) = launch(&spec, 0);
        let obs = sim.fire(&mut state, &ev("help_button", Trigger::Click)).unwrap();
        assert_eq!(obs.current_window, "help_dialog");
        assert_eq!(state.window_stack, vec!["main", "help_dialog"]);
    }

    #[test]
    fn widget_on_other_window_is_unavailable() {
        let spec = fixtures::open_manager();
        let (sim, mut state) = launch(&spec, 0);
        let before = state.digest();
        let err = sim.fire(&mut state, &ev("email_item", Trigger::Click)).unwrap_err();
        assert!(matches!(err, FireError::EventNotAvailable { .. }));
        assert_eq!(state.digest(), before);
        // Hidden until multi-select mode is on.
        assert!(sim.fire(&mut state, &ev("attach_button", Trigger::Click)).is_err());
        sim.fire(&mut state, &ev("multi_select_button", Trigger::Click)).unwrap();
        assert!(sim.fire(&mut state, &ev("attach_button", Trigger::Click)).is_ok());
    }

    #[test]
    fn rotation_is_a_logged_noop() {
        let spec = fixtures::open_manager();
        let (sim, mut state) = launch(&spec, 0);
        sim.fire(&mut state, &ev("help_button", Trigger::Click)).unwrap();
        for window_sys in ["help_dialog.system", "main_sys"] {
            let log = state.event_log.len();
            let before = state.current_window().to_string();
            let obs = sim.fire(&mut state, &ev(window_sys, Trigger::Rotate)).unwrap();
            assert_eq!(obs.current_window, before);
            assert_eq!(state.event_log.len(), log + 1);
            if window_sys == "help_dialog.system" {
                sim.back(&mut state).unwrap();
            }
        }
    }

    #[test]
    fn guard_rejection_leaves_state_untouched() {
        let spec = fixtures::open_manager();
        let (sim, mut state) = launch(&spec, 0);
        sim.fire(&mut state, &ev("multi_select_button", Trigger::Click)).unwrap();
        for _ in 0..3 {
            sim.fire(&mut state, &ev("delete_button", Trigger::Click)).unwrap();
        }
        let before = state.digest();
        let err = sim.fire(&mut state, &ev("delete_button", Trigger::Click)).unwrap_err();
        assert!(matches!(err, FireError::GuardRejected { .. }));
        assert_eq!(state.digest(), before);
    }

    #[test]
    fn back_navigation() {
        let spec = fixtures::open_manager();
        let (sim, mut state) = launch(&spec, 0);
        sim.fire(&mut state, &ev("help_button", Trigger::Click)).unwrap();
        assert_eq!(sim.back(&mut state).unwrap().current_window, "main");
        let obs = sim.back(&mut state).unwrap();
        assert_eq!(obs.status, AppStatus::Terminated);
        assert_eq!(sim.back(&mut state), Err(FireError::NotRunning));
        assert_eq!(state.event_log.len(), 3);
    }

    #[test]
    fn menu_toggles_items_and_quit_terminates() {
        let spec = fixtures::open_manager();
        let (sim, mut state) = launch(&spec, 0);
        assert!(!sim.observe(&state).offers(&ev("quit_item", Trigger::Click)));
        sim.fire(&mut state, &ev("main_sys", Trigger::Menu)).unwrap();
        assert!(sim.observe(&state).offers(&ev("quit_item", Trigger::Click)));
        let obs = sim.fire(&mut state, &ev("quit_item", Trigger::Click)).unwrap();
        assert_eq!(obs.status, AppStatus::Terminated);
        assert!(state.window_stack.is_empty());
        sim.restart(&mut state);
        assert_eq!(state.status, AppStatus::Running);
        assert!(!sim.observe(&state).offers(&ev("quit_item", Trigger::Click)));
    }

    #[test]
    fn peeking_after_pops_matches_real_pops() {
        let spec = fixtures::open_manager();
        let (sim, mut state) = launch(&spec, 0);
        sim.fire(&mut state, &ev("manage_button", Trigger::Click)).unwrap();
        sim.fire(&mut state, &ev("process_item", Trigger::Click)).unwrap();
        let depth = state.window_stack.len();
        let peeked: Vec<Observation> = (0..depth).map(|k| sim.observe_after_pops(&state, k).unwrap()).collect();
        assert!(sim.observe_after_pops(&state, depth).is_none());
        for expected in peeked.iter().skip(1) {
            assert!(sim.back_is_plain_pop(state.current_window()));
            assert_eq!(&sim.back(&mut state).unwrap(), expected);
        }
    }

    #[test]
    fn random_input_is_seeded() {
        let spec = fixtures::open_manager();
        let sim = Simulator::new(&spec);
        let mut a = sim.launch(42);
        let mut b = sim.launch(42);
        let v0 = sim.random_input(&mut a, "rename_field").unwrap();
        assert_eq!(v0, sim.random_input(&mut b, "rename_field").unwrap());
        assert!((INPUT_MIN..=INPUT_MAX).contains(&v0));
        assert_eq!(a.input_draws, 1);
        assert_eq!(
            sim.random_input(&mut a, "help_button"),
            Err(FireError::NotATextField("help_button".into()))
        );
    }

    #[test]
    fn successive_draws_differ_over_many_seeds() {
        let spec = fixtures::open_manager();
        let sim = Simulator::new(&spec);
        let differing = (0..1000u64)
            .filter(|&seed| {
                let mut s = sim.launch(seed);
                sim.random_input(&mut s, "query_field").unwrap() != sim.random_input(&mut s, "query_field").unwrap()
            })
            .count();
        // Equal consecutive draws occur with probability 1/201 per seed.
        assert!(differing >= 980, "{differing}");
    }

    #[test]
    fn text_input_assigns_input_variable() {
        let spec = fixtures::open_manager();
        let (sim, mut state) = launch(&spec, 3);
        sim.fire(&mut state, &ev("file_list", Trigger::LongClick)).unwrap();
        sim.fire(&mut state, &ev("rename_file_item", Trigger::Click)).unwrap();
        sim.fire_with_input(&mut state, &ev("rename_field", Trigger::TextInput), Some(17)).unwrap();
        assert_eq!(state.env["name_len"], 17);
        assert_eq!(state.input_draws, 0);
        assert_eq!(state.event_log.last().unwrap().input, Some(17));
    }

    #[test]
    fn coverage_accounting() {
        let spec = fixtures::open_manager();
        let (sim, mut state) = launch(&spec, 0);
        let total = spec.action_ids().len();
        let cov = sim.coverage(&state);
        // The entry window has no lifecycle actions.
        assert_eq!((cov.covered, cov.total), (0, total));
        sim.fire(&mut state, &ev("dir_info_button", Trigger::Click)).unwrap();
        let cov = sim.coverage(&state);
        // main_open_dir_info + dirinfo_load
        assert_eq!(cov.covered, 2);
        assert_eq!(cov.per_window["directory_info"].covered, 1);
        assert_eq!(cov.per_handler["directory_info:lifecycle"], Ratio { covered: 1, total: 1 });

        let empty = parse_app_spec(r#"{"format": 1, "name": "t", "entry_window": "m", "windows": [{"id": "m", "kind": "activity"}]}"#).unwrap();
        assert_eq!(coverage_of(&empty, &BTreeSet::new()).ratio, 1.0);
        let all: BTreeSet<String> = spec.action_ids().into_iter().map(String::from).collect();
        assert_eq!(coverage_of(&spec, &all).ratio, 1.0);
    }

    #[test]
    fn return_values_are_logged() {
        let spec = fixtures::calculator();
        let (sim, mut state) = launch(&spec, 0);
        sim.fire(&mut state, &ev("peek_button", Trigger::Click)).unwrap();
        assert_eq!(state.event_log[0].returned, vec![Some(Value::Int(4))]);
        let line = state.trace_jsonl();
        assert!(line.contains("\"window_before\":\"main\""));
        assert_eq!(line.lines().count(), 1);
    }
}
