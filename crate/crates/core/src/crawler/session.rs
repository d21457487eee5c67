use std::collections::{HashMap, HashSet};
use std::time::Instant;

use super::{AbstractState, CrawlConfig, CrawlReport, FsmModel, ModelMetadata, Strategy, Transition};
use crate::digest::json_digest;
use crate::event_tracking::EventEntry;
use crate::runtime::{coverage_of, FireError, RuntimeState, Simulator, UiEvent};

/// Outcome of a fired event that the app accepted.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Fired {
    pub target: usize,
    pub transition: usize,
}

/// One exploration run: a runtime, the model under construction and the
/// counters that end up in the report.
pub(crate) struct Session<'s, 'a> {
    pub sim: &'s Simulator<'a>,
    pub rt: RuntimeState,
    pub config: CrawlConfig,
    strategy: Strategy,
    states: Vec<AbstractState>,
    state_ids: HashMap<AbstractState, usize>,
    transitions: Vec<Transition>,
    transition_ids: HashMap<(usize, String, usize), usize>,
    entries: HashMap<String, EventEntry>,
    pub current: usize,
    pub initial: usize,
    pub fired: usize,
    pub replayed: usize,
    pub relaunches: usize,
    pub exhausted: bool,
    guard_rejected: Vec<String>,
    guard_seen: HashSet<String>,
    pub unreachable: Vec<String>,
    started: Instant,
}

impl<'s, 'a> Session<'s, 'a> {
    pub fn new(
        sim: &'s Simulator<'a>,
        config: &CrawlConfig,
        strategy: Strategy,
        entries: HashMap<String, EventEntry>,
    ) -> Self {
        let started = Instant::now();
        let rt = sim.launch(config.seed);
        let mut s = Session {
            sim,
            rt,
            config: config.clone(),
            strategy,
            states: Vec::new(),
            state_ids: HashMap::new(),
            transitions: Vec::new(),
            transition_ids: HashMap::new(),
            entries,
            current: 0,
            initial: 0,
            fired: 0,
            replayed: 0,
            relaunches: 0,
            exhausted: false,
            guard_rejected: Vec::new(),
            guard_seen: HashSet::new(),
            unreachable: Vec::new(),
            started,
        };
        s.current = s.observe();
        s.initial = s.current;
        s
    }

    pub fn states(&self) -> &[AbstractState] {
        &self.states
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn lookup(&self, state: &AbstractState) -> Option<usize> {
        self.state_ids.get(state).copied()
    }

    pub fn transition(&self, id: usize) -> &Transition {
        &self.transitions[id]
    }

    pub fn intern(&mut self, state: AbstractState) -> usize {
        if let Some(&id) = self.state_ids.get(&state) {
            return id;
        }
        let id = self.states.len();
        self.states.push(state.clone());
        self.state_ids.insert(state, id);
        id
    }

    pub fn observe(&mut self) -> usize {
        let obs = self.sim.observe(&self.rt);
        self.intern(AbstractState::from_observation(&obs))
    }

    pub fn is_running(&self) -> bool {
        self.rt.is_running()
    }

    pub fn offers_now(&self, event: &UiEvent) -> bool {
        self.states[self.current].offers(event)
    }

    /// True while another fire fits in the budget; latches `exhausted`.
    pub fn has_budget(&mut self) -> bool {
        if self.fired >= self.config.budget {
            self.exhausted = true;
        }
        !self.exhausted
    }

    /// Entry describing `event` on the current window.
    pub fn entry_for(&self, event: &UiEvent) -> EventEntry {
        let window = self.rt.current_window();
        let id = format!("{window}/{}/{}", event.widget, event.trigger);
        if let Some(e) = self.entries.get(&id) {
            return e.clone();
        }
        let h = self
            .sim
            .index()
            .resolve(&event.widget, event.trigger)
            .expect("offered events resolve to a handler");
        EventEntry::new(window, &event.widget, h.widget_kind, h.trigger, &h.trigger_method, 0)
    }

    /// Fires `entry` and records the witnessed transition. Replays count
    /// towards both `fired` and `replayed`.
    pub fn fire(&mut self, entry: &EventEntry, input: Option<i64>, replay: bool) -> Result<Fired, FireError> {
        let event = UiEvent::from(entry);
        let result = self.sim.fire_with_input(&mut self.rt, &event, input);
        match &result {
            Err(FireError::EventNotAvailable { .. }) | Err(FireError::NotRunning) => {}
            _ => {
                self.fired += 1;
                if replay {
                    self.replayed += 1;
                }
            }
        }
        if let Err(FireError::GuardRejected { .. }) = &result {
            if self.guard_seen.insert(entry.event_id.clone()) {
                self.guard_rejected.push(entry.event_id.clone());
            }
        }
        let obs = result?;
        let used_input = if event.trigger == crate::appspec::Trigger::TextInput {
            self.rt.event_log.last().and_then(|r| r.input)
        } else {
            None
        };
        let source = self.current;
        let target = self.intern(AbstractState::from_observation(&obs));
        let key = (source, entry.event_id.clone(), target);
        let transition = match self.transition_ids.get(&key) {
            Some(&t) => t,
            None => {
                let t = self.transitions.len();
                self.transitions.push(Transition {
                    source,
                    target,
                    event: entry.clone(),
                    input: used_input,
                });
                self.transition_ids.insert(key, t);
                t
            }
        };
        self.current = target;
        Ok(Fired { target, transition })
    }

    pub fn relaunch(&mut self) {
        self.sim.restart(&mut self.rt);
        self.relaunches += 1;
        self.current = self.observe();
    }

    /// Restarts the app and replays `path` (transition ids). Returns false
    /// on divergence or when the budget runs out.
    pub fn replay_from_launch(&mut self, path: &[usize]) -> bool {
        self.relaunch();
        for &t in path {
            if !self.has_budget() {
                return false;
            }
            let Transition { event, input, target, .. } = self.transitions[t].clone();
            match self.fire(&event, input, true) {
                Ok(f) if f.target == target => {}
                _ => return false,
            }
        }
        true
    }

    /// Snapshot of the model built so far.
    pub fn model(&self) -> FsmModel {
        FsmModel {
            app: self.sim.spec().name.clone(),
            states: self.states.clone(),
            initial: self.initial,
            transitions: self.transitions.clone(),
            metadata: ModelMetadata {
                spec_digest: json_digest(self.sim.spec()),
                strategy: self.strategy,
                seed: self.config.seed,
                budget: self.config.budget,
                fired: self.fired,
                replayed: self.replayed,
                relaunches: self.relaunches,
                complete: !self.exhausted,
            },
        }
    }

    pub fn finish(self) -> (FsmModel, CrawlReport) {
        let model = self.model();
        let report = CrawlReport {
            strategy: self.strategy,
            fired: self.fired,
            replayed: self.replayed,
            states: model.states.len(),
            discovered_windows: model.windows().len(),
            transitions: model.transitions.len(),
            coverage: coverage_of(self.sim.spec(), &self.rt.executed_actions).ratio,
            wall_time_s: self.started.elapsed().as_secs_f64(),
            unreachable_events: self.unreachable,
            guard_rejected: self.guard_rejected,
            relaunches: self.relaunches,
            complete: !self.exhausted,
        };
        (model, report)
    }
}
