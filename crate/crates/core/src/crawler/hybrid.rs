use std::collections::HashSet;

use super::route::route_over;
use super::session::Session;
use super::{check_input, entry_table, AbstractState, CrawlConfig, CrawlError, CrawlReport, FsmModel, Strategy};
use crate::appspec::{AppSpec, Trigger};
use crate::event_tracking::{EventEntry, EventSet};
use crate::runtime::{FireError, Simulator, UiEvent};

enum Outcome {
    Fired,
    Rejected,
    Unreachable,
    OutOfBudget,
}

/// Fires every entry of `es` in order, reaching each entry's host state by
/// the cheapest witnessed route. Entries that cannot be reached get one
/// more attempt after the first pass and are then reported unreachable.
pub fn crawl(spec: &AppSpec, es: &EventSet, config: &CrawlConfig) -> Result<(FsmModel, CrawlReport), CrawlError> {
    check_input(spec, config)?;
    let sim = Simulator::new(spec);
    let mut s = Session::new(&sim, config, Strategy::Hybrid, entry_table(es));

    let mut deferred: Vec<&EventEntry> = Vec::new();
    let mut out_of_budget = false;
    for entry in &es.entries {
        match try_event(&mut s, entry) {
            Outcome::Fired | Outcome::Rejected => {}
            Outcome::Unreachable => deferred.push(entry),
            Outcome::OutOfBudget => {
                out_of_budget = true;
                break;
            }
        }
    }
    if !out_of_budget {
        for entry in deferred {
            match try_event(&mut s, entry) {
                Outcome::Fired | Outcome::Rejected => {}
                Outcome::Unreachable => s.unreachable.push(entry.event_id.clone()),
                Outcome::OutOfBudget => break,
            }
        }
    }
    Ok(s.finish())
}

fn try_event(s: &mut Session, entry: &EventEntry) -> Outcome {
    let event = UiEvent::from(entry);
    match reach(s, &event) {
        Reach::Ready => {}
        Reach::Failed => return Outcome::Unreachable,
        Reach::OutOfBudget => return Outcome::OutOfBudget,
    }
    if !s.has_budget() {
        return Outcome::OutOfBudget;
    }
    match s.fire(entry, None, false) {
        Ok(_) => {
            if !s.is_running() {
                s.relaunch();
            }
            Outcome::Fired
        }
        Err(FireError::GuardRejected { .. }) => Outcome::Rejected,
        Err(_) => Outcome::Unreachable,
    }
}

enum Reach {
    Ready,
    Failed,
    OutOfBudget,
}

/// Moves the runtime to a state offering `event`.
///
/// Candidate starts are the current stack frames, each costing the number
/// of back presses needed to expose it, and a relaunch costing 1. A replay
/// step that lands elsewhere bans that transition and triggers a new plan.
fn reach(s: &mut Session, event: &UiEvent) -> Reach {
    let mut banned: HashSet<usize> = HashSet::new();
    for _ in 0..=s.config.max_replans {
        if s.is_running() && s.offers_now(event) {
            return Reach::Ready;
        }

        let mut sources: Vec<(usize, u32)> = Vec::new();
        let mut pop_counts: Vec<usize> = Vec::new();
        let mut direct_pop: Option<usize> = None;
        if s.is_running() {
            let depth = s.rt.window_stack.len();
            for k in 0..depth {
                if k > 0 && !s.sim.back_is_plain_pop(&s.rt.window_stack[depth - k]) {
                    break;
                }
                let Some(obs) = s.sim.observe_after_pops(&s.rt, k) else { break };
                let st = AbstractState::from_observation(&obs);
                if direct_pop.is_none() && st.offers(event) {
                    direct_pop = Some(k);
                }
                if let Some(id) = s.lookup(&st) {
                    sources.push((id, k as u32));
                    pop_counts.push(k);
                }
            }
        }
        let relaunch_cost = u32::from(s.is_running());
        sources.push((s.initial, relaunch_cost));

        let route = route_over(
            s.states().len(),
            s.transitions(),
            &sources,
            |st| s.states()[st].offers(event),
            |t| !banned.contains(&t),
        );
        let pop_wins = match (&route, direct_pop) {
            (_, None) => false,
            (None, Some(_)) => true,
            (Some(r), Some(k)) => k as u32 <= r.cost,
        };
        if pop_wins {
            match pop(s, direct_pop.expect("checked")) {
                Ok(()) => continue,
                Err(r) => return r,
            }
        }
        let Some(route) = route else { return Reach::Failed };

        if route.source == pop_counts.len() {
            s.relaunch();
        } else if let Err(r) = pop(s, pop_counts[route.source]) {
            return r;
        }
        if s.current != sources[route.source].0 {
            // The stack frame or launch state was not what the model predicted.
            continue;
        }
        for &t in &route.transitions {
            if !s.has_budget() {
                return Reach::OutOfBudget;
            }
            let tr = s.transition(t).clone();
            match s.fire(&tr.event, tr.input, true) {
                Ok(f) if f.target == tr.target => {}
                _ => {
                    banned.insert(t);
                    break;
                }
            }
        }
    }
    if s.is_running() && s.offers_now(event) {
        Reach::Ready
    } else {
        Reach::Failed
    }
}

/// Presses back `k` times on frames whose back key only pops.
fn pop(s: &mut Session, k: usize) -> Result<(), Reach> {
    for _ in 0..k {
        if !s.has_budget() {
            return Err(Reach::OutOfBudget);
        }
        let window = s.rt.current_window().to_string();
        let wi = s.sim.index().window_index(&window).expect("declared window");
        let back = UiEvent::new(s.sim.index().system_widget_id(wi), Trigger::Back);
        let entry = s.entry_for(&back);
        if s.fire(&entry, None, true).is_err() {
            return Err(Reach::Failed);
        }
    }
    Ok(())
}
