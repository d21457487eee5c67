use std::collections::{HashMap, HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::session::Session;
use super::{check_input, dynamic_alphabet, CrawlConfig, CrawlError, CrawlReport, FsmModel, Strategy};
use crate::appspec::AppSpec;
use crate::runtime::{FireError, Simulator, UiEvent};

/// Explores without static knowledge using `strategy`.
///
/// # Panics
/// If `strategy` is [`Strategy::Hybrid`], which needs an event set.
pub fn baseline_crawl(
    spec: &AppSpec,
    strategy: Strategy,
    config: &CrawlConfig,
) -> Result<(FsmModel, CrawlReport), CrawlError> {
    check_input(spec, config)?;
    let sim = Simulator::new(spec);
    let mut s = Session::new(&sim, config, strategy, HashMap::new());
    match strategy {
        Strategy::Random => random(&mut s),
        Strategy::Dfs => dfs(&mut s),
        Strategy::Bfs => bfs(&mut s),
        Strategy::Hybrid => panic!("the hybrid strategy is run by `crawl`"),
    }
    Ok(s.finish())
}

fn alphabet(s: &Session, state: usize) -> Vec<UiEvent> {
    let index = s.sim.index();
    dynamic_alphabet(&s.states()[state], |w| index.is_system_widget(w), &s.config)
}

fn fire_event(s: &mut Session, event: &UiEvent) -> Option<super::session::Fired> {
    let entry = s.entry_for(event);
    match s.fire(&entry, None, false) {
        Ok(f) => Some(f),
        Err(FireError::GuardRejected { .. }) => None,
        Err(e) => panic!("alphabet offered an unavailable event: {e}"),
    }
}

/// Uniform choice among available events until the budget runs out.
fn random(s: &mut Session) {
    let mut rng = ChaCha8Rng::seed_from_u64(s.config.seed);
    rng.set_stream(1);
    let mut fresh = true;
    while s.has_budget() {
        if !s.is_running() {
            s.relaunch();
            fresh = true;
        }
        let events = alphabet(s, s.current);
        if events.is_empty() {
            if fresh {
                break;
            }
            s.relaunch();
            fresh = true;
            continue;
        }
        let pick = rng.gen_range(0..events.len());
        fire_event(s, &events[pick]);
        fresh = false;
    }
}

struct Frame {
    state: usize,
    path: Vec<usize>,
    untried: VecDeque<UiEvent>,
}

/// Depth-first exploration. An event leading to an already expanded or
/// terminal state is followed by a restart and a replay of the discovery
/// path of the state on top of the stack.
fn dfs(s: &mut Session) {
    let mut at_top = true;
    let mut expanded: HashSet<usize> = HashSet::from([s.current]);
    let mut frames = vec![Frame {
        state: s.current,
        path: Vec::new(),
        untried: alphabet(s, s.current).into(),
    }];
    while let Some(top) = frames.last_mut() {
        let Some(event) = top.untried.pop_front() else {
            frames.pop();
            continue;
        };
        if !s.has_budget() {
            break;
        }
        let (state, path) = (top.state, top.path.clone());
        if !at_top || s.current != state || !s.is_running() {
            if !s.replay_from_launch(&path) {
                if s.exhausted {
                    break;
                }
                frames.pop();
                continue;
            }
            at_top = true;
        }
        if !s.has_budget() {
            break;
        }
        let Some(f) = fire_event(s, &event) else { continue };
        at_top = s.is_running() && expanded.insert(f.target);
        if at_top {
            let mut next_path = path;
            next_path.push(f.transition);
            frames.push(Frame {
                state: f.target,
                path: next_path,
                untried: alphabet(s, f.target).into(),
            });
        }
    }
}

/// Breadth-first exploration: every event of every state is fired after a
/// restart and a replay of that state's discovery path.
fn bfs(s: &mut Session) {
    let mut seen: HashSet<usize> = HashSet::from([s.current]);
    let mut queue: VecDeque<(usize, Vec<usize>)> = VecDeque::from([(s.current, Vec::new())]);
    'outer: while let Some((state, path)) = queue.pop_front() {
        for event in alphabet(s, state) {
            if !s.has_budget() {
                break 'outer;
            }
            if (s.current != state || !s.is_running()) && !s.replay_from_launch(&path) {
                if s.exhausted {
                    break 'outer;
                }
                continue 'outer;
            }
            if !s.has_budget() {
                break 'outer;
            }
            let Some(f) = fire_event(s, &event) else { continue };
            if seen.insert(f.target) && s.is_running() {
                let mut next = path.clone();
                next.push(f.transition);
                queue.push_back((f.target, next));
            }
        }
    }
}
