use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::{FsmModel, Transition};
use crate::runtime::UiEvent;

/// Shortest sequence of witnessed transitions from one of several sources.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Route {
    /// Index into the `sources` slice the route starts from.
    pub source: usize,
    pub target: usize,
    pub transitions: Vec<usize>,
    /// Source cost plus one per transition.
    pub cost: u32,
}

/// Multi-source Dijkstra with unit edge weights. Each source carries an
/// initial cost. Ties are broken by source order, then by transition order.
pub fn shortest_route(
    model: &FsmModel,
    sources: &[(usize, u32)],
    is_target: impl Fn(usize) -> bool,
    usable: impl Fn(usize) -> bool,
) -> Option<Route> {
    route_over(model.states.len(), &model.transitions, sources, is_target, usable)
}

pub(crate) fn route_over(
    n: usize,
    transitions: &[Transition],
    sources: &[(usize, u32)],
    is_target: impl Fn(usize) -> bool,
    usable: impl Fn(usize) -> bool,
) -> Option<Route> {
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, t) in transitions.iter().enumerate() {
        if usable(i) {
            adjacency[t.source].push(i);
        }
    }
    let mut dist = vec![u32::MAX; n];
    // (source index, transition into node)
    let mut origin: Vec<Option<(usize, Option<usize>)>> = vec![None; n];
    let mut heap = BinaryHeap::new();
    let mut counter = 0u64;
    for (si, &(state, cost)) in sources.iter().enumerate() {
        if state < n && cost < dist[state] {
            dist[state] = cost;
            origin[state] = Some((si, None));
            heap.push(Reverse((cost, counter, state)));
            counter += 1;
        }
    }
    let mut done = vec![false; n];
    while let Some(Reverse((d, _, node))) = heap.pop() {
        if done[node] || d > dist[node] {
            continue;
        }
        done[node] = true;
        if is_target(node) {
            let mut path = Vec::new();
            let mut cur = node;
            let source = loop {
                let (si, via) = origin[cur].expect("settled node has an origin");
                match via {
                    Some(t) => {
                        path.push(t);
                        cur = transitions[t].source;
                    }
                    None => break si,
                }
            };
            path.reverse();
            return Some(Route {
                source,
                target: node,
                transitions: path,
                cost: d,
            });
        }
        for &t in &adjacency[node] {
            let next = transitions[t].target;
            let nd = d + 1;
            if nd < dist[next] {
                dist[next] = nd;
                origin[next] = Some((origin[node].expect("settled").0, Some(t)));
                heap.push(Reverse((nd, counter, next)));
                counter += 1;
            }
        }
    }
    None
}

/// Shortest witnessed path from `from` to any state offering `event`.
/// Empty when `from` already offers it.
pub fn plan(model: &FsmModel, from: usize, event: &UiEvent) -> Option<Vec<usize>> {
    shortest_route(model, &[(from, 0)], |s| model.states[s].offers(event), |_| true).map(|r| r.transitions)
}
