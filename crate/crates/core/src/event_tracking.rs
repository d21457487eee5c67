//! Ordered event-set extraction from a labeled WTG.
//!
//! Traversal starts from the root at priority 0 and repeatedly dequeues the
//! frontier node with the smallest edge label. Each node is expanded once;
//! all of its outgoing edges are recorded and its neighbours enqueued with
//! the label of the connecting edge. Recorded edges are finally emitted in
//! ascending label order, each resolved to its source window, widget and
//! trigger method.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::appspec::{Trigger, WidgetKind};
use crate::static_analysis::Wtg;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TrackError {
    #[error("graph has no root node")]
    NoRoot,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ViewParams {
    pub widget_id: String,
    pub widget_kind: WidgetKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EventEntry {
    pub event_id: String,
    pub source_window: String,
    pub widget: String,
    pub trigger: Trigger,
    pub trigger_method: String,
    pub view_params: ViewParams,
    /// Sequence label of the originating WTG edge; 0 for events discovered
    /// dynamically.
    pub sequence: u32,
}

impl EventEntry {
    pub fn new(
        source_window: &str,
        widget: &str,
        widget_kind: WidgetKind,
        trigger: Trigger,
        trigger_method: &str,
        sequence: u32,
    ) -> Self {
        EventEntry {
            event_id: format!("{source_window}/{widget}/{trigger}"),
            source_window: source_window.to_string(),
            widget: widget.to_string(),
            trigger,
            trigger_method: trigger_method.to_string(),
            view_params: ViewParams {
                widget_id: widget.to_string(),
                widget_kind,
            },
            sequence,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventSet {
    pub entries: Vec<EventEntry>,
    /// Windows the traversal never reached; their events are omitted.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unreachable_windows: Vec<String>,
}

impl EventSet {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("event set serializes")
    }
}

/// Runs the priority-queue traversal and returns the ordered event set.
/// Equal priorities are dequeued in insertion order.
pub fn track_events(wtg: &Wtg) -> Result<EventSet, TrackError> {
    if wtg.root >= wtg.nodes.len() {
        return Err(TrackError::NoRoot);
    }
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); wtg.nodes.len()];
    for (i, e) in wtg.edges.iter().enumerate() {
        adjacency[e.source].push(i);
    }

    let mut queue = BinaryHeap::new();
    let mut inserted = 0u64;
    queue.push(Reverse((0u32, inserted, wtg.root)));
    let mut visited = vec![false; wtg.nodes.len()];
    let mut recorded: Vec<usize> = Vec::new();

    while let Some(Reverse((_, _, node))) = queue.pop() {
        if visited[node] {
            continue;
        }
        visited[node] = true;
        for &edge in &adjacency[node] {
            recorded.push(edge);
            let e = &wtg.edges[edge];
            if !visited[e.target] {
                inserted += 1;
                queue.push(Reverse((e.sequence, inserted, e.target)));
            }
        }
    }

    recorded.sort_by_key(|&i| wtg.edges[i].sequence);
    let entries = recorded
        .into_iter()
        .map(|i| {
            let e = &wtg.edges[i];
            EventEntry::new(
                &wtg.nodes[e.source].window,
                &e.event.widget,
                e.event.widget_kind,
                e.event.trigger,
                &e.event.trigger_method,
                e.sequence,
            )
        })
        .collect();
    let unreachable_windows = wtg
        .nodes
        .iter()
        .zip(&visited)
        .filter(|(_, &v)| !v)
        .map(|(n, _)| n.window.clone())
        .collect();
    Ok(EventSet {
        entries,
        unreachable_windows,
    })
}
