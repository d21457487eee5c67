//! Windows transition graph (WTG) extraction.
//!
//! Every fireable (widget, trigger) pair of every window becomes one edge:
//! `open_window` handlers yield open edges, `close_window`, `terminate_app`
//! and back yield close edges towards the statically predicted launcher,
//! and handlers that leave the window stack untouched yield self edges.
//! Guards are ignored here; the graph over-approximates what the runtime
//! will allow.

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::appspec::{validate, AppSpec, Effect, ResolvedHandler, SpecIndex, Trigger, WidgetKind, WindowKind};

#[derive(Debug, Error)]
pub enum StaticError {
    #[error("app spec has {0} validation error(s)")]
    InvalidSpec(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    Open,
    Close,
    #[serde(rename = "self")]
    SelfLoop,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WtgNode {
    pub window: String,
    pub kind: WindowKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EventLabel {
    pub widget: String,
    pub widget_kind: WidgetKind,
    /// Declaration position of the widget within its window.
    pub widget_order: usize,
    pub trigger: Trigger,
    pub trigger_method: String,
}

impl EventLabel {
    pub fn short(&self) -> String {
        format!("{}:{}", self.widget, self.trigger)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WtgEdge {
    pub source: usize,
    pub target: usize,
    pub event: EventLabel,
    /// Execution-sequence label; 0 means unlabeled.
    pub sequence: u32,
    pub kind: EdgeKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Wtg {
    pub nodes: Vec<WtgNode>,
    pub edges: Vec<WtgEdge>,
    pub root: usize,
}

impl Wtg {
    pub fn node_index(&self, window: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.window == window)
    }

    pub fn outgoing(&self, node: usize) -> impl Iterator<Item = (usize, &WtgEdge)> {
        self.edges.iter().enumerate().filter(move |(_, e)| e.source == node)
    }

    /// Edge indices in ascending sequence order.
    pub fn edges_by_sequence(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.edges.len()).collect();
        order.sort_by_key(|&i| (self.edges[i].sequence, i));
        order
    }

    /// Breadth-first depth of every node from the root; `None` when
    /// unreachable.
    pub fn depths(&self) -> Vec<Option<usize>> {
        let mut depth = vec![None; self.nodes.len()];
        if self.root >= self.nodes.len() {
            return depth;
        }
        depth[self.root] = Some(0);
        let mut queue = VecDeque::from([self.root]);
        while let Some(n) = queue.pop_front() {
            let d = depth[n].unwrap();
            for (_, e) in self.outgoing(n) {
                if depth[e.target].is_none() {
                    depth[e.target] = Some(d + 1);
                    queue.push_back(e.target);
                }
            }
        }
        depth
    }

    pub fn count(&self, kind: EdgeKind) -> usize {
        self.edges.iter().filter(|e| e.kind == kind).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("wtg serializes")
    }
}

/// Builds the labeled WTG of a valid app spec.
pub fn build_wtg(spec: &AppSpec) -> Result<Wtg, StaticError> {
    let errors = validate(spec).iter().filter(|d| d.is_error()).count();
    if errors > 0 {
        return Err(StaticError::InvalidSpec(errors));
    }
    let index = SpecIndex::new(spec);
    let nodes: Vec<WtgNode> = spec
        .windows
        .iter()
        .map(|w| WtgNode {
            window: w.id.clone(),
            kind: w.kind,
        })
        .collect();
    let root = index.entry();
    let launcher = predicted_launchers(&index);

    let mut edges = Vec::new();
    for (wi, _) in spec.windows.iter().enumerate() {
        let close_target = launcher[wi].unwrap_or(wi);
        for h in index.handlers_of(wi) {
            let (kind, target) = match h.handler {
                ResolvedHandler::ImplicitBack if wi == root => continue,
                ResolvedHandler::ImplicitBack => (EdgeKind::Close, close_target),
                ResolvedHandler::ImplicitNoop => (EdgeKind::SelfLoop, wi),
                ResolvedHandler::Declared(handler) => {
                    match handler.actions.iter().map(|a| &a.effect).find(|e| e.switches_window()) {
                        Some(Effect::OpenWindow { window }) => (
                            EdgeKind::Open,
                            index.window_index(window).expect("validated reference"),
                        ),
                        Some(Effect::TerminateApp) => (EdgeKind::Close, wi),
                        Some(_) => (EdgeKind::Close, close_target),
                        None => (EdgeKind::SelfLoop, wi),
                    }
                }
            };
            edges.push(WtgEdge {
                source: wi,
                target,
                event: EventLabel {
                    widget: h.widget_id.clone(),
                    widget_kind: h.widget_kind,
                    widget_order: h.widget_order,
                    trigger: h.trigger,
                    trigger_method: h.trigger_method.clone(),
                },
                sequence: 0,
                kind,
            });
        }
    }
    Ok(assign_sequence_labels(Wtg { nodes, edges, root }))
}

/// For each window, the first window found to open it in a breadth-first
/// scan of open edges from the entry window.
fn predicted_launchers(index: &SpecIndex<'_>) -> Vec<Option<usize>> {
    let spec = index.spec;
    let mut launcher = vec![None; spec.windows.len()];
    let mut seen = vec![false; spec.windows.len()];
    let root = index.entry();
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(wi) = queue.pop_front() {
        for h in index.handlers_of(wi) {
            let ResolvedHandler::Declared(handler) = h.handler else { continue };
            for action in &handler.actions {
                if let Effect::OpenWindow { window } = &action.effect {
                    let t = index.window_index(window).expect("validated reference");
                    if !seen[t] {
                        seen[t] = true;
                        launcher[t] = Some(wi);
                        queue.push_back(t);
                    }
                }
            }
        }
    }
    launcher
}

/// Relabels edges with consecutive sequence numbers from 1. Edges are
/// banded by the breadth-first depth of their source (unreachable sources
/// last); within a band they are ordered by source window, widget position
/// and trigger.
pub fn assign_sequence_labels(mut wtg: Wtg) -> Wtg {
    let depths = wtg.depths();
    let mut order: Vec<usize> = (0..wtg.edges.len()).collect();
    order.sort_by_key(|&i| {
        let e = &wtg.edges[i];
        let band = depths.get(e.source).copied().flatten().unwrap_or(usize::MAX);
        (band, e.source, e.event.widget_order, e.event.trigger, i)
    });
    for (label, &i) in order.iter().enumerate() {
        wtg.edges[i].sequence = label as u32 + 1;
    }
    wtg
}

/// Graphviz rendering; edges appear in sequence order, labeled `event/S`.
pub fn export_wtg_dot(wtg: &Wtg) -> String {
    let mut out = String::from("digraph wtg {\n  rankdir=LR;\n");
    for (i, n) in wtg.nodes.iter().enumerate() {
        let shape = match n.kind {
            WindowKind::Activity => "box",
            WindowKind::Dialog => "ellipse",
            WindowKind::Menu => "note",
        };
        let root = if i == wtg.root { ", peripheries=2" } else { "" };
        let _ = writeln!(out, "  \"{}\" [shape={shape}{root}];", n.window);
    }
    for i in wtg.edges_by_sequence() {
        let e = &wtg.edges[i];
        let style = match e.kind {
            EdgeKind::Open => "solid",
            EdgeKind::Close => "dashed",
            EdgeKind::SelfLoop => "dotted",
        };
        let _ = writeln!(
            out,
            "  \"{}\" -> \"{}\" [label=\"{}/{}\", style={style}];",
            wtg.nodes[e.source].window,
            wtg.nodes[e.target].window,
            e.event.short(),
            e.sequence
        );
    }
    out.push_str("}\n");
    out
}
