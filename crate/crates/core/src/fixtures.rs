//! Bundled app specifications.

use crate::appspec::{parse_app_spec, Action, AppSpec, Effect, EventHandler, Trigger, Widget, WidgetKind, Window, WindowKind};

pub const OPEN_MANAGER_JSON: &str = include_str!("../fixtures/open_manager.json");
pub const CALCULATOR_JSON: &str = include_str!("../fixtures/calculator.json");
pub const CALCULATOR_EQUIVALENT_JSON: &str = include_str!("../fixtures/calculator_equivalent.json");

fn load(text: &str) -> AppSpec {
    parse_app_spec(text).expect("bundled fixture is valid")
}

/// File-manager app: five activities and eight dialogs, two of them only
/// reachable through long clicks and three only through the options menu.
pub fn open_manager() -> AppSpec {
    load(OPEN_MANAGER_JSON)
}

/// Arithmetic app whose generated mutants are all killable.
pub fn calculator() -> AppSpec {
    load(CALCULATOR_JSON)
}

/// Arithmetic app containing `(* count 1)`, whose `/` replacement is an
/// equivalent mutant.
pub fn calculator_equivalent() -> AppSpec {
    load(CALCULATOR_EQUIVALENT_JSON)
}

/// Linear app `w0 -> w1 -> ... -> w{depth}`. Every window has a `refresh`
/// button with no effect; all but the last have a `next` button.
pub fn chain(depth: usize) -> AppSpec {
    let windows = (0..=depth)
        .map(|i| {
            let mut widgets = Vec::new();
            if i < depth {
                widgets.push(button(
                    format!("next_{i}"),
                    "onNext",
                    Action {
                        id: format!("open_{}", i + 1),
                        effect: Effect::OpenWindow {
                            window: format!("w{}", i + 1),
                        },
                    },
                ));
            }
            widgets.push(button(
                format!("refresh_{i}"),
                "onRefresh",
                Action {
                    id: format!("refresh_action_{i}"),
                    effect: Effect::Noop,
                },
            ));
            Window {
                id: format!("w{i}"),
                kind: WindowKind::Activity,
                lifecycle: Vec::new(),
                widgets,
            }
        })
        .collect();
    AppSpec {
        format: crate::appspec::FORMAT_VERSION,
        name: format!("chain_{depth}"),
        entry_window: "w0".into(),
        variables: Vec::new(),
        system_events: Vec::new(),
        windows,
    }
}

fn button(id: String, method: &str, action: Action) -> Widget {
    Widget {
        id,
        widget_kind: WidgetKind::Button,
        visible_if: None,
        input: None,
        handlers: vec![EventHandler {
            trigger: Trigger::Click,
            trigger_method: method.into(),
            guard: None,
            actions: vec![action],
        }],
    }
}

/// Every bundled fixture, with a depth-5 chain.
pub fn all() -> Vec<AppSpec> {
    vec![open_manager(), calculator(), calculator_equivalent(), chain(5)]
}

/// Looks up a bundled fixture by name (`chain_<n>` for any depth).
pub fn by_name(name: &str) -> Option<AppSpec> {
    match name {
        "open_manager" => Some(open_manager()),
        "calculator" => Some(calculator()),
        "calculator_equivalent" => Some(calculator_equivalent()),
        _ => name
            .strip_prefix("chain_")
            .and_then(|d| d.parse().ok())
            .map(chain),
    }
}
