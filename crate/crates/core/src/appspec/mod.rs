//! Declarative app specifications: windows, widgets, handlers and the
//! expression language they use.

mod diagnostics;
pub mod expr;
mod index;
mod parse;
mod validate;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use diagnostics::{Diagnostic, DiagnosticCode, Severity};
pub use expr::{BinaryOp, Env, EvalError, Expr, Type, UnaryOp, Value};
pub use index::{HandlerRef, ResolvedHandler, SpecIndex, WidgetRef};
pub use parse::{parse_app_spec, parse_app_spec_unchecked, to_json};
pub use validate::validate;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AppSpec {
    pub format: u32,
    pub name: String,
    pub entry_window: String,
    #[serde(default)]
    pub variables: Vec<Variable>,
    #[serde(default)]
    pub system_events: Vec<SystemEventKind>,
    pub windows: Vec<Window>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Variable {
    pub name: String,
    #[serde(default)]
    pub initial: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemEventKind {
    Rotate,
    Interrupt,
}

impl SystemEventKind {
    pub const ALL: [SystemEventKind; 2] = [SystemEventKind::Rotate, SystemEventKind::Interrupt];

    pub fn trigger(self) -> Trigger {
        match self {
            SystemEventKind::Rotate => Trigger::Rotate,
            SystemEventKind::Interrupt => Trigger::Interrupt,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowKind {
    Activity,
    Dialog,
    Menu,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Window {
    pub id: String,
    pub kind: WindowKind,
    /// Executed every time the window is pushed.
    #[serde(default)]
    pub lifecycle: Vec<Action>,
    #[serde(default)]
    pub widgets: Vec<Widget>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WidgetKind {
    Button,
    ListItem,
    TextField,
    Checkbox,
    MenuItem,
    /// Window-level pseudo-widget hosting back, menu and system-event
    /// handlers. At most one per window.
    System,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Widget {
    pub id: String,
    pub widget_kind: WidgetKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub visible_if: Option<Expr>,
    /// Variable receiving generated text input (text fields only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(default)]
    pub handlers: Vec<EventHandler>,
}

/// Event kinds, in the order used to break labelling ties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trigger {
    Click,
    LongClick,
    Scroll,
    TextInput,
    Rotate,
    Interrupt,
    Back,
    Menu,
}

impl Trigger {
    pub const ALL: [Trigger; 8] = [
        Trigger::Click,
        Trigger::LongClick,
        Trigger::Scroll,
        Trigger::TextInput,
        Trigger::Rotate,
        Trigger::Interrupt,
        Trigger::Back,
        Trigger::Menu,
    ];

    /// Triggers that belong to the window rather than to an ordinary widget.
    pub fn is_window_level(self) -> bool {
        matches!(self, Trigger::Rotate | Trigger::Interrupt | Trigger::Back | Trigger::Menu)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Trigger::Click => "click",
            Trigger::LongClick => "long_click",
            Trigger::Scroll => "scroll",
            Trigger::TextInput => "text_input",
            Trigger::Rotate => "rotate",
            Trigger::Interrupt => "interrupt",
            Trigger::Back => "back",
            Trigger::Menu => "menu",
        }
    }

    pub fn parse(s: &str) -> Option<Trigger> {
        Self::ALL.into_iter().find(|t| t.as_str() == s)
    }

    /// Callback name used for handlers the framework supplies implicitly.
    pub fn default_method(self) -> &'static str {
        match self {
            Trigger::Click => "onClick",
            Trigger::LongClick => "onLongClick",
            Trigger::Scroll => "onScroll",
            Trigger::TextInput => "onTextChanged",
            Trigger::Rotate => "onConfigurationChanged",
            Trigger::Interrupt => "onPause",
            Trigger::Back => "onBackPressed",
            Trigger::Menu => "onCreateOptionsMenu",
        }
    }
}

impl fmt::Display for Trigger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventHandler {
    pub trigger: Trigger,
    pub trigger_method: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guard: Option<Expr>,
    #[serde(default)]
    pub actions: Vec<Action>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Action {
    pub id: String,
    pub effect: Effect,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Effect {
    OpenWindow { window: String },
    CloseWindow,
    TerminateApp,
    Assign { variable: String, value: Expr },
    Toggle { widget: String },
    ReturnValue {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        value: Option<Expr>,
    },
    Noop,
}

impl Effect {
    /// Whether the effect changes the window stack.
    pub fn switches_window(&self) -> bool {
        matches!(self, Effect::OpenWindow { .. } | Effect::CloseWindow | Effect::TerminateApp)
    }
}

impl AppSpec {
    pub fn window(&self, id: &str) -> Option<&Window> {
        self.windows.iter().find(|w| w.id == id)
    }

    /// Every action id in document order (lifecycle first, then widgets).
    pub fn action_ids(&self) -> Vec<&str> {
        self.windows
            .iter()
            .flat_map(|w| w.actions().map(|a| a.id.as_str()))
            .collect()
    }

    pub fn handler_count(&self) -> usize {
        self.windows
            .iter()
            .flat_map(|w| &w.widgets)
            .map(|wd| wd.handlers.len())
            .sum()
    }

    /// Whether the app reacts to the given system event at all.
    pub fn subscribes(&self, kind: SystemEventKind) -> bool {
        self.system_events.contains(&kind)
    }
}

impl Window {
    /// All actions owned by this window, lifecycle first.
    pub fn actions(&self) -> impl Iterator<Item = &Action> {
        self.lifecycle
            .iter()
            .chain(self.widgets.iter().flat_map(|w| w.handlers.iter().flat_map(|h| &h.actions)))
    }

    pub fn system_widget(&self) -> Option<&Widget> {
        self.widgets.iter().find(|w| w.widget_kind == WidgetKind::System)
    }
}

impl Widget {
    pub fn handler(&self, trigger: Trigger) -> Option<&EventHandler> {
        self.handlers.iter().find(|h| h.trigger == trigger)
    }
}
