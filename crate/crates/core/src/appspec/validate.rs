use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use super::expr::{is_identifier, Type};
use super::{
    Action, AppSpec, Diagnostic, DiagnosticCode as Code, Effect, Expr, SystemEventKind, Trigger, WidgetKind,
    WindowKind, FORMAT_VERSION,
};

/// Checks every structural invariant of an app specification. Errors come
/// first in document order, followed by warnings.
pub fn validate(spec: &AppSpec) -> Vec<Diagnostic> {
    let mut v = Validator {
        spec,
        out: Vec::new(),
        variables: spec.variables.iter().map(|v| v.name.as_str()).collect(),
        windows: spec.windows.iter().map(|w| w.id.as_str()).collect(),
        widgets: spec
            .windows
            .iter()
            .flat_map(|w| w.widgets.iter().map(|d| d.id.as_str()))
            .collect(),
    };
    v.run();
    let mut out = v.out;
    out.sort_by_key(|d| std::cmp::Reverse(d.severity));
    out
}

struct Validator<'a> {
    spec: &'a AppSpec,
    out: Vec<Diagnostic>,
    variables: HashSet<&'a str>,
    windows: HashSet<&'a str>,
    widgets: HashSet<&'a str>,
}

impl<'a> Validator<'a> {
    fn error(&mut self, code: Code, loc: impl Into<String>, msg: impl Into<String>) {
        self.out.push(Diagnostic::error(code, loc, msg));
    }

    fn run(&mut self) {
        let spec = self.spec;
        if spec.format != FORMAT_VERSION {
            self.error(
                Code::UnsupportedFormat,
                "format",
                format!("unsupported format {} (expected {FORMAT_VERSION})", spec.format),
            );
        }
        self.check_ids();
        match spec.window(&spec.entry_window) {
            None => self.error(
                Code::UnresolvedReference,
                "entry_window",
                format!("entry window `{}` is not declared", spec.entry_window),
            ),
            Some(w) if w.kind != WindowKind::Activity => self.error(
                Code::EntryNotActivity,
                "entry_window",
                format!("entry window `{}` must be an activity", spec.entry_window),
            ),
            Some(_) => {}
        }
        let mut seen_events = BTreeSet::new();
        for (i, kind) in spec.system_events.iter().enumerate() {
            if !seen_events.insert(*kind) {
                self.error(Code::DuplicateId, format!("system_events[{i}]"), "duplicate system event subscription");
            }
        }
        for (wi, window) in spec.windows.iter().enumerate() {
            let wloc = format!("windows[{wi}]");
            for (ai, action) in window.lifecycle.iter().enumerate() {
                let loc = format!("{wloc}.lifecycle[{ai}]");
                if action.effect.switches_window() {
                    self.error(
                        Code::WindowEffectInLifecycle,
                        &loc,
                        format!("lifecycle action `{}` may not change the window stack", action.id),
                    );
                }
                self.check_action(action, &loc);
            }
            let mut system_widgets = 0;
            for (di, widget) in window.widgets.iter().enumerate() {
                let dloc = format!("{wloc}.widgets[{di}]");
                let is_system = widget.widget_kind == WidgetKind::System;
                if is_system {
                    system_widgets += 1;
                    if system_widgets > 1 {
                        self.error(
                            Code::DuplicateSystemWidget,
                            &dloc,
                            format!("window `{}` declares more than one system widget", window.id),
                        );
                    }
                    if widget.visible_if.is_some() {
                        self.error(Code::MisplacedTrigger, &dloc, format!("system widget `{}` cannot be hidden", widget.id));
                    }
                }
                if let Some(cond) = &widget.visible_if {
                    self.check_expr(cond, Type::Bool, &format!("{dloc}.visible_if"));
                }
                match (&widget.input, widget.widget_kind) {
                    (None, WidgetKind::TextField) => self.error(
                        Code::MissingInputSlot,
                        &dloc,
                        format!("text field `{}` needs an input variable", widget.id),
                    ),
                    (Some(var), WidgetKind::TextField) => {
                        if !self.variables.contains(var.as_str()) {
                            self.error(
                                Code::UnresolvedReference,
                                &dloc,
                                format!("input variable `{var}` is not declared"),
                            );
                        }
                    }
                    (Some(_), _) => self.error(
                        Code::MissingInputSlot,
                        &dloc,
                        format!("widget `{}` is not a text field and cannot take input", widget.id),
                    ),
                    (None, _) => {}
                }
                let mut triggers = HashSet::new();
                let mut methods = HashSet::new();
                for (hi, handler) in widget.handlers.iter().enumerate() {
                    let hloc = format!("{dloc}.handlers[{hi}]");
                    if !triggers.insert(handler.trigger) {
                        self.error(
                            Code::DuplicateHandler,
                            &hloc,
                            format!("widget `{}` has more than one `{}` handler", widget.id, handler.trigger),
                        );
                    } else if !methods.insert(handler.trigger_method.as_str()) {
                        self.error(
                            Code::DuplicateHandler,
                            &hloc,
                            format!("widget `{}` reuses trigger method `{}`", widget.id, handler.trigger_method),
                        );
                    }
                    if handler.trigger.is_window_level() != is_system {
                        let msg = if is_system {
                            format!("`{}` cannot be handled by system widget `{}`", handler.trigger, widget.id)
                        } else {
                            format!(
                                "`{}` is a window-level event and cannot attach to widget `{}`",
                                handler.trigger, widget.id
                            )
                        };
                        self.error(Code::MisplacedTrigger, &hloc, msg);
                    }
                    if handler.trigger == Trigger::TextInput && widget.widget_kind != WidgetKind::TextField {
                        self.error(
                            Code::MisplacedTrigger,
                            &hloc,
                            format!("text_input requires a text field, `{}` is not one", widget.id),
                        );
                    }
                    let subscription = match handler.trigger {
                        Trigger::Rotate => Some(SystemEventKind::Rotate),
                        Trigger::Interrupt => Some(SystemEventKind::Interrupt),
                        _ => None,
                    };
                    if let Some(kind) = subscription {
                        if !spec.subscribes(kind) {
                            self.error(
                                Code::UnsubscribedSystemEvent,
                                &hloc,
                                format!("`{}` handler on `{}` but the app does not subscribe to it", handler.trigger, widget.id),
                            );
                        }
                    }
                    if !is_identifier(&handler.trigger_method) {
                        self.error(
                            Code::InvalidIdentifier,
                            &hloc,
                            format!("trigger method `{}` is not an identifier", handler.trigger_method),
                        );
                    }
                    if let Some(guard) = &handler.guard {
                        self.check_expr(guard, Type::Bool, &format!("{hloc}.guard"));
                    }
                    let switches = handler.actions.iter().filter(|a| a.effect.switches_window()).count();
                    if switches > 1 {
                        self.error(
                            Code::MultipleWindowEffects,
                            &hloc,
                            format!("handler `{}` changes the window stack more than once", handler.trigger_method),
                        );
                    }
                    for (ai, action) in handler.actions.iter().enumerate() {
                        self.check_action(action, &format!("{hloc}.actions[{ai}]"));
                    }
                }
            }
        }
        self.check_reachability();
    }

    fn check_ids(&mut self) {
        let spec = self.spec;
        let mut seen: HashMap<&str, String> = HashMap::new();
        let mut ids: Vec<(&str, String)> = Vec::new();
        for (i, v) in spec.variables.iter().enumerate() {
            ids.push((&v.name, format!("variables[{i}]")));
        }
        for (wi, w) in spec.windows.iter().enumerate() {
            ids.push((&w.id, format!("windows[{wi}]")));
            for (ai, a) in w.lifecycle.iter().enumerate() {
                ids.push((&a.id, format!("windows[{wi}].lifecycle[{ai}]")));
            }
            for (di, d) in w.widgets.iter().enumerate() {
                ids.push((&d.id, format!("windows[{wi}].widgets[{di}]")));
                for (hi, h) in d.handlers.iter().enumerate() {
                    for (ai, a) in h.actions.iter().enumerate() {
                        ids.push((&a.id, format!("windows[{wi}].widgets[{di}].handlers[{hi}].actions[{ai}]")));
                    }
                }
            }
        }
        if !is_identifier(&spec.name) {
            self.error(Code::InvalidIdentifier, "name", format!("app name `{}` is not an identifier", spec.name));
        }
        for (id, loc) in ids {
            if !is_identifier(id) {
                self.error(Code::InvalidIdentifier, &loc, format!("`{id}` is not an identifier"));
            }
            if let Some(first) = seen.get(id) {
                let msg = format!("duplicate id `{id}` (first declared at {first})");
                self.error(Code::DuplicateId, &loc, msg);
            } else {
                seen.insert(id, loc);
            }
        }
    }

    fn check_action(&mut self, action: &Action, loc: &str) {
        match &action.effect {
            Effect::OpenWindow { window } => {
                if !self.windows.contains(window.as_str()) {
                    self.error(Code::UnresolvedReference, loc, format!("window `{window}` is not declared"));
                }
            }
            Effect::Assign { variable, value } => {
                if !self.variables.contains(variable.as_str()) {
                    self.error(Code::UnresolvedReference, loc, format!("variable `{variable}` is not declared"));
                }
                self.check_expr(value, Type::Int, &format!("{loc}.value"));
            }
            Effect::Toggle { widget } => {
                if !self.widgets.contains(widget.as_str()) {
                    self.error(Code::UnresolvedReference, loc, format!("widget `{widget}` is not declared"));
                }
            }
            Effect::ReturnValue { value: Some(value) } => {
                let vars = &self.variables;
                if let Err(e) = value.type_check(&|v| vars.contains(v)) {
                    self.type_error(e, &format!("{loc}.value"));
                }
            }
            Effect::ReturnValue { value: None } | Effect::CloseWindow | Effect::TerminateApp | Effect::Noop => {}
        }
    }

    fn check_expr(&mut self, expr: &Expr, want: Type, loc: &str) {
        let vars = &self.variables;
        match expr.type_check(&|v| vars.contains(v)) {
            Ok(t) if t == want => {}
            Ok(t) => self.error(Code::TypeError, loc, format!("expected {want} expression, found {t}: `{expr}`")),
            Err(e) => self.type_error(e, loc),
        }
    }

    fn type_error(&mut self, e: super::expr::TypeError, loc: &str) {
        let code = match e {
            super::expr::TypeError::UnknownVariable(_) => Code::UnresolvedReference,
            _ => Code::TypeError,
        };
        self.error(code, loc, e.to_string());
    }

    /// Windows that no chain of `open_window` actions reaches from the entry.
    fn check_reachability(&mut self) {
        let spec = self.spec;
        let Some(entry) = spec.windows.iter().position(|w| w.id == spec.entry_window) else {
            return;
        };
        let pos: HashMap<&str, usize> = spec.windows.iter().enumerate().map(|(i, w)| (w.id.as_str(), i)).collect();
        let mut seen = vec![false; spec.windows.len()];
        seen[entry] = true;
        let mut queue = VecDeque::from([entry]);
        while let Some(wi) = queue.pop_front() {
            for action in spec.windows[wi].actions() {
                if let Effect::OpenWindow { window } = &action.effect {
                    if let Some(&t) = pos.get(window.as_str()) {
                        if !seen[t] {
                            seen[t] = true;
                            queue.push_back(t);
                        }
                    }
                }
            }
        }
        for (wi, w) in spec.windows.iter().enumerate() {
            if !seen[wi] {
                self.out.push(Diagnostic::warning(
                    Code::UnreachableWindow,
                    format!("windows[{wi}]"),
                    format!("unreachable window `{}`: no handler opens it from the entry window", w.id),
                ));
            }
        }
    }
}
