use std::collections::HashMap;

use super::{AppSpec, EventHandler, SystemEventKind, Trigger, Widget, WidgetKind, Window};

/// Handler that runs when an event is fired.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResolvedHandler<'a> {
    Declared(&'a EventHandler),
    /// Back with no declared handler: pops the current window.
    ImplicitBack,
    /// Subscribed system event with no declared handler.
    ImplicitNoop,
}

/// One (widget, trigger) pair that can be fired on a window.
#[derive(Debug, Clone, PartialEq)]
pub struct HandlerRef<'a> {
    pub window: usize,
    pub widget_id: String,
    pub widget_kind: WidgetKind,
    /// Position of the widget in the window's widget order; the synthetic
    /// system widget sorts after all declared widgets.
    pub widget_order: usize,
    pub trigger: Trigger,
    pub trigger_method: String,
    pub handler: ResolvedHandler<'a>,
}

impl HandlerRef<'_> {
    pub fn is_implicit(&self) -> bool {
        !matches!(self.handler, ResolvedHandler::Declared(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WidgetRef {
    pub window: usize,
    /// `None` for a synthesized system widget.
    pub widget: Option<usize>,
}

/// Lookup tables over a validated [`AppSpec`].
#[derive(Debug, Clone)]
pub struct SpecIndex<'a> {
    pub spec: &'a AppSpec,
    windows: HashMap<&'a str, usize>,
    widgets: HashMap<String, WidgetRef>,
    system_ids: Vec<String>,
    handlers: Vec<Vec<HandlerRef<'a>>>,
    entry: usize,
}

impl<'a> SpecIndex<'a> {
    /// Builds the index. Lookups on specs that failed validation may be
    /// incomplete but never panic.
    pub fn new(spec: &'a AppSpec) -> Self {
        let mut windows = HashMap::new();
        let mut widgets = HashMap::new();
        let mut system_ids = Vec::with_capacity(spec.windows.len());
        for (wi, window) in spec.windows.iter().enumerate() {
            windows.entry(window.id.as_str()).or_insert(wi);
            for (di, widget) in window.widgets.iter().enumerate() {
                widgets.entry(widget.id.clone()).or_insert(WidgetRef {
                    window: wi,
                    widget: Some(di),
                });
            }
            let sys = match window.system_widget() {
                Some(w) => w.id.clone(),
                None => {
                    let id = synthetic_system_id(&window.id);
                    widgets.insert(id.clone(), WidgetRef { window: wi, widget: None });
                    id
                }
            };
            system_ids.push(sys);
        }
        let entry = windows.get(spec.entry_window.as_str()).copied().unwrap_or(0);
        let handlers = (0..spec.windows.len())
            .map(|wi| enumerate_handlers(spec, wi, &system_ids[wi]))
            .collect();
        SpecIndex {
            spec,
            windows,
            widgets,
            system_ids,
            handlers,
            entry,
        }
    }

    pub fn entry(&self) -> usize {
        self.entry
    }

    pub fn window_index(&self, id: &str) -> Option<usize> {
        self.windows.get(id).copied()
    }

    pub fn window(&self, index: usize) -> &'a Window {
        &self.spec.windows[index]
    }

    pub fn widget_ref(&self, id: &str) -> Option<WidgetRef> {
        self.widgets.get(id).copied()
    }

    pub fn widget(&self, r: WidgetRef) -> Option<&'a Widget> {
        r.widget.map(|i| &self.spec.windows[r.window].widgets[i])
    }

    /// Id of the window's system widget, declared or synthesized.
    pub fn system_widget_id(&self, window: usize) -> &str {
        &self.system_ids[window]
    }

    pub fn is_system_widget(&self, id: &str) -> bool {
        self.widget_ref(id)
            .map(|r| self.system_ids[r.window] == id)
            .unwrap_or(false)
    }

    /// Every fireable (widget, trigger) pair of a window, in widget order then
    /// trigger order. Includes implicit back (for every window, root
    /// included) and implicit handlers for subscribed system events.
    pub fn handlers_of(&self, window: usize) -> &[HandlerRef<'a>] {
        &self.handlers[window]
    }

    /// The handler fired by `(widget, trigger)`, ignoring visibility.
    pub fn resolve(&self, widget: &str, trigger: Trigger) -> Option<&HandlerRef<'a>> {
        let r = self.widget_ref(widget)?;
        self.handlers[r.window]
            .iter()
            .find(|h| h.widget_id == widget && h.trigger == trigger)
    }
}

fn enumerate_handlers<'a>(spec: &'a AppSpec, window: usize, system_id: &str) -> Vec<HandlerRef<'a>> {
    let w = &spec.windows[window];
    let mut out = Vec::new();
    let mut system_seen = false;
    for (order, widget) in w.widgets.iter().enumerate() {
        if widget.widget_kind == WidgetKind::System {
            if !system_seen {
                push_system_handlers(spec, window, &widget.id, Some(widget), order, &mut out);
            }
            system_seen = true;
            continue;
        }
        let mut handlers: Vec<&EventHandler> = widget.handlers.iter().collect();
        handlers.sort_by_key(|h| h.trigger);
        for h in handlers {
            out.push(HandlerRef {
                window,
                widget_id: widget.id.clone(),
                widget_kind: widget.widget_kind,
                widget_order: order,
                trigger: h.trigger,
                trigger_method: h.trigger_method.clone(),
                handler: ResolvedHandler::Declared(h),
            });
        }
    }
    if !system_seen {
        push_system_handlers(spec, window, system_id, None, w.widgets.len(), &mut out);
    }
    out
}

fn push_system_handlers<'a>(
    spec: &'a AppSpec,
    window: usize,
    id: &str,
    widget: Option<&'a Widget>,
    order: usize,
    out: &mut Vec<HandlerRef<'a>>,
) {
    for trigger in Trigger::ALL.into_iter().filter(|t| t.is_window_level()) {
        let declared = widget.and_then(|w| w.handler(trigger));
        let handler = match (declared, trigger) {
            (Some(h), _) => Some(ResolvedHandler::Declared(h)),
            (None, Trigger::Back) => Some(ResolvedHandler::ImplicitBack),
            (None, Trigger::Rotate) if spec.subscribes(SystemEventKind::Rotate) => {
                Some(ResolvedHandler::ImplicitNoop)
            }
            (None, Trigger::Interrupt) if spec.subscribes(SystemEventKind::Interrupt) => {
                Some(ResolvedHandler::ImplicitNoop)
            }
            _ => None,
        };
        if let Some(handler) = handler {
            let trigger_method = match handler {
                ResolvedHandler::Declared(h) => h.trigger_method.clone(),
                _ => trigger.default_method().to_string(),
            };
            out.push(HandlerRef {
                window,
                widget_id: id.to_string(),
                widget_kind: WidgetKind::System,
                widget_order: order,
                trigger,
                trigger_method,
                handler,
            });
        }
    }
}

/// Id given to the system widget of a window that does not declare one.
/// Contains a `.`, so it can never collide with a declared identifier.
pub fn synthetic_system_id(window: &str) -> String {
    format!("{window}.system")
}
