use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticCode {
    Syntax,
    UnsupportedFormat,
    InvalidIdentifier,
    DuplicateId,
    UnresolvedReference,
    TypeError,
    EntryNotActivity,
    MisplacedTrigger,
    DuplicateHandler,
    DuplicateSystemWidget,
    MissingInputSlot,
    UnsubscribedSystemEvent,
    MultipleWindowEffects,
    WindowEffectInLifecycle,
    UnreachableWindow,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: DiagnosticCode,
    pub message: String,
    /// JSON path of the offending element, e.g. `windows[2].widgets[0]`.
    pub location: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
}

impl Diagnostic {
    pub fn error(code: DiagnosticCode, location: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            code,
            message: message.into(),
            location: location.into(),
            line: None,
            column: None,
        }
    }

    pub fn warning(code: DiagnosticCode, location: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            ..Diagnostic::error(code, location, message)
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{sev}")?;
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, " [{l}:{c}]")?,
            (Some(l), None) => write!(f, " [line {l}]")?,
            _ => {}
        }
        if !self.location.is_empty() {
            write!(f, " at {}", self.location)?;
        }
        write!(f, ": {}", self.message)
    }
}
