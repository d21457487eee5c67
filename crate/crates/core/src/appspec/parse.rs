use super::{validate, AppSpec, Diagnostic, DiagnosticCode};

/// Parses a JSON app specification and validates it. Fails with every
/// diagnostic when any of them is an error.
pub fn parse_app_spec(text: &str) -> Result<AppSpec, Vec<Diagnostic>> {
    let spec = parse_app_spec_unchecked(text).map_err(|d| vec![d])?;
    let mut diagnostics = validate(&spec);
    if diagnostics.iter().any(Diagnostic::is_error) {
        for d in &mut diagnostics {
            d.line = subject_line(text, &d.message);
        }
        return Err(diagnostics);
    }
    Ok(spec)
}

/// Parses without running validation. Syntax errors and malformed
/// expressions are still rejected.
pub fn parse_app_spec_unchecked(text: &str) -> Result<AppSpec, Diagnostic> {
    serde_json::from_str::<AppSpec>(text).map_err(|e| {
        let mut d = Diagnostic::error(DiagnosticCode::Syntax, "", e.to_string());
        d.line = Some(e.line());
        d.column = Some(e.column());
        d
    })
}

/// Canonical pretty-printed JSON form.
pub fn to_json(spec: &AppSpec) -> String {
    serde_json::to_string_pretty(spec).expect("app specs always serialize")
}

/// Best-effort source line for a semantic diagnostic: the first line that
/// mentions the identifier quoted in the message.
fn subject_line(text: &str, message: &str) -> Option<usize> {
    let start = message.find('`')? + 1;
    let len = message[start..].find('`')?;
    let needle = format!("\"{}\"", &message[start..start + len]);
    text.lines().position(|l| l.contains(&needle)).map(|i| i + 1)
}
