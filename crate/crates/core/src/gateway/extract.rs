//! Structured-output extraction: fence stripping, balanced-object location,
//! parsing, and schema validation.

use super::schema::SchemaCatalog;
use super::GatewayError;

/// Extract the JSON object from raw model text and validate it against the
/// named schema.
pub fn extract_structured(
    text: &str,
    schema_id: &str,
    catalog: &SchemaCatalog,
) -> Result<serde_json::Value, GatewayError> {
    if !catalog.contains(schema_id) {
        return Err(GatewayError::UnknownSchema(schema_id.to_string()));
    }
    let stripped = strip_code_fences(text);
    let candidates = balanced_objects(stripped);
    if candidates.is_empty() {
        return Err(GatewayError::NoObjectFound);
    }
    let mut parse_err = None;
    for candidate in &candidates {
        match serde_json::from_str::<serde_json::Value>(candidate) {
            Ok(value) => {
                let diagnostics = catalog.validate(schema_id, &value)?;
                if diagnostics.is_empty() {
                    return Ok(value);
                }
                return Err(GatewayError::SchemaViolation {
                    schema_id: schema_id.to_string(),
                    diagnostics,
                });
            }
            Err(e) => parse_err = Some(e.to_string()),
        }
    }
    Err(GatewayError::ParseFailure(parse_err.unwrap_or_default()))
}

/// If the text carries a fenced block, return the content of the first fence;
/// otherwise the text unchanged.
fn strip_code_fences(text: &str) -> &str {
    let Some(open) = text.find("```") else { return text };
    let after = &text[open + 3..];
    // Skip the info string ("json", "JSON", ...) up to end of line.
    let body_start = after.find('\n').map(|i| i + 1).unwrap_or(0);
    let body = &after[body_start..];
    match body.find("```") {
        Some(close) => &body[..close],
        None => body,
    }
}

/// Top-level balanced `{...}` spans, string- and escape-aware, in order of
/// appearance.
fn balanced_objects(text: &str) -> Vec<&str> {
    let bytes = text.as_bytes();
    let mut spans = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    let mut in_string = false;
    let mut escaped = false;
    for (i, &b) in bytes.iter().enumerate() {
        if in_string {
            if escaped {
                escaped = false;
            } else if b == b'\\' {
                escaped = true;
            } else if b == b'"' {
                in_string = false;
            }
            continue;
        }
        match b {
            b'"' if depth > 0 => in_string = true,
            b'{' => {
                if depth == 0 {
                    start = i;
                }
                depth += 1;
            }
            b'}' if depth > 0 => {
                depth -= 1;
                if depth == 0 {
                    spans.push(&text[start..=i]);
                }
            }
            _ => {}
        }
    }
    spans
}
