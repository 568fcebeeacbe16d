//! Schema catalog for structured model outputs.
//!
//! Validators are hand-rolled: each schema id maps to a function returning
//! field-level diagnostics. An empty diagnostics list means the value
//! conforms.

use std::collections::BTreeMap;

use serde_json::Value;

use super::GatewayError;

#[derive(Clone, Debug, serde::Serialize)]
pub struct Diagnostic {
    pub code: String,
    pub path: String,
    pub message: String,
}

impl Diagnostic {
    pub fn new(code: &str, path: impl Into<String>, message: impl Into<String>) -> Self {
        Self { code: code.to_string(), path: path.into(), message: message.into() }
    }

    pub fn join(list: &[Diagnostic]) -> String {
        list.iter()
            .map(|d| format!("{} at {}: {}", d.code, d.path, d.message))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

type Validator = fn(&Value) -> Vec<Diagnostic>;

pub struct SchemaCatalog {
    validators: BTreeMap<&'static str, Validator>,
}

impl SchemaCatalog {
    /// The catalog with every schema the pipeline uses.
    pub fn standard() -> Self {
        let mut validators: BTreeMap<&'static str, Validator> = BTreeMap::new();
        validators.insert("judge", validate_judge_strict);
        validators.insert("judge_raw", validate_judge_raw);
        validators.insert("presentation_guidelines", validate_presentation_guidelines);
        validators.insert("slide_themes", validate_slide_themes);
        validators.insert("reorganized_doc", validate_reorganized_doc);
        validators.insert("slide_outline", validate_slide_outline);
        validators.insert("element_mapping", validate_element_mapping);
        validators.insert("subtopics", validate_subtopics);
        Self { validators }
    }

    pub fn contains(&self, schema_id: &str) -> bool {
        self.validators.contains_key(schema_id)
    }

    pub fn validate(&self, schema_id: &str, value: &Value) -> Result<Vec<Diagnostic>, GatewayError> {
        let f = self
            .validators
            .get(schema_id)
            .ok_or_else(|| GatewayError::UnknownSchema(schema_id.to_string()))?;
        Ok(f(value))
    }
}

fn need_string(out: &mut Vec<Diagnostic>, obj: &Value, key: &str, path: &str) -> Option<String> {
    match obj.get(key) {
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => {
            out.push(Diagnostic::new("WrongType", format!("{path}.{key}"), "expected string"));
            None
        }
        None => {
            out.push(Diagnostic::new("MissingField", format!("{path}.{key}"), "field required"));
            None
        }
    }
}

fn validate_judge_strict(v: &Value) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if !v.is_object() {
        return vec![Diagnostic::new("WrongType", "$", "expected object")];
    }
    need_string(&mut out, v, "reason", "$");
    match v.get("score") {
        Some(Value::Number(n)) if n.is_i64() => {
            let s = n.as_i64().unwrap();
            if !(1..=5).contains(&s) {
                out.push(Diagnostic::new("OutOfRange", "$.score", "score must be in [1,5]"));
            }
        }
        Some(_) => out.push(Diagnostic::new("WrongType", "$.score", "expected integer")),
        None => out.push(Diagnostic::new("MissingField", "$.score", "field required")),
    }
    out
}

/// Lenient judge shape: the score must be integer-coercible (integer, whole
/// float, or numeric string); range is handled downstream by clamping, and a
/// missing reason becomes the empty string.
fn validate_judge_raw(v: &Value) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if !v.is_object() {
        return vec![Diagnostic::new("WrongType", "$", "expected object")];
    }
    if let Some(r) = v.get("reason") {
        if !r.is_string() {
            out.push(Diagnostic::new("WrongType", "$.reason", "expected string"));
        }
    }
    match v.get("score") {
        Some(s) if coerce_int(s).is_some() => {}
        Some(_) => out.push(Diagnostic::new(
            "WrongType",
            "$.score",
            "score must be an integer (or an integer-valued string)",
        )),
        None => out.push(Diagnostic::new("MissingField", "$.score", "field required")),
    }
    out
}

/// Integer coercion shared with the judges: accepts 4, 4.0, and "4".
pub fn coerce_int(v: &Value) -> Option<i64> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Some(i)
            } else {
                n.as_f64().filter(|f| f.fract() == 0.0).map(|f| f as i64)
            }
        }
        Value::String(s) => s.trim().parse::<i64>().ok(),
        _ => None,
    }
}

pub const CONTENT_HANDLING_VALUES: [&str; 3] = ["Expanded", "Newly Added", "Condensed"];

fn validate_presentation_guidelines(v: &Value) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let Some(pg) = v.get("presentation_guidelines") else {
        return vec![Diagnostic::new(
            "MissingField",
            "$.presentation_guidelines",
            "field required",
        )];
    };
    let path = "$.presentation_guidelines";
    match pg.get("narrative_flow_preference") {
        Some(Value::Array(flow)) => {
            if flow.is_empty() {
                out.push(Diagnostic::new("EmptyFlow", format!("{path}.narrative_flow_preference"), "must be non-empty"));
            }
            for (i, item) in flow.iter().enumerate() {
                if !item.is_string() {
                    out.push(Diagnostic::new("WrongType", format!("{path}.narrative_flow_preference[{i}]"), "expected string"));
                }
            }
        }
        _ => out.push(Diagnostic::new("MissingField", format!("{path}.narrative_flow_preference"), "expected array")),
    }
    match pg.get("section_level_preferences") {
        Some(Value::Array(prefs)) => {
            for (i, entry) in prefs.iter().enumerate() {
                let epath = format!("{path}.section_level_preferences[{i}]");
                if !entry.is_object() {
                    out.push(Diagnostic::new("WrongType", epath, "expected object"));
                    continue;
                }
                need_string(&mut out, entry, "section_name", &epath);
                if let Some(h) = need_string(&mut out, entry, "content_handling", &epath) {
                    if !CONTENT_HANDLING_VALUES.contains(&h.as_str()) {
                        out.push(Diagnostic::new(
                            "EnumViolation",
                            format!("{epath}.content_handling"),
                            format!("must be one of {CONTENT_HANDLING_VALUES:?}, got {h:?}"),
                        ));
                    }
                }
            }
        }
        _ => out.push(Diagnostic::new("MissingField", format!("{path}.section_level_preferences"), "expected array")),
    }
    match pg.get("omitted_sections") {
        Some(Value::Array(_)) | None => {}
        Some(_) => out.push(Diagnostic::new("WrongType", format!("{path}.omitted_sections"), "expected array")),
    }
    out
}

fn validate_slide_themes(v: &Value) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let Some(map) = v.as_object() else {
        return vec![Diagnostic::new("WrongType", "$", "expected object")];
    };
    if map.is_empty() {
        out.push(Diagnostic::new("EmptyObject", "$", "no slide themes"));
    }
    for (k, theme) in map {
        if !slide_key_index(k).is_some() {
            out.push(Diagnostic::new("BadKey", format!("$.{k}"), "keys must match slide_<n>"));
        }
        match theme {
            Value::String(s) if !s.trim().is_empty() => {}
            _ => out.push(Diagnostic::new("WrongType", format!("$.{k}"), "theme must be a non-empty string")),
        }
    }
    out
}

/// Parse "slide_7" -> Some(7).
pub fn slide_key_index(key: &str) -> Option<usize> {
    key.strip_prefix("slide_")?.parse().ok()
}

fn validate_reorganized_doc(v: &Value) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if !v.is_object() {
        return vec![Diagnostic::new("WrongType", "$", "expected object")];
    }
    if v.get("metadata").map(|m| !m.is_object()).unwrap_or(true) {
        out.push(Diagnostic::new("MissingField", "$.metadata", "expected object"));
    }
    match v.get("sections") {
        Some(Value::Array(sections)) => {
            if sections.is_empty() {
                out.push(Diagnostic::new("EmptySections", "$.sections", "must be non-empty"));
            }
            for (i, sec) in sections.iter().enumerate() {
                let spath = format!("$.sections[{i}]");
                need_string(&mut out, sec, "title", &spath);
                match sec.get("subsections") {
                    Some(Value::Array(subs)) => {
                        if subs.is_empty() {
                            out.push(Diagnostic::new("EmptySections", format!("{spath}.subsections"), "must be non-empty"));
                        }
                        for (j, sub) in subs.iter().enumerate() {
                            let upath = format!("{spath}.subsections[{j}]");
                            match need_string(&mut out, sub, "title", &upath) {
                                Some(t) if t.trim().is_empty() => {
                                    out.push(Diagnostic::new("EmptyField", format!("{upath}.title"), "must be non-empty"))
                                }
                                _ => {}
                            }
                            match need_string(&mut out, sub, "content", &upath) {
                                Some(c) if c.trim().is_empty() => {
                                    out.push(Diagnostic::new("EmptyField", format!("{upath}.content"), "must be non-empty"))
                                }
                                _ => {}
                            }
                        }
                    }
                    _ => out.push(Diagnostic::new("MissingField", format!("{spath}.subsections"), "expected array")),
                }
            }
        }
        _ => out.push(Diagnostic::new("MissingField", "$.sections", "expected array")),
    }
    out
}

/// Parse an outline key "3_Some Topic" -> (3, "Some Topic"). The first
/// underscore after the leading integer is the delimiter.
pub fn outline_key_parts(key: &str) -> Option<(usize, &str)> {
    let underscore = key.find('_')?;
    let index: usize = key[..underscore].parse().ok()?;
    let topic = &key[underscore + 1..];
    if topic.is_empty() {
        return None;
    }
    Some((index, topic))
}

fn validate_outline_entry(out: &mut Vec<Diagnostic>, key: &str, entry: &Value) {
    let path = format!("$.{key}");
    if !entry.is_object() {
        out.push(Diagnostic::new("WrongType", path, "expected object"));
        return;
    }
    need_string(out, entry, "purpose", &path);
    need_string(out, entry, "content_style", &path);
    match entry.get("subsections") {
        Some(Value::Array(_)) => {}
        _ => out.push(Diagnostic::new("MissingField", format!("{path}.subsections"), "expected array")),
    }
    if let Some(assets) = entry.get("image_assets") {
        if !assets.is_array() {
            out.push(Diagnostic::new("WrongType", format!("{path}.image_assets"), "expected array"));
        }
    }
    if let Some(sd) = entry.get("speech_draft") {
        if !sd.is_string() {
            out.push(Diagnostic::new("WrongType", format!("{path}.speech_draft"), "expected string"));
        }
    }
}

fn validate_slide_outline(v: &Value) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let Some(map) = v.as_object() else {
        return vec![Diagnostic::new("WrongType", "$", "expected object")];
    };
    if map.is_empty() {
        out.push(Diagnostic::new("EmptyObject", "$", "no slides"));
    }
    for (key, entry) in map {
        if outline_key_parts(key).is_none() {
            out.push(Diagnostic::new("BadKey", format!("$.{key}"), "keys must match <index>_<topic>"));
            continue;
        }
        validate_outline_entry(&mut out, key, entry);
    }
    out
}

pub const MAPPING_ACTIONS: [&str; 3] = ["set_text", "replace_image", "delete"];

fn validate_element_mapping(v: &Value) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let Some(assignments) = v.get("assignments").and_then(Value::as_array) else {
        return vec![Diagnostic::new("MissingField", "$.assignments", "expected array")];
    };
    for (i, a) in assignments.iter().enumerate() {
        let path = format!("$.assignments[{i}]");
        if !a.is_object() {
            out.push(Diagnostic::new("WrongType", path, "expected object"));
            continue;
        }
        match a.get("shape_id").and_then(coerce_int) {
            Some(id) if id >= 0 => {}
            _ => out.push(Diagnostic::new("WrongType", format!("{path}.shape_id"), "expected non-negative integer")),
        }
        match a.get("action").and_then(Value::as_str) {
            Some(action) if MAPPING_ACTIONS.contains(&action) => {
                if action == "set_text" {
                    match a.get("text") {
                        Some(Value::Array(items)) if items.iter().all(Value::is_string) => {}
                        _ => out.push(Diagnostic::new("MissingField", format!("{path}.text"), "set_text needs a string array")),
                    }
                }
                if action == "replace_image" && a.get("asset_id").and_then(Value::as_str).is_none() {
                    out.push(Diagnostic::new("MissingField", format!("{path}.asset_id"), "replace_image needs an asset_id"));
                }
            }
            Some(other) => out.push(Diagnostic::new(
                "EnumViolation",
                format!("{path}.action"),
                format!("must be one of {MAPPING_ACTIONS:?}, got {other:?}"),
            )),
            None => out.push(Diagnostic::new("MissingField", format!("{path}.action"), "field required")),
        }
    }
    out
}

fn validate_subtopics(v: &Value) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    match v.get("subtopics") {
        Some(Value::Array(items)) => {
            if items.is_empty() {
                out.push(Diagnostic::new("EmptyList", "$.subtopics", "must be non-empty"));
            }
            for (i, item) in items.iter().enumerate() {
                match item {
                    Value::String(s) if !s.trim().is_empty() => {}
                    _ => out.push(Diagnostic::new("WrongType", format!("$.subtopics[{i}]"), "expected non-empty string")),
                }
            }
        }
        _ => out.push(Diagnostic::new("MissingField", "$.subtopics", "expected array")),
    }
    out
}
