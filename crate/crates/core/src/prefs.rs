//! Dual-branch preference distillation: a content profile from the reference
//! paper-slides pair, an aesthetic profile from the template deck, and their
//! union as the conditioning profile.

use serde_json::{json, Map, Value};

use crate::deck::{describe_deck, DeckModel};
use crate::gateway::{ChatRequest, Diagnostic, GatewayError, ModelGateway, DEFAULT_MAX_REPAIRS};
use crate::ingest::{canonical_heading, PaperBundle};
use crate::prompts;

#[derive(Debug, thiserror::Error)]
pub enum PrefsError {
    #[error(transparent)]
    Gateway(#[from] GatewayError),
    #[error("profile invalid: {}", Diagnostic::join(.0))]
    Invalid(Vec<Diagnostic>),
    #[error("template deck has no slides")]
    EmptyTemplate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ContentHandling {
    Expanded,
    #[serde(rename = "Newly Added")]
    NewlyAdded,
    Condensed,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SectionPreference {
    pub section_name: String,
    pub content_handling: ContentHandling,
    #[serde(default)]
    pub formatting_preferences: String,
    #[serde(default)]
    pub additional_comments: String,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ContentPreferenceProfile {
    pub narrative_flow_preference: Vec<String>,
    pub section_level_preferences: Vec<SectionPreference>,
    #[serde(default)]
    pub omitted_sections: Vec<String>,
}

impl ContentPreferenceProfile {
    /// The persisted / prompt-facing form: wrapped in
    /// `presentation_guidelines`, exactly as the distillation schema emits.
    pub fn to_guidelines_value(&self) -> Value {
        json!({ "presentation_guidelines": self })
    }

    pub fn to_guidelines_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_guidelines_value()).expect("profile serializes")
    }

    pub fn from_guidelines_value(value: &Value) -> Result<Self, PrefsError> {
        let profile = validate_content_profile(value).map_err(PrefsError::Invalid)?;
        Ok(profile)
    }
}

/// Per-slide functional themes plus the parsed element metadata of the
/// template.
#[derive(Clone, Debug, PartialEq)]
pub struct AestheticProfile {
    /// Theme sentence for slide i.
    pub slide_themes: Vec<String>,
    /// The pptc metadata document from `describe_deck`.
    pub element_metadata: Value,
    pub template_slide_count: usize,
}

impl AestheticProfile {
    /// `{"slide_0": theme, ...}` in slide order.
    pub fn themes_value(&self) -> Value {
        let mut map = Map::new();
        for (i, theme) in self.slide_themes.iter().enumerate() {
            map.insert(format!("slide_{i}"), json!(theme));
        }
        Value::Object(map)
    }

    pub fn to_value(&self) -> Value {
        json!({
            "slide_themes": self.themes_value(),
            "element_metadata": self.element_metadata,
            "template_slide_count": self.template_slide_count,
        })
    }

    pub fn from_value(value: &Value) -> Result<Self, PrefsError> {
        let count = value["template_slide_count"]
            .as_u64()
            .ok_or_else(|| PrefsError::Invalid(vec![Diagnostic::new(
                "MissingField",
                "$.template_slide_count",
                "expected integer",
            )]))? as usize;
        let themes_map = value["slide_themes"].as_object().ok_or_else(|| {
            PrefsError::Invalid(vec![Diagnostic::new("MissingField", "$.slide_themes", "expected object")])
        })?;
        let mut themes = vec![String::new(); count];
        for (k, v) in themes_map {
            let idx = crate::gateway::schema::slide_key_index(k).ok_or_else(|| {
                PrefsError::Invalid(vec![Diagnostic::new("BadKey", format!("$.{k}"), "bad slide key")])
            })?;
            if idx >= count {
                return Err(PrefsError::Invalid(vec![Diagnostic::new(
                    "KeyCoverageViolation",
                    format!("$.{k}"),
                    "slide key outside template range",
                )]));
            }
            themes[idx] = v.as_str().unwrap_or_default().to_string();
        }
        if themes.iter().any(String::is_empty) {
            return Err(PrefsError::Invalid(vec![Diagnostic::new(
                "KeyCoverageViolation",
                "$.slide_themes",
                "missing slide keys",
            )]));
        }
        Ok(Self {
            slide_themes: themes,
            element_metadata: value["element_metadata"].clone(),
            template_slide_count: count,
        })
    }
}

/// The union profile `P`. A missing content branch marks the
/// content-preference ablation.
#[derive(Clone, Debug, PartialEq)]
pub struct PreferenceProfile {
    pub content: Option<ContentPreferenceProfile>,
    pub aesthetic: AestheticProfile,
}

impl PreferenceProfile {
    pub fn content_ablated(&self) -> bool {
        self.content.is_none()
    }
}

/// Merge the two branches; `content = None` marks the ablated configuration.
pub fn merge_profiles(
    content: Option<ContentPreferenceProfile>,
    aesthetic: AestheticProfile,
) -> PreferenceProfile {
    PreferenceProfile { content, aesthetic }
}

/// Validate a raw guidelines value and convert it into a typed profile.
/// Returns the full diagnostics list instead of failing on the first issue.
pub fn validate_content_profile(value: &Value) -> Result<ContentPreferenceProfile, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let pg = match value.get("presentation_guidelines") {
        Some(pg) => pg,
        None => {
            return Err(vec![Diagnostic::new(
                "MissingField",
                "$.presentation_guidelines",
                "field required",
            )])
        }
    };
    let flow: Vec<String> = pg["narrative_flow_preference"]
        .as_array()
        .map(|a| a.iter().filter_map(|v| v.as_str().map(String::from)).collect())
        .unwrap_or_default();
    if flow.is_empty() {
        diags.push(Diagnostic::new(
            "EmptyFlow",
            "$.presentation_guidelines.narrative_flow_preference",
            "narrative flow must be non-empty",
        ));
    }
    let flow_keys: Vec<String> = flow.iter().map(|s| canonical_heading(s)).collect();
    let mut sections = Vec::new();
    if let Some(prefs) = pg["section_level_preferences"].as_array() {
        for (i, entry) in prefs.iter().enumerate() {
            let path = format!("$.presentation_guidelines.section_level_preferences[{i}]");
            let section: Result<SectionPreference, _> = serde_json::from_value(entry.clone());
            match section {
                Ok(section) => {
                    if !flow_keys.contains(&canonical_heading(&section.section_name)) {
                        diags.push(Diagnostic::new(
                            "CrossRefViolation",
                            format!("{path}.section_name"),
                            format!(
                                "section {:?} does not appear in narrative_flow_preference",
                                section.section_name
                            ),
                        ));
                    }
                    sections.push(section);
                }
                Err(e) => diags.push(Diagnostic::new("WrongType", path, e.to_string())),
            }
        }
    } else {
        diags.push(Diagnostic::new(
            "MissingField",
            "$.presentation_guidelines.section_level_preferences",
            "expected array",
        ));
    }
    let omitted: Vec<String> = pg["omitted_sections"]
        .as_array()
        .map(|a| a.iter().filter_map(|v| v.as_str().map(String::from)).collect())
        .unwrap_or_default();
    if !diags.is_empty() {
        return Err(diags);
    }
    Ok(ContentPreferenceProfile {
        narrative_flow_preference: flow,
        section_level_preferences: sections,
        omitted_sections: omitted,
    })
}

/// Infer the content-preference profile from the reference pair.
pub fn distill_content_preferences(
    ref_paper: &PaperBundle,
    ref_slides: &PaperBundle,
    model_id: &str,
    gateway: &ModelGateway,
) -> Result<ContentPreferenceProfile, PrefsError> {
    let prompt = prompts::render(
        prompts::DISTILL_CONTENT,
        &[
            ("reference content pdf", ref_paper.full_text().as_str()),
            ("reference content slide", ref_slides.full_text().as_str()),
        ],
    );
    let request = ChatRequest::simple(model_id, "distill_content", prompt);
    let value = gateway.complete_structured_with(
        &request,
        "presentation_guidelines",
        DEFAULT_MAX_REPAIRS,
        |v| match validate_content_profile(v) {
            Ok(_) => Ok(()),
            Err(diags) => Err(Diagnostic::join(&diags)),
        },
    )?;
    validate_content_profile(&value).map_err(PrefsError::Invalid)
}

/// Infer per-slide functional themes for the template and attach the parsed
/// element metadata.
pub fn distill_aesthetic_profile(
    template: &DeckModel,
    model_id: &str,
    gateway: &ModelGateway,
) -> Result<AestheticProfile, PrefsError> {
    let n = template.slide_count();
    if n == 0 {
        return Err(PrefsError::EmptyTemplate);
    }
    let metadata = describe_deck(template);
    let slide_info = serde_json::to_string_pretty(&metadata).expect("metadata serializes");
    let prompt = prompts::render(prompts::DISTILL_AESTHETIC, &[("slide_info", slide_info.as_str())]);
    let request = ChatRequest::simple(model_id, "distill_aesthetic", prompt);
    let value = gateway.complete_structured_with(
        &request,
        "slide_themes",
        DEFAULT_MAX_REPAIRS,
        |v| theme_key_coverage(v, n),
    )?;
    let map = value.as_object().expect("schema-checked object");
    let mut themes = vec![String::new(); n];
    for (k, v) in map {
        if let Some(i) = crate::gateway::schema::slide_key_index(k) {
            themes[i] = v.as_str().unwrap_or_default().to_string();
        }
    }
    Ok(AestheticProfile {
        slide_themes: themes,
        element_metadata: metadata,
        template_slide_count: n,
    })
}

fn theme_key_coverage(value: &Value, n: usize) -> Result<(), String> {
    let map = value.as_object().ok_or("expected object")?;
    let mut missing = Vec::new();
    for i in 0..n {
        if !map.contains_key(&format!("slide_{i}")) {
            missing.push(format!("slide_{i}"));
        }
    }
    let extra: Vec<&String> = map
        .keys()
        .filter(|k| {
            crate::gateway::schema::slide_key_index(k).map(|i| i >= n).unwrap_or(true)
        })
        .collect();
    if missing.is_empty() && extra.is_empty() {
        Ok(())
    } else {
        Err(format!(
            "KeyCoverageViolation: keys must be exactly slide_0..slide_{} (missing {missing:?}, extra {extra:?})",
            n - 1
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use serde_json::json;

    fn valid_value() -> Value {
        json!({"presentation_guidelines": {
            "narrative_flow_preference": ["Title", "Background & Motivation", "Method", "Experiments", "Future Work"],
            "section_level_preferences": [
                {"section_name": "Title", "content_handling": "Condensed",
                 "formatting_preferences": "Minimal Text",
                 "additional_comments": "Full paper title with author name."},
                {"section_name": "Method", "content_handling": "Expanded",
                 "formatting_preferences": "Visualization-heavy",
                 "additional_comments": ""}
            ],
            "omitted_sections": ["Related Work"]
        }})
    }

    #[test]
    fn valid_profile_parses() {
        let profile = validate_content_profile(&valid_value()).unwrap();
        assert_eq!(profile.narrative_flow_preference[0], "Title");
        assert_eq!(profile.section_level_preferences[0].content_handling, ContentHandling::Condensed);
        assert_eq!(profile.omitted_sections, vec!["Related Work"]);
    }

    #[test]
    fn cross_ref_violation_detected() {
        let mut v = valid_value();
        v["presentation_guidelines"]["section_level_preferences"][1]["section_name"] =
            json!("Results");
        let diags = validate_content_profile(&v).unwrap_err();
        assert!(diags.iter().any(|d| d.code == "CrossRefViolation"), "{diags:?}");
    }

    #[test]
    fn empty_flow_detected() {
        let mut v = valid_value();
        v["presentation_guidelines"]["narrative_flow_preference"] = json!([]);
        let diags = validate_content_profile(&v).unwrap_err();
        assert!(diags.iter().any(|d| d.code == "EmptyFlow"));
    }

    #[test]
    fn unknown_handling_enum_rejected() {
        let mut v = valid_value();
        v["presentation_guidelines"]["section_level_preferences"][0]["content_handling"] =
            json!("Shortened");
        assert!(validate_content_profile(&v).is_err());
    }

    #[test]
    fn guidelines_round_trip() {
        let profile = validate_content_profile(&valid_value()).unwrap();
        let reloaded =
            ContentPreferenceProfile::from_guidelines_value(&profile.to_guidelines_value()).unwrap();
        assert_eq!(profile, reloaded);
    }

    #[test]
    fn merge_marks_ablation() {
        let aesthetic = AestheticProfile {
            slide_themes: vec!["Opening".into()],
            element_metadata: json!({}),
            template_slide_count: 1,
        };
        assert!(merge_profiles(None, aesthetic.clone()).content_ablated());
        let profile = validate_content_profile(&valid_value()).unwrap();
        assert!(!merge_profiles(Some(profile), aesthetic).content_ablated());
    }

    #[test]
    fn aesthetic_value_round_trip() {
        let profile = AestheticProfile {
            slide_themes: vec!["Opening, introduce main title".into(), "Contents, pure text".into()],
            element_metadata: json!({"slide_0": {}}),
            template_slide_count: 2,
        };
        let reloaded = AestheticProfile::from_value(&profile.to_value()).unwrap();
        assert_eq!(profile, reloaded);
    }

    proptest! {
        // Mutants of a valid profile: the validator accepts exactly those
        // whose sections all reference flow entries and whose flow is
        // non-empty.
        #[test]
        fn validator_matches_invariants(
            flow in proptest::collection::vec("[A-Z][a-z]{2,8}", 0..5),
            names in proptest::collection::vec(prop_oneof![Just(0usize), Just(1), Just(9)], 0..4)
        ) {
            let sections: Vec<Value> = names.iter().map(|i| json!({
                "section_name": flow.get(*i).cloned().unwrap_or_else(|| "no such section".into()),
                "content_handling": "Condensed",
                "formatting_preferences": "",
                "additional_comments": ""
            })).collect();
            let v = json!({"presentation_guidelines": {
                "narrative_flow_preference": flow,
                "section_level_preferences": sections,
                "omitted_sections": []
            }});
            let expect_ok = !flow.is_empty()
                && names.iter().all(|i| *i < flow.len());
            prop_assert_eq!(validate_content_profile(&v).is_ok(), expect_ok);
        }
    }
}
