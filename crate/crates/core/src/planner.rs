//! Slide planning: the conditional paper reorganizer, the chain-of-speech
//! outline designer, and the template-aware layout selector, with hard
//! validation between stages.

use serde_json::{json, Map, Value};

use crate::gateway::schema::{outline_key_parts, slide_key_index};
use crate::gateway::{ChatRequest, Diagnostic, GatewayError, ModelGateway};
use crate::ingest::{AssetRecord, PaperBundle};
use crate::prefs::{AestheticProfile, ContentPreferenceProfile};
use crate::prompts;

/// Repair budget for the outline designer; slide-count enforcement allows two
/// repair rounds before failing.
pub const OUTLINE_MAX_REPAIRS: usize = 2;
/// Repair budget for the other planning stages.
pub const PLAN_MAX_REPAIRS: usize = 3;

/// Text inserted where guidelines would go when the content-preference
/// branch is ablated.
pub const NO_GUIDELINES_BLOCK: &str = "No preference guidelines were supplied for this run. \
Use general academic conventions: a linear narrative from title and motivation through \
background, method, experiments, and conclusion, with concise, informative slides.";

#[derive(Debug, thiserror::Error)]
pub enum PlannerError {
    #[error(transparent)]
    Gateway(#[from] GatewayError),
    #[error("outline invalid: {}", Diagnostic::join(.0))]
    InvalidOutline(Vec<Diagnostic>),
    #[error("reorganized document invalid: {0}")]
    InvalidDoc(String),
    #[error("num_slides must be at least 2, got {0}")]
    TooFewSlides(usize),
}

#[derive(Clone, Debug, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DocMetadata {
    #[serde(default)]
    pub title: String,
    #[serde(default)]
    pub author: String,
    #[serde(rename = "publish date", default)]
    pub publish_date: String,
    #[serde(default)]
    pub organization: String,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Subsection {
    pub title: String,
    pub content: String,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DocSection {
    pub title: String,
    pub subsections: Vec<Subsection>,
}

/// The presentation-oriented two-level document produced by the reorganizer.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ReorganizedDoc {
    pub metadata: DocMetadata,
    pub sections: Vec<DocSection>,
}

impl ReorganizedDoc {
    pub fn section_titles(&self) -> Vec<&str> {
        self.sections.iter().map(|s| s.title.as_str()).collect()
    }
}

/// One planned slide. `index` is 1-based; the outline key is
/// `{index}_{topic}` and the topic doubles as the slide title.
#[derive(Clone, Debug, PartialEq)]
pub struct OutlineEntry {
    pub index: usize,
    pub topic: String,
    pub purpose: String,
    pub speech_draft: Option<String>,
    pub subsections: Vec<String>,
    pub image_assets: Vec<String>,
    pub content_style: String,
    pub layout_recommendation: String,
    pub layout: Option<String>,
    pub layout_justification: Option<String>,
    /// Any further fields the model attached, preserved verbatim.
    pub extra: Map<String, Value>,
}

impl OutlineEntry {
    pub fn key(&self) -> String {
        format!("{}_{}", self.index, self.topic)
    }

    /// Selected template slide index from `layout` ("slide_3" -> 3).
    pub fn layout_index(&self) -> Option<usize> {
        self.layout.as_deref().and_then(slide_key_index)
    }

    fn to_value(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("purpose".into(), json!(self.purpose));
        if let Some(sd) = &self.speech_draft {
            obj.insert("speech_draft".into(), json!(sd));
        }
        obj.insert("subsections".into(), json!(self.subsections));
        obj.insert("content_style".into(), json!(self.content_style));
        if !self.image_assets.is_empty() {
            obj.insert("image_assets".into(), json!(self.image_assets));
        }
        obj.insert("layout_recommendation".into(), json!(self.layout_recommendation));
        for (k, v) in &self.extra {
            obj.insert(k.clone(), v.clone());
        }
        if let Some(layout) = &self.layout {
            obj.insert("layout".into(), json!(layout));
        }
        if let Some(just) = &self.layout_justification {
            obj.insert("layout_justification".into(), json!(just));
        }
        Value::Object(obj)
    }

    /// Projection onto the fields that existed before layout selection.
    fn preselection_value(&self) -> Value {
        let mut v = self.to_value();
        if let Some(obj) = v.as_object_mut() {
            obj.shift_remove("layout");
            obj.shift_remove("layout_justification");
        }
        v
    }

    fn from_value(key: &str, value: &Value) -> Result<Self, Diagnostic> {
        let (index, topic) = outline_key_parts(key).ok_or_else(|| {
            Diagnostic::new("BadKey", format!("$.{key}"), "key must be <index>_<topic>")
        })?;
        let obj = value.as_object().ok_or_else(|| {
            Diagnostic::new("WrongType", format!("$.{key}"), "expected object")
        })?;
        let known = [
            "purpose",
            "speech_draft",
            "subsections",
            "content_style",
            "image_assets",
            "layout_recommendation",
            "layout",
            "layout_justification",
        ];
        let mut extra = Map::new();
        for (k, v) in obj {
            if !known.contains(&k.as_str()) {
                extra.insert(k.clone(), v.clone());
            }
        }
        Ok(Self {
            index,
            topic: topic.to_string(),
            purpose: obj.get("purpose").and_then(Value::as_str).unwrap_or_default().to_string(),
            speech_draft: obj.get("speech_draft").and_then(Value::as_str).map(String::from),
            subsections: string_list(obj.get("subsections")),
            image_assets: string_list(obj.get("image_assets")),
            content_style: obj
                .get("content_style")
                .and_then(Value::as_str)
                .unwrap_or_default()
                .to_string(),
            layout_recommendation: obj
                .get("layout_recommendation")
                .and_then(Value::as_str)
                .unwrap_or_default()
                .to_string(),
            layout: obj.get("layout").and_then(Value::as_str).map(String::from),
            layout_justification: obj
                .get("layout_justification")
                .and_then(Value::as_str)
                .map(String::from),
            extra,
        })
    }
}

fn string_list(value: Option<&Value>) -> Vec<String> {
    value
        .and_then(Value::as_array)
        .map(|a| a.iter().filter_map(|v| v.as_str().map(String::from)).collect())
        .unwrap_or_default()
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SlideOutline {
    pub entries: Vec<OutlineEntry>,
}

impl SlideOutline {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The keyed-object JSON form, entries in slide order.
    pub fn to_value(&self) -> Value {
        let mut map = Map::new();
        for entry in &self.entries {
            map.insert(entry.key(), entry.to_value());
        }
        Value::Object(map)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("outline serializes")
    }

    pub fn from_value(value: &Value) -> Result<Self, Vec<Diagnostic>> {
        let obj = match value.as_object() {
            Some(o) => o,
            None => return Err(vec![Diagnostic::new("WrongType", "$", "expected object")]),
        };
        let mut entries = Vec::new();
        let mut diags = Vec::new();
        for (key, entry) in obj {
            match OutlineEntry::from_value(key, entry) {
                Ok(e) => entries.push(e),
                Err(d) => diags.push(d),
            }
        }
        entries.sort_by_key(|e| e.index);
        if !diags.is_empty() {
            return Err(diags);
        }
        Ok(Self { entries })
    }
}

/// Structural diagnostics for an outline at a given pipeline stage.
pub fn validate_outline(
    outline: &SlideOutline,
    num_slides: usize,
    known_asset_ids: &[String],
    template_slide_count: usize,
    selected: bool,
) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if outline.len() != num_slides {
        out.push(Diagnostic::new(
            "SlideCountMismatch",
            "$",
            format!("expected {num_slides} entries, got {}", outline.len()),
        ));
    }
    for (i, entry) in outline.entries.iter().enumerate() {
        if entry.index != i + 1 {
            out.push(Diagnostic::new(
                "IndexGap",
                format!("$.{}", entry.key()),
                format!("expected index {}, got {}", i + 1, entry.index),
            ));
        }
    }
    let mut seen_assets = std::collections::BTreeSet::new();
    for entry in &outline.entries {
        for asset in &entry.image_assets {
            if !known_asset_ids.iter().any(|a| a == asset) {
                out.push(Diagnostic::new(
                    "UnknownAssetId",
                    format!("$.{}.image_assets", entry.key()),
                    format!("asset {asset:?} is not in the manifest"),
                ));
            }
            if !seen_assets.insert(asset.clone()) {
                out.push(Diagnostic::new(
                    "DuplicateImageUse",
                    format!("$.{}.image_assets", entry.key()),
                    format!("asset {asset:?} is used by more than one slide"),
                ));
            }
        }
    }
    if selected {
        for entry in &outline.entries {
            match entry.layout_index() {
                Some(k) if k < template_slide_count => {}
                Some(k) => out.push(Diagnostic::new(
                    "LayoutOutOfRange",
                    format!("$.{}.layout", entry.key()),
                    format!("slide_{k} exceeds template range slide_0..slide_{}", template_slide_count - 1),
                )),
                None => out.push(Diagnostic::new(
                    "MissingLayout",
                    format!("$.{}", entry.key()),
                    "selected outline entry lacks a layout",
                )),
            }
        }
    }
    out
}

fn guidelines_text(content_pref: Option<&ContentPreferenceProfile>) -> String {
    match content_pref {
        Some(p) => p.to_guidelines_json(),
        None => NO_GUIDELINES_BLOCK.to_string(),
    }
}

/// Reorganize the target paper into the two-level presentation document,
/// conditioned on the content profile when present.
pub fn reorganize_paper(
    target: &PaperBundle,
    content_pref: Option<&ContentPreferenceProfile>,
    model_id: &str,
    gateway: &ModelGateway,
) -> Result<ReorganizedDoc, PlannerError> {
    let prompt = prompts::render(
        prompts::REORGANIZE,
        &[
            ("user preference guidelines", guidelines_text(content_pref).as_str()),
            ("target paper", target.full_text().as_str()),
        ],
    );
    let request = ChatRequest::simple(model_id, "reorganize", prompt);
    let value = gateway.complete_structured(&request, "reorganized_doc", PLAN_MAX_REPAIRS)?;
    serde_json::from_value(value).map_err(|e| PlannerError::InvalidDoc(e.to_string()))
}

/// Generate the slide-wise outline. With `chain_of_speech` off the prompt's
/// speech_draft field is removed and outputs must omit it.
pub fn generate_outline(
    doc: &ReorganizedDoc,
    content_pref: Option<&ContentPreferenceProfile>,
    assets: &[AssetRecord],
    num_slides: usize,
    chain_of_speech: bool,
    model_id: &str,
    gateway: &ModelGateway,
) -> Result<SlideOutline, PlannerError> {
    if num_slides < 2 {
        return Err(PlannerError::TooFewSlides(num_slides));
    }
    let template = if chain_of_speech {
        prompts::OUTLINE.to_string()
    } else {
        strip_speech_draft_lines(prompts::OUTLINE)
    };
    let image_information = if assets.is_empty() {
        "(no images available)".to_string()
    } else {
        assets
            .iter()
            .map(|a| format!("{}: {}", a.asset_id, a.caption))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let doc_json = serde_json::to_string_pretty(doc).expect("doc serializes");
    let n = num_slides.to_string();
    let prompt = prompts::render(
        &template,
        &[
            ("summarized_doc_content", doc_json.as_str()),
            ("pref_guidelines", guidelines_text(content_pref).as_str()),
            ("image_information", image_information.as_str()),
            ("num_slides", n.as_str()),
        ],
    );
    let request = ChatRequest::simple(model_id, "outline", prompt);
    let known_ids: Vec<String> = assets.iter().map(|a| a.asset_id.clone()).collect();
    let value = gateway.complete_structured_with(
        &request,
        "slide_outline",
        OUTLINE_MAX_REPAIRS,
        |v| {
            let outline = SlideOutline::from_value(v).map_err(|d| Diagnostic::join(&d))?;
            let diags = validate_outline(&outline, num_slides, &known_ids, 0, false);
            if !diags.is_empty() {
                return Err(Diagnostic::join(&diags));
            }
            check_speech_presence(&outline, chain_of_speech)
        },
    )?;
    SlideOutline::from_value(&value).map_err(PlannerError::InvalidOutline)
}

fn check_speech_presence(outline: &SlideOutline, chain_of_speech: bool) -> Result<(), String> {
    if chain_of_speech {
        let missing: Vec<String> = outline
            .entries
            .iter()
            .filter(|e| e.speech_draft.as_deref().unwrap_or("").trim().is_empty())
            .map(OutlineEntry::key)
            .collect();
        if !missing.is_empty() {
            return Err(format!("MissingSpeech: entries {missing:?} lack a speech_draft"));
        }
    } else {
        let unexpected: Vec<String> = outline
            .entries
            .iter()
            .filter(|e| e.speech_draft.is_some())
            .map(OutlineEntry::key)
            .collect();
        if !unexpected.is_empty() {
            return Err(format!(
                "UnexpectedSpeech: chain-of-speech is disabled but entries {unexpected:?} carry speech_draft"
            ));
        }
    }
    Ok(())
}

/// Remove the speech_draft field from the outline prompt (the chain-of-speech
/// ablation is a generation-time change).
fn strip_speech_draft_lines(template: &str) -> String {
    template
        .lines()
        .filter(|line| !line.contains("speech_draft"))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Assign a template slide to every outline entry. All pre-existing fields
/// must come back untouched; the selector may only add `layout` and
/// `layout_justification`.
pub fn select_layouts(
    outline: &SlideOutline,
    aesthetic: &AestheticProfile,
    model_id: &str,
    gateway: &ModelGateway,
) -> Result<SlideOutline, PlannerError> {
    let content_outline = outline.to_json_pretty();
    let functional_keys =
        serde_json::to_string_pretty(&aesthetic.themes_value()).expect("themes serialize");
    let prompt = prompts::render(
        prompts::SELECT_LAYOUT,
        &[
            ("content_outline", content_outline.as_str()),
            ("functional_keys", functional_keys.as_str()),
        ],
    );
    let request = ChatRequest::simple(model_id, "select_layout", prompt);
    let m = aesthetic.template_slide_count;
    let input = outline.clone();
    let value = gateway.complete_structured_with(
        &request,
        "slide_outline",
        PLAN_MAX_REPAIRS,
        move |v| {
            let selected = SlideOutline::from_value(v).map_err(|d| Diagnostic::join(&d))?;
            check_selection(&input, &selected, m)
        },
    )?;
    SlideOutline::from_value(&value).map_err(PlannerError::InvalidOutline)
}

/// The selector must preserve every pre-existing field exactly and add a
/// valid layout to every entry.
fn check_selection(input: &SlideOutline, selected: &SlideOutline, m: usize) -> Result<(), String> {
    if selected.len() != input.len() {
        return Err(format!(
            "ContentMutated: entry count changed from {} to {}",
            input.len(),
            selected.len()
        ));
    }
    for (before, after) in input.entries.iter().zip(&selected.entries) {
        if before.key() != after.key() {
            return Err(format!(
                "ContentMutated: key {:?} became {:?}",
                before.key(),
                after.key()
            ));
        }
        let b = before.preselection_value();
        let a = after.preselection_value();
        if a != b {
            return Err(format!(
                "ContentMutated: fields of {:?} changed; only layout and layout_justification may be added",
                before.key()
            ));
        }
        match after.layout_index() {
            Some(k) if k < m => {}
            Some(k) => {
                return Err(format!(
                    "LayoutOutOfRange: {:?} selects slide_{k} but the template has {m} slides",
                    after.key()
                ))
            }
            None => return Err(format!("MissingLayout: {:?} gained no layout", after.key())),
        }
        if after.layout_justification.as_deref().unwrap_or("").is_empty() {
            return Err(format!("MissingLayout: {:?} lacks layout_justification", after.key()));
        }
    }
    Ok(())
}
