//! Shared test support: fixture paths, a scripted chat backend, and the
//! canned pipeline responses used to build replay transcripts offline.
#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use deckgen::bench::{Config, JobSpec};
use deckgen::deck::{parse_deck, DeckModel};
use deckgen::gateway::{ChatBackend, ChatRequest, GatewayError, Mode};
use serde_json::json;

pub fn fixture_path(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(rel)
}

pub fn load_fixture_deck(name: &str) -> DeckModel {
    let bytes = std::fs::read(fixture_path(&format!("decks/{name}"))).expect("fixture deck");
    parse_deck(&bytes).expect("fixture deck parses")
}

/// Pops canned responses per purpose tag, in order, regardless of request
/// content. Used with record mode to build digest-keyed transcripts offline.
pub struct ScriptedBackend {
    queues: Mutex<HashMap<String, VecDeque<String>>>,
}

impl ScriptedBackend {
    pub fn new(responses: Vec<(&str, String)>) -> Self {
        let mut queues: HashMap<String, VecDeque<String>> = HashMap::new();
        for (purpose, response) in responses {
            queues.entry(purpose.to_string()).or_default().push_back(response);
        }
        Self { queues: Mutex::new(queues) }
    }
}

impl ChatBackend for ScriptedBackend {
    fn complete(&self, request: &ChatRequest) -> Result<String, GatewayError> {
        self.queues
            .lock()
            .unwrap()
            .get_mut(&request.purpose_tag)
            .and_then(VecDeque::pop_front)
            .ok_or_else(|| {
                GatewayError::TransportFailure(format!(
                    "no scripted response left for purpose {:?}",
                    request.purpose_tag
                ))
            })
    }
}

pub fn content_profile_response() -> String {
    json!({"presentation_guidelines": {
        "narrative_flow_preference": [
            "Title", "Motivation", "Background", "Method", "Experiments",
            "Conclusion and Future Work"
        ],
        "section_level_preferences": [
            {"section_name": "Title", "content_handling": "Condensed",
             "formatting_preferences": "Minimal Text",
             "additional_comments": "Full paper title with presenter names."},
            {"section_name": "Motivation", "content_handling": "Expanded",
             "formatting_preferences": "Bullet Points",
             "additional_comments": "Opens with the practical pain point."},
            {"section_name": "Method", "content_handling": "Condensed",
             "formatting_preferences": "Visualization-heavy",
             "additional_comments": "Prefers one diagram per idea."},
            {"section_name": "Experiments", "content_handling": "Condensed",
             "formatting_preferences": "Visualization-heavy",
             "additional_comments": "Tables over prose."},
            {"section_name": "Conclusion and Future Work", "content_handling": "Condensed",
             "formatting_preferences": "Short Phrases",
             "additional_comments": ""}
        ],
        "omitted_sections": ["Related Work"]
    }})
    .to_string()
}

pub fn aesthetic_response() -> String {
    json!({
        "slide_0": "Opening, introduce main title, author information",
        "slide_1": "Contents, pure text with multiple bullet points",
        "slide_2": "Contents, image with supporting text",
        "slide_3": "Contents, table with text, for experiment numbers",
        "slide_4": "Ending, thank-you slide with large title"
    })
    .to_string()
}

pub fn reorganized_response() -> String {
    json!({
        "metadata": {
            "title": "Automatic Deck Construction for Technical Documents",
            "author": "A. Researcher, B. Engineer",
            "publish date": "2025",
            "organization": "Example Lab"
        },
        "sections": [
            {"title": "Motivation", "subsections": [
                {"title": "Why It Matters", "content": "Manual deck building is slow and error-prone; presenters need compressed, faithful summaries of long documents."}
            ]},
            {"title": "Background", "subsections": [
                {"title": "Prior Systems", "content": "Earlier converters map documents to slides directly with fixed templates and no notion of per-user style."}
            ]},
            {"title": "Method", "subsections": [
                {"title": "Planning Stage", "content": "The system separates content selection from visual realization and drafts narration alongside each slide."},
                {"title": "Realization Stage", "content": "Planned content is mapped onto template elements and exported as an editable deck."}
            ]},
            {"title": "Experiments", "subsections": [
                {"title": "Setup and Baselines", "content": "Three baselines are compared on a held-out corpus."},
                {"title": "Main Results", "content": "The system leads on six complementary quality scores."}
            ]},
            {"title": "Conclusion and Future Work", "subsections": [
                {"title": "Takeaways", "content": "Separating planning from realization yields clearer decks and enables narrated export."}
            ]}
        ]
    })
    .to_string()
}

// (key, purpose, subsections, image asset, content style, layout recommendation)
type PlanRow = (
    &'static str,
    &'static str,
    &'static [&'static str],
    Option<&'static str>,
    &'static str,
    &'static str,
);

const OUTLINE_PLAN: [PlanRow; 10] = [
    ("1_Opening of the Work", "Introduce the talk and the presenters", &[], None,
     "minimal text", "title with subtitle"),
    ("2_Motivation", "Explain why manual deck building needs help", &["Why It Matters"], None,
     "concise bullet points", "text with bullets"),
    ("3_Background Overview", "Situate the work among prior systems", &["Prior Systems"],
     Some("fig_1"), "image with short caption", "image with text"),
    ("4_Problem Setting", "State the task the system solves", &["Why It Matters"], None,
     "concise bullet points", "text with bullets"),
    ("5_Main Results Table", "Show the headline numbers early", &["Main Results"], None,
     "table plus takeaway line", "table with text"),
    ("6_Method: Planning", "Describe the planning stage", &["Planning Stage"], None,
     "concise bullet points", "text with bullets"),
    ("7_Method: Architecture", "Show the architecture visually", &["Realization Stage"],
     Some("fig_2"), "image with short caption", "image with text"),
    ("8_Experimental Setup", "Describe corpus and baselines", &["Setup and Baselines"], None,
     "concise bullet points", "text with bullets"),
    ("9_Discussion", "Interpret the results and limits", &["Main Results"], None,
     "concise bullet points", "text with bullets"),
    ("10_Conclusion and Future Work", "Summarize and point forward", &["Takeaways"], None,
     "short phrases", "summary with key takeaways"),
];

const LAYOUTS: [&str; 10] = [
    "slide_0", "slide_1", "slide_2", "slide_1", "slide_3",
    "slide_1", "slide_2", "slide_1", "slide_1", "slide_4",
];

fn outline_entry(i: usize, with_speech: bool, with_layout: bool) -> serde_json::Value {
    let (_, purpose, subsections, asset, style, rec) = OUTLINE_PLAN[i];
    let mut entry = serde_json::Map::new();
    entry.insert("purpose".into(), json!(purpose));
    if with_speech {
        entry.insert(
            "speech_draft".into(),
            json!(format!(
                "Narration for slide {}: {}. This draft walks the audience through the point in full sentences.",
                i + 1,
                purpose
            )),
        );
    }
    entry.insert("subsections".into(), json!(subsections));
    entry.insert("content_style".into(), json!(style));
    if let Some(a) = asset {
        entry.insert("image_assets".into(), json!([a]));
    }
    entry.insert("layout_recommendation".into(), json!(rec));
    if with_layout {
        entry.insert("layout".into(), json!(LAYOUTS[i]));
        entry.insert(
            "layout_justification".into(),
            json!("Matches the slide's media type and purpose"),
        );
    }
    serde_json::Value::Object(entry)
}

pub fn outline_response(with_speech: bool) -> String {
    let mut map = serde_json::Map::new();
    for (i, plan) in OUTLINE_PLAN.iter().enumerate() {
        map.insert(plan.0.to_string(), outline_entry(i, with_speech, false));
    }
    serde_json::Value::Object(map).to_string()
}

pub fn selected_response(with_speech: bool) -> String {
    let mut map = serde_json::Map::new();
    for (i, plan) in OUTLINE_PLAN.iter().enumerate() {
        map.insert(plan.0.to_string(), outline_entry(i, with_speech, true));
    }
    serde_json::Value::Object(map).to_string()
}

/// Element mappings per outline slide against template_a's shape ids:
/// layout slide_0 has ctrTitle 2 / subTitle 3 / textbox 4; the content
/// layouts have title 2 / body 3 (+ picture or table 4).
pub fn mapping_responses() -> Vec<String> {
    let mut out = Vec::new();
    for (i, layout) in LAYOUTS.iter().enumerate() {
        let title = OUTLINE_PLAN[i].0.split_once('_').unwrap().1;
        let mapping = match *layout {
            "slide_0" => json!({"assignments": [
                {"shape_id": 2, "action": "set_text", "text": ["Automatic Deck Construction for Technical Documents"]},
                {"shape_id": 4, "action": "set_text", "text": ["Presenter: A. Researcher, B. Engineer"]}
            ]}),
            "slide_2" => json!({"assignments": [
                {"shape_id": 2, "action": "set_text", "text": [title]},
                {"shape_id": 3, "action": "set_text", "text": ["Key point drawn from the plan", "Supporting detail for the figure"]},
                {"shape_id": 4, "action": "replace_image", "asset_id": OUTLINE_PLAN[i].3.unwrap()}
            ]}),
            "slide_3" => json!({"assignments": [
                {"shape_id": 2, "action": "set_text", "text": [title]},
                {"shape_id": 3, "action": "set_text", "text": ["The system leads on all six scores"]}
            ]}),
            "slide_4" => json!({"assignments": [
                {"shape_id": 2, "action": "set_text", "text": ["Thank You"]},
                {"shape_id": 3, "action": "set_text", "text": ["Questions welcome"]}
            ]}),
            _ => json!({"assignments": [
                {"shape_id": 2, "action": "set_text", "text": [title]},
                {"shape_id": 3, "action": "set_text", "text": ["First point from the plan", "Second point from the plan", "Third point from the plan"]}
            ]}),
        };
        out.push(mapping.to_string());
    }
    out
}

pub fn gen_subtopics_response() -> String {
    json!({"subtopics": [
        "Title", "Motivation", "Background", "Problem Setting", "Results",
        "Method", "Method", "Experiments", "Discussion", "Conclusion and Future Work"
    ]})
    .to_string()
}

pub fn ref_subtopics_response() -> String {
    json!({"subtopics": [
        "Title", "Motivation", "Background", "Method", "Method",
        "Experiments", "Experiments", "Conclusion and Future Work"
    ]})
    .to_string()
}

/// The full response script for one end-to-end job (with evaluation).
pub fn e2e_responses(with_speech: bool, with_content_pref: bool) -> Vec<(&'static str, String)> {
    let mut responses: Vec<(&'static str, String)> = Vec::new();
    if with_content_pref {
        responses.push(("distill_content", content_profile_response()));
    }
    responses.push(("distill_aesthetic", aesthetic_response()));
    responses.push(("reorganize", reorganized_response()));
    responses.push(("outline", outline_response(with_speech)));
    responses.push(("select_layout", selected_response(with_speech)));
    for m in mapping_responses() {
        responses.push(("map_elements", m));
    }
    responses.push(("extract_subtopics", gen_subtopics_response()));
    responses.push(("extract_subtopics", ref_subtopics_response()));
    responses.push((
        "judge_content_structure",
        json!({"reason": "Both follow the same research-talk arc with matching pacing.", "score": 4}).to_string(),
    ));
    responses.push((
        "judge_aesthetic_pref",
        json!({"reason": "Layouts, palette, and typography mirror the template closely.", "score": 5}).to_string(),
    ));
    responses.push((
        "judge_content_quality",
        json!({"reason": "Covers motivation, method, and results with adequate depth.", "score": 4}).to_string(),
    ));
    responses.push((
        "judge_aesthetic",
        json!({"reason": "Harmonious scheme with supporting figures on key slides.", "score": 4}).to_string(),
    ));
    responses
}

/// The standard replay job over the shipped fixtures.
pub fn fixture_job(transcripts: &Path) -> JobSpec {
    let mut job = JobSpec::single(
        fixture_path("bundles/target"),
        fixture_path("bundles/ref_paper"),
        fixture_path("bundles/ref_slides"),
        fixture_path("decks/template_a.pptx"),
    );
    job.mode = Mode::Replay;
    job.transcripts = Some(transcripts.to_path_buf());
    job
}

/// Pipeline config pointing at the pre-rendered fixture images.
pub fn fixture_config() -> Config {
    Config {
        model_id: "fixture-model".to_string(),
        gen_renders_dir: Some(fixture_path("renders/gen")),
        template_renders_dir: Some(fixture_path("renders/template")),
        ..Config::default()
    }
}

/// Write a config file equivalent to [`fixture_config`] for CLI invocations.
pub fn write_fixture_config(dir: &Path) -> PathBuf {
    let path = dir.join("deckgen.conf");
    std::fs::write(
        &path,
        format!(
            "model_id = fixture-model\ngen_renders_dir = {}\ntemplate_renders_dir = {}\n",
            fixture_path("renders/gen").display(),
            fixture_path("renders/template").display()
        ),
    )
    .expect("config written");
    path
}

/// Record transcripts for the scripted job into `dir` (no network involved).
pub fn record_transcripts(dir: &Path, with_speech: bool, with_content_pref: bool, evaluate: bool) {
    let mut job = fixture_job(dir);
    job.mode = Mode::Record;
    job.chain_of_speech = with_speech;
    job.content_pref = with_content_pref;
    let backend = ScriptedBackend::new(e2e_responses(with_speech, with_content_pref));
    let scratch = tempfile::tempdir().expect("scratch dir");
    let record = deckgen::bench::run_pipeline_with_backend(
        &job,
        &fixture_config(),
        scratch.path(),
        evaluate,
        Some(Box::new(backend)),
    );
    assert!(
        record.failure.is_none(),
        "recording pass failed: {:?}",
        record.failure
    );
}
