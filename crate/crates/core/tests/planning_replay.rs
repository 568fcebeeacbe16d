//! Stage-level tests for the distillation, planning, and mapping agents,
//! driven by scripted transcripts (record once, replay exactly).

mod common;

use common::{load_fixture_deck, ScriptedBackend};
use deckgen::gateway::{GatewayError, Mode, ModelGateway, TranscriptStore};
use deckgen::ingest::load_bundle;
use deckgen::planner::{
    generate_outline, reorganize_paper, select_layouts, validate_outline, SlideOutline,
};
use deckgen::prefs::{
    distill_aesthetic_profile, distill_content_preferences, ContentHandling, PrefsError,
};
use deckgen::realizer::{map_content_to_elements, MapAction};
use serde_json::json;

const MODEL: &str = "fixture-model";

fn scripted_gateway(responses: Vec<(&str, String)>) -> ModelGateway {
    ModelGateway::new(Mode::Live, None, Some(Box::new(ScriptedBackend::new(responses))))
}

#[test]
fn distill_content_records_then_replays() {
    let dir = tempfile::tempdir().unwrap();
    let ref_paper = load_bundle(common::fixture_path("bundles/ref_paper")).unwrap();
    let ref_slides = load_bundle(common::fixture_path("bundles/ref_slides")).unwrap();

    let recorder = ModelGateway::new(
        Mode::Record,
        Some(TranscriptStore::open(dir.path()).unwrap()),
        Some(Box::new(ScriptedBackend::new(vec![(
            "distill_content",
            common::content_profile_response(),
        )]))),
    );
    let recorded =
        distill_content_preferences(&ref_paper, &ref_slides, MODEL, &recorder).unwrap();
    assert_eq!(recorded.narrative_flow_preference[0], "Title");
    assert_eq!(
        recorded.section_level_preferences[0].content_handling,
        ContentHandling::Condensed
    );

    // Replay: same inputs, no backend, identical profile.
    let replayer = ModelGateway::replay(TranscriptStore::open(dir.path()).unwrap());
    let replayed =
        distill_content_preferences(&ref_paper, &ref_slides, MODEL, &replayer).unwrap();
    assert_eq!(recorded, replayed);
}

#[test]
fn distill_content_enum_violation_repairs_then_exhausts() {
    let bad = json!({"presentation_guidelines": {
        "narrative_flow_preference": ["Title"],
        "section_level_preferences": [
            {"section_name": "Title", "content_handling": "Shortened",
             "formatting_preferences": "", "additional_comments": ""}
        ],
        "omitted_sections": []
    }})
    .to_string();
    let gateway = scripted_gateway(vec![
        ("distill_content", bad.clone()),
        ("distill_content", bad.clone()),
        ("distill_content", bad.clone()),
        ("distill_content", bad),
    ]);
    let ref_paper = load_bundle(common::fixture_path("bundles/ref_paper")).unwrap();
    let ref_slides = load_bundle(common::fixture_path("bundles/ref_slides")).unwrap();
    let err = distill_content_preferences(&ref_paper, &ref_slides, MODEL, &gateway).unwrap_err();
    match err {
        PrefsError::Gateway(GatewayError::ExhaustedRepairs { attempts, last }) => {
            assert_eq!(attempts, 4);
            assert!(last.contains("EnumViolation"), "{last}");
        }
        other => panic!("expected exhausted repairs, got {other:?}"),
    }
}

#[test]
fn distill_aesthetic_validates_key_coverage() {
    let template = load_fixture_deck("template_a.pptx");
    let gateway = scripted_gateway(vec![("distill_aesthetic", common::aesthetic_response())]);
    let profile = distill_aesthetic_profile(&template, MODEL, &gateway).unwrap();
    assert_eq!(profile.template_slide_count, 5);
    assert_eq!(profile.slide_themes.len(), 5);
    assert_eq!(
        profile.slide_themes[0],
        "Opening, introduce main title, author information"
    );
    // Element metadata is the pptc document.
    assert!(profile.element_metadata["slide_0"]["shape_0"]["pptc_description"].is_string());

    // A response missing slide_3 triggers a repair, then succeeds.
    let incomplete = json!({
        "slide_0": "Opening", "slide_1": "Contents", "slide_2": "Contents", "slide_4": "Ending"
    })
    .to_string();
    let gateway = scripted_gateway(vec![
        ("distill_aesthetic", incomplete),
        ("distill_aesthetic", common::aesthetic_response()),
    ]);
    let profile = distill_aesthetic_profile(&template, MODEL, &gateway).unwrap();
    assert_eq!(profile.slide_themes.len(), 5);
    assert_eq!(gateway.drain_calls().len(), 2);
}

#[test]
fn reorganize_follows_profile_flow_and_ablation_changes_request() {
    let target = load_bundle(common::fixture_path("bundles/target")).unwrap();
    let profile = deckgen::prefs::validate_content_profile(
        &serde_json::from_str(&common::content_profile_response()).unwrap(),
    )
    .unwrap();

    let gateway = scripted_gateway(vec![("reorganize", common::reorganized_response())]);
    let doc = reorganize_paper(&target, Some(&profile), MODEL, &gateway).unwrap();
    // Section order matches the profile's narrative flow (skipping Title,
    // which is slide metadata rather than a document section).
    let flow: Vec<&str> = profile
        .narrative_flow_preference
        .iter()
        .filter(|s| *s != "Title")
        .map(String::as_str)
        .collect();
    assert_eq!(doc.section_titles(), flow);
    let calls = gateway.drain_calls();
    assert!(calls[0].request.messages[0].text.contains("presentation_guidelines"));

    // Ablated: fallback block instead of guidelines.
    let gateway = scripted_gateway(vec![("reorganize", common::reorganized_response())]);
    let _ = reorganize_paper(&target, None, MODEL, &gateway).unwrap();
    let calls = gateway.drain_calls();
    let body = &calls[0].request.messages[0].text;
    assert!(!body.contains("presentation_guidelines"));
    assert!(body.contains("No preference guidelines were supplied"));
}

#[test]
fn reorganize_repairs_missing_subsection_content() {
    let target = load_bundle(common::fixture_path("bundles/target")).unwrap();
    let broken = json!({
        "metadata": {"title": "t", "author": "a", "publish date": "d", "organization": "o"},
        "sections": [{"title": "Method", "subsections": [{"title": "Planning"}]}]
    })
    .to_string();
    let gateway = scripted_gateway(vec![
        ("reorganize", broken),
        ("reorganize", common::reorganized_response()),
    ]);
    let doc = reorganize_paper(&target, None, MODEL, &gateway).unwrap();
    assert_eq!(doc.sections.len(), 5);
    assert_eq!(gateway.drain_calls().len(), 2);
}

#[test]
fn outline_has_exact_count_and_keys() {
    let target = load_bundle(common::fixture_path("bundles/target")).unwrap();
    let doc: deckgen::planner::ReorganizedDoc =
        serde_json::from_str(&common::reorganized_response()).unwrap();
    let gateway = scripted_gateway(vec![("outline", common::outline_response(true))]);
    let outline =
        generate_outline(&doc, None, &target.assets, 10, true, MODEL, &gateway).unwrap();
    assert_eq!(outline.len(), 10);
    assert_eq!(outline.entries[0].key(), "1_Opening of the Work");
    assert_eq!(outline.entries[9].index, 10);
    assert_eq!(outline.entries[0].layout_recommendation, "title with subtitle");
    assert!(outline.entries.iter().all(|e| e.speech_draft.is_some()));

    // The chain-of-speech ablation is prompt surgery: the request must not
    // mention the field, and outputs carrying it are rejected.
    let gateway = scripted_gateway(vec![("outline", common::outline_response(false))]);
    let outline =
        generate_outline(&doc, None, &target.assets, 10, false, MODEL, &gateway).unwrap();
    assert!(outline.entries.iter().all(|e| e.speech_draft.is_none()));
    let calls = gateway.drain_calls();
    assert!(!calls[0].request.messages[0].text.contains("speech_draft"));
}

#[test]
fn outline_duplicate_image_use_is_rejected() {
    let target = load_bundle(common::fixture_path("bundles/target")).unwrap();
    let doc: deckgen::planner::ReorganizedDoc =
        serde_json::from_str(&common::reorganized_response()).unwrap();
    // fig_1 on two slides; never repaired within budget (2 repairs = 3 calls).
    let mut bad: serde_json::Value =
        serde_json::from_str(&common::outline_response(true)).unwrap();
    bad["4_Problem Setting"]["image_assets"] = json!(["fig_1"]);
    let bad = bad.to_string();
    let gateway = scripted_gateway(vec![
        ("outline", bad.clone()),
        ("outline", bad.clone()),
        ("outline", bad),
    ]);
    let err =
        generate_outline(&doc, None, &target.assets, 10, true, MODEL, &gateway).unwrap_err();
    let text = err.to_string();
    assert!(text.contains("DuplicateImageUse"), "{text}");
}

#[test]
fn select_layouts_assigns_within_range_and_preserves_content() {
    let outline = SlideOutline::from_value(
        &serde_json::from_str(&common::outline_response(true)).unwrap(),
    )
    .unwrap();
    let template = load_fixture_deck("template_a.pptx");
    let gateway = scripted_gateway(vec![("distill_aesthetic", common::aesthetic_response())]);
    let aesthetic = distill_aesthetic_profile(&template, MODEL, &gateway).unwrap();

    let gateway = scripted_gateway(vec![("select_layout", common::selected_response(true))]);
    let selected = select_layouts(&outline, &aesthetic, MODEL, &gateway).unwrap();
    assert!(selected.entries.iter().all(|e| e.layout_index().unwrap() < 5));
    assert!(selected
        .entries
        .iter()
        .all(|e| !e.layout_justification.as_deref().unwrap_or("").is_empty()));
    let diags = validate_outline(&selected, 10, &["fig_1".into(), "fig_2".into()], 5, true);
    assert!(diags.is_empty(), "{diags:?}");

    // A selector that rewrites a speech draft trips ContentMutated and, when
    // never corrected, exhausts the repair budget.
    let mut mutated: serde_json::Value =
        serde_json::from_str(&common::selected_response(true)).unwrap();
    mutated["2_Motivation"]["speech_draft"] = json!("REWRITTEN SPEECH");
    let mutated = mutated.to_string();
    let gateway = scripted_gateway(vec![
        ("select_layout", mutated.clone()),
        ("select_layout", mutated.clone()),
        ("select_layout", mutated.clone()),
        ("select_layout", mutated),
    ]);
    let err = select_layouts(&outline, &aesthetic, MODEL, &gateway).unwrap_err();
    assert!(err.to_string().contains("ContentMutated"), "{err}");
}

#[test]
fn judge_two_turn_repair_yields_single_score() {
    let gateway = scripted_gateway(vec![
        ("judge_content_structure", "here is my thinking but no json".to_string()),
        (
            "judge_content_structure",
            json!({"reason": "similar arcs", "score": 4}).to_string(),
        ),
    ]);
    let score = deckgen::eval::judges::judge_content_structure(
        "Slide 1 [title]: a\n",
        "Slide 1 [title]: b\n",
        MODEL,
        &gateway,
    )
    .unwrap();
    assert_eq!(score.raw, 4.0);
    assert_eq!(score.normalized, 80.0);
    assert_eq!(score.reason, "similar arcs");
    assert_eq!(gateway.drain_calls().len(), 2);
}

#[test]
fn mapping_validates_shape_ids_and_auto_deletes_placeholders() {
    let template = load_fixture_deck("template_a.pptx");
    let target = load_bundle(common::fixture_path("bundles/target")).unwrap();
    let selected = SlideOutline::from_value(
        &serde_json::from_str(&common::selected_response(true)).unwrap(),
    )
    .unwrap();
    let entry = &selected.entries[0];

    // Title slide: title + presenter textbox assigned, subtitle placeholder
    // left unassigned and therefore deleted.
    let gateway = scripted_gateway(vec![("map_elements", common::mapping_responses()[0].clone())]);
    let mapping = map_content_to_elements(
        entry,
        &template.slides[0],
        0,
        "Opening slide",
        &target,
        MODEL,
        &gateway,
    )
    .unwrap();
    let deleted: Vec<u32> = mapping
        .assignments
        .iter()
        .filter(|a| a.action == MapAction::Delete)
        .map(|a| a.shape_id)
        .collect();
    assert_eq!(deleted, vec![3]);

    // An assignment naming a shape that does not exist repairs, then lands.
    let bad = json!({"assignments": [{"shape_id": 9, "action": "set_text", "text": ["x"]}]}).to_string();
    let gateway = scripted_gateway(vec![
        ("map_elements", bad),
        ("map_elements", common::mapping_responses()[0].clone()),
    ]);
    let mapping = map_content_to_elements(
        entry,
        &template.slides[0],
        0,
        "Opening slide",
        &target,
        MODEL,
        &gateway,
    )
    .unwrap();
    assert_eq!(gateway.drain_calls().len(), 2);
    assert_eq!(mapping.assignments[0].shape_id, 2);

    // Duplicate assignment of one shape is rejected by the validator.
    let dup = json!({"assignments": [
        {"shape_id": 2, "action": "set_text", "text": ["a"]},
        {"shape_id": 2, "action": "delete"}
    ]})
    .to_string();
    let gateway = scripted_gateway(vec![
        ("map_elements", dup.clone()),
        ("map_elements", dup.clone()),
        ("map_elements", dup.clone()),
        ("map_elements", dup),
    ]);
    let err = map_content_to_elements(
        entry,
        &template.slides[0],
        0,
        "Opening slide",
        &target,
        MODEL,
        &gateway,
    )
    .unwrap_err();
    assert!(err.to_string().contains("DuplicateAssignment"), "{err}");

    // Image into a plain textbox is an illegal action.
    let illegal = json!({"assignments": [
        {"shape_id": 4, "action": "replace_image", "asset_id": "fig_1"}
    ]})
    .to_string();
    let gateway = scripted_gateway(vec![
        ("map_elements", illegal.clone()),
        ("map_elements", illegal.clone()),
        ("map_elements", illegal.clone()),
        ("map_elements", illegal),
    ]);
    let err = map_content_to_elements(
        entry,
        &template.slides[0],
        0,
        "Opening slide",
        &target,
        MODEL,
        &gateway,
    )
    .unwrap_err();
    assert!(err.to_string().contains("IllegalAction"), "{err}");
}
