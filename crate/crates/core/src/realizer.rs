//! Slide realization: map planned content onto template slide elements,
//! compile the declarative edit plan, apply it, and embed narration.

use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::deck::{
    apply_edit_plan, describe_slide, DeckError, DeckModel, EditOp, EditPlan, ShapeKind, SlideModel,
};
use crate::gateway::schema::coerce_int;
use crate::gateway::{ChatRequest, GatewayError, ModelGateway, DEFAULT_MAX_REPAIRS};
use crate::ingest::PaperBundle;
use crate::planner::{OutlineEntry, SlideOutline};
use crate::prompts;

/// Overflow heuristic: a text box is flagged when the assigned character
/// count exceeds `area_pt2 * CHARS_PER_PT2`.
pub const CHARS_PER_PT2: f64 = 0.02;

#[derive(Debug, thiserror::Error)]
pub enum RealizerError {
    #[error(transparent)]
    Gateway(#[from] GatewayError),
    #[error(transparent)]
    Deck(#[from] DeckError),
    #[error("unknown asset id: {0}")]
    UnknownAssetId(String),
    #[error("outline entry {0} has no speech draft (chain-of-speech was disabled?)")]
    MissingSpeech(String),
    #[error("entry {0} has no selected layout")]
    NoLayout(String),
    #[error("{mappings} mappings for {entries} outline entries")]
    MappingCount { mappings: usize, entries: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapAction {
    SetText,
    ReplaceImage,
    Delete,
}

#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct Assignment {
    pub shape_id: u32,
    pub action: MapAction,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub text: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub asset_id: Option<String>,
}

/// Validated per-slide mapping from planned content to template elements.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct ElementMapping {
    pub outline_key: String,
    pub template_index: usize,
    pub assignments: Vec<Assignment>,
}

#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct SlideOutcome {
    pub outline_key: String,
    pub template_index: usize,
    pub assignments_applied: usize,
    pub shapes_deleted: usize,
    #[serde(default)]
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, Default, serde::Serialize, serde::Deserialize)]
pub struct RealizedDeckReport {
    pub slides: Vec<SlideOutcome>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
}

/// Check a raw mapping value against the template slide: every shape id must
/// exist, appear at most once, and its action must be legal for its kind.
fn check_mapping_against_slide(value: &Value, slide: &SlideModel) -> Result<(), String> {
    let assignments = value["assignments"].as_array().cloned().unwrap_or_default();
    let mut seen = std::collections::BTreeSet::new();
    for a in &assignments {
        let id = coerce_int(&a["shape_id"]).unwrap_or(-1);
        let id = u32::try_from(id).map_err(|_| format!("shape_id {id} is not a valid id"))?;
        let shape = slide
            .shape(id)
            .ok_or_else(|| format!("UnknownShapeId: slide has no shape with id {id}"))?;
        if !seen.insert(id) {
            return Err(format!("DuplicateAssignment: shape {id} is assigned more than once"));
        }
        match a["action"].as_str().unwrap_or_default() {
            "set_text" => {
                if !shape.is_text_capable() {
                    return Err(format!(
                        "IllegalAction: set_text on shape {id} which is a {:?}",
                        shape.kind
                    ));
                }
            }
            "replace_image" => {
                if !matches!(shape.kind, ShapeKind::Picture | ShapeKind::Placeholder) {
                    return Err(format!(
                        "IllegalAction: replace_image on shape {id} which is a {:?}",
                        shape.kind
                    ));
                }
            }
            "delete" => {}
            other => return Err(format!("IllegalAction: unknown action {other:?}")),
        }
    }
    Ok(())
}

/// Ask the model to map one planned slide onto its template slide's
/// elements, then delete every placeholder left unfilled so no empty
/// placeholder survives realization.
pub fn map_content_to_elements(
    entry: &OutlineEntry,
    template_slide: &SlideModel,
    template_index: usize,
    theme: &str,
    assets: &PaperBundle,
    model_id: &str,
    gateway: &ModelGateway,
) -> Result<ElementMapping, RealizerError> {
    let planned = serde_json::to_string_pretty(&json!({
        "title": entry.topic,
        "purpose": entry.purpose,
        "speech_draft": entry.speech_draft,
        "subsections": entry.subsections,
        "content_style": entry.content_style,
        "image_assets": entry.image_assets,
    }))
    .expect("entry serializes");
    let template_descr = serde_json::to_string_pretty(&json!({
        "theme": theme,
        "elements": describe_slide(template_slide),
    }))
    .expect("slide description serializes");
    let prompt = prompts::render(
        prompts::MAP_ELEMENTS,
        &[
            ("planned_slide", planned.as_str()),
            ("template_slide", template_descr.as_str()),
            ("image_information", assets.image_information().as_str()),
        ],
    );
    let request = ChatRequest::simple(model_id, "map_elements", prompt);
    let value = gateway.complete_structured_with(
        &request,
        "element_mapping",
        DEFAULT_MAX_REPAIRS,
        |v| check_mapping_against_slide(v, template_slide),
    )?;

    let mut assignments: Vec<Assignment> = value["assignments"]
        .as_array()
        .map(|list| {
            list.iter()
                .map(|a| Assignment {
                    shape_id: coerce_int(&a["shape_id"]).unwrap_or_default() as u32,
                    action: match a["action"].as_str().unwrap_or_default() {
                        "set_text" => MapAction::SetText,
                        "replace_image" => MapAction::ReplaceImage,
                        _ => MapAction::Delete,
                    },
                    text: a["text"]
                        .as_array()
                        .map(|t| t.iter().filter_map(|s| s.as_str().map(String::from)).collect())
                        .unwrap_or_default(),
                    asset_id: a["asset_id"].as_str().map(String::from),
                })
                .collect()
        })
        .unwrap_or_default();

    // Unfilled placeholders are deleted rather than left empty on the slide.
    for shape in &template_slide.shapes {
        let assigned = assignments.iter().any(|a| a.shape_id == shape.shape_id);
        if !assigned && shape.kind == ShapeKind::Placeholder {
            assignments.push(Assignment {
                shape_id: shape.shape_id,
                action: MapAction::Delete,
                text: Vec::new(),
                asset_id: None,
            });
        }
    }

    Ok(ElementMapping {
        outline_key: entry.key(),
        template_index,
        assignments,
    })
}

/// Translate validated mappings into the declarative edit plan, resolving
/// asset ids to files.
pub fn build_edit_plan(
    mappings: &[ElementMapping],
    assets: &PaperBundle,
) -> Result<EditPlan, RealizerError> {
    let mut ops = Vec::new();
    for (out_slide, mapping) in mappings.iter().enumerate() {
        ops.push(EditOp::CloneTemplateSlide { template_index: mapping.template_index });
        for a in &mapping.assignments {
            match a.action {
                MapAction::SetText => ops.push(EditOp::SetText {
                    out_slide,
                    shape_id: a.shape_id,
                    paragraphs: a.text.clone(),
                }),
                MapAction::ReplaceImage => {
                    let id = a.asset_id.clone().unwrap_or_default();
                    let record = assets
                        .asset(&id)
                        .ok_or_else(|| RealizerError::UnknownAssetId(id.clone()))?;
                    ops.push(EditOp::ReplaceImage {
                        out_slide,
                        shape_id: a.shape_id,
                        asset_path: record.file_path.clone(),
                    });
                }
                MapAction::Delete => {
                    ops.push(EditOp::DeleteShape { out_slide, shape_id: a.shape_id })
                }
            }
        }
    }
    Ok(EditPlan { ops })
}

/// Apply the plan and embed narration, producing the final deck plus a
/// per-slide report.
pub fn realize_deck(
    template: &DeckModel,
    outline: &SlideOutline,
    mappings: &[ElementMapping],
    assets: &PaperBundle,
    embed_notes: bool,
) -> Result<(DeckModel, RealizedDeckReport), RealizerError> {
    if mappings.len() != outline.len() {
        return Err(RealizerError::MappingCount {
            mappings: mappings.len(),
            entries: outline.len(),
        });
    }
    let mut plan = build_edit_plan(mappings, assets)?;
    let mut noted = vec![false; outline.len()];
    if embed_notes {
        for (i, entry) in outline.entries.iter().enumerate() {
            if let Some(speech) = &entry.speech_draft {
                plan.ops.push(EditOp::SetNotes { out_slide: i, text: speech.clone() });
                noted[i] = true;
            }
        }
    }
    let mut deck = apply_edit_plan(template, &plan)?;
    // Notes inherited from the template are leftovers, not narration.
    for (i, noted) in noted.iter().enumerate() {
        if !noted {
            crate::deck::clear_speaker_notes(&mut deck, i)?;
        }
    }

    let mut report = RealizedDeckReport::default();
    for (i, (mapping, entry)) in mappings.iter().zip(&outline.entries).enumerate() {
        let mut warnings = Vec::new();
        let template_slide = &template.slides[mapping.template_index];
        for a in &mapping.assignments {
            if a.action == MapAction::SetText {
                if let Some(shape) = template_slide.shape(a.shape_id) {
                    if shape.has_geometry {
                        let area = shape.bbox.width_pt() * shape.bbox.height_pt();
                        let capacity = (area * CHARS_PER_PT2) as usize;
                        let chars: usize = a.text.iter().map(|t| t.chars().count()).sum();
                        if chars > capacity {
                            warnings.push(format!(
                                "slide {i}: text of {chars} chars exceeds estimated capacity {capacity} of shape {}",
                                a.shape_id
                            ));
                        }
                    }
                }
            }
        }
        report.slides.push(SlideOutcome {
            outline_key: entry.key(),
            template_index: mapping.template_index,
            assignments_applied: mapping.assignments.len(),
            shapes_deleted: mapping
                .assignments
                .iter()
                .filter(|a| a.action == MapAction::Delete)
                .count(),
            warnings,
        });
    }
    Ok((deck, report))
}

#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct NarrationRecord {
    pub slide_index: usize,
    pub title: String,
    pub speech_text: String,
}

/// Write the ordered narration manifest: JSON records plus a plain-text
/// concatenation next to it.
pub fn export_narration(outline: &SlideOutline, out_path: &Path) -> Result<Vec<NarrationRecord>, RealizerError> {
    let mut records = Vec::new();
    for entry in &outline.entries {
        let speech = entry
            .speech_draft
            .clone()
            .filter(|s| !s.trim().is_empty())
            .ok_or_else(|| RealizerError::MissingSpeech(entry.key()))?;
        records.push(NarrationRecord {
            slide_index: entry.index,
            title: entry.topic.clone(),
            speech_text: speech,
        });
    }
    std::fs::write(out_path, serde_json::to_vec_pretty(&records).expect("records serialize"))?;
    let txt_path = out_path.with_extension("txt");
    let mut txt = String::new();
    for r in &records {
        txt.push_str(&format!("[Slide {}] {}\n{}\n\n", r.slide_index, r.title, r.speech_text));
    }
    std::fs::write(txt_path, txt.trim_end().as_bytes())?;
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{AssetKind, AssetRecord, PaperMetadata, Section};

    fn assets_bundle() -> PaperBundle {
        PaperBundle {
            metadata: PaperMetadata::default(),
            body_text: vec![Section { heading: "A".into(), text: "t".into() }],
            assets: vec![AssetRecord {
                asset_id: "fig_3".into(),
                kind: AssetKind::Figure,
                file_path: PathBuf::from("/tmp/fig_3.png"),
                caption: "a figure".into(),
                source_locator: String::new(),
            }],
        }
    }

    fn mapping(template_index: usize) -> ElementMapping {
        ElementMapping {
            outline_key: "1_T".into(),
            template_index,
            assignments: vec![Assignment {
                shape_id: 2,
                action: MapAction::SetText,
                text: vec!["Hello".into()],
                asset_id: None,
            }],
        }
    }

    #[test]
    fn plan_has_one_clone_per_mapping_in_order() {
        let plan = build_edit_plan(&[mapping(3), mapping(0)], &assets_bundle()).unwrap();
        let clones: Vec<usize> = plan
            .ops
            .iter()
            .filter_map(|op| match op {
                EditOp::CloneTemplateSlide { template_index } => Some(*template_index),
                _ => None,
            })
            .collect();
        assert_eq!(clones, vec![3, 0]);
    }

    #[test]
    fn image_assignment_resolves_path() {
        let mut m = mapping(0);
        m.assignments.push(Assignment {
            shape_id: 4,
            action: MapAction::ReplaceImage,
            text: vec![],
            asset_id: Some("fig_3".into()),
        });
        let plan = build_edit_plan(&[m], &assets_bundle()).unwrap();
        assert!(plan.ops.iter().any(|op| matches!(
            op,
            EditOp::ReplaceImage { asset_path, .. } if asset_path == &PathBuf::from("/tmp/fig_3.png")
        )));
    }

    #[test]
    fn unknown_asset_is_an_error() {
        let mut m = mapping(0);
        m.assignments.push(Assignment {
            shape_id: 4,
            action: MapAction::ReplaceImage,
            text: vec![],
            asset_id: Some("fig_9".into()),
        });
        let err = build_edit_plan(&[m], &assets_bundle()).unwrap_err();
        assert!(matches!(err, RealizerError::UnknownAssetId(id) if id == "fig_9"));
    }
}
