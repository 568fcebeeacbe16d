//! Rubric judges: render a versioned rubric, obtain `{"reason","score"}`,
//! coerce leniently, clamp to [1,5], and normalize.

use std::path::PathBuf;

use crate::gateway::{schema_coerce_int, ChatRequest, ModelGateway, DEFAULT_MAX_REPAIRS};
use crate::prompts;

use super::{metrics, EvalError, MetricName, MetricScore};

fn run_judge(
    metric_name: MetricName,
    template: &str,
    vars: &[(&str, &str)],
    images: &[PathBuf],
    purpose: &str,
    model_id: &str,
    gateway: &ModelGateway,
) -> Result<MetricScore, EvalError> {
    let prompt = prompts::render(template, vars);
    let mut request = ChatRequest::simple(model_id, purpose, prompt);
    if !images.is_empty() {
        request.messages[0].image_refs = images.to_vec();
    }
    let value = gateway.complete_structured(&request, "judge_raw", DEFAULT_MAX_REPAIRS)?;
    let score = schema_coerce_int(&value["score"]).expect("score is schema-checked");
    let mut warnings = Vec::new();
    if value["score"].is_string() {
        warnings.push(format!("score arrived as a string: {}", value["score"]));
    }
    let clamped = score.clamp(1, 5);
    if clamped != score {
        warnings.push(format!("score {score} clamped to {clamped}"));
    }
    let reason = value["reason"].as_str().unwrap_or("").to_string();
    if reason.is_empty() {
        warnings.push("judge returned no reason".to_string());
    }
    let raw = clamped as f64;
    let normalized = metrics::normalize_judge(raw)?;
    Ok(MetricScore { metric_name, raw, normalized, reason, warnings })
}

/// Structural-alignment judge over the two textual structure projections.
pub fn judge_content_structure(
    ref_structure: &str,
    gen_structure: &str,
    model_id: &str,
    gateway: &ModelGateway,
) -> Result<MetricScore, EvalError> {
    run_judge(
        MetricName::ContentStructure,
        prompts::JUDGE_CONTENT_STRUCTURE,
        &[("ref_structure", ref_structure), ("pres_structure", gen_structure)],
        &[],
        "judge_content_structure",
        model_id,
        gateway,
    )
}

/// Template-adherence judge over rendered slide screenshots. One unified
/// `{reason, score}` covers the whole deck.
pub fn judge_aesthetic_similarity(
    gen_images: &[PathBuf],
    template_images: &[PathBuf],
    model_id: &str,
    gateway: &ModelGateway,
) -> Result<MetricScore, EvalError> {
    if gen_images.is_empty() || template_images.is_empty() {
        return Err(EvalError::MissingRender);
    }
    let n_gen = gen_images.len().to_string();
    let n_tpl = template_images.len().to_string();
    let mut images = gen_images.to_vec();
    images.extend_from_slice(template_images);
    run_judge(
        MetricName::AestheticPref,
        prompts::JUDGE_AESTHETIC_SIMILARITY,
        &[("num_of_target_slide", n_gen.as_str()), ("num_of_template_slide", n_tpl.as_str())],
        &images,
        "judge_aesthetic_pref",
        model_id,
        gateway,
    )
}

/// Informativeness judge: generated slides against the target paper text.
pub fn judge_content_quality(
    paper_text: &str,
    gen_images: &[PathBuf],
    model_id: &str,
    gateway: &ModelGateway,
) -> Result<MetricScore, EvalError> {
    if paper_text.trim().is_empty() {
        return Err(EvalError::MissingInput("target paper text".into()));
    }
    run_judge(
        MetricName::Content,
        prompts::JUDGE_CONTENT_QUALITY,
        &[("paper", paper_text)],
        gen_images,
        "judge_content_quality",
        model_id,
        gateway,
    )
}

/// Visual-appeal judge, independent of content semantics.
pub fn judge_visual_quality(
    description: &str,
    gen_images: &[PathBuf],
    model_id: &str,
    gateway: &ModelGateway,
) -> Result<MetricScore, EvalError> {
    run_judge(
        MetricName::Aesthetic,
        prompts::JUDGE_VISUAL_QUALITY,
        &[("descr", description)],
        gen_images,
        "judge_aesthetic",
        model_id,
        gateway,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gateway::Mode;

    fn offline_gateway() -> ModelGateway {
        ModelGateway::new(Mode::Live, None, None)
    }

    #[test]
    fn aesthetic_judge_requires_renders() {
        let gw = offline_gateway();
        let err = judge_aesthetic_similarity(&[], &[PathBuf::from("t.png")], "m", &gw).unwrap_err();
        assert!(matches!(err, EvalError::MissingRender));
        let err = judge_aesthetic_similarity(&[PathBuf::from("g.png")], &[], "m", &gw).unwrap_err();
        assert!(matches!(err, EvalError::MissingRender));
    }

    #[test]
    fn content_judge_requires_paper_text() {
        let gw = offline_gateway();
        let err = judge_content_quality("   ", &[], "m", &gw).unwrap_err();
        assert!(matches!(err, EvalError::MissingInput(_)));
    }
}
