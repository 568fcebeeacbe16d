//! Subtopic extraction: one generic structural label per slide, shared by
//! the Coverage and Flow metrics so the two can never disagree on labels.

use std::collections::BTreeSet;

use crate::gateway::{ChatRequest, ModelGateway, DEFAULT_MAX_REPAIRS};
use crate::prompts;

use super::metrics::canonical_label;
use super::EvalError;

/// Ordered canonical subtopic labels, one per slide.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SubtopicSequence {
    pub labels: Vec<String>,
}

impl SubtopicSequence {
    pub fn from_raw<I: IntoIterator<Item = S>, S: AsRef<str>>(raw: I) -> Self {
        Self {
            labels: raw.into_iter().map(|s| canonical_label(s.as_ref())).collect(),
        }
    }

    pub fn label_set(&self) -> BTreeSet<String> {
        self.labels.iter().cloned().collect()
    }
}

/// Extract one structural topic per slide from per-slide text projections.
pub fn extract_subtopics(
    slide_texts: &[String],
    model_id: &str,
    gateway: &ModelGateway,
) -> Result<SubtopicSequence, EvalError> {
    if slide_texts.is_empty() {
        return Err(EvalError::EmptyDeck);
    }
    let mut listing = String::new();
    for (i, text) in slide_texts.iter().enumerate() {
        listing.push_str(&format!("[Slide {}]\n{}\n\n", i + 1, text));
    }
    let prompt = prompts::render(prompts::EXTRACT_SUBTOPICS, &[("slides", listing.trim_end())]);
    let request = ChatRequest::simple(model_id, "extract_subtopics", prompt);
    let expected = slide_texts.len();
    let value = gateway.complete_structured_with(
        &request,
        "subtopics",
        DEFAULT_MAX_REPAIRS,
        |v| {
            let n = v["subtopics"].as_array().map(Vec::len).unwrap_or(0);
            if n == expected {
                Ok(())
            } else {
                Err(format!("expected exactly {expected} labels (one per slide), got {n}"))
            }
        },
    )?;
    let raw: Vec<String> = value["subtopics"]
        .as_array()
        .map(|a| {
            a.iter()
                .filter_map(|v| v.as_str().map(String::from))
                .collect()
        })
        .unwrap_or_default();
    Ok(SubtopicSequence::from_raw(raw))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gateway::Mode;

    #[test]
    fn labels_are_canonicalized() {
        let seq = SubtopicSequence::from_raw(["  Motivation ", "motivation", "Future  Work"]);
        assert_eq!(seq.labels, vec!["motivation", "motivation", "future work"]);
        assert_eq!(seq.label_set().len(), 2);
    }

    #[test]
    fn empty_deck_is_an_error() {
        let gw = ModelGateway::new(Mode::Live, None, None);
        let err = extract_subtopics(&[], "m", &gw).unwrap_err();
        assert!(matches!(err, EvalError::EmptyDeck));
    }
}
