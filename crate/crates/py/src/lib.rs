//! Python bindings: deck parsing and editing, the computed evaluation
//! metrics, outline validation, and ratings correlation.

use std::collections::BTreeSet;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use deckgen::deck::{self, DeckModel, EditPlan};
use deckgen::eval::metrics;
use deckgen::eval::ratings;
use deckgen::planner::SlideOutline;

fn runtime_err<E: std::fmt::Display>(e: E) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn value_err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A parsed `.pptx` presentation.
#[pyclass]
struct Deck {
    inner: DeckModel,
}

#[pymethods]
impl Deck {
    /// Parse a deck from a file path.
    #[staticmethod]
    fn open(path: &str) -> PyResult<Self> {
        let bytes = std::fs::read(path).map_err(runtime_err)?;
        Ok(Self { inner: deck::parse_deck(&bytes).map_err(runtime_err)? })
    }

    #[getter]
    fn slide_count(&self) -> usize {
        self.inner.slide_count()
    }

    #[getter]
    fn slide_size_pt(&self) -> (f64, f64) {
        (self.inner.slide_width_pt(), self.inner.slide_height_pt())
    }

    /// Number of shapes on each slide.
    fn shape_counts(&self) -> Vec<usize> {
        self.inner.slides.iter().map(|s| s.shapes.len()).collect()
    }

    /// All text on one slide, one line per shape.
    fn slide_text(&self, index: usize) -> PyResult<String> {
        self.inner
            .slides
            .get(index)
            .map(|s| s.all_text())
            .ok_or_else(|| value_err(format!("slide {index} out of range")))
    }

    /// Speaker notes of one slide, if any.
    fn notes(&self, index: usize) -> PyResult<Option<String>> {
        self.inner
            .slides
            .get(index)
            .map(|s| s.notes_text.clone())
            .ok_or_else(|| value_err(format!("slide {index} out of range")))
    }

    /// The pptc metadata document as a JSON string.
    fn describe(&self) -> String {
        serde_json::to_string_pretty(&deck::describe_deck(&self.inner)).expect("metadata serializes")
    }

    /// Apply a declarative edit plan (JSON) against this deck as template,
    /// returning the new deck.
    fn apply_plan(&self, plan_json: &str) -> PyResult<Deck> {
        let plan: EditPlan = serde_json::from_str(plan_json).map_err(value_err)?;
        let out = deck::apply_edit_plan(&self.inner, &plan).map_err(runtime_err)?;
        Ok(Deck { inner: out })
    }

    fn set_notes(&mut self, index: usize, text: &str) -> PyResult<()> {
        deck::set_speaker_notes(&mut self.inner, index, text).map_err(value_err)
    }

    fn save(&self, path: &str) -> PyResult<()> {
        let bytes = deck::serialize_deck(&self.inner).map_err(runtime_err)?;
        std::fs::write(path, bytes).map_err(runtime_err)
    }
}

#[pyfunction]
fn levenshtein(a: Vec<String>, b: Vec<String>) -> usize {
    metrics::levenshtein(&a, &b)
}

#[pyfunction]
fn ngld(a: Vec<String>, b: Vec<String>) -> f64 {
    metrics::ngld(&a, &b)
}

#[pyfunction]
fn flow_score(generated: Vec<String>, reference: Vec<String>) -> f64 {
    metrics::flow_score(&generated, &reference)
}

/// IoU over canonicalized label sets.
#[pyfunction]
fn coverage_iou(a: Vec<String>, b: Vec<String>) -> f64 {
    let canon = |v: Vec<String>| -> BTreeSet<String> {
        v.iter().map(|s| metrics::canonical_label(s)).collect()
    };
    metrics::coverage_iou(&canon(a), &canon(b))
}

#[pyfunction]
fn canonical_label(raw: &str) -> String {
    metrics::canonical_label(raw)
}

#[pyfunction]
fn normalize_judge(score: f64) -> PyResult<f64> {
    metrics::normalize_judge(score).map_err(value_err)
}

#[pyfunction]
fn overall(scores: Vec<f64>) -> PyResult<f64> {
    metrics::overall(&scores).map_err(value_err)
}

#[pyfunction]
fn pearson(xs: Vec<f64>, ys: Vec<f64>) -> PyResult<f64> {
    metrics::pearson(&xs, &ys).map_err(value_err)
}

/// Pearson correlation between mean human and model scores in a ratings CSV.
#[pyfunction]
fn human_model_correlation(csv_text: &str) -> PyResult<f64> {
    ratings::human_model_correlation(csv_text).map_err(value_err)
}

/// Load a paper bundle and return a JSON summary (sections + assets).
#[pyfunction]
fn bundle_summary(path: &str) -> PyResult<String> {
    let bundle = deckgen::ingest::load_bundle(path).map_err(runtime_err)?;
    let value = serde_json::json!({
        "sections": bundle.body_text.iter().map(|s| &s.heading).collect::<Vec<_>>(),
        "assets": bundle.assets.iter().map(|a| &a.asset_id).collect::<Vec<_>>(),
    });
    Ok(value.to_string())
}

/// Validate an outline JSON document; returns diagnostic strings (empty when
/// valid).
#[pyfunction]
fn validate_outline(
    outline_json: &str,
    num_slides: usize,
    known_asset_ids: Vec<String>,
    template_slide_count: usize,
    selected: bool,
) -> PyResult<Vec<String>> {
    let value: serde_json::Value = serde_json::from_str(outline_json).map_err(value_err)?;
    let outline = match SlideOutline::from_value(&value) {
        Ok(o) => o,
        Err(diags) => {
            return Ok(diags.iter().map(|d| format!("{}: {}", d.code, d.message)).collect())
        }
    };
    let diags = deckgen::planner::validate_outline(
        &outline,
        num_slides,
        &known_asset_ids,
        template_slide_count,
        selected,
    );
    Ok(diags.iter().map(|d| format!("{} at {}: {}", d.code, d.path, d.message)).collect())
}

#[pymodule]
fn deckgen_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Deck>()?;
    m.add_function(wrap_pyfunction!(levenshtein, m)?)?;
    m.add_function(wrap_pyfunction!(ngld, m)?)?;
    m.add_function(wrap_pyfunction!(flow_score, m)?)?;
    m.add_function(wrap_pyfunction!(coverage_iou, m)?)?;
    m.add_function(wrap_pyfunction!(canonical_label, m)?)?;
    m.add_function(wrap_pyfunction!(normalize_judge, m)?)?;
    m.add_function(wrap_pyfunction!(overall, m)?)?;
    m.add_function(wrap_pyfunction!(pearson, m)?)?;
    m.add_function(wrap_pyfunction!(human_model_correlation, m)?)?;
    m.add_function(wrap_pyfunction!(bundle_summary, m)?)?;
    m.add_function(wrap_pyfunction!(validate_outline, m)?)?;
    Ok(())
}
