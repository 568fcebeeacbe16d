//! The six-metric evaluation protocol: computed coverage/flow metrics, four
//! rubric judges, 0-100 normalization, and the Overall mean.

pub mod judges;
pub mod metrics;
pub mod ratings;
pub mod subtopics;

pub use subtopics::{extract_subtopics, SubtopicSequence};

use crate::gateway::GatewayError;

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("score {score} outside [1,5]")]
    OutOfRange { score: f64 },
    #[error("expected {expected} scores, got {got}")]
    WrongArity { expected: usize, got: usize },
    #[error("series lengths unusable: {xs} vs {ys} (need equal, >= 2)")]
    ArityMismatch { xs: usize, ys: usize },
    #[error("zero variance in at least one series")]
    ZeroVariance,
    #[error("no rendered slide images supplied")]
    MissingRender,
    #[error("deck has no slides")]
    EmptyDeck,
    #[error("missing input: {0}")]
    MissingInput(String),
    #[error("ratings file invalid: {0}")]
    BadRatings(String),
    #[error(transparent)]
    Gateway(#[from] GatewayError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricName {
    Coverage,
    Flow,
    ContentStructure,
    AestheticPref,
    Content,
    Aesthetic,
}

impl MetricName {
    pub const ALL: [MetricName; 6] = [
        MetricName::Coverage,
        MetricName::Flow,
        MetricName::ContentStructure,
        MetricName::AestheticPref,
        MetricName::Content,
        MetricName::Aesthetic,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            MetricName::Coverage => "coverage",
            MetricName::Flow => "flow",
            MetricName::ContentStructure => "content_structure",
            MetricName::AestheticPref => "aesthetic_pref",
            MetricName::Content => "content",
            MetricName::Aesthetic => "aesthetic",
        }
    }
}

/// One metric outcome: the raw value in its native range, the 0-100
/// normalized value, and the judge rationale (empty for computed metrics).
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct MetricScore {
    pub metric_name: MetricName,
    pub raw: f64,
    pub normalized: f64,
    pub reason: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl MetricScore {
    pub fn computed(metric_name: MetricName, raw: f64, normalized: f64) -> Self {
        Self { metric_name, raw, normalized, reason: String::new(), warnings: Vec::new() }
    }
}

#[derive(Clone, Debug, Default, serde::Serialize, serde::Deserialize)]
pub struct Provenance {
    pub model_id: String,
    pub transcript_digests: Vec<String>,
}

#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct EvalReport {
    pub scores: Vec<MetricScore>,
    pub overall: f64,
    pub provenance: Provenance,
}

impl EvalReport {
    /// Assemble a report from exactly six scores; the overall is their mean.
    pub fn assemble(scores: Vec<MetricScore>, provenance: Provenance) -> Result<Self, EvalError> {
        let normalized: Vec<f64> = scores.iter().map(|s| s.normalized).collect();
        let overall = metrics::overall(&normalized)?;
        Ok(Self { scores, overall, provenance })
    }

    pub fn score(&self, name: MetricName) -> Option<&MetricScore> {
        self.scores.iter().find(|s| s.metric_name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_overall_is_mean_of_six() {
        let scores: Vec<MetricScore> = MetricName::ALL
            .iter()
            .zip([74.47, 66.65, 72.80, 98.00, 67.64, 75.24])
            .map(|(m, v)| MetricScore::computed(*m, v / 20.0, v))
            .collect();
        let report = EvalReport::assemble(scores, Provenance::default()).unwrap();
        assert!((report.overall - 75.80).abs() < 1e-9);
    }

    #[test]
    fn report_requires_six_scores() {
        let scores = vec![MetricScore::computed(MetricName::Coverage, 1.0, 100.0)];
        assert!(EvalReport::assemble(scores, Provenance::default()).is_err());
    }
}
