//! Human-ratings CSV ingestion for the human-agreement analysis.
//!
//! Format: `case_id,rater_id,metric,score` with a header row. The rater id
//! `mllm` marks the automatic score; all other raters are human. Pearson
//! pairs are built per (case, metric): mean human score against the model
//! score.

use std::collections::BTreeMap;

use super::metrics::pearson;
use super::EvalError;

pub const MODEL_RATER_ID: &str = "mllm";

/// Parse the CSV into aligned (human-mean, model) series.
pub fn human_model_pairs(csv_text: &str) -> Result<(Vec<f64>, Vec<f64>), EvalError> {
    let mut lines = csv_text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| EvalError::BadRatings("empty file".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols != ["case_id", "rater_id", "metric", "score"] {
        return Err(EvalError::BadRatings(format!("unexpected header: {header}")));
    }
    // (case, metric) -> (human scores, model score)
    let mut groups: BTreeMap<(String, String), (Vec<f64>, Option<f64>)> = BTreeMap::new();
    for (lineno, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(EvalError::BadRatings(format!("line {}: expected 4 fields", lineno + 2)));
        }
        let score: f64 = fields[3]
            .parse()
            .map_err(|_| EvalError::BadRatings(format!("line {}: bad score", lineno + 2)))?;
        let key = (fields[0].to_string(), fields[2].to_string());
        let entry = groups.entry(key).or_default();
        if fields[1] == MODEL_RATER_ID {
            entry.1 = Some(score);
        } else {
            entry.0.push(score);
        }
    }
    let mut humans = Vec::new();
    let mut models = Vec::new();
    for (_, (human_scores, model)) in groups {
        if let (false, Some(model)) = (human_scores.is_empty(), model) {
            humans.push(human_scores.iter().sum::<f64>() / human_scores.len() as f64);
            models.push(model);
        }
    }
    Ok((humans, models))
}

/// Pearson correlation between mean human ratings and model ratings.
pub fn human_model_correlation(csv_text: &str) -> Result<f64, EvalError> {
    let (humans, models) = human_model_pairs(csv_text)?;
    pearson(&humans, &models)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_group_by_case_and_metric() {
        let csv = "case_id,rater_id,metric,score\n\
                   c1,human_1,content,3\n\
                   c1,human_2,content,5\n\
                   c1,mllm,content,4\n\
                   c2,human_1,content,2\n\
                   c2,mllm,content,2\n\
                   c3,human_1,content,1\n"; // no model score -> dropped
        let (h, m) = human_model_pairs(csv).unwrap();
        assert_eq!(h, vec![4.0, 2.0]);
        assert_eq!(m, vec![4.0, 2.0]);
    }

    #[test]
    fn bad_header_is_rejected() {
        assert!(matches!(
            human_model_pairs("a,b,c\n"),
            Err(EvalError::BadRatings(_))
        ));
    }
}
