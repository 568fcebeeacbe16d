//! Aggregate per-job evaluation reports into a per-metric mean table.

use crate::eval::MetricName;

use super::pipeline::RunRecord;
use super::BenchError;

const COLUMNS: [&str; 7] = [
    "Coverage",
    "Flow",
    "Content Structure",
    "Aesthetic (pref)",
    "Content",
    "Aesthetic",
    "Overall",
];

#[derive(Clone, Debug, serde::Serialize)]
pub struct ReportTable {
    /// Mean normalized score per metric, in report order, plus Overall.
    pub means: [f64; 7],
    pub evaluated: usize,
    pub excluded: usize,
}

/// Mean each metric across the evaluated records; failed or unevaluated
/// records are excluded and counted.
pub fn aggregate_report(records: &[RunRecord]) -> Result<ReportTable, BenchError> {
    let evaluated: Vec<&RunRecord> = records
        .iter()
        .filter(|r| r.failure.is_none() && r.eval.is_some())
        .collect();
    if evaluated.is_empty() {
        return Err(BenchError::NoEvaluatedRecords);
    }
    let mut sums = [0.0f64; 7];
    for record in &evaluated {
        let eval = record.eval.as_ref().expect("filtered");
        for (i, metric) in MetricName::ALL.iter().enumerate() {
            let score = eval
                .score(*metric)
                .map(|s| s.normalized)
                .unwrap_or(f64::NAN);
            sums[i] += score;
        }
        sums[6] += eval.overall;
    }
    let n = evaluated.len() as f64;
    let mut means = [0.0f64; 7];
    for i in 0..7 {
        means[i] = sums[i] / n;
    }
    Ok(ReportTable {
        means,
        evaluated: evaluated.len(),
        excluded: records.len() - evaluated.len(),
    })
}

impl ReportTable {
    /// The Overall column recomputed from this table's own six metric means.
    pub fn overall_of_means(&self) -> f64 {
        self.means[..6].iter().sum::<f64>() / 6.0
    }

    pub fn to_csv(&self) -> String {
        let header = COLUMNS.join(",");
        let row = self
            .means
            .iter()
            .map(|v| format!("{v:.2}"))
            .collect::<Vec<_>>()
            .join(",");
        format!("{header}\n{row}\n")
    }

    pub fn to_text(&self) -> String {
        let mut widths = Vec::new();
        let cells: Vec<String> = self.means.iter().map(|v| format!("{v:.2}")).collect();
        for (name, cell) in COLUMNS.iter().zip(&cells) {
            widths.push(name.len().max(cell.len()));
        }
        let mut header = String::new();
        let mut row = String::new();
        for ((name, cell), w) in COLUMNS.iter().zip(&cells).zip(&widths) {
            header.push_str(&format!("{name:>w$}  ", w = w));
            row.push_str(&format!("{cell:>w$}  ", w = w));
        }
        format!(
            "{}\n{}\n({} evaluated, {} excluded)\n",
            header.trim_end(),
            row.trim_end(),
            self.evaluated,
            self.excluded
        )
    }
}
