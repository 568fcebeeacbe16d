//! Benchmark harness: manifests, seeded job sampling, end-to-end pipeline
//! orchestration with ablation flags, persistence, and report tables.

pub mod cli;
pub mod config;
pub mod manifest;
pub mod pipeline;
pub mod report;

pub use config::Config;
pub use manifest::{load_manifest, sample_jobs, JobSpec, Manifest, SamplePair};
pub use pipeline::{run_pipeline, run_pipeline_with_backend, RunRecord};
pub use report::{aggregate_report, ReportTable};

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("manifest entry does not exist: {}", .0.display())]
    MissingPath(PathBuf),
    #[error("manifest list {0} is empty")]
    EmptyList(&'static str),
    #[error("manifest unreadable: {0}")]
    BadManifest(String),
    #[error("requested {requested} jobs but the manifest has {available} papers")]
    NotEnoughPapers { requested: usize, available: usize },
    #[error("no evaluated records to aggregate")]
    NoEvaluatedRecords,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
