//! Benchmark manifests and seeded job sampling.
//!
//! Sampling is reproducible across platforms: a ChaCha8 generator seeded with
//! the 64-bit job seed drives a partial Fisher-Yates shuffle over the paper
//! list, then one uniform pair draw and one uniform template draw per
//! selected paper, in that order.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gateway::Mode;

use super::BenchError;

#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct SamplePair {
    pub ref_paper: PathBuf,
    pub ref_slides: PathBuf,
}

#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct Manifest {
    pub papers: Vec<PathBuf>,
    pub sample_pairs: Vec<SamplePair>,
    pub templates: Vec<PathBuf>,
}

impl Manifest {
    pub fn combination_count(&self) -> u64 {
        self.papers.len() as u64 * self.sample_pairs.len() as u64 * self.templates.len() as u64
    }
}

/// One unit of pipeline work.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct JobSpec {
    pub job_id: String,
    pub target_paper: PathBuf,
    pub ref_paper: PathBuf,
    pub ref_slides: PathBuf,
    pub template: PathBuf,
    pub num_slides: usize,
    pub content_pref: bool,
    pub chain_of_speech: bool,
    pub seed: u64,
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transcripts: Option<PathBuf>,
}

impl JobSpec {
    pub fn single(
        target_paper: PathBuf,
        ref_paper: PathBuf,
        ref_slides: PathBuf,
        template: PathBuf,
    ) -> Self {
        Self {
            job_id: "job".to_string(),
            target_paper,
            ref_paper,
            ref_slides,
            template,
            num_slides: 10,
            content_pref: true,
            chain_of_speech: true,
            seed: 0,
            mode: Mode::Replay,
            transcripts: None,
        }
    }
}

/// Load and validate a manifest file. Relative paths resolve against the
/// manifest's directory.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<Manifest, BenchError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| BenchError::BadManifest(e.to_string()))?;
    let mut manifest: Manifest =
        serde_json::from_slice(&bytes).map_err(|e| BenchError::BadManifest(e.to_string()))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let resolve = |p: &PathBuf| if p.is_absolute() { p.clone() } else { base.join(p) };
    for p in &mut manifest.papers {
        *p = resolve(p);
    }
    for pair in &mut manifest.sample_pairs {
        pair.ref_paper = resolve(&pair.ref_paper);
        pair.ref_slides = resolve(&pair.ref_slides);
    }
    for t in &mut manifest.templates {
        *t = resolve(t);
    }

    if manifest.papers.is_empty() {
        return Err(BenchError::EmptyList("papers"));
    }
    if manifest.sample_pairs.is_empty() {
        return Err(BenchError::EmptyList("sample_pairs"));
    }
    if manifest.templates.is_empty() {
        return Err(BenchError::EmptyList("templates"));
    }
    for p in &manifest.papers {
        if !p.exists() {
            return Err(BenchError::MissingPath(p.clone()));
        }
    }
    for pair in &manifest.sample_pairs {
        for p in [&pair.ref_paper, &pair.ref_slides] {
            if !p.exists() {
                return Err(BenchError::MissingPath(p.clone()));
            }
        }
    }
    for t in &manifest.templates {
        if !t.exists() {
            return Err(BenchError::MissingPath(t.clone()));
        }
    }
    Ok(manifest)
}

/// Draw `n` jobs: `n` distinct target papers, each paired with one uniformly
/// drawn sample pair and template. Deterministic for fixed inputs and seed.
pub fn sample_jobs(manifest: &Manifest, n: usize, seed: u64) -> Result<Vec<JobSpec>, BenchError> {
    if n > manifest.papers.len() {
        return Err(BenchError::NotEnoughPapers {
            requested: n,
            available: manifest.papers.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut indices: Vec<usize> = (0..manifest.papers.len()).collect();
    for i in 0..n {
        let j = rng.random_range(i..indices.len());
        indices.swap(i, j);
    }
    let mut jobs = Vec::with_capacity(n);
    for (k, &paper_idx) in indices[..n].iter().enumerate() {
        let pair = &manifest.sample_pairs[rng.random_range(0..manifest.sample_pairs.len())];
        let template = &manifest.templates[rng.random_range(0..manifest.templates.len())];
        let stem = manifest.papers[paper_idx]
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| paper_idx.to_string());
        jobs.push(JobSpec {
            job_id: format!("job-{k:03}-{stem}"),
            target_paper: manifest.papers[paper_idx].clone(),
            ref_paper: pair.ref_paper.clone(),
            ref_slides: pair.ref_slides.clone(),
            template: template.clone(),
            num_slides: 10,
            content_pref: true,
            chain_of_speech: true,
            seed,
            mode: Mode::Replay,
            transcripts: None,
        });
    }
    Ok(jobs)
}
