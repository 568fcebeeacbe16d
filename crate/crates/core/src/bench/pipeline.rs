//! End-to-end job execution: distill, reorganize, outline, select, map,
//! realize, and optionally evaluate — persisting every intermediate artifact
//! under the job directory.
//!
//! Artifact JSON references paths relative to the job directory, so two
//! replay runs of the same job produce byte-identical artifacts (the run
//! record itself carries wall-clock timings and is the one exception).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::deck::{parse_deck, render_slides, serialize_deck, DeckModel};
use crate::eval::judges::{
    judge_aesthetic_similarity, judge_content_quality, judge_content_structure,
    judge_visual_quality,
};
use crate::eval::metrics::{coverage_iou, ngld};
use crate::eval::subtopics::{extract_subtopics, SubtopicSequence};
use crate::eval::{EvalReport, MetricName, MetricScore, Provenance};
use crate::gateway::{ChatBackend, HttpBackend, Mode, ModelGateway, TranscriptStore};
use crate::ingest::{extract_pdf, load_bundle, PaperBundle};
use crate::planner::{generate_outline, reorganize_paper, select_layouts};
use crate::prefs::{
    distill_aesthetic_profile, distill_content_preferences, merge_profiles,
};
use crate::realizer::{export_narration, map_content_to_elements, realize_deck, ElementMapping};

use super::config::Config;
use super::manifest::JobSpec;

#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub millis: u128,
}

/// Everything a single job produced. Either the full artifact set is present
/// or `failure` explains what went wrong; the harness never panics on a
/// job's failure.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct RunRecord {
    pub job: JobSpec,
    /// Artifact name -> path relative to the job directory.
    pub artifacts: BTreeMap<String, PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eval: Option<EvalReport>,
    pub timings: Vec<StageTiming>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

struct Ctx<'a> {
    job: &'a JobSpec,
    config: &'a Config,
    job_dir: &'a Path,
    gateway: ModelGateway,
    artifacts: BTreeMap<String, PathBuf>,
    timings: Vec<StageTiming>,
    digests: Vec<String>,
    request_seq: usize,
}

impl Ctx<'_> {
    fn write_artifact(&mut self, name: &str, rel: &str, bytes: &[u8]) -> Result<(), String> {
        let path = self.job_dir.join(rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| e.to_string())?;
        }
        std::fs::write(&path, bytes).map_err(|e| e.to_string())?;
        self.artifacts.insert(name.to_string(), PathBuf::from(rel));
        Ok(())
    }

    fn write_json(&mut self, name: &str, rel: &str, value: &serde_json::Value) -> Result<(), String> {
        let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| e.to_string())?;
        bytes.push(b'\n');
        self.write_artifact(name, rel, &bytes)
    }

    /// Persist the raw request/response pairs made since the last snapshot.
    fn snapshot_requests(&mut self) -> Result<(), String> {
        let calls = self.gateway.drain_calls();
        if calls.is_empty() {
            return Ok(());
        }
        let dir = self.job_dir.join("requests");
        std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
        for call in calls {
            let rel = format!("requests/{:03}_{}.json", self.request_seq, call.purpose_tag);
            self.request_seq += 1;
            self.digests.push(call.digest.clone());
            let value = serde_json::to_value(&call).map_err(|e| e.to_string())?;
            let mut bytes = serde_json::to_vec_pretty(&value).map_err(|e| e.to_string())?;
            bytes.push(b'\n');
            std::fs::write(self.job_dir.join(&rel), bytes).map_err(|e| e.to_string())?;
        }
        self.artifacts.insert("requests".into(), PathBuf::from("requests"));
        Ok(())
    }

    fn timed<T>(&mut self, stage: &str, f: impl FnOnce(&mut Self) -> Result<T, String>) -> Result<T, String> {
        let start = Instant::now();
        let result = f(self);
        self.timings.push(StageTiming {
            stage: stage.to_string(),
            millis: start.elapsed().as_millis(),
        });
        let out = result.map_err(|e| format!("{stage}: {e}"))?;
        self.snapshot_requests()?;
        Ok(out)
    }
}

/// Load a paper input that is either a bundle directory or a PDF handled by
/// the configured extractor.
fn load_paper_input(path: &Path, config: &Config, scratch: &Path) -> Result<PaperBundle, String> {
    if path.is_dir() {
        return load_bundle(path).map_err(|e| e.to_string());
    }
    if path.extension().and_then(|e| e.to_str()) == Some("pdf") {
        return extract_pdf(path, config.extractor.as_deref(), scratch).map_err(|e| e.to_string());
    }
    Err(format!("{} is neither a bundle directory nor a .pdf", path.display()))
}

/// Run one job with the transport built from the environment.
pub fn run_pipeline(job: &JobSpec, config: &Config, job_dir: &Path, evaluate: bool) -> RunRecord {
    let backend: Option<Box<dyn ChatBackend>> = match job.mode {
        Mode::Replay => None,
        _ => match HttpBackend::from_env() {
            Ok(b) => Some(Box::new(b)),
            Err(_) => config.endpoint.as_ref().map(|endpoint| {
                Box::new(HttpBackend::new(
                    endpoint.clone(),
                    std::env::var(crate::gateway::API_KEY_ENV).unwrap_or_default(),
                )) as Box<dyn ChatBackend>
            }),
        },
    };
    run_pipeline_with_backend(job, config, job_dir, evaluate, backend)
}

/// Evaluate an existing deck against its template and reference slides,
/// writing `eval_report.json` (and renders) under `out_dir`.
pub fn run_evaluation(
    config: &Config,
    out_dir: &Path,
    gateway: ModelGateway,
    deck_bytes: &[u8],
    template_bytes: &[u8],
    target: &PaperBundle,
    ref_slides: &PaperBundle,
) -> Result<EvalReport, String> {
    let deck = parse_deck(deck_bytes).map_err(|e| e.to_string())?;
    let template = parse_deck(template_bytes).map_err(|e| e.to_string())?;
    let job = JobSpec::single(
        PathBuf::from("-"),
        PathBuf::from("-"),
        PathBuf::from("-"),
        PathBuf::from("-"),
    );
    let mut ctx = Ctx {
        job: &job,
        config,
        job_dir: out_dir,
        gateway,
        artifacts: BTreeMap::new(),
        timings: Vec::new(),
        digests: Vec::new(),
        request_seq: 0,
    };
    std::fs::create_dir_all(out_dir).map_err(|e| e.to_string())?;
    let model_id = config.model_id.clone();
    let report = evaluate_deck(&mut ctx, &deck, &template, target, ref_slides, &model_id)?;
    ctx.snapshot_requests()?;
    Ok(report)
}

/// Run one job with an explicit transport (tests inject scripted backends).
pub fn run_pipeline_with_backend(
    job: &JobSpec,
    config: &Config,
    job_dir: &Path,
    evaluate: bool,
    backend: Option<Box<dyn ChatBackend>>,
) -> RunRecord {
    let store = job
        .transcripts
        .as_ref()
        .and_then(|dir| TranscriptStore::open(dir).ok());
    let gateway = ModelGateway::new(job.mode, store, backend);
    let mut ctx = Ctx {
        job,
        config,
        job_dir,
        gateway,
        artifacts: BTreeMap::new(),
        timings: Vec::new(),
        digests: Vec::new(),
        request_seq: 0,
    };
    let result = execute(&mut ctx, evaluate);
    let (eval, failure) = match result {
        Ok(eval) => (eval, None),
        Err(e) => (None, Some(e)),
    };
    let record = RunRecord {
        job: job.clone(),
        artifacts: ctx.artifacts,
        eval,
        timings: ctx.timings,
        failure,
    };
    let _ = std::fs::create_dir_all(job_dir);
    if let Ok(mut bytes) = serde_json::to_vec_pretty(&record) {
        bytes.push(b'\n');
        let _ = std::fs::write(job_dir.join("run_record.json"), bytes);
    }
    record
}

fn execute(ctx: &mut Ctx, evaluate: bool) -> Result<Option<EvalReport>, String> {
    std::fs::create_dir_all(ctx.job_dir).map_err(|e| e.to_string())?;
    let job_value = serde_json::to_value(ctx.job).map_err(|e| e.to_string())?;
    ctx.write_json("job", "job.json", &job_value)?;

    // Load inputs.
    let (target, ref_paper, ref_slides, template) = ctx.timed("load", |ctx| {
        let scratch = ctx.job_dir.join("extracted");
        let target = load_paper_input(&ctx.job.target_paper, ctx.config, &scratch.join("target"))?;
        let ref_paper = load_paper_input(&ctx.job.ref_paper, ctx.config, &scratch.join("ref_paper"))?;
        let ref_slides =
            load_paper_input(&ctx.job.ref_slides, ctx.config, &scratch.join("ref_slides"))?;
        let bytes = std::fs::read(&ctx.job.template).map_err(|e| e.to_string())?;
        let template = parse_deck(&bytes).map_err(|e| e.to_string())?;
        Ok((target, ref_paper, ref_slides, template))
    })?;

    let model_id = ctx.config.model_id.clone();

    // Preference distillation: the aesthetic branch always runs; the content
    // branch is skipped under the no-content-preference ablation.
    let profile = ctx.timed("distill", |ctx| {
        let content = if ctx.job.content_pref {
            let p = distill_content_preferences(&ref_paper, &ref_slides, &model_id, &ctx.gateway)
                .map_err(|e| e.to_string())?;
            ctx.write_json("content_pref", "content_pref.json", &p.to_guidelines_value())?;
            Some(p)
        } else {
            None
        };
        let aesthetic = distill_aesthetic_profile(&template, &model_id, &ctx.gateway)
            .map_err(|e| e.to_string())?;
        ctx.write_json("aesthetic_pref", "aesthetic_pref.json", &aesthetic.to_value())?;
        Ok(merge_profiles(content, aesthetic))
    })?;

    let doc = ctx.timed("reorganize", |ctx| {
        let doc = reorganize_paper(&target, profile.content.as_ref(), &model_id, &ctx.gateway)
            .map_err(|e| e.to_string())?;
        let v = serde_json::to_value(&doc).map_err(|e| e.to_string())?;
        ctx.write_json("reorganized", "reorganized.json", &v)?;
        Ok(doc)
    })?;

    let outline = ctx.timed("outline", |ctx| {
        let outline = generate_outline(
            &doc,
            profile.content.as_ref(),
            &target.assets,
            ctx.job.num_slides,
            ctx.job.chain_of_speech,
            &model_id,
            &ctx.gateway,
        )
        .map_err(|e| e.to_string())?;
        ctx.write_json("outline", "outline.json", &outline.to_value())?;
        Ok(outline)
    })?;

    let selected = ctx.timed("select", |ctx| {
        let selected = select_layouts(&outline, &profile.aesthetic, &model_id, &ctx.gateway)
            .map_err(|e| e.to_string())?;
        ctx.write_json("outline_selected", "outline_selected.json", &selected.to_value())?;
        Ok(selected)
    })?;

    let mappings = ctx.timed("map", |ctx| {
        let mut mappings: Vec<ElementMapping> = Vec::new();
        for entry in &selected.entries {
            let k = entry
                .layout_index()
                .ok_or_else(|| format!("entry {} has no layout", entry.key()))?;
            let mapping = map_content_to_elements(
                entry,
                &template.slides[k],
                k,
                &profile.aesthetic.slide_themes[k],
                &target,
                &model_id,
                &ctx.gateway,
            )
            .map_err(|e| e.to_string())?;
            mappings.push(mapping);
        }
        let v = serde_json::to_value(&mappings).map_err(|e| e.to_string())?;
        ctx.write_json("mappings", "mappings.json", &v)?;
        Ok(mappings)
    })?;

    let deck = ctx.timed("realize", |ctx| {
        let embed_notes = ctx.job.chain_of_speech;
        let (deck, mut report) =
            realize_deck(&template, &selected, &mappings, &target, embed_notes)
                .map_err(|e| e.to_string())?;
        report.output_path = Some(PathBuf::from("deck.pptx"));
        let bytes = serialize_deck(&deck).map_err(|e| e.to_string())?;
        ctx.write_artifact("deck", "deck.pptx", &bytes)?;
        let v = serde_json::to_value(&report).map_err(|e| e.to_string())?;
        ctx.write_json("realize_report", "realize_report.json", &v)?;
        Ok(deck)
    })?;

    if ctx.job.chain_of_speech {
        ctx.timed("narration", |ctx| {
            export_narration(&selected, &ctx.job_dir.join("narration.json"))
                .map_err(|e| e.to_string())?;
            ctx.artifacts.insert("narration".into(), PathBuf::from("narration.json"));
            ctx.artifacts.insert("narration_txt".into(), PathBuf::from("narration.txt"));
            Ok(())
        })?;
    }

    if !evaluate {
        return Ok(None);
    }
    let report = ctx.timed("evaluate", |ctx| {
        evaluate_deck(ctx, &deck, &template, &target, &ref_slides, &model_id)
    })?;
    Ok(Some(report))
}

/// Per-slide text projections for subtopic extraction: generated decks come
/// from the shape text, reference slides from the bundle's sections.
fn slide_texts_of_deck(deck: &DeckModel) -> Vec<String> {
    deck.slides.iter().map(|s| s.all_text()).collect()
}

fn slide_texts_of_bundle(bundle: &PaperBundle) -> Vec<String> {
    bundle
        .body_text
        .iter()
        .map(|s| {
            if s.heading.is_empty() {
                s.text.clone()
            } else {
                format!("{}\n{}", s.heading, s.text)
            }
        })
        .collect()
}

/// Subtopic sequence plus one-line per-slide summaries; the textual form the
/// structure judge consumes.
fn structure_projection(seq: &SubtopicSequence, texts: &[String]) -> String {
    let mut out = String::new();
    for (i, label) in seq.labels.iter().enumerate() {
        let summary: String = texts
            .get(i)
            .map(|t| t.split_whitespace().collect::<Vec<_>>().join(" "))
            .unwrap_or_default()
            .chars()
            .take(120)
            .collect();
        out.push_str(&format!("Slide {} [{}]: {}\n", i + 1, label, summary));
    }
    out
}

fn evaluate_deck(
    ctx: &mut Ctx,
    deck: &DeckModel,
    template: &DeckModel,
    target: &PaperBundle,
    ref_slides: &PaperBundle,
    model_id: &str,
) -> Result<EvalReport, String> {
    let gen_texts = slide_texts_of_deck(deck);
    let ref_texts = slide_texts_of_bundle(ref_slides);
    let gen_seq =
        extract_subtopics(&gen_texts, model_id, &ctx.gateway).map_err(|e| e.to_string())?;
    let ref_seq =
        extract_subtopics(&ref_texts, model_id, &ctx.gateway).map_err(|e| e.to_string())?;

    let iou = coverage_iou(&gen_seq.label_set(), &ref_seq.label_set());
    let coverage = MetricScore::computed(MetricName::Coverage, iou, iou * 100.0);
    let flow_raw = 1.0 - ngld(&gen_seq.labels, &ref_seq.labels);
    let flow = MetricScore::computed(MetricName::Flow, flow_raw, flow_raw * 100.0);

    let content_structure = judge_content_structure(
        &structure_projection(&ref_seq, &ref_texts),
        &structure_projection(&gen_seq, &gen_texts),
        model_id,
        &ctx.gateway,
    )
    .map_err(|e| e.to_string())?;

    let deck_bytes = serialize_deck(deck).map_err(|e| e.to_string())?;
    let template_bytes = serialize_deck(template).map_err(|e| e.to_string())?;
    let gen_images = render_slides(
        &deck_bytes,
        ctx.config.gen_render_source().as_ref(),
        &ctx.job_dir.join("renders/gen"),
    )
    .map_err(|e| e.to_string())?;
    let template_images = render_slides(
        &template_bytes,
        ctx.config.template_render_source().as_ref(),
        &ctx.job_dir.join("renders/template"),
    )
    .map_err(|e| e.to_string())?;

    let aesthetic_pref =
        judge_aesthetic_similarity(&gen_images, &template_images, model_id, &ctx.gateway)
            .map_err(|e| e.to_string())?;
    let content = judge_content_quality(&target.full_text(), &gen_images, model_id, &ctx.gateway)
        .map_err(|e| e.to_string())?;
    let descr = format!("{} pages of slide images are attached.", gen_images.len());
    let aesthetic = judge_visual_quality(&descr, &gen_images, model_id, &ctx.gateway)
        .map_err(|e| e.to_string())?;

    // Snapshot first so the judge digests join the provenance list.
    ctx.snapshot_requests()?;
    let report = EvalReport::assemble(
        vec![coverage, flow, content_structure, aesthetic_pref, content, aesthetic],
        Provenance {
            model_id: model_id.to_string(),
            transcript_digests: ctx.digests.clone(),
        },
    )
    .map_err(|e| e.to_string())?;
    let v = serde_json::to_value(&report).map_err(|e| e.to_string())?;
    ctx.write_json("eval_report", "eval_report.json", &v)?;
    Ok(report)
}
