//! Command-line interface: `distill`, `plan`, `realize`, `generate`,
//! `evaluate`, `bench`, and `report` subcommands.
//!
//! Exit codes: 0 success, 1 job failure, 2 usage error.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Parser, Subcommand, ValueEnum};

use crate::deck::parse_deck;
use crate::gateway::{ChatBackend, HttpBackend, Mode, ModelGateway, TranscriptStore};
use crate::ingest::load_bundle;
use crate::planner::{generate_outline, reorganize_paper, select_layouts, SlideOutline};
use crate::prefs::{
    distill_aesthetic_profile, distill_content_preferences, AestheticProfile,
    ContentPreferenceProfile,
};
use crate::realizer::{export_narration, map_content_to_elements, realize_deck};

use super::config::Config;
use super::manifest::{load_manifest, sample_jobs, JobSpec};
use super::pipeline::{run_evaluation, run_pipeline, RunRecord};
use super::report::aggregate_report;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CliMode {
    Live,
    Record,
    Replay,
}

impl From<CliMode> for Mode {
    fn from(m: CliMode) -> Mode {
        match m {
            CliMode::Live => Mode::Live,
            CliMode::Record => Mode::Record,
            CliMode::Replay => Mode::Replay,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "deckgen", version, about = "Preference-guided paper-to-slides generation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Number of slides to generate.
    #[arg(long, global = true, default_value_t = 10)]
    num_slides: usize,
    /// Disable content-preference guidance (ablation).
    #[arg(long, global = true)]
    no_content_pref: bool,
    /// Disable the chain-of-speech mechanism (ablation).
    #[arg(long, global = true)]
    no_chain_of_speech: bool,
    /// Backend mode.
    #[arg(long, global = true, value_enum, default_value_t = CliMode::Live)]
    mode: CliMode,
    /// Transcript store directory (required for record/replay).
    #[arg(long, global = true)]
    transcripts: Option<PathBuf>,
    /// Seed for job sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Key-value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Distill content and aesthetic preference profiles.
    Distill {
        #[arg(long)]
        ref_paper: PathBuf,
        #[arg(long)]
        ref_slides: PathBuf,
        #[arg(long)]
        template: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Plan a deck: reorganize, outline, and select layouts.
    Plan {
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        content_pref: Option<PathBuf>,
        #[arg(long)]
        aesthetic_pref: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Realize a selected outline into a .pptx deck.
    Realize {
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        template: PathBuf,
        #[arg(long)]
        outline: PathBuf,
        #[arg(long)]
        aesthetic_pref: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// End-to-end single job: distill, plan, realize (optionally evaluate).
    Generate {
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        ref_paper: PathBuf,
        #[arg(long)]
        ref_slides: PathBuf,
        #[arg(long)]
        template: PathBuf,
        #[arg(long, default_value = "run")]
        out: PathBuf,
        #[arg(long)]
        evaluate: bool,
    },
    /// Evaluate an existing deck with the six-metric protocol.
    Evaluate {
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        ref_slides: PathBuf,
        #[arg(long)]
        deck: PathBuf,
        #[arg(long)]
        template: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run sampled jobs from a manifest.
    Bench {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "bench_out")]
        out: PathBuf,
        #[arg(long)]
        evaluate: bool,
    },
    /// Aggregate run records into a report table.
    Report {
        /// Directory containing job subdirectories with run_record.json.
        #[arg(long)]
        runs: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Entry point used by the binary and by tests. Returns the exit code.
pub fn cli<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let config = match &cli.config {
        Some(path) => match Config::load(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("config error: {e}");
                return 2;
            }
        },
        None => Config::default(),
    };
    match run_command(&cli, &config) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn build_gateway(cli: &Cli, config: &Config) -> Result<ModelGateway, String> {
    let mode: Mode = cli.mode.into();
    let store = match (&cli.transcripts, mode) {
        (Some(dir), _) => Some(TranscriptStore::open(dir).map_err(|e| e.to_string())?),
        (None, Mode::Replay) => return Err("replay mode requires --transcripts DIR".into()),
        (None, Mode::Record) => return Err("record mode requires --transcripts DIR".into()),
        (None, Mode::Live) => None,
    };
    let backend: Option<Box<dyn ChatBackend>> = match mode {
        Mode::Replay => None,
        _ => match HttpBackend::from_env() {
            Ok(b) => Some(Box::new(b)),
            Err(e) => match &config.endpoint {
                Some(endpoint) => Some(Box::new(HttpBackend::new(
                    endpoint.clone(),
                    std::env::var(crate::gateway::API_KEY_ENV).map_err(|_| e.to_string())?,
                ))),
                None => return Err(e.to_string()),
            },
        },
    };
    Ok(ModelGateway::new(mode, store, backend))
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), String> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| e.to_string())?;
    }
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| e.to_string())?;
    bytes.push(b'\n');
    std::fs::write(path, bytes).map_err(|e| e.to_string())
}

fn read_json(path: &Path) -> Result<serde_json::Value, String> {
    let bytes = std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_slice(&bytes).map_err(|e| format!("{}: {e}", path.display()))
}

fn run_command(cli: &Cli, config: &Config) -> Result<(), String> {
    match &cli.command {
        Command::Distill { ref_paper, ref_slides, template, out } => {
            let gateway = build_gateway(cli, config)?;
            let rp = load_bundle(ref_paper).map_err(|e| e.to_string())?;
            let rs = load_bundle(ref_slides).map_err(|e| e.to_string())?;
            let bytes = std::fs::read(template).map_err(|e| e.to_string())?;
            let deck = parse_deck(&bytes).map_err(|e| e.to_string())?;
            if !cli.no_content_pref {
                let content = distill_content_preferences(&rp, &rs, &config.model_id, &gateway)
                    .map_err(|e| e.to_string())?;
                write_json(&out.join("content_pref.json"), &content.to_guidelines_value())?;
            }
            let aesthetic = distill_aesthetic_profile(&deck, &config.model_id, &gateway)
                .map_err(|e| e.to_string())?;
            write_json(&out.join("aesthetic_pref.json"), &aesthetic.to_value())?;
            println!("profiles written to {}", out.display());
            Ok(())
        }
        Command::Plan { target, content_pref, aesthetic_pref, out } => {
            let gateway = build_gateway(cli, config)?;
            let bundle = load_bundle(target).map_err(|e| e.to_string())?;
            let content = match (cli.no_content_pref, content_pref) {
                (true, _) | (false, None) => None,
                (false, Some(path)) => Some(
                    ContentPreferenceProfile::from_guidelines_value(&read_json(path)?)
                        .map_err(|e| e.to_string())?,
                ),
            };
            let aesthetic = AestheticProfile::from_value(&read_json(aesthetic_pref)?)
                .map_err(|e| e.to_string())?;
            let doc = reorganize_paper(&bundle, content.as_ref(), &config.model_id, &gateway)
                .map_err(|e| e.to_string())?;
            write_json(
                &out.join("reorganized.json"),
                &serde_json::to_value(&doc).map_err(|e| e.to_string())?,
            )?;
            let outline = generate_outline(
                &doc,
                content.as_ref(),
                &bundle.assets,
                cli.num_slides,
                !cli.no_chain_of_speech,
                &config.model_id,
                &gateway,
            )
            .map_err(|e| e.to_string())?;
            write_json(&out.join("outline.json"), &outline.to_value())?;
            let selected = select_layouts(&outline, &aesthetic, &config.model_id, &gateway)
                .map_err(|e| e.to_string())?;
            write_json(&out.join("outline_selected.json"), &selected.to_value())?;
            println!("plan written to {}", out.display());
            Ok(())
        }
        Command::Realize { target, template, outline, aesthetic_pref, out } => {
            let gateway = build_gateway(cli, config)?;
            let bundle = load_bundle(target).map_err(|e| e.to_string())?;
            let deck_bytes = std::fs::read(template).map_err(|e| e.to_string())?;
            let deck = parse_deck(&deck_bytes).map_err(|e| e.to_string())?;
            let selected = SlideOutline::from_value(&read_json(outline)?)
                .map_err(|d| crate::gateway::Diagnostic::join(&d))?;
            let aesthetic = AestheticProfile::from_value(&read_json(aesthetic_pref)?)
                .map_err(|e| e.to_string())?;
            let mut mappings = Vec::new();
            for entry in &selected.entries {
                let k = entry
                    .layout_index()
                    .ok_or_else(|| format!("entry {} has no layout", entry.key()))?;
                mappings.push(
                    map_content_to_elements(
                        entry,
                        &deck.slides[k],
                        k,
                        &aesthetic.slide_themes[k],
                        &bundle,
                        &config.model_id,
                        &gateway,
                    )
                    .map_err(|e| e.to_string())?,
                );
            }
            let (realized, mut report) = realize_deck(
                &deck,
                &selected,
                &mappings,
                &bundle,
                !cli.no_chain_of_speech,
            )
            .map_err(|e| e.to_string())?;
            report.output_path = Some(PathBuf::from("deck.pptx"));
            std::fs::create_dir_all(out).map_err(|e| e.to_string())?;
            let bytes = crate::deck::serialize_deck(&realized).map_err(|e| e.to_string())?;
            std::fs::write(out.join("deck.pptx"), bytes).map_err(|e| e.to_string())?;
            write_json(
                &out.join("realize_report.json"),
                &serde_json::to_value(&report).map_err(|e| e.to_string())?,
            )?;
            if !cli.no_chain_of_speech {
                export_narration(&selected, &out.join("narration.json"))
                    .map_err(|e| e.to_string())?;
            }
            println!("deck written to {}", out.join("deck.pptx").display());
            Ok(())
        }
        Command::Generate { target, ref_paper, ref_slides, template, out, evaluate } => {
            let job = JobSpec {
                job_id: "generate".to_string(),
                target_paper: target.clone(),
                ref_paper: ref_paper.clone(),
                ref_slides: ref_slides.clone(),
                template: template.clone(),
                num_slides: cli.num_slides,
                content_pref: !cli.no_content_pref,
                chain_of_speech: !cli.no_chain_of_speech,
                seed: cli.seed,
                mode: cli.mode.into(),
                transcripts: cli.transcripts.clone(),
            };
            if matches!(job.mode, Mode::Replay | Mode::Record) && job.transcripts.is_none() {
                return Err(format!("{:?} mode requires --transcripts DIR", job.mode));
            }
            let record = run_pipeline(&job, config, out, *evaluate);
            match record.failure {
                None => {
                    println!("run directory: {}", out.display());
                    Ok(())
                }
                Some(f) => Err(f),
            }
        }
        Command::Evaluate { target, ref_slides, deck, template, out } => {
            let gateway = build_gateway(cli, config)?;
            let bundle = load_bundle(target).map_err(|e| e.to_string())?;
            let rs = load_bundle(ref_slides).map_err(|e| e.to_string())?;
            let deck_bytes = std::fs::read(deck).map_err(|e| e.to_string())?;
            let template_bytes = std::fs::read(template).map_err(|e| e.to_string())?;
            let report =
                run_evaluation(config, out, gateway, &deck_bytes, &template_bytes, &bundle, &rs)?;
            println!("overall: {:.2}", report.overall);
            Ok(())
        }
        Command::Bench { manifest, n, out, evaluate } => {
            let manifest = load_manifest(manifest).map_err(|e| e.to_string())?;
            println!(
                "manifest: {} papers x {} pairs x {} templates = {} combinations",
                manifest.papers.len(),
                manifest.sample_pairs.len(),
                manifest.templates.len(),
                manifest.combination_count()
            );
            let mut jobs = sample_jobs(&manifest, *n, cli.seed).map_err(|e| e.to_string())?;
            for job in &mut jobs {
                job.num_slides = cli.num_slides;
                job.content_pref = !cli.no_content_pref;
                job.chain_of_speech = !cli.no_chain_of_speech;
                job.mode = cli.mode.into();
                job.transcripts = cli.transcripts.clone();
            }
            let records = run_jobs(&jobs, config, out, *evaluate);
            let failures = records.iter().filter(|r| r.failure.is_some()).count();
            if *evaluate {
                if let Ok(table) = aggregate_report(&records) {
                    std::fs::write(out.join("report.csv"), table.to_csv())
                        .map_err(|e| e.to_string())?;
                    std::fs::write(out.join("report.txt"), table.to_text())
                        .map_err(|e| e.to_string())?;
                    print!("{}", table.to_text());
                }
            }
            println!("{} jobs, {} failed", records.len(), failures);
            if failures > 0 {
                Err(format!("{failures} job(s) failed"))
            } else {
                Ok(())
            }
        }
        Command::Report { runs, out } => {
            let mut records = Vec::new();
            for entry in std::fs::read_dir(runs).map_err(|e| e.to_string())? {
                let path = entry.map_err(|e| e.to_string())?.path().join("run_record.json");
                if path.exists() {
                    let record: RunRecord = serde_json::from_value(read_json(&path)?)
                        .map_err(|e| e.to_string())?;
                    records.push(record);
                }
            }
            let table = aggregate_report(&records).map_err(|e| e.to_string())?;
            print!("{}", table.to_text());
            if let Some(path) = out {
                std::fs::write(path, table.to_csv()).map_err(|e| e.to_string())?;
            }
            Ok(())
        }
    }
}

/// Bounded worker pool over the job list; job order is preserved in the
/// returned records.
fn run_jobs(jobs: &[JobSpec], config: &Config, out_dir: &Path, evaluate: bool) -> Vec<RunRecord> {
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<(usize, RunRecord)>> = Mutex::new(Vec::new());
    let workers = config.workers.clamp(1, jobs.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= jobs.len() {
                    break;
                }
                let job = &jobs[i];
                let job_dir = out_dir.join(&job.job_id);
                let record = run_pipeline(job, config, &job_dir, evaluate);
                results.lock().unwrap().push((i, record));
            });
        }
    });
    let mut records = results.into_inner().unwrap();
    records.sort_by_key(|(i, _)| *i);
    records.into_iter().map(|(_, r)| r).collect()
}
