//! The staged CLI flow against one set of replay transcripts: distill, then
//! plan, then realize, then evaluate, then report. The staged commands issue
//! the same requests as the end-to-end pipeline, so one recording pass
//! covers all of them.

mod common;

use common::{fixture_path, record_transcripts, write_fixture_config};
use deckgen::bench::cli::cli;
use deckgen::deck::parse_deck;

#[test]
fn staged_flow_matches_the_pipeline() {
    let transcripts = tempfile::tempdir().unwrap();
    record_transcripts(transcripts.path(), true, true, true);
    let work = tempfile::tempdir().unwrap();
    let config = write_fixture_config(work.path());

    let base: Vec<String> = vec![
        "--mode".into(),
        "replay".into(),
        "--transcripts".into(),
        transcripts.path().display().to_string(),
        "--config".into(),
        config.display().to_string(),
    ];
    let run = |args: Vec<String>| {
        let mut argv: Vec<String> = vec!["deckgen".into()];
        argv.extend(args);
        argv.extend(base.clone());
        cli(argv)
    };

    let out = work.path().join("staged");
    let code = run(vec![
        "distill".into(),
        "--ref-paper".into(),
        fixture_path("bundles/ref_paper").display().to_string(),
        "--ref-slides".into(),
        fixture_path("bundles/ref_slides").display().to_string(),
        "--template".into(),
        fixture_path("decks/template_a.pptx").display().to_string(),
        "--out".into(),
        out.display().to_string(),
    ]);
    assert_eq!(code, 0, "distill failed");
    assert!(out.join("content_pref.json").exists());
    assert!(out.join("aesthetic_pref.json").exists());

    let code = run(vec![
        "plan".into(),
        "--target".into(),
        fixture_path("bundles/target").display().to_string(),
        "--content-pref".into(),
        out.join("content_pref.json").display().to_string(),
        "--aesthetic-pref".into(),
        out.join("aesthetic_pref.json").display().to_string(),
        "--out".into(),
        out.display().to_string(),
    ]);
    assert_eq!(code, 0, "plan failed");
    for artifact in ["reorganized.json", "outline.json", "outline_selected.json"] {
        assert!(out.join(artifact).exists(), "{artifact} missing");
    }

    let code = run(vec![
        "realize".into(),
        "--target".into(),
        fixture_path("bundles/target").display().to_string(),
        "--template".into(),
        fixture_path("decks/template_a.pptx").display().to_string(),
        "--outline".into(),
        out.join("outline_selected.json").display().to_string(),
        "--aesthetic-pref".into(),
        out.join("aesthetic_pref.json").display().to_string(),
        "--out".into(),
        out.display().to_string(),
    ]);
    assert_eq!(code, 0, "realize failed");
    let deck = parse_deck(&std::fs::read(out.join("deck.pptx")).unwrap()).unwrap();
    assert_eq!(deck.slide_count(), 10);
    assert!(out.join("narration.json").exists());
    assert!(out.join("narration.txt").exists());

    let code = run(vec![
        "evaluate".into(),
        "--target".into(),
        fixture_path("bundles/target").display().to_string(),
        "--ref-slides".into(),
        fixture_path("bundles/ref_slides").display().to_string(),
        "--deck".into(),
        out.join("deck.pptx").display().to_string(),
        "--template".into(),
        fixture_path("decks/template_a.pptx").display().to_string(),
        "--out".into(),
        out.display().to_string(),
    ]);
    assert_eq!(code, 0, "evaluate failed");
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out.join("eval_report.json")).unwrap()).unwrap();
    assert_eq!(report["scores"].as_array().unwrap().len(), 6);
    let overall = report["overall"].as_f64().unwrap();
    assert!((0.0..=100.0).contains(&overall));
}

#[test]
fn report_command_aggregates_run_dirs() {
    let transcripts = tempfile::tempdir().unwrap();
    record_transcripts(transcripts.path(), true, true, true);
    let work = tempfile::tempdir().unwrap();
    let config = write_fixture_config(work.path());

    let runs = work.path().join("runs");
    let code = cli([
        "deckgen",
        "generate",
        "--target",
        fixture_path("bundles/target").to_str().unwrap(),
        "--ref-paper",
        fixture_path("bundles/ref_paper").to_str().unwrap(),
        "--ref-slides",
        fixture_path("bundles/ref_slides").to_str().unwrap(),
        "--template",
        fixture_path("decks/template_a.pptx").to_str().unwrap(),
        "--out",
        runs.join("job-000").to_str().unwrap(),
        "--evaluate",
        "--mode",
        "replay",
        "--transcripts",
        transcripts.path().to_str().unwrap(),
        "--config",
        config.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);

    let csv = work.path().join("report.csv");
    let code = cli([
        "deckgen",
        "report",
        "--runs",
        runs.to_str().unwrap(),
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("Coverage,Flow,"), "{text}");
    assert_eq!(text.lines().count(), 2);
}
