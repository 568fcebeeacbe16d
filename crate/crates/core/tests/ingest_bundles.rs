//! Paper-bundle loading, validation, and the extractor command contract.

mod common;

use common::fixture_path;
use deckgen::ingest::{extract_pdf, load_bundle, validate_bundle, IngestError};

#[test]
fn fixture_bundle_loads_with_expected_counts() {
    let bundle = load_bundle(fixture_path("bundles/target")).unwrap();
    assert_eq!(bundle.body_text.len(), 6);
    assert_eq!(bundle.assets.len(), 4);
    assert_eq!(bundle.body_text[0].heading, "Introduction");
    assert_eq!(bundle.assets[0].asset_id, "fig_1");
    assert!(bundle.assets[0].file_path.exists());
    assert!(!bundle.assets[0].caption.is_empty());
}

#[test]
fn loading_is_deterministic_and_fixtures_validate_clean() {
    for name in ["bundles/target", "bundles/ref_paper", "bundles/ref_slides"] {
        let a = load_bundle(fixture_path(name)).unwrap();
        let b = load_bundle(fixture_path(name)).unwrap();
        assert_eq!(a, b, "{name}");
        assert!(validate_bundle(&a).is_empty(), "{name}");
    }
}

#[test]
fn missing_asset_file_is_bad_asset() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir_all(dir.path().join("assets")).unwrap();
    std::fs::write(dir.path().join("paper.md"), "# A\ntext\n").unwrap();
    std::fs::write(
        dir.path().join("assets/manifest.json"),
        r#"[{"asset_id": "fig_1", "kind": "figure", "file": "missing.png", "caption": ""}]"#,
    )
    .unwrap();
    let err = load_bundle(dir.path()).unwrap_err();
    assert!(matches!(err, IngestError::BadAsset { id, .. } if id == "fig_1"));
}

#[test]
fn undecodable_asset_is_bad_asset() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir_all(dir.path().join("assets")).unwrap();
    std::fs::write(dir.path().join("paper.md"), "# A\ntext\n").unwrap();
    std::fs::write(dir.path().join("assets/fake.png"), b"not a png").unwrap();
    std::fs::write(
        dir.path().join("assets/manifest.json"),
        r#"[{"asset_id": "fig_1", "kind": "figure", "file": "fake.png", "caption": ""}]"#,
    )
    .unwrap();
    let err = load_bundle(dir.path()).unwrap_err();
    assert!(matches!(err, IngestError::BadAsset { .. }), "{err}");
}

#[test]
fn empty_body_is_missing_body() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir_all(dir.path().join("assets")).unwrap();
    std::fs::write(dir.path().join("paper.md"), "  \n").unwrap();
    std::fs::write(dir.path().join("assets/manifest.json"), "[]").unwrap();
    assert!(matches!(load_bundle(dir.path()), Err(IngestError::MissingBody)));

    let none = tempfile::tempdir().unwrap();
    assert!(matches!(load_bundle(none.path()), Err(IngestError::MissingBody)));
}

#[test]
fn missing_manifest_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("paper.md"), "# A\ntext\n").unwrap();
    assert!(matches!(load_bundle(dir.path()), Err(IngestError::MissingManifest)));
}

#[test]
fn extractor_stub_passes_through() {
    let dir = tempfile::tempdir().unwrap();
    let script = dir.path().join("extractor.sh");
    std::fs::write(
        &script,
        format!("#!/bin/sh\ncp -r {}/. \"$2\"/\n", fixture_path("bundles/target").display()),
    )
    .unwrap();
    std::process::Command::new("chmod").arg("+x").arg(&script).status().unwrap();
    let pdf = dir.path().join("paper.pdf");
    std::fs::write(&pdf, b"%PDF-1.4 stub").unwrap();

    let out = dir.path().join("extracted");
    let bundle = extract_pdf(&pdf, Some(script.to_str().unwrap()), &out).unwrap();
    let direct = load_bundle(fixture_path("bundles/target")).unwrap();
    assert_eq!(bundle.body_text, direct.body_text);
    assert_eq!(bundle.assets.len(), direct.assets.len());
}

#[test]
fn extractor_failure_modes() {
    let dir = tempfile::tempdir().unwrap();
    let pdf = dir.path().join("paper.pdf");
    std::fs::write(&pdf, b"%PDF-1.4 stub").unwrap();

    let bad = dir.path().join("bad.sh");
    std::fs::write(&bad, "#!/bin/sh\necho extraction exploded >&2\nexit 9\n").unwrap();
    std::process::Command::new("chmod").arg("+x").arg(&bad).status().unwrap();
    let err = extract_pdf(&pdf, Some(bad.to_str().unwrap()), dir.path().join("o1")).unwrap_err();
    match err {
        IngestError::ExtractorFailed { status, stderr } => {
            assert_eq!(status, 9);
            assert!(stderr.contains("exploded"));
        }
        other => panic!("expected ExtractorFailed, got {other:?}"),
    }

    // Extractor that emits a body but no manifest: delegated validation.
    let partial = dir.path().join("partial.sh");
    std::fs::write(&partial, "#!/bin/sh\nprintf '# A\\ntext\\n' > \"$2\"/paper.md\n").unwrap();
    std::process::Command::new("chmod").arg("+x").arg(&partial).status().unwrap();
    let err =
        extract_pdf(&pdf, Some(partial.to_str().unwrap()), dir.path().join("o2")).unwrap_err();
    assert!(matches!(err, IngestError::MissingManifest), "{err}");
}
