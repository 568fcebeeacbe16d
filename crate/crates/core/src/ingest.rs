//! Paper ingestion: the canonical bundle is a directory holding `paper.md`
//! (or `paper.txt`) plus `assets/manifest.json` with the figure and table
//! images. PDFs reach the same shape through a pluggable extractor command.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::Command;

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("bundle has no paper.md/paper.txt or the body is empty")]
    MissingBody,
    #[error("bundle has no assets/manifest.json")]
    MissingManifest,
    #[error("manifest unreadable: {0}")]
    BadManifest(String),
    #[error("bad asset {id}: {cause}")]
    BadAsset { id: String, cause: String },
    #[error("no extractor command configured")]
    ExtractorUnavailable,
    #[error("extractor failed with status {status}: {stderr}")]
    ExtractorFailed { status: i32, stderr: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AssetKind {
    Figure,
    Table,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AssetRecord {
    pub asset_id: String,
    pub kind: AssetKind,
    pub file_path: PathBuf,
    #[serde(default)]
    pub caption: String,
    #[serde(default)]
    pub source_locator: String,
}

#[derive(Clone, Debug, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PaperMetadata {
    #[serde(default)]
    pub title: String,
    #[serde(default)]
    pub authors: String,
    #[serde(default)]
    pub venue: String,
    #[serde(default)]
    pub organization: String,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Section {
    pub heading: String,
    pub text: String,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PaperBundle {
    pub metadata: PaperMetadata,
    pub body_text: Vec<Section>,
    pub assets: Vec<AssetRecord>,
}

impl PaperBundle {
    /// Full body as markdown-ish text, headings included.
    pub fn full_text(&self) -> String {
        let mut out = String::new();
        for section in &self.body_text {
            if !section.heading.is_empty() {
                out.push_str(&format!("# {}\n", section.heading));
            }
            out.push_str(&section.text);
            if !out.ends_with('\n') {
                out.push('\n');
            }
            out.push('\n');
        }
        out.trim_end().to_string()
    }

    pub fn asset(&self, asset_id: &str) -> Option<&AssetRecord> {
        self.assets.iter().find(|a| a.asset_id == asset_id)
    }

    /// `asset_id: caption` lines for prompt consumption.
    pub fn image_information(&self) -> String {
        if self.assets.is_empty() {
            return "(no images available)".to_string();
        }
        self.assets
            .iter()
            .map(|a| format!("{}: {}", a.asset_id, a.caption))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// Trim, collapse whitespace, casefold: the canonical key for heading
/// comparisons.
pub fn canonical_heading(raw: &str) -> String {
    raw.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

/// Split markdown body text into sections by `#`-style headings. Text before
/// the first heading becomes a preamble section with an empty heading.
fn split_sections(body: &str) -> Vec<Section> {
    let mut sections: Vec<Section> = Vec::new();
    let mut heading = String::new();
    let mut text = String::new();
    for line in body.lines() {
        let trimmed = line.trim_start();
        if trimmed.starts_with('#') {
            if !heading.is_empty() || !text.trim().is_empty() {
                sections.push(Section { heading: heading.clone(), text: text.trim().to_string() });
            }
            heading = trimmed.trim_start_matches('#').trim().to_string();
            text = String::new();
        } else {
            text.push_str(line);
            text.push('\n');
        }
    }
    if !heading.is_empty() || !text.trim().is_empty() {
        sections.push(Section { heading, text: text.trim().to_string() });
    }
    sections
}

#[derive(serde::Deserialize)]
struct ManifestEntry {
    asset_id: String,
    kind: AssetKind,
    file: String,
    #[serde(default)]
    caption: String,
    #[serde(default)]
    source_locator: String,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct BundleDiagnostic {
    pub code: String,
    pub detail: String,
}

impl BundleDiagnostic {
    fn new(code: &str, detail: String) -> Self {
        Self { code: code.to_string(), detail }
    }
}

/// Load and validate a bundle directory.
pub fn load_bundle(dir: impl AsRef<Path>) -> Result<PaperBundle, IngestError> {
    let dir = dir.as_ref();
    let body_path = ["paper.md", "paper.txt"]
        .iter()
        .map(|n| dir.join(n))
        .find(|p| p.exists())
        .ok_or(IngestError::MissingBody)?;
    let body = std::fs::read_to_string(&body_path)?;
    if body.trim().is_empty() {
        return Err(IngestError::MissingBody);
    }
    let manifest_path = dir.join("assets").join("manifest.json");
    if !manifest_path.exists() {
        return Err(IngestError::MissingManifest);
    }
    let manifest: Vec<ManifestEntry> = serde_json::from_slice(&std::fs::read(&manifest_path)?)
        .map_err(|e| IngestError::BadManifest(e.to_string()))?;

    let metadata_path = dir.join("metadata.json");
    let metadata = if metadata_path.exists() {
        serde_json::from_slice(&std::fs::read(&metadata_path)?)
            .map_err(|e| IngestError::BadManifest(format!("metadata.json: {e}")))?
    } else {
        PaperMetadata::default()
    };

    let mut assets = Vec::new();
    for entry in manifest {
        let file_path = dir.join("assets").join(&entry.file);
        if !file_path.exists() {
            return Err(IngestError::BadAsset {
                id: entry.asset_id,
                cause: format!("file {} does not exist", entry.file),
            });
        }
        image::image_dimensions(&file_path).map_err(|e| IngestError::BadAsset {
            id: entry.asset_id.clone(),
            cause: format!("not a decodable raster: {e}"),
        })?;
        assets.push(AssetRecord {
            asset_id: entry.asset_id,
            kind: entry.kind,
            file_path,
            caption: entry.caption,
            source_locator: entry.source_locator,
        });
    }

    let bundle = PaperBundle { metadata, body_text: split_sections(&body), assets };
    if let Some(d) = validate_bundle(&bundle).into_iter().next() {
        if d.code == "DuplicateAssetId" {
            return Err(IngestError::BadAsset { id: d.detail, cause: "duplicate asset id".into() });
        }
    }
    Ok(bundle)
}

/// Structural diagnostics; empty iff all bundle invariants hold.
pub fn validate_bundle(bundle: &PaperBundle) -> Vec<BundleDiagnostic> {
    let mut out = Vec::new();
    if bundle.body_text.is_empty() {
        out.push(BundleDiagnostic::new("EmptyBody", "bundle has no sections".into()));
    }
    let mut seen_headings = BTreeSet::new();
    for section in &bundle.body_text {
        if section.heading.is_empty() {
            continue;
        }
        let canon = canonical_heading(&section.heading);
        if !seen_headings.insert(canon.clone()) {
            out.push(BundleDiagnostic::new("DuplicateSection", canon));
        }
    }
    let mut seen_assets = BTreeSet::new();
    for asset in &bundle.assets {
        if !seen_assets.insert(asset.asset_id.clone()) {
            out.push(BundleDiagnostic::new("DuplicateAssetId", asset.asset_id.clone()));
        }
        if !asset.file_path.exists() {
            out.push(BundleDiagnostic::new(
                "MissingAssetFile",
                format!("{}: {}", asset.asset_id, asset.file_path.display()),
            ));
        }
    }
    out
}

/// Run the extractor command (`<cmd> <pdf> <out_dir>`) and load the bundle it
/// produces.
pub fn extract_pdf(
    pdf_path: impl AsRef<Path>,
    extractor_command: Option<&str>,
    out_dir: impl AsRef<Path>,
) -> Result<PaperBundle, IngestError> {
    let Some(cmd) = extractor_command else {
        return Err(IngestError::ExtractorUnavailable);
    };
    let mut parts = cmd.split_whitespace();
    let program = parts.next().ok_or(IngestError::ExtractorUnavailable)?;
    std::fs::create_dir_all(out_dir.as_ref())?;
    let output = Command::new(program)
        .args(parts)
        .arg(pdf_path.as_ref())
        .arg(out_dir.as_ref())
        .output()
        .map_err(|e| IngestError::ExtractorFailed {
            status: -1,
            stderr: format!("failed to spawn extractor: {e}"),
        })?;
    if !output.status.success() {
        return Err(IngestError::ExtractorFailed {
            status: output.status.code().unwrap_or(-1),
            stderr: String::from_utf8_lossy(&output.stderr).into_owned(),
        });
    }
    load_bundle(out_dir)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_split_on_headings() {
        let body = "# Intro\nhello\n\n## Method\nsteps here\n# Results\nnumbers";
        let sections = split_sections(body);
        assert_eq!(sections.len(), 3);
        assert_eq!(sections[0].heading, "Intro");
        assert_eq!(sections[1].heading, "Method");
        assert_eq!(sections[2].text, "numbers");
    }

    #[test]
    fn canonicalization_collides_spaced_variants() {
        assert_eq!(canonical_heading("Method"), canonical_heading("  method "));
        let bundle = PaperBundle {
            metadata: PaperMetadata::default(),
            body_text: vec![
                Section { heading: "Method".into(), text: "a".into() },
                Section { heading: "  method ".into(), text: "b".into() },
            ],
            assets: vec![],
        };
        let diags = validate_bundle(&bundle);
        assert!(diags.iter().any(|d| d.code == "DuplicateSection"), "{diags:?}");
    }

    #[test]
    fn duplicate_asset_ids_flagged() {
        let bundle = PaperBundle {
            metadata: PaperMetadata::default(),
            body_text: vec![Section { heading: "A".into(), text: "t".into() }],
            assets: vec![
                AssetRecord {
                    asset_id: "fig_1".into(),
                    kind: AssetKind::Figure,
                    file_path: PathBuf::from("/nonexistent.png"),
                    caption: String::new(),
                    source_locator: String::new(),
                },
                AssetRecord {
                    asset_id: "fig_1".into(),
                    kind: AssetKind::Figure,
                    file_path: PathBuf::from("/nonexistent.png"),
                    caption: String::new(),
                    source_locator: String::new(),
                },
            ],
        };
        let diags = validate_bundle(&bundle);
        assert!(diags.iter().any(|d| d.code == "DuplicateAssetId"));
    }

    #[test]
    fn missing_extractor_is_unavailable() {
        let err = extract_pdf("x.pdf", None, "/tmp/never").unwrap_err();
        assert!(matches!(err, IngestError::ExtractorUnavailable));
    }
}
