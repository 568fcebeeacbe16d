//! Slide rasterization through an external renderer command.
//!
//! Contract: the command is invoked as `<cmd> <pptx_path> <out_dir>` and must
//! emit one `slide-<i>.png` per slide, numbered from 0. A pre-rendered
//! directory following the same naming can stand in for the command.

use std::path::{Path, PathBuf};
use std::process::Command;

use super::DeckError;

#[derive(Clone, Debug)]
pub enum RenderSource {
    /// Program plus leading arguments, whitespace-separated.
    Command(String),
    /// Directory already holding `slide-<i>.png` files.
    PrerenderedDir(PathBuf),
}

/// Render deck bytes to one raster image per slide, in slide order.
pub fn render_slides(
    deck_bytes: &[u8],
    source: Option<&RenderSource>,
    work_dir: &Path,
) -> Result<Vec<PathBuf>, DeckError> {
    match source {
        None => Err(DeckError::RendererUnavailable),
        Some(RenderSource::PrerenderedDir(dir)) => collect_images(dir),
        Some(RenderSource::Command(cmd)) => {
            let mut parts = cmd.split_whitespace();
            let program = parts.next().ok_or(DeckError::RendererUnavailable)?;
            std::fs::create_dir_all(work_dir)?;
            let pptx_path = work_dir.join("deck.pptx");
            std::fs::write(&pptx_path, deck_bytes)?;
            let out_dir = work_dir.join("renders");
            std::fs::create_dir_all(&out_dir)?;
            let output = Command::new(program)
                .args(parts)
                .arg(&pptx_path)
                .arg(&out_dir)
                .output()
                .map_err(|e| DeckError::RendererFailed {
                    status: -1,
                    stderr: format!("failed to spawn renderer: {e}"),
                })?;
            if !output.status.success() {
                return Err(DeckError::RendererFailed {
                    status: output.status.code().unwrap_or(-1),
                    stderr: String::from_utf8_lossy(&output.stderr).into_owned(),
                });
            }
            collect_images(&out_dir)
        }
    }
}

fn collect_images(dir: &Path) -> Result<Vec<PathBuf>, DeckError> {
    let mut indexed: Vec<(usize, PathBuf)> = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        let Some(name) = path.file_name().and_then(|n| n.to_str()) else { continue };
        if let Some(idx) = name
            .strip_prefix("slide-")
            .and_then(|rest| rest.strip_suffix(".png"))
            .and_then(|n| n.parse::<usize>().ok())
        {
            indexed.push((idx, path));
        }
    }
    if indexed.is_empty() {
        return Err(DeckError::RendererFailed {
            status: 0,
            stderr: format!("no slide-<i>.png files in {}", dir.display()),
        });
    }
    indexed.sort_by_key(|(i, _)| *i);
    Ok(indexed.into_iter().map(|(_, p)| p).collect())
}
