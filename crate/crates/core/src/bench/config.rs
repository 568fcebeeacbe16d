//! Runtime configuration: a flat `key = value` file (`#` comments allowed).
//!
//! Recognized keys: `model_id`, `endpoint`, `renderer`, `extractor`,
//! `gen_renders_dir`, `template_renders_dir`, `workers`, `temperature`,
//! `max_tokens`.

use std::path::{Path, PathBuf};

use crate::deck::RenderSource;

#[derive(Clone, Debug)]
pub struct Config {
    pub model_id: String,
    pub endpoint: Option<String>,
    /// External renderer command for generated decks.
    pub renderer: Option<String>,
    /// External PDF extractor command.
    pub extractor: Option<String>,
    /// Pre-rendered slide images for the generated deck.
    pub gen_renders_dir: Option<PathBuf>,
    /// Pre-rendered slide images for the template deck.
    pub template_renders_dir: Option<PathBuf>,
    pub workers: usize,
    pub temperature: f64,
    pub max_tokens: u32,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            model_id: "gpt-4.1-2025-04-14".to_string(),
            endpoint: None,
            renderer: None,
            extractor: None,
            gen_renders_dir: None,
            template_renders_dir: None,
            workers: 4,
            temperature: 0.0,
            max_tokens: 8192,
        }
    }
}

impl Config {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, String> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| format!("{}: {e}", path.as_ref().display()))?;
        let mut config = Self::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(format!("line {}: expected key = value", lineno + 1));
            };
            let (key, value) = (key.trim(), value.trim());
            match key {
                "model_id" => config.model_id = value.to_string(),
                "endpoint" => config.endpoint = Some(value.to_string()),
                "renderer" => config.renderer = Some(value.to_string()),
                "extractor" => config.extractor = Some(value.to_string()),
                "gen_renders_dir" => config.gen_renders_dir = Some(PathBuf::from(value)),
                "template_renders_dir" => config.template_renders_dir = Some(PathBuf::from(value)),
                "workers" => {
                    config.workers = value.parse().map_err(|_| format!("line {}: bad workers", lineno + 1))?
                }
                "temperature" => {
                    config.temperature =
                        value.parse().map_err(|_| format!("line {}: bad temperature", lineno + 1))?
                }
                "max_tokens" => {
                    config.max_tokens =
                        value.parse().map_err(|_| format!("line {}: bad max_tokens", lineno + 1))?
                }
                other => return Err(format!("line {}: unknown key {other:?}", lineno + 1)),
            }
        }
        Ok(config)
    }

    pub fn gen_render_source(&self) -> Option<RenderSource> {
        if let Some(dir) = &self.gen_renders_dir {
            return Some(RenderSource::PrerenderedDir(dir.clone()));
        }
        self.renderer.clone().map(RenderSource::Command)
    }

    pub fn template_render_source(&self) -> Option<RenderSource> {
        if let Some(dir) = &self.template_renders_dir {
            return Some(RenderSource::PrerenderedDir(dir.clone()));
        }
        self.renderer.clone().map(RenderSource::Command)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_comments() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("config");
        std::fs::write(&path, "# comment\nmodel_id = test-model\nworkers = 2\n").unwrap();
        let config = Config::load(&path).unwrap();
        assert_eq!(config.model_id, "test-model");
        assert_eq!(config.workers, 2);
        assert_eq!(config.temperature, 0.0);
    }

    #[test]
    fn rejects_unknown_keys() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("config");
        std::fs::write(&path, "frobnicate = yes\n").unwrap();
        assert!(Config::load(&path).is_err());
    }
}
