//! OPC zip container: a named map of part bytes with deterministic output.

use std::collections::BTreeMap;
use std::io::{Cursor, Read, Write};

use zip::write::SimpleFileOptions;
use zip::{CompressionMethod, ZipArchive, ZipWriter};

use super::DeckError;

/// All parts of an OOXML package, keyed by part name without a leading slash.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Package {
    parts: BTreeMap<String, Vec<u8>>,
}

impl Package {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, DeckError> {
        let mut archive = ZipArchive::new(Cursor::new(bytes)).map_err(|_| DeckError::NotAZip)?;
        let mut parts = BTreeMap::new();
        for i in 0..archive.len() {
            let mut entry = archive.by_index(i).map_err(|_| DeckError::NotAZip)?;
            if entry.is_dir() {
                continue;
            }
            let name = entry.name().trim_start_matches('/').to_string();
            let mut data = Vec::with_capacity(entry.size() as usize);
            entry
                .read_to_end(&mut data)
                .map_err(|e| DeckError::MalformedXML { part: name.clone(), detail: e.to_string() })?;
            parts.insert(name, data);
        }
        Ok(Self { parts })
    }

    /// Serialize as a zip. Entry order is fixed (`[Content_Types].xml` first,
    /// then lexicographic) and timestamps are pinned so identical packages
    /// produce identical bytes.
    pub fn to_bytes(&self) -> Result<Vec<u8>, DeckError> {
        let mut writer = ZipWriter::new(Cursor::new(Vec::new()));
        let options = SimpleFileOptions::default()
            .compression_method(CompressionMethod::Deflated)
            .last_modified_time(zip::DateTime::default());
        let mut names: Vec<&String> = self.parts.keys().collect();
        names.sort_by_key(|n| (n.as_str() != "[Content_Types].xml", n.as_str()));
        for name in names {
            writer
                .start_file(name.as_str(), options)
                .map_err(|e| DeckError::Io(std::io::Error::other(e)))?;
            writer.write_all(&self.parts[name]).map_err(DeckError::Io)?;
        }
        let cursor = writer
            .finish()
            .map_err(|e| DeckError::Io(std::io::Error::other(e)))?;
        Ok(cursor.into_inner())
    }

    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.parts.get(name).map(Vec::as_slice)
    }

    pub fn set(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.parts.insert(name.into(), bytes);
    }

    pub fn remove(&mut self, name: &str) -> Option<Vec<u8>> {
        self.parts.remove(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.parts.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.parts.keys().map(String::as_str)
    }

    /// Next free index for parts named `{prefix}{N}{suffix}`, e.g. media
    /// images or slide parts.
    pub fn next_index(&self, prefix: &str, suffix: &str) -> usize {
        let mut max = 0usize;
        for name in self.parts.keys() {
            if let Some(rest) = name.strip_prefix(prefix) {
                if let Some(num) = rest.strip_suffix(suffix) {
                    if let Ok(n) = num.parse::<usize>() {
                        max = max.max(n);
                    }
                }
            }
        }
        max + 1
    }
}

/// Resolve a relationship target against the directory of `base_part`.
/// Handles `../` segments and absolute (`/ppt/...`) targets.
pub fn resolve_target(base_part: &str, target: &str) -> String {
    if let Some(abs) = target.strip_prefix('/') {
        return abs.to_string();
    }
    let mut segments: Vec<&str> = match base_part.rfind('/') {
        Some(i) => base_part[..i].split('/').collect(),
        None => Vec::new(),
    };
    for seg in target.split('/') {
        match seg {
            "." | "" => {}
            ".." => {
                segments.pop();
            }
            other => segments.push(other),
        }
    }
    segments.join("/")
}

/// Relative path from the directory of `base_part` to `target_part`.
pub fn relative_target(base_part: &str, target_part: &str) -> String {
    let base_dir: Vec<&str> = match base_part.rfind('/') {
        Some(i) => base_part[..i].split('/').collect(),
        None => Vec::new(),
    };
    let target: Vec<&str> = target_part.split('/').collect();
    let mut common = 0;
    while common < base_dir.len()
        && common + 1 < target.len()
        && base_dir[common] == target[common]
    {
        common += 1;
    }
    let mut out: Vec<String> = vec!["..".to_string(); base_dir.len() - common];
    out.extend(target[common..].iter().map(|s| s.to_string()));
    out.join("/")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_bytes_are_not_a_zip() {
        assert!(matches!(Package::from_bytes(&[]), Err(DeckError::NotAZip)));
        assert!(matches!(Package::from_bytes(b"hello"), Err(DeckError::NotAZip)));
    }

    #[test]
    fn round_trip_is_byte_stable() {
        let mut pkg = Package::empty();
        pkg.set("[Content_Types].xml", b"<Types/>".to_vec());
        pkg.set("ppt/presentation.xml", b"<p/>".to_vec());
        let a = pkg.to_bytes().unwrap();
        let b = Package::from_bytes(&a).unwrap().to_bytes().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn target_resolution() {
        assert_eq!(resolve_target("ppt/slides/slide1.xml", "../media/image1.png"), "ppt/media/image1.png");
        assert_eq!(resolve_target("", "ppt/presentation.xml"), "ppt/presentation.xml");
        assert_eq!(resolve_target("ppt/presentation.xml", "slides/slide2.xml"), "ppt/slides/slide2.xml");
        assert_eq!(resolve_target("ppt/presentation.xml", "/ppt/media/x.png"), "ppt/media/x.png");
    }

    #[test]
    fn relative_paths() {
        assert_eq!(relative_target("ppt/slides/slide1.xml", "ppt/media/image1.png"), "../media/image1.png");
        assert_eq!(relative_target("ppt/presentation.xml", "ppt/slides/slide1.xml"), "slides/slide1.xml");
        assert_eq!(relative_target("ppt/notesSlides/notesSlide1.xml", "ppt/slides/slide3.xml"), "../slides/slide3.xml");
    }

    #[test]
    fn next_index_scans_names() {
        let mut pkg = Package::empty();
        pkg.set("ppt/media/image1.png", vec![]);
        pkg.set("ppt/media/image7.jpeg", vec![]);
        assert_eq!(pkg.next_index("ppt/media/image", ".png"), 2);
        assert_eq!(pkg.next_index("ppt/media/image", ".jpeg"), 8);
        assert_eq!(pkg.next_index("ppt/slides/slide", ".xml"), 1);
    }
}
