//! `.pptx` engine: parse OOXML presentations into a structured model,
//! describe them in pptc metadata form, apply declarative edit plans, and
//! serialize back with the original theme, masters, and media preserved
//! byte-for-byte.

mod edit;
mod package;
mod parse;
mod pptc;
mod render;
mod serialize;
mod xmlutil;

pub use package::{relative_target, resolve_target, Package};
pub use pptc::{describe_deck, describe_slide};
pub use render::{render_slides, RenderSource};

use std::collections::BTreeSet;
use std::path::PathBuf;

/// OOXML geometry: 1 point = 12700 English Metric Units.
pub const EMU_PER_POINT: i64 = 12700;
/// Raster geometry at 96 dpi: 1 pixel = 9525 EMU.
pub const EMU_PER_PIXEL: i64 = 9525;

#[derive(Debug, thiserror::Error)]
pub enum DeckError {
    #[error("input is not a zip archive")]
    NotAZip,
    #[error("package has no presentation main part")]
    MissingPresentationPart,
    #[error("malformed XML in {part}: {detail}")]
    MalformedXML { part: String, detail: String },
    #[error("image relationship does not resolve: {0}")]
    DanglingImageRef(String),
    #[error("relationship conflict: {0}")]
    RelationshipConflict(String),
    #[error("slide {slide} has no shape with id {shape_id}")]
    UnknownShapeId { slide: usize, shape_id: u32 },
    #[error("template index {index} out of range for {slide_count} slides")]
    UnknownTemplateIndex { index: usize, slide_count: usize },
    #[error("asset unreadable: {}: {detail}", path.display())]
    AssetUnreadable { path: PathBuf, detail: String },
    #[error("illegal edit: {0}")]
    IllegalEdit(String),
    #[error("edit plan invalid: {0}")]
    PlanInvalid(String),
    #[error("slide index {index} out of range for {slide_count} slides")]
    IndexOutOfRange { index: usize, slide_count: usize },
    #[error("no renderer command configured and no pre-rendered directory supplied")]
    RendererUnavailable,
    #[error("renderer failed with status {status}: {stderr}")]
    RendererFailed { status: i32, stderr: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeKind {
    Textbox,
    Picture,
    Placeholder,
    Table,
    Group,
    Other,
}

impl ShapeKind {
    /// Display name used in pptc descriptions, e.g. `[TextBox id=0]`.
    pub fn pptc_name(&self) -> &'static str {
        match self {
            ShapeKind::Textbox => "TextBox",
            ShapeKind::Picture => "Picture",
            ShapeKind::Placeholder => "Placeholder",
            ShapeKind::Table => "Table",
            ShapeKind::Group => "Group",
            ShapeKind::Other => "Shape",
        }
    }
}

/// Bounding box in EMU.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Rect {
    pub left: i64,
    pub top: i64,
    pub width: i64,
    pub height: i64,
}

impl Rect {
    pub fn left_pt(&self) -> f64 {
        self.left as f64 / EMU_PER_POINT as f64
    }
    pub fn top_pt(&self) -> f64 {
        self.top as f64 / EMU_PER_POINT as f64
    }
    pub fn width_pt(&self) -> f64 {
        self.width as f64 / EMU_PER_POINT as f64
    }
    pub fn height_pt(&self) -> f64 {
        self.height as f64 / EMU_PER_POINT as f64
    }
}

/// One styled run of paragraph text. `props_xml` holds the raw `<a:rPr .../>`
/// markup so edits can re-emit the original styling.
#[derive(Clone, Debug, PartialEq)]
pub struct Run {
    pub text: String,
    pub props_xml: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Paragraph {
    pub runs: Vec<Run>,
    pub props_xml: Option<String>,
}

impl Paragraph {
    pub fn plain_text(&self) -> String {
        self.runs.iter().map(|r| r.text.as_str()).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShapeModel {
    /// Drawing id from `cNvPr`, stable within one slide.
    pub shape_id: u32,
    pub name: String,
    pub kind: ShapeKind,
    pub bbox: Rect,
    /// False when the shape inherits its geometry (no explicit `xfrm`).
    pub has_geometry: bool,
    pub paragraphs: Vec<Paragraph>,
    /// Media part name for pictures, e.g. `ppt/media/image1.png`.
    pub image_ref: Option<String>,
    /// Placeholder type attribute when present (`title`, `body`, ...).
    pub placeholder_type: Option<String>,
}

impl ShapeModel {
    /// Paragraphs joined by newlines.
    pub fn text(&self) -> String {
        self.paragraphs
            .iter()
            .map(Paragraph::plain_text)
            .collect::<Vec<_>>()
            .join("\n")
    }

    pub fn is_text_capable(&self) -> bool {
        matches!(self.kind, ShapeKind::Textbox | ShapeKind::Placeholder)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Relationship {
    pub id: String,
    pub rel_type: String,
    pub target: String,
    pub external: bool,
}

#[derive(Clone, Debug, Default)]
pub(crate) struct RelSet {
    pub rels: Vec<Relationship>,
    /// Original part bytes; cleared when the set is modified.
    pub raw: Option<Vec<u8>>,
}

impl RelSet {
    pub fn find(&self, id: &str) -> Option<&Relationship> {
        self.rels.iter().find(|r| r.id == id)
    }

    pub fn find_by_type_suffix(&self, suffix: &str) -> Option<&Relationship> {
        self.rels.iter().find(|r| r.rel_type.ends_with(suffix))
    }

    pub fn next_id(&self) -> String {
        let max = self
            .rels
            .iter()
            .filter_map(|r| r.id.strip_prefix("rId").and_then(|n| n.parse::<u64>().ok()))
            .max()
            .unwrap_or(0);
        format!("rId{}", max + 1)
    }
}

#[derive(Clone, Debug)]
pub struct SlideModel {
    pub(crate) xml: Vec<u8>,
    pub(crate) rels: RelSet,
    pub shapes: Vec<ShapeModel>,
    pub(crate) spans: Vec<parse::ShapeSpans>,
    pub notes_text: Option<String>,
    pub(crate) notes_xml: Option<Vec<u8>>,
    pub(crate) notes_rels_raw: Option<Vec<u8>>,
    pub(crate) notes_dirty: bool,
}

impl SlideModel {
    pub fn xml_bytes(&self) -> &[u8] {
        &self.xml
    }

    pub fn shape(&self, shape_id: u32) -> Option<&ShapeModel> {
        self.shapes.iter().find(|s| s.shape_id == shape_id)
    }

    /// All shape text joined, one line per shape with text.
    pub fn all_text(&self) -> String {
        self.shapes
            .iter()
            .map(ShapeModel::text)
            .filter(|t| !t.is_empty())
            .collect::<Vec<_>>()
            .join("\n")
    }
}

#[derive(Clone, Debug)]
pub struct DeckModel {
    pub slide_width_emu: i64,
    pub slide_height_emu: i64,
    pub slides: Vec<SlideModel>,
    pub(crate) package: Package,
    pub(crate) pres_part: String,
    /// Parts superseded by the model (original slide XML, rels, notes).
    pub(crate) dropped_parts: BTreeSet<String>,
}

impl DeckModel {
    pub fn slide_count(&self) -> usize {
        self.slides.len()
    }

    pub fn slide_width_pt(&self) -> f64 {
        self.slide_width_emu as f64 / EMU_PER_POINT as f64
    }

    pub fn slide_height_pt(&self) -> f64 {
        self.slide_height_emu as f64 / EMU_PER_POINT as f64
    }

    /// Opaque preserved part bytes (theme, masters, media, ...), i.e. every
    /// package part not modeled structurally.
    pub fn preserved_part(&self, name: &str) -> Option<&[u8]> {
        if self.dropped_parts.contains(name) {
            return None;
        }
        self.package.get(name)
    }

    pub fn preserved_part_names(&self) -> Vec<String> {
        self.package
            .names()
            .filter(|n| !self.dropped_parts.contains(*n))
            .map(String::from)
            .collect()
    }
}

/// The closed set of declarative edit operations.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum EditOp {
    CloneTemplateSlide { template_index: usize },
    SetText { out_slide: usize, shape_id: u32, paragraphs: Vec<String> },
    ReplaceImage { out_slide: usize, shape_id: u32, asset_path: PathBuf },
    DeleteShape { out_slide: usize, shape_id: u32 },
    SetNotes { out_slide: usize, text: String },
}

#[derive(Clone, Debug, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EditPlan {
    pub ops: Vec<EditOp>,
}

impl EditPlan {
    pub fn clone_count(&self) -> usize {
        self.ops
            .iter()
            .filter(|op| matches!(op, EditOp::CloneTemplateSlide { .. }))
            .count()
    }
}

pub use edit::{apply_edit_plan, clear_speaker_notes, set_speaker_notes};
pub use parse::parse_deck;
pub use serialize::serialize_deck;
