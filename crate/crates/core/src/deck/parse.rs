//! Streaming OOXML parse with byte-span capture.
//!
//! Slide XML is kept verbatim as the source of truth; the parse derives the
//! shape model plus the element spans later used for splice-based edits.
//! Matching is on local names, so namespace prefixes do not matter.

use std::collections::BTreeSet;
use std::ops::Range;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::package::{resolve_target, Package};
use super::xmlutil::{attr_i64, attr_local, attr_u32, local_name, ElemSpan};
use super::{
    DeckError, DeckModel, Paragraph, Rect, RelSet, Relationship, Run, ShapeKind, ShapeModel,
    SlideModel,
};

const SHAPE_TAGS: [&str; 5] = ["sp", "pic", "graphicFrame", "grpSp", "cxnSp"];

/// Byte spans used by the edit engine, parallel to `SlideModel::shapes`.
#[derive(Clone, Debug)]
pub(crate) struct ShapeSpans {
    pub elem: ElemSpan,
    pub txbody: Option<ElemSpan>,
    pub body_pr: Option<ElemSpan>,
    pub lst_style: Option<ElemSpan>,
    pub first_ppr: Option<ElemSpan>,
    pub first_rpr: Option<ElemSpan>,
    pub first_end_pr: Option<ElemSpan>,
    pub blip: Option<ElemSpan>,
    pub blip_rid: Option<String>,
    pub xfrm_off: Option<ElemSpan>,
    pub xfrm_ext: Option<ElemSpan>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Capture {
    PPr,
    RPr,
    EndPr,
    Blip,
    BodyPr,
    LstStyle,
}

struct ShapeBuild {
    kind_tag: String,
    depth: usize,
    open_span: Range<usize>,
    id: Option<u32>,
    name: String,
    ph_type: Option<String>,
    has_ph: bool,
    has_tbl: bool,
    // first xfrm only
    in_xfrm: bool,
    xfrm_seen: bool,
    off: Option<(i64, i64)>,
    ext: Option<(i64, i64)>,
    off_span: Option<ElemSpan>,
    ext_span: Option<ElemSpan>,
    // text body (for `sp` shapes)
    txbody_open: Option<Range<usize>>,
    txbody_depth: usize,
    txbody: Option<ElemSpan>,
    in_txbody: bool,
    body_pr: Option<ElemSpan>,
    lst_style: Option<ElemSpan>,
    first_ppr: Option<ElemSpan>,
    first_rpr: Option<ElemSpan>,
    first_end_pr: Option<ElemSpan>,
    paragraphs: Vec<Paragraph>,
    cur_para: Option<Paragraph>,
    cur_run: Option<Run>,
    in_text: bool,
    blip: Option<ElemSpan>,
    blip_rid: Option<String>,
    pending: Option<(Capture, usize, Range<usize>)>,
}

impl ShapeBuild {
    fn new(kind_tag: &str, depth: usize, open_span: Range<usize>) -> Self {
        Self {
            kind_tag: kind_tag.to_string(),
            depth,
            open_span,
            id: None,
            name: String::new(),
            ph_type: None,
            has_ph: false,
            has_tbl: false,
            in_xfrm: false,
            xfrm_seen: false,
            off: None,
            ext: None,
            off_span: None,
            ext_span: None,
            txbody_open: None,
            txbody_depth: 0,
            txbody: None,
            in_txbody: false,
            body_pr: None,
            lst_style: None,
            first_ppr: None,
            first_rpr: None,
            first_end_pr: None,
            paragraphs: Vec::new(),
            cur_para: None,
            cur_run: None,
            in_text: false,
            blip: None,
            blip_rid: None,
            pending: None,
        }
    }

    fn capture_of(&self, ln: &str) -> Option<Capture> {
        match ln {
            "pPr" if self.in_txbody => Some(Capture::PPr),
            "rPr" if self.in_txbody => Some(Capture::RPr),
            "endParaRPr" if self.in_txbody && self.first_end_pr.is_none() => Some(Capture::EndPr),
            "blip" if self.blip.is_none() => Some(Capture::Blip),
            "bodyPr" if self.in_txbody && self.body_pr.is_none() => Some(Capture::BodyPr),
            "lstStyle" if self.in_txbody && self.lst_style.is_none() => Some(Capture::LstStyle),
            _ => None,
        }
    }

    fn store_capture(&mut self, kind: Capture, span: ElemSpan, xml: &[u8]) {
        let raw = || String::from_utf8_lossy(&xml[span.whole()]).into_owned();
        match kind {
            Capture::PPr => {
                if let Some(p) = self.cur_para.as_mut() {
                    if p.props_xml.is_none() {
                        p.props_xml = Some(raw());
                    }
                }
                if self.first_ppr.is_none() {
                    self.first_ppr = Some(span);
                }
            }
            Capture::RPr => {
                if let Some(r) = self.cur_run.as_mut() {
                    if r.props_xml.is_none() {
                        r.props_xml = Some(raw());
                    }
                }
                if self.first_rpr.is_none() {
                    self.first_rpr = Some(span);
                }
            }
            Capture::EndPr => self.first_end_pr = Some(span),
            Capture::Blip => self.blip = Some(span),
            Capture::BodyPr => self.body_pr = Some(span),
            Capture::LstStyle => self.lst_style = Some(span),
        }
    }

    fn open(
        &mut self,
        ln: &str,
        start: &BytesStart,
        depth: usize,
        span: Range<usize>,
        empty: bool,
        xml: &[u8],
    ) {
        if self.id.is_none() && ln == "cNvPr" {
            self.id = attr_u32(start, b"id");
            self.name = attr_local(start, b"name").unwrap_or_default();
        }
        if !self.has_ph && ln == "ph" {
            self.has_ph = true;
            self.ph_type = attr_local(start, b"type");
        }
        if ln == "tbl" {
            self.has_tbl = true;
        }
        if ln == "xfrm" && !self.xfrm_seen {
            self.xfrm_seen = true;
            self.in_xfrm = !empty;
        }
        if self.in_xfrm && empty {
            if ln == "off" && self.off.is_none() {
                self.off = Some((
                    attr_i64(start, b"x").unwrap_or(0),
                    attr_i64(start, b"y").unwrap_or(0),
                ));
                self.off_span = Some(ElemSpan::empty_at(span.clone()));
            } else if ln == "ext" && self.ext.is_none() {
                self.ext = Some((
                    attr_i64(start, b"cx").unwrap_or(0),
                    attr_i64(start, b"cy").unwrap_or(0),
                ));
                self.ext_span = Some(ElemSpan::empty_at(span.clone()));
            }
        }
        if ln == "txBody" && self.kind_tag == "sp" && self.txbody.is_none() && !self.in_txbody {
            self.in_txbody = true;
            self.txbody_open = Some(span.clone());
            self.txbody_depth = depth;
        }
        if self.in_txbody {
            match ln {
                "p" if depth == self.txbody_depth + 1 => {
                    if empty {
                        self.paragraphs.push(Paragraph::default());
                    } else {
                        self.cur_para = Some(Paragraph::default());
                    }
                }
                "r" | "fld" if !empty => {
                    if self.cur_para.is_some() {
                        self.cur_run = Some(Run { text: String::new(), props_xml: None });
                    }
                }
                "t" if !empty => self.in_text = true,
                "br" => {
                    if let Some(p) = self.cur_para.as_mut() {
                        p.runs.push(Run { text: "\n".into(), props_xml: None });
                    }
                }
                _ => {}
            }
        }
        if ln == "blip" && self.blip_rid.is_none() {
            self.blip_rid = attr_local(start, b"embed");
        }
        if let Some(kind) = self.capture_of(ln) {
            if empty {
                self.store_capture(kind, ElemSpan::empty_at(span), xml);
            } else if self.pending.is_none() {
                self.pending = Some((kind, depth, span));
            }
        }
    }

    fn close(&mut self, ln: &str, depth: usize, span: Range<usize>, xml: &[u8]) {
        if let Some((kind, d, open)) = self.pending.clone() {
            if depth == d && capture_matches(kind, ln) {
                self.pending = None;
                self.store_capture(kind, ElemSpan { open, close: span.clone() }, xml);
            }
        }
        if self.in_txbody {
            match ln {
                "t" => self.in_text = false,
                "r" | "fld" => {
                    if let (Some(p), Some(r)) = (self.cur_para.as_mut(), self.cur_run.take()) {
                        p.runs.push(r);
                    }
                }
                "p" if depth == self.txbody_depth + 1 => {
                    if let Some(p) = self.cur_para.take() {
                        self.paragraphs.push(p);
                    }
                }
                "txBody" if depth == self.txbody_depth => {
                    self.in_txbody = false;
                    if let Some(open) = self.txbody_open.take() {
                        self.txbody = Some(ElemSpan { open, close: span.clone() });
                    }
                }
                _ => {}
            }
        }
        if ln == "xfrm" && self.in_xfrm {
            self.in_xfrm = false;
        }
    }

    fn text(&mut self, chunk: &str) {
        if self.in_text {
            if let Some(r) = self.cur_run.as_mut() {
                r.text.push_str(chunk);
            }
        }
    }

    fn finish(self, close_span: Range<usize>) -> (ShapeModel, ShapeSpans) {
        let kind = match self.kind_tag.as_str() {
            "sp" if self.has_ph => ShapeKind::Placeholder,
            "sp" => ShapeKind::Textbox,
            "pic" => ShapeKind::Picture,
            "graphicFrame" if self.has_tbl => ShapeKind::Table,
            "graphicFrame" => ShapeKind::Other,
            "grpSp" => ShapeKind::Group,
            _ => ShapeKind::Other,
        };
        let has_geometry = self.off.is_some() && self.ext.is_some();
        let (left, top) = self.off.unwrap_or((0, 0));
        let (width, height) = self.ext.unwrap_or((0, 0));
        let model = ShapeModel {
            shape_id: self.id.unwrap_or(0),
            name: self.name,
            kind,
            bbox: Rect { left, top, width, height },
            has_geometry,
            paragraphs: self.paragraphs,
            image_ref: None,
            placeholder_type: self.ph_type,
        };
        let spans = ShapeSpans {
            elem: ElemSpan { open: self.open_span, close: close_span },
            txbody: self.txbody,
            body_pr: self.body_pr,
            lst_style: self.lst_style,
            first_ppr: self.first_ppr,
            first_rpr: self.first_rpr,
            first_end_pr: self.first_end_pr,
            blip: self.blip,
            blip_rid: self.blip_rid,
            xfrm_off: self.off_span,
            xfrm_ext: self.ext_span,
        };
        (model, spans)
    }
}

fn capture_matches(kind: Capture, ln: &str) -> bool {
    matches!(
        (kind, ln),
        (Capture::PPr, "pPr")
            | (Capture::RPr, "rPr")
            | (Capture::EndPr, "endParaRPr")
            | (Capture::Blip, "blip")
            | (Capture::BodyPr, "bodyPr")
            | (Capture::LstStyle, "lstStyle")
    )
}

/// Parse the shape tree of one slide (or notes) part.
pub(crate) fn parse_slide_xml(xml: &[u8]) -> Result<(Vec<ShapeModel>, Vec<ShapeSpans>), String> {
    let mut reader = Reader::from_reader(xml);
    reader.config_mut().check_end_names = false;
    let mut buf = Vec::new();
    let mut prev = 0usize;
    let mut depth = 0usize;
    let mut sptree_child_depth: Option<usize> = None;
    let mut shape: Option<ShapeBuild> = None;
    let mut out = Vec::new();

    loop {
        buf.clear();
        let event = reader.read_event_into(&mut buf).map_err(|e| e.to_string())?;
        let end = reader.buffer_position() as usize;
        let span = prev..end;
        prev = end;
        match event {
            Event::Start(ref e) => {
                let ln_owned = String::from_utf8_lossy(local_name(e.name().as_ref())).into_owned();
                let ln = ln_owned.as_str();
                if shape.is_none()
                    && sptree_child_depth == Some(depth)
                    && SHAPE_TAGS.contains(&ln)
                {
                    shape = Some(ShapeBuild::new(ln, depth, span.clone()));
                } else if let Some(s) = shape.as_mut() {
                    s.open(ln, e, depth, span.clone(), false, xml);
                } else if ln == "spTree" {
                    sptree_child_depth = Some(depth + 1);
                }
                depth += 1;
            }
            Event::Empty(ref e) => {
                let ln_owned = String::from_utf8_lossy(local_name(e.name().as_ref())).into_owned();
                let ln = ln_owned.as_str();
                if let Some(s) = shape.as_mut() {
                    s.open(ln, e, depth, span.clone(), true, xml);
                }
            }
            Event::End(ref e) => {
                depth = depth.saturating_sub(1);
                let ln_owned = String::from_utf8_lossy(local_name(e.name().as_ref())).into_owned();
                let ln = ln_owned.as_str();
                let finished = shape
                    .as_ref()
                    .map(|s| depth == s.depth && ln == s.kind_tag)
                    .unwrap_or(false);
                if finished {
                    let s = shape.take().expect("shape context present");
                    out.push(s.finish(span.clone()));
                } else if let Some(s) = shape.as_mut() {
                    s.close(ln, depth, span.clone(), xml);
                } else if ln == "spTree" && sptree_child_depth == Some(depth + 1) {
                    sptree_child_depth = None;
                }
            }
            Event::Text(ref t) => {
                if let Some(s) = shape.as_mut() {
                    let text = t.unescape().map_err(|e| e.to_string())?;
                    s.text(&text);
                }
            }
            Event::CData(ref c) => {
                if let Some(s) = shape.as_mut() {
                    let text = String::from_utf8_lossy(c).into_owned();
                    s.text(&text);
                }
            }
            Event::Eof => break,
            _ => {}
        }
    }
    let (models, spans) = out.into_iter().unzip();
    Ok((models, spans))
}

/// Parsed `<p:presentation>` facts needed for (de)serialization.
pub(crate) struct PresInfo {
    pub width_emu: i64,
    pub height_emu: i64,
    pub slide_rids: Vec<String>,
    pub sld_id_lst: Option<ElemSpan>,
}

pub(crate) fn parse_presentation(xml: &[u8]) -> Result<PresInfo, String> {
    let mut reader = Reader::from_reader(xml);
    reader.config_mut().check_end_names = false;
    let mut buf = Vec::new();
    let mut prev = 0usize;
    let mut info = PresInfo {
        width_emu: 12_192_000,
        height_emu: 6_858_000,
        slide_rids: Vec::new(),
        sld_id_lst: None,
    };
    let mut lst_open: Option<Range<usize>> = None;
    loop {
        buf.clear();
        let event = reader.read_event_into(&mut buf).map_err(|e| e.to_string())?;
        let end = reader.buffer_position() as usize;
        let span = prev..end;
        prev = end;
        match event {
            Event::Start(ref e) | Event::Empty(ref e) => {
                let empty = matches!(event, Event::Empty(_));
                let ln = local_name(e.name().as_ref()).to_vec();
                match ln.as_slice() {
                    b"sldSz" => {
                        info.width_emu = attr_i64(e, b"cx").unwrap_or(info.width_emu);
                        info.height_emu = attr_i64(e, b"cy").unwrap_or(info.height_emu);
                    }
                    b"sldIdLst" => {
                        if empty {
                            info.sld_id_lst = Some(ElemSpan::empty_at(span.clone()));
                        } else {
                            lst_open = Some(span.clone());
                        }
                    }
                    b"sldId" => {
                        if let Some(rid) = sld_rid(e) {
                            info.slide_rids.push(rid);
                        }
                    }
                    _ => {}
                }
            }
            Event::End(ref e) => {
                if local_name(e.name().as_ref()) == b"sldIdLst" {
                    if let Some(open) = lst_open.take() {
                        info.sld_id_lst = Some(ElemSpan { open, close: span.clone() });
                    }
                }
            }
            Event::Eof => break,
            _ => {}
        }
    }
    Ok(info)
}

/// `<p:sldId id="256" r:id="rId2"/>`: both attributes have local name `id`,
/// so the relationship id is matched on the qualified name.
fn sld_rid(start: &BytesStart) -> Option<String> {
    for attr in start.attributes().flatten() {
        if attr.key.as_ref() == b"r:id" || attr.key.as_ref().ends_with(b":id") {
            return attr.unescape_value().ok().map(|v| v.into_owned());
        }
    }
    None
}

pub(crate) fn parse_rels(xml: &[u8]) -> Result<Vec<Relationship>, String> {
    let mut reader = Reader::from_reader(xml);
    reader.config_mut().check_end_names = false;
    let mut buf = Vec::new();
    let mut rels = Vec::new();
    loop {
        buf.clear();
        match reader.read_event_into(&mut buf).map_err(|e| e.to_string())? {
            Event::Start(ref e) | Event::Empty(ref e) => {
                if local_name(e.name().as_ref()) == b"Relationship" {
                    rels.push(Relationship {
                        id: attr_local(e, b"Id").unwrap_or_default(),
                        rel_type: attr_local(e, b"Type").unwrap_or_default(),
                        target: attr_local(e, b"Target").unwrap_or_default(),
                        external: attr_local(e, b"TargetMode").as_deref() == Some("External"),
                    });
                }
            }
            Event::Eof => break,
            _ => {}
        }
    }
    Ok(rels)
}

pub(crate) fn rels_part_for(part: &str) -> String {
    match part.rfind('/') {
        Some(i) => format!("{}/_rels/{}.rels", &part[..i], &part[i + 1..]),
        None => format!("_rels/{part}.rels"),
    }
}

/// Extract speaker-notes text: the text of the `body` placeholder, falling
/// back to all shape text.
pub(crate) fn notes_text_from_xml(xml: &[u8]) -> Result<String, String> {
    let (shapes, _) = parse_slide_xml(xml)?;
    if let Some(body) = shapes
        .iter()
        .find(|s| s.placeholder_type.as_deref() == Some("body"))
    {
        return Ok(body.text());
    }
    Ok(shapes
        .iter()
        .map(ShapeModel::text)
        .filter(|t| !t.is_empty())
        .collect::<Vec<_>>()
        .join("\n"))
}

/// Parse a `.pptx` byte stream into a [`DeckModel`].
pub fn parse_deck(bytes: &[u8]) -> Result<DeckModel, DeckError> {
    let package = Package::from_bytes(bytes)?;
    let root_rels_xml = package
        .get("_rels/.rels")
        .ok_or(DeckError::MissingPresentationPart)?;
    let root_rels = parse_rels(root_rels_xml).map_err(|detail| DeckError::MalformedXML {
        part: "_rels/.rels".into(),
        detail,
    })?;
    let pres_part = root_rels
        .iter()
        .find(|r| r.rel_type.ends_with("/officeDocument"))
        .map(|r| resolve_target("", &r.target))
        .ok_or(DeckError::MissingPresentationPart)?;
    let pres_xml = package
        .get(&pres_part)
        .ok_or(DeckError::MissingPresentationPart)?;
    let pres = parse_presentation(pres_xml).map_err(|detail| DeckError::MalformedXML {
        part: pres_part.clone(),
        detail,
    })?;
    let pres_rels_part = rels_part_for(&pres_part);
    let pres_rels = match package.get(&pres_rels_part) {
        Some(xml) => parse_rels(xml).map_err(|detail| DeckError::MalformedXML {
            part: pres_rels_part.clone(),
            detail,
        })?,
        None => Vec::new(),
    };

    let mut slides = Vec::new();
    let mut dropped = BTreeSet::new();
    for rid in pres.slide_rids.iter() {
        let rel = pres_rels
            .iter()
            .find(|r| &r.id == rid)
            .ok_or_else(|| DeckError::RelationshipConflict(format!("presentation references missing {rid}")))?;
        let part = resolve_target(&pres_part, &rel.target);
        let xml = package
            .get(&part)
            .ok_or_else(|| DeckError::MalformedXML {
                part: part.clone(),
                detail: "slide part missing from package".into(),
            })?
            .to_vec();
        let (mut shapes, spans) = parse_slide_xml(&xml).map_err(|detail| DeckError::MalformedXML {
            part: part.clone(),
            detail,
        })?;
        let rels_part = rels_part_for(&part);
        let rels = match package.get(&rels_part) {
            Some(raw) => RelSet {
                rels: parse_rels(raw).map_err(|detail| DeckError::MalformedXML {
                    part: rels_part.clone(),
                    detail,
                })?,
                raw: Some(raw.to_vec()),
            },
            None => RelSet::default(),
        };
        for (model, span) in shapes.iter_mut().zip(&spans) {
            if let Some(rid) = &span.blip_rid {
                model.image_ref = rels.find(rid).map(|r| resolve_target(&part, &r.target));
            }
        }
        let mut notes_text = None;
        let mut notes_xml = None;
        let mut notes_rels_raw = None;
        if let Some(notes_rel) = rels.find_by_type_suffix("/notesSlide") {
            let notes_part = resolve_target(&part, &notes_rel.target);
            if let Some(nx) = package.get(&notes_part) {
                notes_text = Some(notes_text_from_xml(nx).map_err(|detail| {
                    DeckError::MalformedXML { part: notes_part.clone(), detail }
                })?);
                notes_xml = Some(nx.to_vec());
                let nr = rels_part_for(&notes_part);
                notes_rels_raw = package.get(&nr).map(|b| b.to_vec());
                dropped.insert(notes_part.clone());
                dropped.insert(nr);
            }
        }
        dropped.insert(part.clone());
        dropped.insert(rels_part);
        slides.push(SlideModel {
            xml,
            rels,
            shapes,
            spans,
            notes_text,
            notes_xml,
            notes_rels_raw,
            notes_dirty: false,
        });
    }

    Ok(DeckModel {
        slide_width_emu: pres.width_emu,
        slide_height_emu: pres.height_emu,
        slides,
        package,
        pres_part,
        dropped_parts: dropped,
    })
}

/// Re-derive a slide's shapes and spans after its XML changed.
pub(crate) fn reparse_slide(slide: &mut SlideModel, slide_part_hint: &str) -> Result<(), DeckError> {
    let (mut shapes, spans) =
        parse_slide_xml(&slide.xml).map_err(|detail| DeckError::MalformedXML {
            part: slide_part_hint.to_string(),
            detail,
        })?;
    for (model, span) in shapes.iter_mut().zip(&spans) {
        if let Some(rid) = &span.blip_rid {
            model.image_ref = slide
                .rels
                .find(rid)
                .map(|r| resolve_target("ppt/slides/slide.xml", &r.target));
        }
    }
    slide.shapes = shapes;
    slide.spans = spans;
    Ok(())
}
