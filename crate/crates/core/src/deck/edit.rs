//! Splice-based slide edits and the edit-plan interpreter.
//!
//! Edits rewrite only the byte spans of the touched elements, so slides the
//! plan never names keep their XML bit-identical. After every edit the slide
//! is re-parsed so the model stays in sync with its bytes.

use std::ops::Range;
use std::path::Path;

use super::package::{relative_target, Package};
use super::parse::reparse_slide;
use super::xmlutil::{escape_text, local_name, splice, ElemSpan};
use super::{
    DeckError, DeckModel, EditOp, EditPlan, Rect, Relationship, ShapeKind, SlideModel,
    EMU_PER_PIXEL,
};

const REL_TYPE_IMAGE: &str =
    "http://schemas.openxmlformats.org/officeDocument/2006/relationships/image";

/// Apply a declarative plan to a template deck, producing a new deck that
/// contains exactly the cloned-and-edited slides in plan order. The template
/// model is never mutated; its theme, masters, and media carry over
/// byte-for-byte.
pub fn apply_edit_plan(template: &DeckModel, plan: &EditPlan) -> Result<DeckModel, DeckError> {
    validate_plan(template, plan)?;
    let mut out = DeckModel {
        slide_width_emu: template.slide_width_emu,
        slide_height_emu: template.slide_height_emu,
        slides: Vec::new(),
        package: template.package.clone(),
        pres_part: template.pres_part.clone(),
        dropped_parts: template.dropped_parts.clone(),
    };
    for op in &plan.ops {
        match op {
            EditOp::CloneTemplateSlide { template_index } => {
                out.slides.push(template.slides[*template_index].clone());
            }
            EditOp::SetText { out_slide, shape_id, paragraphs } => {
                slide_set_text(&mut out.slides[*out_slide], *out_slide, *shape_id, paragraphs)?;
            }
            EditOp::ReplaceImage { out_slide, shape_id, asset_path } => {
                let (w, h) = (out.slide_width_emu, out.slide_height_emu);
                slide_replace_image(
                    &mut out.slides[*out_slide],
                    *out_slide,
                    *shape_id,
                    asset_path,
                    &mut out.package,
                    (w, h),
                )?;
            }
            EditOp::DeleteShape { out_slide, shape_id } => {
                slide_delete_shape(&mut out.slides[*out_slide], *out_slide, *shape_id)?;
            }
            EditOp::SetNotes { out_slide, text } => {
                slide_set_notes(&mut out.slides[*out_slide], text);
            }
        }
    }
    Ok(out)
}

fn validate_plan(template: &DeckModel, plan: &EditPlan) -> Result<(), DeckError> {
    let mut clone_sources: Vec<usize> = Vec::new();
    for op in &plan.ops {
        let check_slide = |out_slide: usize| -> Result<usize, DeckError> {
            if out_slide >= clone_sources.len() {
                return Err(DeckError::PlanInvalid(format!(
                    "op targets out_slide {out_slide} before a clone produced it"
                )));
            }
            Ok(clone_sources[out_slide])
        };
        match op {
            EditOp::CloneTemplateSlide { template_index } => {
                if *template_index >= template.slides.len() {
                    return Err(DeckError::UnknownTemplateIndex {
                        index: *template_index,
                        slide_count: template.slides.len(),
                    });
                }
                clone_sources.push(*template_index);
            }
            EditOp::SetText { out_slide, shape_id, .. }
            | EditOp::DeleteShape { out_slide, shape_id } => {
                let src = check_slide(*out_slide)?;
                if template.slides[src].shape(*shape_id).is_none() {
                    return Err(DeckError::UnknownShapeId { slide: *out_slide, shape_id: *shape_id });
                }
            }
            EditOp::ReplaceImage { out_slide, shape_id, asset_path } => {
                let src = check_slide(*out_slide)?;
                if template.slides[src].shape(*shape_id).is_none() {
                    return Err(DeckError::UnknownShapeId { slide: *out_slide, shape_id: *shape_id });
                }
                if !asset_path.exists() {
                    return Err(DeckError::AssetUnreadable {
                        path: asset_path.clone(),
                        detail: "file does not exist".into(),
                    });
                }
            }
            EditOp::SetNotes { out_slide, .. } => {
                check_slide(*out_slide)?;
            }
        }
    }
    Ok(())
}

/// Set a slide's speaker notes in place.
pub fn set_speaker_notes(model: &mut DeckModel, slide_index: usize, text: &str) -> Result<(), DeckError> {
    if slide_index >= model.slides.len() {
        return Err(DeckError::IndexOutOfRange {
            index: slide_index,
            slide_count: model.slides.len(),
        });
    }
    slide_set_notes(&mut model.slides[slide_index], text);
    Ok(())
}

/// Remove a slide's notes part entirely.
pub fn clear_speaker_notes(model: &mut DeckModel, slide_index: usize) -> Result<(), DeckError> {
    if slide_index >= model.slides.len() {
        return Err(DeckError::IndexOutOfRange {
            index: slide_index,
            slide_count: model.slides.len(),
        });
    }
    let slide = &mut model.slides[slide_index];
    slide.notes_text = None;
    slide.notes_xml = None;
    slide.notes_rels_raw = None;
    slide.notes_dirty = true;
    Ok(())
}

fn slide_set_notes(slide: &mut SlideModel, text: &str) {
    slide.notes_text = Some(text.to_string());
    slide.notes_xml = Some(build_notes_xml(text));
    slide.notes_rels_raw = None;
    slide.notes_dirty = true;
}

pub(crate) fn build_notes_xml(text: &str) -> Vec<u8> {
    let mut paras = String::new();
    for line in text.split('\n') {
        paras.push_str("<a:p><a:r><a:t>");
        paras.push_str(&escape_text(line));
        paras.push_str("</a:t></a:r></a:p>");
    }
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\
         <p:notes xmlns:a=\"http://schemas.openxmlformats.org/drawingml/2006/main\" \
         xmlns:r=\"http://schemas.openxmlformats.org/officeDocument/2006/relationships\" \
         xmlns:p=\"http://schemas.openxmlformats.org/presentationml/2006/main\">\
         <p:cSld><p:spTree>\
         <p:nvGrpSpPr><p:cNvPr id=\"1\" name=\"\"/><p:cNvGrpSpPr/><p:nvPr/></p:nvGrpSpPr><p:grpSpPr/>\
         <p:sp><p:nvSpPr><p:cNvPr id=\"2\" name=\"Notes Placeholder 1\"/>\
         <p:cNvSpPr><a:spLocks noGrp=\"1\"/></p:cNvSpPr>\
         <p:nvPr><p:ph type=\"body\" idx=\"1\"/></p:nvPr></p:nvSpPr><p:spPr/>\
         <p:txBody><a:bodyPr/><a:lstStyle/>{paras}</p:txBody></p:sp>\
         </p:spTree></p:cSld><p:clrMapOvr><a:masterClrMapping/></p:clrMapOvr></p:notes>"
    )
    .into_bytes()
}

fn shape_index(slide: &SlideModel, slide_no: usize, shape_id: u32) -> Result<usize, DeckError> {
    slide
        .shapes
        .iter()
        .position(|s| s.shape_id == shape_id)
        .ok_or(DeckError::UnknownShapeId { slide: slide_no, shape_id })
}

fn raw_of<'a>(xml: &'a [u8], span: &ElemSpan) -> &'a [u8] {
    &xml[span.whole()]
}

fn slide_set_text(
    slide: &mut SlideModel,
    slide_no: usize,
    shape_id: u32,
    paragraphs: &[String],
) -> Result<(), DeckError> {
    let idx = shape_index(slide, slide_no, shape_id)?;
    if !slide.shapes[idx].is_text_capable() {
        return Err(DeckError::IllegalEdit(format!(
            "shape {shape_id} is a {:?} and cannot hold text",
            slide.shapes[idx].kind
        )));
    }
    let spans = &slide.spans[idx];
    let xml = &slide.xml;

    let body_pr = spans
        .body_pr
        .as_ref()
        .map(|s| raw_of(xml, s).to_vec())
        .unwrap_or_else(|| b"<a:bodyPr/>".to_vec());
    let lst_style = spans
        .lst_style
        .as_ref()
        .map(|s| raw_of(xml, s).to_vec())
        .unwrap_or_default();
    let ppr = spans
        .first_ppr
        .as_ref()
        .map(|s| String::from_utf8_lossy(raw_of(xml, s)).into_owned())
        .unwrap_or_default();
    // Inherit run styling from the first run; an end-paragraph marker is an
    // equivalent fallback once renamed.
    let rpr = spans
        .first_rpr
        .as_ref()
        .map(|s| String::from_utf8_lossy(raw_of(xml, s)).into_owned())
        .or_else(|| {
            spans.first_end_pr.as_ref().map(|s| {
                String::from_utf8_lossy(raw_of(xml, s))
                    .replace("endParaRPr", "rPr")
            })
        })
        .unwrap_or_default();

    let mut inner: Vec<u8> = Vec::new();
    inner.extend_from_slice(&body_pr);
    inner.extend_from_slice(&lst_style);
    if paragraphs.is_empty() {
        inner.extend_from_slice(format!("<a:p>{ppr}</a:p>").as_bytes());
    }
    for paragraph in paragraphs {
        inner.extend_from_slice(b"<a:p>");
        inner.extend_from_slice(ppr.as_bytes());
        for (li, line) in paragraph.split('\n').enumerate() {
            if li > 0 {
                inner.extend_from_slice(b"<a:br/>");
            }
            inner.extend_from_slice(
                format!("<a:r>{rpr}<a:t>{}</a:t></a:r>", escape_text(line)).as_bytes(),
            );
        }
        inner.extend_from_slice(b"</a:p>");
    }

    let new_xml = match &spans.txbody {
        Some(tx) => splice(xml, tx.inner(), &inner),
        None => {
            // Shape without a text body: insert one just before the close tag.
            let mut body = b"<p:txBody>".to_vec();
            body.extend_from_slice(&inner);
            body.extend_from_slice(b"</p:txBody>");
            let at = spans.elem.close.start;
            splice(xml, at..at, &body)
        }
    };
    slide.xml = new_xml;
    reparse_slide(slide, "slide")
}

fn slide_delete_shape(slide: &mut SlideModel, slide_no: usize, shape_id: u32) -> Result<(), DeckError> {
    let idx = shape_index(slide, slide_no, shape_id)?;
    let range = slide.spans[idx].elem.whole();
    slide.xml = splice(&slide.xml, range, b"");
    reparse_slide(slide, "slide")
}

struct LetterboxedImage {
    rect: Rect,
    rid: String,
}

/// Register the image as a media part plus slide relationship and compute its
/// letterboxed placement inside `target_box`.
fn prepare_image(
    slide: &mut SlideModel,
    package: &mut Package,
    path: &Path,
    target_box: Rect,
) -> Result<LetterboxedImage, DeckError> {
    let unreadable = |detail: String| DeckError::AssetUnreadable { path: path.to_path_buf(), detail };
    let bytes = std::fs::read(path).map_err(|e| unreadable(e.to_string()))?;
    let (px_w, px_h) = image::image_dimensions(path).map_err(|e| unreadable(e.to_string()))?;
    let ext = match path.extension().and_then(|e| e.to_str()).map(str::to_lowercase) {
        Some(ext) if ["png", "jpg", "jpeg"].contains(&ext.as_str()) => ext,
        other => {
            return Err(unreadable(format!("unsupported image extension {other:?}")));
        }
    };
    let n = package.next_index("ppt/media/image", &format!(".{ext}"));
    let media_part = format!("ppt/media/image{n}.{ext}");
    package.set(media_part.clone(), bytes);
    let media_target = relative_target("ppt/slides/slide.xml", &media_part);

    let rid = slide.rels.next_id();
    slide.rels.rels.push(Relationship {
        id: rid.clone(),
        rel_type: REL_TYPE_IMAGE.to_string(),
        target: media_target,
        external: false,
    });
    slide.rels.raw = None;

    let img_w = px_w as i64 * EMU_PER_PIXEL;
    let img_h = px_h as i64 * EMU_PER_PIXEL;
    let scale = f64::min(
        target_box.width as f64 / img_w as f64,
        target_box.height as f64 / img_h as f64,
    );
    let w = (img_w as f64 * scale).round() as i64;
    let h = (img_h as f64 * scale).round() as i64;
    let rect = Rect {
        left: target_box.left + (target_box.width - w) / 2,
        top: target_box.top + (target_box.height - h) / 2,
        width: w,
        height: h,
    };
    Ok(LetterboxedImage { rect, rid })
}

fn slide_replace_image(
    slide: &mut SlideModel,
    slide_no: usize,
    shape_id: u32,
    path: &Path,
    package: &mut Package,
    slide_size: (i64, i64),
) -> Result<(), DeckError> {
    let idx = shape_index(slide, slide_no, shape_id)?;
    let shape = slide.shapes[idx].clone();
    let target_box = if shape.has_geometry {
        shape.bbox
    } else {
        Rect { left: 0, top: 0, width: slide_size.0, height: slide_size.1 }
    };

    match shape.kind {
        ShapeKind::Picture => {
            let img = prepare_image(slide, package, path, target_box)?;
            let spans = &slide.spans[idx];
            let blip_span = spans.blip.as_ref().ok_or_else(|| {
                DeckError::IllegalEdit(format!("picture {shape_id} has no blip element"))
            })?;
            let new_blip = rebuild_blip(&slide.xml[blip_span.open.clone()], &img.rid)?;
            let mut edits: Vec<Splice> = vec![(blip_span.whole(), new_blip)];
            if let Some(off) = &spans.xfrm_off {
                edits.push((
                    off.whole(),
                    format!("<a:off x=\"{}\" y=\"{}\"/>", img.rect.left, img.rect.top).into_bytes(),
                ));
            }
            if let Some(ext) = &spans.xfrm_ext {
                edits.push((
                    ext.whole(),
                    format!("<a:ext cx=\"{}\" cy=\"{}\"/>", img.rect.width, img.rect.height)
                        .into_bytes(),
                ));
            }
            slide.xml = apply_splices(&slide.xml, edits);
        }
        ShapeKind::Placeholder => {
            let img = prepare_image(slide, package, path, target_box)?;
            let pic = format!(
                "<p:pic><p:nvPicPr><p:cNvPr id=\"{id}\" name=\"{name}\"/>\
                 <p:cNvPicPr><a:picLocks noChangeAspect=\"1\"/></p:cNvPicPr><p:nvPr/></p:nvPicPr>\
                 <p:blipFill><a:blip r:embed=\"{rid}\"/><a:stretch><a:fillRect/></a:stretch></p:blipFill>\
                 <p:spPr><a:xfrm><a:off x=\"{x}\" y=\"{y}\"/><a:ext cx=\"{cx}\" cy=\"{cy}\"/></a:xfrm>\
                 <a:prstGeom prst=\"rect\"><a:avLst/></a:prstGeom></p:spPr></p:pic>",
                id = shape.shape_id,
                name = escape_text(&shape.name),
                rid = img.rid,
                x = img.rect.left,
                y = img.rect.top,
                cx = img.rect.width,
                cy = img.rect.height,
            );
            let range = slide.spans[idx].elem.whole();
            slide.xml = splice(&slide.xml, range, pic.as_bytes());
        }
        other => {
            return Err(DeckError::IllegalEdit(format!(
                "replace_image targets pictures or placeholders, shape {shape_id} is a {other:?}"
            )));
        }
    }
    reparse_slide(slide, "slide")
}

/// Rebuild a `<a:blip>` start tag with the embed relationship swapped,
/// keeping every other attribute.
fn rebuild_blip(open_tag: &[u8], new_rid: &str) -> Result<Vec<u8>, DeckError> {
    let mut reader = quick_xml::Reader::from_reader(open_tag);
    let mut buf = Vec::new();
    let event = reader
        .read_event_into(&mut buf)
        .map_err(|e| DeckError::MalformedXML { part: "slide".into(), detail: e.to_string() })?;
    let start = match &event {
        quick_xml::events::Event::Start(e) | quick_xml::events::Event::Empty(e) => e.clone(),
        _ => {
            return Err(DeckError::MalformedXML {
                part: "slide".into(),
                detail: "blip span is not an element".into(),
            })
        }
    };
    let name = String::from_utf8_lossy(start.name().as_ref()).into_owned();
    let mut tag = format!("<{name}");
    let mut wrote_embed = false;
    for attr in start.attributes().flatten() {
        let key = String::from_utf8_lossy(attr.key.as_ref()).into_owned();
        if local_name(attr.key.as_ref()) == b"embed" {
            tag.push_str(&format!(" {key}=\"{new_rid}\""));
            wrote_embed = true;
        } else {
            let value = attr.unescape_value().unwrap_or_default();
            tag.push_str(&format!(" {key}=\"{}\"", escape_text(&value)));
        }
    }
    if !wrote_embed {
        tag.push_str(&format!(" r:embed=\"{new_rid}\""));
    }
    tag.push_str("/>");
    Ok(tag.into_bytes())
}

type Splice = (Range<usize>, Vec<u8>);

/// Apply non-overlapping byte splices in one pass (sorted back to front so
/// earlier offsets stay valid).
fn apply_splices(xml: &[u8], mut edits: Vec<Splice>) -> Vec<u8> {
    edits.sort_by_key(|e| std::cmp::Reverse(e.0.start));
    let mut out = xml.to_vec();
    for (range, bytes) in edits {
        out = splice(&out, range, &bytes);
    }
    out
}
