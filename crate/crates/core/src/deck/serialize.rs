//! Serialize a [`DeckModel`] back to `.pptx` bytes.
//!
//! Preserved parts pass through untouched. Slide parts are written from the
//! model's current XML bytes under renumbered names, the presentation slide
//! list is spliced in place, and `[Content_Types].xml` plus relationship
//! parts are rebuilt only where the slide set changed.

use super::package::{relative_target, resolve_target, Package};
use super::parse::{parse_presentation, parse_rels, rels_part_for};
use super::xmlutil::{attr_local, local_name, splice};
use super::{DeckError, DeckModel, Relationship, SlideModel};

use quick_xml::events::Event;
use quick_xml::Reader;

const REL_TYPE_SLIDE: &str =
    "http://schemas.openxmlformats.org/officeDocument/2006/relationships/slide";
const REL_TYPE_NOTES_SLIDE: &str =
    "http://schemas.openxmlformats.org/officeDocument/2006/relationships/notesSlide";
const REL_TYPE_NOTES_MASTER: &str =
    "http://schemas.openxmlformats.org/officeDocument/2006/relationships/notesMaster";
const CT_SLIDE: &str =
    "application/vnd.openxmlformats-officedocument.presentationml.slide+xml";
const CT_NOTES_SLIDE: &str =
    "application/vnd.openxmlformats-officedocument.presentationml.notesSlide+xml";

pub fn serialize_deck(model: &DeckModel) -> Result<Vec<u8>, DeckError> {
    check_image_refs(model)?;

    let content_types_name = "[Content_Types].xml";
    let pres_rels_part = rels_part_for(&model.pres_part);

    let mut out = Package::empty();
    for name in model.package.names() {
        if name == content_types_name
            || name == model.pres_part
            || name == pres_rels_part
            || model.dropped_parts.contains(name)
        {
            continue;
        }
        out.set(name, model.package.get(name).expect("listed part").to_vec());
    }

    // Slide and notes parts, renumbered by output position.
    for (i, slide) in model.slides.iter().enumerate() {
        let slide_part = format!("ppt/slides/slide{}.xml", i + 1);
        out.set(slide_part.clone(), slide.xml.clone());
        out.set(
            rels_part_for(&slide_part),
            slide_rels_bytes(slide, i)?,
        );
        if let Some(notes_xml) = &slide.notes_xml {
            let notes_part = format!("ppt/notesSlides/notesSlide{}.xml", i + 1);
            out.set(notes_part.clone(), notes_xml.clone());
            out.set(
                rels_part_for(&notes_part),
                notes_rels_bytes(model, slide, i)?,
            );
        }
    }

    // Presentation part: splice the slide id list, rebuild its rels.
    let pres_xml = model
        .package
        .get(&model.pres_part)
        .ok_or(DeckError::MissingPresentationPart)?;
    let pres = parse_presentation(pres_xml).map_err(|detail| DeckError::MalformedXML {
        part: model.pres_part.clone(),
        detail,
    })?;
    let mut kept_rels: Vec<Relationship> = match model.package.get(&pres_rels_part) {
        Some(xml) => parse_rels(xml)
            .map_err(|detail| DeckError::MalformedXML { part: pres_rels_part.clone(), detail })?
            .into_iter()
            .filter(|r| r.rel_type != REL_TYPE_SLIDE)
            .collect(),
        None => Vec::new(),
    };
    let rid_base = kept_rels
        .iter()
        .filter_map(|r| r.id.strip_prefix("rId").and_then(|n| n.parse::<u64>().ok()))
        .max()
        .unwrap_or(0)
        + 1;
    let mut slide_entries = String::new();
    for i in 0..model.slides.len() {
        let rid = format!("rId{}", rid_base + i as u64);
        slide_entries.push_str(&format!("<p:sldId id=\"{}\" r:id=\"{rid}\"/>", 256 + i));
        kept_rels.push(Relationship {
            id: rid,
            rel_type: REL_TYPE_SLIDE.to_string(),
            target: format!("slides/slide{}.xml", i + 1),
            external: false,
        });
    }
    let new_pres = match &pres.sld_id_lst {
        Some(span) if span.open == span.whole() || span.inner().is_empty() => splice(
            pres_xml,
            span.whole(),
            format!("<p:sldIdLst>{slide_entries}</p:sldIdLst>").as_bytes(),
        ),
        Some(span) => splice(pres_xml, span.inner(), slide_entries.as_bytes()),
        None if model.slides.is_empty() => pres_xml.to_vec(),
        None => {
            return Err(DeckError::MalformedXML {
                part: model.pres_part.clone(),
                detail: "presentation has no sldIdLst to hold slides".into(),
            })
        }
    };
    out.set(model.pres_part.clone(), new_pres);
    out.set(pres_rels_part, build_rels_xml(&kept_rels));

    // Content types: original defaults and still-present overrides, plus the
    // renumbered slide/notes overrides and any image defaults we now need.
    let (mut defaults, overrides) = match model.package.get(content_types_name) {
        Some(xml) => parse_content_types(xml).map_err(|detail| DeckError::MalformedXML {
            part: content_types_name.to_string(),
            detail,
        })?,
        None => (Vec::new(), Vec::new()),
    };
    for required in ["rels", "xml", "png", "jpeg", "jpg"] {
        let needed = match required {
            "rels" | "xml" => true,
            ext => out.names().any(|n| n.ends_with(&format!(".{ext}"))),
        };
        if needed && !defaults.iter().any(|(e, _)| e.eq_ignore_ascii_case(required)) {
            let ct = match required {
                "rels" => "application/vnd.openxmlformats-package.relationships+xml".to_string(),
                "xml" => "application/xml".to_string(),
                "jpg" => "image/jpeg".to_string(),
                ext => format!("image/{ext}"),
            };
            defaults.push((required.to_string(), ct));
        }
    }
    let mut new_overrides: Vec<(String, String)> = overrides
        .into_iter()
        .filter(|(part, _)| out.contains(part.trim_start_matches('/')))
        .collect();
    for (i, slide) in model.slides.iter().enumerate() {
        push_override(
            &mut new_overrides,
            format!("/ppt/slides/slide{}.xml", i + 1),
            CT_SLIDE,
        );
        if slide.notes_xml.is_some() {
            push_override(
                &mut new_overrides,
                format!("/ppt/notesSlides/notesSlide{}.xml", i + 1),
                CT_NOTES_SLIDE,
            );
        }
    }
    out.set(
        content_types_name,
        build_content_types(&defaults, &new_overrides),
    );

    out.to_bytes()
}

fn push_override(list: &mut Vec<(String, String)>, part: String, ct: &str) {
    if !list.iter().any(|(p, _)| p == &part) {
        list.push((part, ct.to_string()));
    }
}

/// Every picture relationship must resolve to a media part that will exist
/// in the output.
fn check_image_refs(model: &DeckModel) -> Result<(), DeckError> {
    for (i, slide) in model.slides.iter().enumerate() {
        for span in &slide.spans {
            if let Some(rid) = &span.blip_rid {
                let rel = slide.rels.find(rid).ok_or_else(|| {
                    DeckError::DanglingImageRef(format!("slide {i}: no relationship {rid}"))
                })?;
                if rel.external {
                    continue;
                }
                let part = resolve_target("ppt/slides/slide.xml", &rel.target);
                if !model.package.contains(&part) {
                    return Err(DeckError::DanglingImageRef(format!(
                        "slide {i}: {rid} -> {part} missing from package"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Relationship bytes for one slide at its output position. Original bytes
/// are reused verbatim when nothing about the set changed.
fn slide_rels_bytes(slide: &SlideModel, out_index: usize) -> Result<Vec<u8>, DeckError> {
    let mut desired: Vec<Relationship> = slide
        .rels
        .rels
        .iter()
        .filter(|r| r.rel_type != REL_TYPE_NOTES_SLIDE)
        .cloned()
        .collect();
    if slide.notes_xml.is_some() {
        let id = slide
            .rels
            .rels
            .iter()
            .find(|r| r.rel_type == REL_TYPE_NOTES_SLIDE)
            .map(|r| r.id.clone())
            .unwrap_or_else(|| next_free_id(&desired));
        desired.push(Relationship {
            id,
            rel_type: REL_TYPE_NOTES_SLIDE.to_string(),
            target: format!("../notesSlides/notesSlide{}.xml", out_index + 1),
            external: false,
        });
    }
    if let Some(raw) = &slide.rels.raw {
        if desired == slide.rels.rels {
            return Ok(raw.clone());
        }
    }
    Ok(build_rels_xml(&desired))
}

fn next_free_id(rels: &[Relationship]) -> String {
    let max = rels
        .iter()
        .filter_map(|r| r.id.strip_prefix("rId").and_then(|n| n.parse::<u64>().ok()))
        .max()
        .unwrap_or(0);
    format!("rId{}", max + 1)
}

/// Relationships for a notes part: its slide, plus the notes master when the
/// package has one.
fn notes_rels_bytes(
    model: &DeckModel,
    slide: &SlideModel,
    out_index: usize,
) -> Result<Vec<u8>, DeckError> {
    let slide_part = format!("ppt/slides/slide{}.xml", out_index + 1);
    let notes_part = format!("ppt/notesSlides/notesSlide{}.xml", out_index + 1);
    if let Some(raw) = &slide.notes_rels_raw {
        if !slide.notes_dirty {
            let parsed = parse_rels(raw).map_err(|detail| DeckError::MalformedXML {
                part: rels_part_for(&notes_part),
                detail,
            })?;
            let slide_target_ok = parsed.iter().any(|r| {
                r.rel_type == REL_TYPE_SLIDE
                    && resolve_target(&notes_part, &r.target) == slide_part
            });
            if slide_target_ok {
                return Ok(raw.clone());
            }
            // Same rels with the slide target redirected.
            let patched: Vec<Relationship> = parsed
                .into_iter()
                .map(|mut r| {
                    if r.rel_type == REL_TYPE_SLIDE {
                        r.target = relative_target(&notes_part, &slide_part);
                    }
                    r
                })
                .collect();
            return Ok(build_rels_xml(&patched));
        }
    }
    let mut rels = vec![Relationship {
        id: "rId1".to_string(),
        rel_type: REL_TYPE_SLIDE.to_string(),
        target: relative_target(&notes_part, &slide_part),
        external: false,
    }];
    if let Some(master) = model
        .package
        .names()
        .find(|n| n.starts_with("ppt/notesMasters/notesMaster") && n.ends_with(".xml"))
    {
        rels.push(Relationship {
            id: "rId2".to_string(),
            rel_type: REL_TYPE_NOTES_MASTER.to_string(),
            target: relative_target(&notes_part, master),
            external: false,
        });
    }
    Ok(build_rels_xml(&rels))
}

pub(crate) fn build_rels_xml(rels: &[Relationship]) -> Vec<u8> {
    let mut xml = String::from(
        "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\
         <Relationships xmlns=\"http://schemas.openxmlformats.org/package/2006/relationships\">",
    );
    for r in rels {
        xml.push_str(&format!(
            "<Relationship Id=\"{}\" Type=\"{}\" Target=\"{}\"{}/>",
            r.id,
            r.rel_type,
            r.target,
            if r.external { " TargetMode=\"External\"" } else { "" }
        ));
    }
    xml.push_str("</Relationships>");
    xml.into_bytes()
}

type ContentTypes = (Vec<(String, String)>, Vec<(String, String)>);

fn parse_content_types(xml: &[u8]) -> Result<ContentTypes, String> {
    let mut reader = Reader::from_reader(xml);
    reader.config_mut().check_end_names = false;
    let mut buf = Vec::new();
    let mut defaults = Vec::new();
    let mut overrides = Vec::new();
    loop {
        buf.clear();
        match reader.read_event_into(&mut buf).map_err(|e| e.to_string())? {
            Event::Start(ref e) | Event::Empty(ref e) => match local_name(e.name().as_ref()) {
                b"Default" => {
                    if let (Some(ext), Some(ct)) =
                        (attr_local(e, b"Extension"), attr_local(e, b"ContentType"))
                    {
                        defaults.push((ext, ct));
                    }
                }
                b"Override" => {
                    if let (Some(part), Some(ct)) =
                        (attr_local(e, b"PartName"), attr_local(e, b"ContentType"))
                    {
                        overrides.push((part, ct));
                    }
                }
                _ => {}
            },
            Event::Eof => break,
            _ => {}
        }
    }
    Ok((defaults, overrides))
}

fn build_content_types(defaults: &[(String, String)], overrides: &[(String, String)]) -> Vec<u8> {
    let mut xml = String::from(
        "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\
         <Types xmlns=\"http://schemas.openxmlformats.org/package/2006/content-types\">",
    );
    for (ext, ct) in defaults {
        xml.push_str(&format!("<Default Extension=\"{ext}\" ContentType=\"{ct}\"/>"));
    }
    for (part, ct) in overrides {
        xml.push_str(&format!("<Override PartName=\"{part}\" ContentType=\"{ct}\"/>"));
    }
    xml.push_str("</Types>");
    xml.into_bytes()
}
