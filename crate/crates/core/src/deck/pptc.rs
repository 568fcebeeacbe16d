//! pptc metadata: the nested per-slide / per-shape description document fed
//! to the aesthetic distiller and the element mapper.

use serde_json::{json, Map, Value};

use super::{DeckModel, ShapeModel, SlideModel};

/// Describe a whole deck as `{"slide_i": {"shape_j": {...}}}`.
///
/// Geometry strings use integer points; shapes without explicit geometry
/// omit the size and position entries. Empty text is emitted as an empty
/// string.
pub fn describe_deck(model: &DeckModel) -> Value {
    let mut slides = Map::new();
    for (i, slide) in model.slides.iter().enumerate() {
        slides.insert(format!("slide_{i}"), describe_slide(slide));
    }
    Value::Object(slides)
}

/// One slide's `{"shape_j": {...}}` map.
pub fn describe_slide(slide: &SlideModel) -> Value {
    let mut shapes = Map::new();
    for (j, shape) in slide.shapes.iter().enumerate() {
        shapes.insert(format!("shape_{j}"), describe_shape(shape));
    }
    Value::Object(shapes)
}

fn describe_shape(shape: &ShapeModel) -> Value {
    let description = match &shape.placeholder_type {
        Some(ph) => format!("[{} id={} type={ph}]\n", shape.kind.pptc_name(), shape.shape_id),
        None => format!("[{} id={}]\n", shape.kind.pptc_name(), shape.shape_id),
    };
    let text = shape.text();
    let text_info = if text.is_empty() { String::new() } else { format!("{text}\n") };
    let mut obj = Map::new();
    obj.insert("pptc_description".into(), json!(description));
    if shape.has_geometry {
        obj.insert(
            "pptc_size_info".into(),
            json!(format!(
                "Size: height={}pt, width={}pt\n",
                shape.bbox.height_pt().round() as i64,
                shape.bbox.width_pt().round() as i64
            )),
        );
        obj.insert(
            "pptc_space_info".into(),
            json!(format!(
                "Visual Positions: left={}pt, top={}pt\n",
                shape.bbox.left_pt().round() as i64,
                shape.bbox.top_pt().round() as i64
            )),
        );
    }
    obj.insert("pptc_text_info".into(), json!(text_info));
    Value::Object(obj)
}
