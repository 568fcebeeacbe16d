//! Versioned prompt templates and the `{{placeholder}}` renderer.
//!
//! Templates are embedded at compile time and addressed by name. Rendering
//! replaces both `{{name}}` and `{{ name }}` forms so templates can keep the
//! spacing they were written with.

pub const DISTILL_CONTENT: &str = include_str!("../prompts/distill_content.txt");
pub const DISTILL_AESTHETIC: &str = include_str!("../prompts/distill_aesthetic.txt");
pub const REORGANIZE: &str = include_str!("../prompts/reorganize.txt");
pub const OUTLINE: &str = include_str!("../prompts/outline.txt");
pub const SELECT_LAYOUT: &str = include_str!("../prompts/select_layout.txt");
pub const MAP_ELEMENTS: &str = include_str!("../prompts/map_elements.txt");
pub const EXTRACT_SUBTOPICS: &str = include_str!("../prompts/extract_subtopics.txt");
pub const JUDGE_CONTENT_STRUCTURE: &str = include_str!("../prompts/judge_content_structure.txt");
pub const JUDGE_AESTHETIC_SIMILARITY: &str =
    include_str!("../prompts/judge_aesthetic_similarity.txt");
pub const JUDGE_CONTENT_QUALITY: &str = include_str!("../prompts/judge_content_quality.txt");
pub const JUDGE_VISUAL_QUALITY: &str = include_str!("../prompts/judge_visual_quality.txt");

/// Render a template by substituting `{{var}}` / `{{ var }}` placeholders.
///
/// Unknown placeholders are left in place so a missing variable shows up
/// verbatim in the rendered prompt instead of silently vanishing.
pub fn render(template: &str, vars: &[(&str, &str)]) -> String {
    let mut out = template.to_string();
    for (name, value) in vars {
        out = out.replace(&format!("{{{{{name}}}}}"), value);
        out = out.replace(&format!("{{{{ {name} }}}}"), value);
    }
    out
}

/// True if the rendered text still contains an unresolved `{{...}}` marker.
pub fn has_unresolved(text: &str) -> bool {
    if let Some(start) = text.find("{{") {
        if let Some(rest) = text[start + 2..].find("}}") {
            // Only flag short alnum-ish spans; JSON braces in prompts are fine.
            let inner = &text[start + 2..start + 2 + rest];
            return inner.len() < 64 && !inner.contains('{') && !inner.contains('\n');
        }
    }
    false
}
