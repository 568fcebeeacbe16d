//! Small helpers over quick-xml: local-name matching, attribute lookup,
//! escaping, and byte-span tracking for surgical edits.

use quick_xml::events::BytesStart;

/// Local part of a possibly prefixed XML name (`p:sp` -> `sp`).
pub fn local_name(qname: &[u8]) -> &[u8] {
    match qname.iter().rposition(|&b| b == b':') {
        Some(i) => &qname[i + 1..],
        None => qname,
    }
}

/// Attribute value by local name, unescaped.
pub fn attr_local(start: &BytesStart, name: &[u8]) -> Option<String> {
    for attr in start.attributes().flatten() {
        if local_name(attr.key.as_ref()) == name {
            return attr.unescape_value().ok().map(|v| v.into_owned());
        }
    }
    None
}

pub fn attr_i64(start: &BytesStart, name: &[u8]) -> Option<i64> {
    attr_local(start, name)?.parse().ok()
}

pub fn attr_u32(start: &BytesStart, name: &[u8]) -> Option<u32> {
    attr_local(start, name)?.parse().ok()
}

/// Escape text for XML content.
pub fn escape_text(text: &str) -> String {
    quick_xml::escape::escape(text).into_owned()
}

/// Byte spans of one element's start and end tags. For empty (`<x/>`)
/// elements the close span is the zero-width point just after the tag.
#[derive(Clone, Debug, PartialEq)]
pub struct ElemSpan {
    pub open: std::ops::Range<usize>,
    pub close: std::ops::Range<usize>,
}

impl ElemSpan {
    pub fn empty_at(span: std::ops::Range<usize>) -> Self {
        let end = span.end;
        Self { open: span, close: end..end }
    }

    /// The whole element, tags included.
    pub fn whole(&self) -> std::ops::Range<usize> {
        self.open.start..self.close.end
    }

    /// Content between the tags; empty for `<x/>`.
    pub fn inner(&self) -> std::ops::Range<usize> {
        self.open.end..self.close.start.max(self.open.end)
    }
}

/// Splice `replacement` over `range` in `bytes`.
pub fn splice(bytes: &[u8], range: std::ops::Range<usize>, replacement: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(bytes.len() - range.len() + replacement.len());
    out.extend_from_slice(&bytes[..range.start]);
    out.extend_from_slice(replacement);
    out.extend_from_slice(&bytes[range.end..]);
    out
}
