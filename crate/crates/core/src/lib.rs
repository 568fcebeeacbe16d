//! Preference-guided paper-to-slides generation.
//!
//! The pipeline distills implicit user preferences from a reference
//! paper-slides pair and a `.pptx` template, plans a deck with per-slide
//! narration, realizes it by editing cloned template slides, and scores the
//! result with a six-metric evaluation protocol.

pub mod bench;
pub mod deck;
pub mod eval;
pub mod gateway;
pub mod ingest;
pub mod planner;
pub mod prefs;
pub mod prompts;
pub mod realizer;
