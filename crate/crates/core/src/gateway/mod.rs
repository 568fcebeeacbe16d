//! Chat-completion gateway with live, record, and replay modes.
//!
//! Every request is content-addressed: the digest covers message roles and
//! texts, the bytes of referenced images, the model id, and the temperature.
//! Replay mode resolves requests against a transcript store by exact digest
//! match and never touches the network.

mod extract;
mod http;
pub mod schema;
mod store;

pub use extract::extract_structured;
pub use http::{HttpBackend, API_KEY_ENV, ENDPOINT_ENV};
pub use schema::{coerce_int as schema_coerce_int, Diagnostic, SchemaCatalog};
pub use store::{TranscriptRecord, TranscriptStore};

use std::path::PathBuf;
use std::sync::Mutex;

use sha2::{Digest, Sha256};

#[derive(Debug, thiserror::Error)]
pub enum GatewayError {
    #[error("no transcript for digest {digest} (purpose {purpose})")]
    ReplayMiss { digest: String, purpose: String },
    #[error("transport failure: {0}")]
    TransportFailure(String),
    #[error("missing credential: {0}")]
    CredentialMissing(String),
    #[error("request invalid: {0}")]
    InvalidRequest(String),
    #[error("image ref unreadable: {0}")]
    ImageRefUnreadable(PathBuf),
    #[error("no JSON object found in model output")]
    NoObjectFound,
    #[error("JSON parse failure: {0}")]
    ParseFailure(String),
    #[error("schema {schema_id} violated: {}", Diagnostic::join(diagnostics))]
    SchemaViolation {
        schema_id: String,
        diagnostics: Vec<Diagnostic>,
    },
    #[error("unknown schema id: {0}")]
    UnknownSchema(String),
    #[error("repairs exhausted after {attempts} attempts: {last}")]
    ExhaustedRepairs { attempts: usize, last: String },
    #[error("transcript store unavailable: {0}")]
    StoreUnavailable(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct Message {
    pub role: Role,
    pub text: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub image_refs: Vec<PathBuf>,
}

impl Message {
    pub fn system(text: impl Into<String>) -> Self {
        Self { role: Role::System, text: text.into(), image_refs: Vec::new() }
    }

    pub fn user(text: impl Into<String>) -> Self {
        Self { role: Role::User, text: text.into(), image_refs: Vec::new() }
    }

    pub fn assistant(text: impl Into<String>) -> Self {
        Self { role: Role::Assistant, text: text.into(), image_refs: Vec::new() }
    }

    pub fn with_images(mut self, refs: Vec<PathBuf>) -> Self {
        self.image_refs = refs;
        self
    }
}

#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct ChatRequest {
    pub messages: Vec<Message>,
    pub model_id: String,
    pub temperature: f64,
    pub max_tokens: u32,
    pub purpose_tag: String,
}

impl ChatRequest {
    /// A single-user-message request with pipeline defaults (temperature 0).
    pub fn simple(model_id: &str, purpose_tag: &str, prompt: String) -> Self {
        Self {
            messages: vec![Message::user(prompt)],
            model_id: model_id.to_string(),
            temperature: 0.0,
            max_tokens: 8192,
            purpose_tag: purpose_tag.to_string(),
        }
    }

    fn validate(&self) -> Result<(), GatewayError> {
        if self.messages.is_empty() {
            return Err(GatewayError::InvalidRequest("no messages".into()));
        }
        if self.purpose_tag.is_empty() {
            return Err(GatewayError::InvalidRequest("empty purpose_tag".into()));
        }
        if self.temperature < 0.0 {
            return Err(GatewayError::InvalidRequest("negative temperature".into()));
        }
        Ok(())
    }

    /// Content digest over roles, texts, image bytes, model id, and
    /// temperature. Images are digested by file content so replay keys
    /// survive file moves. `purpose_tag` and `max_tokens` are metadata and
    /// do not participate.
    pub fn digest(&self) -> Result<String, GatewayError> {
        let mut h = Sha256::new();
        h.update(b"chatreq-v1");
        h.update((self.messages.len() as u64).to_le_bytes());
        for m in &self.messages {
            h.update([match m.role {
                Role::System => 0u8,
                Role::User => 1,
                Role::Assistant => 2,
            }]);
            h.update((m.text.len() as u64).to_le_bytes());
            h.update(m.text.as_bytes());
            h.update((m.image_refs.len() as u64).to_le_bytes());
            for path in &m.image_refs {
                let bytes = std::fs::read(path)
                    .map_err(|_| GatewayError::ImageRefUnreadable(path.clone()))?;
                h.update(Sha256::digest(&bytes));
            }
        }
        h.update((self.model_id.len() as u64).to_le_bytes());
        h.update(self.model_id.as_bytes());
        h.update(self.temperature.to_bits().to_le_bytes());
        Ok(hex::encode(h.finalize()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Live,
    Record,
    Replay,
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "live" => Ok(Mode::Live),
            "record" => Ok(Mode::Record),
            "replay" => Ok(Mode::Replay),
            other => Err(format!("unknown mode: {other}")),
        }
    }
}

/// Transport behind live and record modes.
pub trait ChatBackend: Send + Sync {
    fn complete(&self, request: &ChatRequest) -> Result<String, GatewayError>;
}

/// One gateway call, kept for run-directory snapshots and provenance.
#[derive(Clone, Debug, serde::Serialize)]
pub struct CallRecord {
    pub purpose_tag: String,
    pub digest: String,
    pub request: ChatRequest,
    pub response_text: String,
}

pub struct ModelGateway {
    mode: Mode,
    store: Option<TranscriptStore>,
    backend: Option<Box<dyn ChatBackend>>,
    schemas: SchemaCatalog,
    calls: Mutex<Vec<CallRecord>>,
}

impl ModelGateway {
    pub fn new(mode: Mode, store: Option<TranscriptStore>, backend: Option<Box<dyn ChatBackend>>) -> Self {
        Self {
            mode,
            store,
            backend,
            schemas: SchemaCatalog::standard(),
            calls: Mutex::new(Vec::new()),
        }
    }

    /// Replay-only gateway over an existing transcript directory.
    pub fn replay(store: TranscriptStore) -> Self {
        Self::new(Mode::Replay, Some(store), None)
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn schemas(&self) -> &SchemaCatalog {
        &self.schemas
    }

    /// Drain the calls made since the last drain, in order.
    pub fn drain_calls(&self) -> Vec<CallRecord> {
        std::mem::take(&mut *self.calls.lock().unwrap())
    }

    pub fn complete(&self, request: &ChatRequest) -> Result<String, GatewayError> {
        request.validate()?;
        for m in &request.messages {
            for path in &m.image_refs {
                if !path.exists() {
                    return Err(GatewayError::ImageRefUnreadable(path.clone()));
                }
            }
        }
        let digest = request.digest()?;
        let response = match self.mode {
            Mode::Replay => {
                let store = self.store.as_ref().ok_or_else(|| {
                    GatewayError::StoreUnavailable("replay mode needs a transcript directory".into())
                })?;
                match store.lookup(&digest)? {
                    Some(rec) => rec.response_text,
                    None => {
                        return Err(GatewayError::ReplayMiss {
                            digest,
                            purpose: request.purpose_tag.clone(),
                        })
                    }
                }
            }
            Mode::Record => {
                let backend = self.backend.as_ref().ok_or_else(|| {
                    GatewayError::CredentialMissing("no backend configured".into())
                })?;
                let text = backend.complete(request)?;
                let store = self.store.as_ref().ok_or_else(|| {
                    GatewayError::StoreUnavailable("record mode needs a transcript directory".into())
                })?;
                store.put(&digest, &request.purpose_tag, &text)?;
                text
            }
            Mode::Live => {
                let backend = self.backend.as_ref().ok_or_else(|| {
                    GatewayError::CredentialMissing("no backend configured".into())
                })?;
                backend.complete(request)?
            }
        };
        self.calls.lock().unwrap().push(CallRecord {
            purpose_tag: request.purpose_tag.clone(),
            digest,
            request: request.clone(),
            response_text: response.clone(),
        });
        Ok(response)
    }

    /// Complete and extract a schema-validated JSON value, repairing up to
    /// `max_repairs` times by feeding the violation back to the model.
    pub fn complete_structured(
        &self,
        request: &ChatRequest,
        schema_id: &str,
        max_repairs: usize,
    ) -> Result<serde_json::Value, GatewayError> {
        self.complete_structured_with(request, schema_id, max_repairs, |_| Ok(()))
    }

    /// Like [`complete_structured`](Self::complete_structured) with an extra
    /// semantic check that runs after schema validation; its error string is
    /// used as the repair instruction.
    pub fn complete_structured_with<F>(
        &self,
        request: &ChatRequest,
        schema_id: &str,
        max_repairs: usize,
        check: F,
    ) -> Result<serde_json::Value, GatewayError>
    where
        F: Fn(&serde_json::Value) -> Result<(), String>,
    {
        if !self.schemas.contains(schema_id) {
            return Err(GatewayError::UnknownSchema(schema_id.to_string()));
        }
        let mut attempt_req = request.clone();
        let mut last_err = String::new();
        for attempt in 0..=max_repairs {
            let response = self.complete(&attempt_req)?;
            let outcome = extract_structured(&response, schema_id, &self.schemas)
                .and_then(|value| match check(&value) {
                    Ok(()) => Ok(value),
                    Err(why) => Err(GatewayError::SchemaViolation {
                        schema_id: schema_id.to_string(),
                        diagnostics: vec![Diagnostic::new("SemanticViolation", "$", why)],
                    }),
                });
            match outcome {
                Ok(value) => return Ok(value),
                Err(err) => {
                    last_err = err.to_string();
                    if attempt == max_repairs {
                        break;
                    }
                    attempt_req.messages.push(Message::assistant(response));
                    attempt_req.messages.push(Message::user(format!(
                        "Your previous reply was not acceptable: {last_err}. \
                         Reply again with only the corrected JSON object and nothing else."
                    )));
                }
            }
        }
        Err(GatewayError::ExhaustedRepairs {
            attempts: max_repairs + 1,
            last: last_err,
        })
    }
}

/// Default repair budget for structured completions.
pub const DEFAULT_MAX_REPAIRS: usize = 3;

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicUsize, Ordering};

    pub(crate) struct QueueBackend {
        responses: Mutex<Vec<String>>,
        pub calls: AtomicUsize,
    }

    impl QueueBackend {
        pub fn new(responses: Vec<&str>) -> Self {
            let mut v: Vec<String> = responses.into_iter().map(String::from).collect();
            v.reverse();
            Self { responses: Mutex::new(v), calls: AtomicUsize::new(0) }
        }
    }

    impl ChatBackend for QueueBackend {
        fn complete(&self, _request: &ChatRequest) -> Result<String, GatewayError> {
            self.calls.fetch_add(1, Ordering::SeqCst);
            self.responses
                .lock()
                .unwrap()
                .pop()
                .ok_or_else(|| GatewayError::TransportFailure("queue empty".into()))
        }
    }

    fn req(text: &str) -> ChatRequest {
        ChatRequest::simple("test-model", "unit", text.to_string())
    }

    #[test]
    fn digest_is_deterministic() {
        let r = req("hello");
        assert_eq!(r.digest().unwrap(), r.digest().unwrap());
    }

    #[test]
    fn digest_ignores_metadata_fields() {
        let a = req("hello");
        let mut b = a.clone();
        b.purpose_tag = "other".into();
        b.max_tokens = 16;
        assert_eq!(a.digest().unwrap(), b.digest().unwrap());
    }

    #[test]
    fn digest_changes_on_reorder() {
        let mut a = req("one");
        a.messages.push(Message::user("two"));
        let mut b = a.clone();
        b.messages.reverse();
        assert_ne!(a.digest().unwrap(), b.digest().unwrap());
    }

    #[test]
    fn digest_changes_on_role_and_temperature() {
        let a = req("x");
        let mut b = a.clone();
        b.messages[0].role = Role::System;
        assert_ne!(a.digest().unwrap(), b.digest().unwrap());
        let mut c = a.clone();
        c.temperature = 0.5;
        assert_ne!(a.digest().unwrap(), c.digest().unwrap());
    }

    #[test]
    fn record_then_replay_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let store = TranscriptStore::open(dir.path()).unwrap();
        let gw = ModelGateway::new(
            Mode::Record,
            Some(store),
            Some(Box::new(QueueBackend::new(vec!["the answer"]))),
        );
        let r = req("R1");
        assert_eq!(gw.complete(&r).unwrap(), "the answer");

        let replay = ModelGateway::replay(TranscriptStore::open(dir.path()).unwrap());
        assert_eq!(replay.complete(&r).unwrap(), "the answer");
        let miss = replay.complete(&req("R2"));
        assert!(matches!(miss, Err(GatewayError::ReplayMiss { .. })));
    }

    #[test]
    fn structured_repair_succeeds_on_second_turn_and_replays() {
        let dir = tempfile::tempdir().unwrap();
        let backend = QueueBackend::new(vec![
            "not json at all",
            r#"{"reason": "ok", "score": 4}"#,
        ]);
        let gw = ModelGateway::new(
            Mode::Record,
            Some(TranscriptStore::open(dir.path()).unwrap()),
            Some(Box::new(backend)),
        );
        let v = gw.complete_structured(&req("judge this"), "judge", 3).unwrap();
        assert_eq!(v["score"], 4);
        assert_eq!(gw.drain_calls().len(), 2);

        // Both turns were recorded; the repair loop replays identically.
        let replay = ModelGateway::replay(TranscriptStore::open(dir.path()).unwrap());
        let v = replay.complete_structured(&req("judge this"), "judge", 3).unwrap();
        assert_eq!(v["score"], 4);
        assert_eq!(replay.drain_calls().len(), 2);
    }

    #[test]
    fn structured_zero_budget_exhausts() {
        let gw = ModelGateway::new(
            Mode::Live,
            None,
            Some(Box::new(QueueBackend::new(vec!["nope"]))),
        );
        let err = gw.complete_structured(&req("judge"), "judge", 0).unwrap_err();
        assert!(matches!(err, GatewayError::ExhaustedRepairs { attempts: 1, .. }));
    }

    #[test]
    fn structured_valid_first_try_makes_one_call() {
        let gw = ModelGateway::new(
            Mode::Live,
            None,
            Some(Box::new(QueueBackend::new(vec![r#"{"reason":"r","score":5}"#]))),
        );
        gw.complete_structured(&req("judge"), "judge", 3).unwrap();
        assert_eq!(gw.drain_calls().len(), 1);
    }

    #[test]
    fn call_count_bounded_by_budget() {
        for budget in 0..4usize {
            let gw = ModelGateway::new(
                Mode::Live,
                None,
                Some(Box::new(QueueBackend::new(vec!["bad"; 8]))),
            );
            let _ = gw.complete_structured(&req("judge"), "judge", budget);
            assert_eq!(gw.drain_calls().len(), budget + 1);
        }
    }
}
