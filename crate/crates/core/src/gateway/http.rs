//! OpenAI-compatible chat-completions transport.
//!
//! Image-bearing messages are sent as `image_url` content parts with
//! base64 data URLs; text-only messages stay plain strings.

use std::time::Duration;

use serde_json::{json, Value};

use super::{ChatBackend, ChatRequest, GatewayError, Role};

/// Environment variable holding the API credential.
pub const API_KEY_ENV: &str = "DECKGEN_API_KEY";
/// Environment variable overriding the endpoint URL.
pub const ENDPOINT_ENV: &str = "DECKGEN_ENDPOINT";

const MAX_ATTEMPTS: usize = 3;

pub struct HttpBackend {
    endpoint: String,
    api_key: String,
    timeout: Duration,
}

impl HttpBackend {
    pub fn new(endpoint: impl Into<String>, api_key: impl Into<String>) -> Self {
        Self {
            endpoint: endpoint.into(),
            api_key: api_key.into(),
            timeout: Duration::from_secs(120),
        }
    }

    /// Build from `DECKGEN_ENDPOINT` / `DECKGEN_API_KEY`.
    pub fn from_env() -> Result<Self, GatewayError> {
        let endpoint = std::env::var(ENDPOINT_ENV)
            .map_err(|_| GatewayError::CredentialMissing(ENDPOINT_ENV.to_string()))?;
        let api_key = std::env::var(API_KEY_ENV)
            .map_err(|_| GatewayError::CredentialMissing(API_KEY_ENV.to_string()))?;
        Ok(Self::new(endpoint, api_key))
    }

    fn body(&self, request: &ChatRequest) -> Result<Value, GatewayError> {
        let mut messages = Vec::new();
        for m in &request.messages {
            let role = match m.role {
                Role::System => "system",
                Role::User => "user",
                Role::Assistant => "assistant",
            };
            let content = if m.image_refs.is_empty() {
                json!(m.text)
            } else {
                let mut parts = vec![json!({"type": "text", "text": m.text})];
                for path in &m.image_refs {
                    let bytes = std::fs::read(path)
                        .map_err(|_| GatewayError::ImageRefUnreadable(path.clone()))?;
                    let mime = match path.extension().and_then(|e| e.to_str()) {
                        Some("jpg") | Some("jpeg") => "image/jpeg",
                        _ => "image/png",
                    };
                    parts.push(json!({
                        "type": "image_url",
                        "image_url": {"url": format!("data:{mime};base64,{}", base64_encode(&bytes))}
                    }));
                }
                json!(parts)
            };
            messages.push(json!({"role": role, "content": content}));
        }
        Ok(json!({
            "model": request.model_id,
            "messages": messages,
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        }))
    }
}

impl ChatBackend for HttpBackend {
    fn complete(&self, request: &ChatRequest) -> Result<String, GatewayError> {
        let body = self.body(request)?;
        let mut last = String::new();
        for attempt in 0..MAX_ATTEMPTS {
            if attempt > 0 {
                std::thread::sleep(Duration::from_millis(500 * (1 << attempt)));
            }
            let result = ureq::post(&self.endpoint)
                .header("Authorization", &format!("Bearer {}", self.api_key))
                .config()
                .timeout_global(Some(self.timeout))
                .build()
                .send_json(&body);
            match result {
                Ok(mut resp) => {
                    let value: Value = resp.body_mut().read_json().map_err(|e| {
                        GatewayError::TransportFailure(format!("bad response body: {e}"))
                    })?;
                    let text = value["choices"][0]["message"]["content"]
                        .as_str()
                        .ok_or_else(|| {
                            GatewayError::TransportFailure("response missing message content".into())
                        })?;
                    return Ok(text.to_string());
                }
                Err(e) => last = e.to_string(),
            }
        }
        Err(GatewayError::TransportFailure(format!(
            "{MAX_ATTEMPTS} attempts failed, last error: {last}"
        )))
    }
}

// Small local base64 (standard alphabet, padded) so the transport does not
// pull an extra dependency for one call site.
fn base64_encode(bytes: &[u8]) -> String {
    const TABLE: &[u8; 64] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    let mut out = String::with_capacity(bytes.len().div_ceil(3) * 4);
    for chunk in bytes.chunks(3) {
        let b = [chunk[0], *chunk.get(1).unwrap_or(&0), *chunk.get(2).unwrap_or(&0)];
        let n = (u32::from(b[0]) << 16) | (u32::from(b[1]) << 8) | u32::from(b[2]);
        out.push(TABLE[(n >> 18) as usize & 63] as char);
        out.push(TABLE[(n >> 12) as usize & 63] as char);
        out.push(if chunk.len() > 1 { TABLE[(n >> 6) as usize & 63] as char } else { '=' });
        out.push(if chunk.len() > 2 { TABLE[n as usize & 63] as char } else { '=' });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base64_known_vectors() {
        assert_eq!(base64_encode(b""), "");
        assert_eq!(base64_encode(b"f"), "Zg==");
        assert_eq!(base64_encode(b"fo"), "Zm8=");
        assert_eq!(base64_encode(b"foo"), "Zm9v");
        assert_eq!(base64_encode(b"foobar"), "Zm9vYmFy");
    }

    #[test]
    fn from_env_without_vars_is_credential_missing() {
        // Guard against ambient configuration in the test environment.
        if std::env::var(ENDPOINT_ENV).is_ok() || std::env::var(API_KEY_ENV).is_ok() {
            return;
        }
        assert!(matches!(
            HttpBackend::from_env(),
            Err(GatewayError::CredentialMissing(_))
        ));
    }
}
