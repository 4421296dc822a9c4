//! OpenAI-compatible chat-completions transport.

use std::time::Duration;

use serde_json::{json, Value};

use super::{ChatRequest, ChatResponse, Transport, TransportFailure};
use crate::trace::TokenUsage;

pub struct HttpTransport {
    endpoint: String,
    key: String,
    agent: ureq::Agent,
}

impl std::fmt::Debug for HttpTransport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HttpTransport").field("endpoint", &self.endpoint).finish_non_exhaustive()
    }
}

impl HttpTransport {
    pub fn new(base_url: &str, key: String, timeout: Duration) -> Self {
        let endpoint = format!("{}/chat/completions", base_url.trim_end_matches('/'));
        let agent = ureq::AgentBuilder::new().timeout(timeout).build();
        HttpTransport { endpoint, key, agent }
    }
}

fn parse_body(body: &Value) -> Result<ChatResponse, TransportFailure> {
    let text = body
        .pointer("/choices/0/message/content")
        .and_then(Value::as_str)
        .ok_or_else(|| TransportFailure::Fatal("response has no choices[0].message.content".into()))?;
    let usage = body.get("usage").map(|u| TokenUsage {
        prompt_tokens: u.get("prompt_tokens").and_then(Value::as_u64).unwrap_or(0),
        completion_tokens: u.get("completion_tokens").and_then(Value::as_u64).unwrap_or(0),
    });
    Ok(ChatResponse { text: text.to_string(), usage })
}

impl Transport for HttpTransport {
    fn send(&self, req: &ChatRequest) -> Result<ChatResponse, TransportFailure> {
        let payload = json!({
            "model": req.model,
            "messages": [
                {"role": "system", "content": req.system},
                {"role": "user", "content": req.user},
            ],
            "temperature": req.temperature,
            "max_tokens": req.max_new_tokens,
        });
        let result = self
            .agent
            .post(&self.endpoint)
            .set("Authorization", &format!("Bearer {}", self.key))
            .send_json(payload);
        match result {
            Ok(resp) => {
                let body: Value = resp.into_json().map_err(|e| TransportFailure::Transient(format!("bad body: {e}")))?;
                parse_body(&body)
            }
            Err(ureq::Error::Status(code, resp)) => {
                let detail = format!("HTTP {code}: {}", resp.into_string().unwrap_or_default());
                match code {
                    401 | 403 => Err(TransportFailure::Auth(detail)),
                    408 | 429 | 500..=599 => Err(TransportFailure::Transient(detail)),
                    _ => Err(TransportFailure::Fatal(detail)),
                }
            }
            Err(ureq::Error::Transport(t)) => Err(TransportFailure::Transient(t.to_string())),
        }
    }
}
