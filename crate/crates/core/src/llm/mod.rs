//! Chat-completion client used by the language-model backends.
//!
//! This is the only module that touches the network.

mod extract;
mod http;

use std::collections::VecDeque;
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::trace::TokenUsage;

pub use extract::{extract_structured, strip_fences, NoObjectFound};
pub use http::HttpTransport;

pub const DEFAULT_MAX_TOKENS: u32 = 4096;
pub const DEFAULT_TEMPERATURE: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub system: String,
    pub user: String,
    pub temperature: f64,
    pub max_new_tokens: u32,
    pub model: String,
}

impl ChatRequest {
    pub fn new(model: impl Into<String>, system: impl Into<String>, user: impl Into<String>) -> Self {
        ChatRequest {
            system: system.into(),
            user: user.into(),
            temperature: DEFAULT_TEMPERATURE,
            max_new_tokens: DEFAULT_MAX_TOKENS,
            model: model.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChatResponse {
    pub text: String,
    pub usage: Option<TokenUsage>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LlmError {
    #[error("transport error after {attempts} attempt(s): {detail}")]
    Transport { attempts: u32, detail: String },
    #[error("authentication failed: {0}")]
    Auth(String),
    #[error("provider rejected the request: {0}")]
    Rejected(String),
}

/// Outcome of a single request at the transport level.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransportFailure {
    /// Connection problems, timeouts, HTTP 429 and 5xx: worth retrying.
    #[error("transient: {0}")]
    Transient(String),
    #[error("auth: {0}")]
    Auth(String),
    #[error("fatal: {0}")]
    Fatal(String),
}

/// Sends one request; no retries.
pub trait Transport: Send + Sync {
    fn send(&self, req: &ChatRequest) -> Result<ChatResponse, TransportFailure>;
}

/// A chat client as seen by the backends.
pub trait ChatClient: Send + Sync {
    fn chat(&self, req: &ChatRequest) -> Result<ChatResponse, LlmError>;

    /// Model name used for requests.
    fn model(&self) -> &str;

    /// Builds a request with this client's sampling settings.
    fn request(&self, system: &str, user: &str) -> ChatRequest {
        ChatRequest::new(self.model(), system, user)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClientPolicy {
    pub base_url: String,
    /// Environment variable holding the API key. The key itself is never stored.
    pub api_key_env: String,
    pub model: String,
    pub retries: u32,
    /// Delay before each retry, in milliseconds; the last entry repeats.
    pub backoff_ms: Vec<u64>,
    /// Minimum spacing between requests, in milliseconds.
    pub min_interval_ms: u64,
    pub request_timeout_secs: u64,
    pub temperature: f64,
    pub max_new_tokens: u32,
}

impl Default for ClientPolicy {
    fn default() -> Self {
        ClientPolicy {
            base_url: "https://api.openai.com/v1".into(),
            api_key_env: "OPENAI_API_KEY".into(),
            model: "gpt-4o".into(),
            retries: 3,
            backoff_ms: vec![500, 1000, 2000],
            min_interval_ms: 0,
            request_timeout_secs: 120,
            temperature: DEFAULT_TEMPERATURE,
            max_new_tokens: DEFAULT_MAX_TOKENS,
        }
    }
}

impl ClientPolicy {
    fn backoff(&self, retry: u32) -> Duration {
        let ms = self.backoff_ms.get(retry as usize).or(self.backoff_ms.last()).copied().unwrap_or(0);
        Duration::from_millis(ms)
    }

    pub fn request(&self, system: impl Into<String>, user: impl Into<String>) -> ChatRequest {
        ChatRequest {
            temperature: self.temperature,
            max_new_tokens: self.max_new_tokens,
            ..ChatRequest::new(self.model.clone(), system, user)
        }
    }
}

/// Serializes bursts by enforcing a minimum gap between request starts.
#[derive(Debug)]
struct RateLimiter {
    interval: Duration,
    next: Mutex<Option<Instant>>,
}

impl RateLimiter {
    fn wait(&self) {
        if self.interval.is_zero() {
            return;
        }
        let mut next = self.next.lock().unwrap_or_else(|e| e.into_inner());
        let now = Instant::now();
        if let Some(at) = *next {
            if at > now {
                thread::sleep(at - now);
            }
        }
        *next = Some(Instant::now() + self.interval);
    }
}

/// Retrying, rate-limited client over any transport.
pub struct Client<T> {
    transport: T,
    policy: ClientPolicy,
    limiter: RateLimiter,
}

impl<T: Transport> Client<T> {
    pub fn new(transport: T, policy: ClientPolicy) -> Self {
        let limiter = RateLimiter { interval: Duration::from_millis(policy.min_interval_ms), next: Mutex::new(None) };
        Client { transport, policy, limiter }
    }

    pub fn policy(&self) -> &ClientPolicy {
        &self.policy
    }
}

impl Client<HttpTransport> {
    /// Builds an HTTP client; fails before any network call when the key is missing.
    pub fn from_env(policy: ClientPolicy) -> Result<Self, LlmError> {
        let key = std::env::var(&policy.api_key_env)
            .ok()
            .filter(|k| !k.trim().is_empty())
            .ok_or_else(|| LlmError::Auth(format!("environment variable {} is not set", policy.api_key_env)))?;
        let transport = HttpTransport::new(&policy.base_url, key, Duration::from_secs(policy.request_timeout_secs));
        Ok(Client::new(transport, policy))
    }
}

impl<T: Transport> ChatClient for Client<T> {
    fn chat(&self, req: &ChatRequest) -> Result<ChatResponse, LlmError> {
        let mut attempt = 0;
        loop {
            self.limiter.wait();
            attempt += 1;
            match self.transport.send(req) {
                Ok(resp) => return Ok(resp),
                Err(TransportFailure::Auth(d)) => return Err(LlmError::Auth(d)),
                Err(TransportFailure::Fatal(d)) => return Err(LlmError::Rejected(d)),
                Err(TransportFailure::Transient(d)) => {
                    if attempt > self.policy.retries {
                        return Err(LlmError::Transport { attempts: attempt, detail: d });
                    }
                    thread::sleep(self.policy.backoff(attempt - 1));
                }
            }
        }
    }

    fn model(&self) -> &str {
        &self.policy.model
    }

    fn request(&self, system: &str, user: &str) -> ChatRequest {
        self.policy.request(system, user)
    }
}

/// Transport replaying canned responses in order; the last one repeats.
#[derive(Debug, Default)]
pub struct ScriptedTransport {
    replies: Mutex<VecDeque<Result<String, TransportFailure>>>,
    last: Mutex<Option<Result<String, TransportFailure>>>,
    requests: Mutex<Vec<ChatRequest>>,
}

impl ScriptedTransport {
    pub fn new(replies: impl IntoIterator<Item = Result<String, TransportFailure>>) -> Self {
        ScriptedTransport { replies: Mutex::new(replies.into_iter().collect()), ..Default::default() }
    }

    pub fn always(text: impl Into<String>) -> Self {
        Self::new([Ok(text.into())])
    }

    /// Requests received so far.
    pub fn requests(&self) -> Vec<ChatRequest> {
        self.requests.lock().unwrap_or_else(|e| e.into_inner()).clone()
    }
}

impl Transport for ScriptedTransport {
    fn send(&self, req: &ChatRequest) -> Result<ChatResponse, TransportFailure> {
        self.requests.lock().unwrap_or_else(|e| e.into_inner()).push(req.clone());
        let mut queue = self.replies.lock().unwrap_or_else(|e| e.into_inner());
        let mut last = self.last.lock().unwrap_or_else(|e| e.into_inner());
        let reply = match queue.pop_front() {
            Some(r) => {
                *last = Some(r.clone());
                r
            }
            None => last.clone().unwrap_or_else(|| Err(TransportFailure::Fatal("no scripted reply".into()))),
        };
        reply.map(|text| ChatResponse { text, usage: None })
    }
}

impl<T: Transport + ?Sized> Transport for std::sync::Arc<T> {
    fn send(&self, req: &ChatRequest) -> Result<ChatResponse, TransportFailure> {
        (**self).send(req)
    }
}

/// Client over a scripted transport with no backoff, for offline use and tests.
pub fn scripted(replies: impl IntoIterator<Item = Result<String, TransportFailure>>) -> Client<ScriptedTransport> {
    let policy = ClientPolicy { backoff_ms: vec![0], model: "scripted".into(), ..ClientPolicy::default() };
    Client::new(ScriptedTransport::new(replies), policy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    #[test]
    fn stub_passes_text_through() {
        let canned = r#"{"result": [], "overall_goal": "x"}"#;
        let c = scripted([Ok(canned.to_string())]);
        let r = c.chat(&ChatRequest::new("m", "s", "u")).unwrap();
        assert_eq!(r.text, canned);
    }

    #[test]
    fn retries_transient_failures() {
        let t = Arc::new(ScriptedTransport::new([
            Err(TransportFailure::Transient("reset".into())),
            Err(TransportFailure::Transient("503".into())),
            Ok("done".into()),
        ]));
        let policy = ClientPolicy { retries: 3, backoff_ms: vec![0], ..ClientPolicy::default() };
        let c = Client::new(t.clone(), policy);
        assert_eq!(c.chat(&ChatRequest::new("m", "s", "u")).unwrap().text, "done");
        assert_eq!(t.requests().len(), 3);
    }

    #[test]
    fn gives_up_after_retry_budget() {
        let policy = ClientPolicy { retries: 1, backoff_ms: vec![0], ..ClientPolicy::default() };
        let c = Client::new(ScriptedTransport::new([Err(TransportFailure::Transient("down".into()))]), policy);
        assert_eq!(
            c.chat(&ChatRequest::new("m", "s", "u")),
            Err(LlmError::Transport { attempts: 2, detail: "down".into() })
        );
    }

    #[test]
    fn auth_failures_are_not_retried() {
        let t = Arc::new(ScriptedTransport::new([Err(TransportFailure::Auth("401".into()))]));
        let c = Client::new(t.clone(), ClientPolicy { backoff_ms: vec![0], ..ClientPolicy::default() });
        assert!(matches!(c.chat(&ChatRequest::new("m", "s", "u")), Err(LlmError::Auth(_))));
        assert_eq!(t.requests().len(), 1);
    }

    #[test]
    fn missing_key_fails_before_network() {
        let policy = ClientPolicy {
            api_key_env: "POLYREASON_TEST_KEY_THAT_IS_NOT_SET".into(),
            base_url: "http://127.0.0.1:9".into(),
            ..ClientPolicy::default()
        };
        assert!(matches!(Client::from_env(policy), Err(LlmError::Auth(_))));
    }

    #[test]
    fn request_defaults() {
        let r = ChatRequest::new("m", "s", "u");
        assert_eq!(r.max_new_tokens, 4096);
        assert_eq!(r.temperature, 0.01);
    }

    #[test]
    fn policy_serializes_without_secrets() {
        let text = serde_json::to_string(&ClientPolicy::default()).unwrap();
        assert!(text.contains("OPENAI_API_KEY"));
        assert!(!text.to_lowercase().contains("bearer"));
    }
}
