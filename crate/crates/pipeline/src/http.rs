//! JSON-over-HTTP adapters for translation, judge and chat model services.

use std::path::PathBuf;
use std::thread;
use std::time::Duration;

use base64::engine::general_purpose::STANDARD;
use base64::Engine as _;
use forge_core::client::{ChatRequest, ClientError, ModelClient};
use reqwest::blocking::Client;
use reqwest::StatusCode;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::clients::{JudgeClient, JudgeLabel, JudgeRequest, TranslateRequest, TranslationClient};

/// Retries after transport failures, waiting `base_delay * 2^k` before retry `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct RetryPolicy {
    pub retries: u32,
    pub base_delay_ms: u64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self { retries: 3, base_delay_ms: 1000 }
    }
}

impl RetryPolicy {
    pub fn delay(&self, retry: u32) -> Duration {
        Duration::from_millis(self.base_delay_ms.saturating_mul(1u64 << retry.min(20)))
    }

    pub fn run<T>(&self, what: &str, mut call: impl FnMut() -> Result<T, ClientError>) -> Result<T, ClientError> {
        let mut retry = 0;
        loop {
            match call() {
                Err(e) if e.is_retryable() && retry < self.retries => {
                    let wait = self.delay(retry);
                    tracing::warn!(%what, error = %e, retry = retry + 1, ?wait, "retrying");
                    thread::sleep(wait);
                    retry += 1;
                }
                other => return other,
            }
        }
    }
}

#[derive(Clone, Debug)]
struct Endpoint {
    url: String,
    http: Client,
    retry: RetryPolicy,
}

impl Endpoint {
    fn new(base_url: &str, path: &str, retry: RetryPolicy, timeout: Duration) -> Result<Self, ClientError> {
        let http = Client::builder().timeout(timeout).build().map_err(|e| ClientError::Transport(e.to_string()))?;
        Ok(Self { url: format!("{}/{}", base_url.trim_end_matches('/'), path), http, retry })
    }

    fn post<B: Serialize, R: DeserializeOwned>(&self, body: &B) -> Result<R, ClientError> {
        self.retry.run(&self.url, || {
            let resp =
                self.http.post(&self.url).json(body).send().map_err(|e| ClientError::Transport(e.to_string()))?;
            let status = resp.status();
            if status.is_server_error() || status == StatusCode::TOO_MANY_REQUESTS {
                return Err(ClientError::Transport(format!("{} returned {status}", self.url)));
            }
            if !status.is_success() {
                return Err(ClientError::Protocol(format!("{} returned {status}", self.url)));
            }
            resp.json::<R>().map_err(|e| ClientError::Protocol(format!("bad response body: {e}")))
        })
    }
}

#[derive(Serialize)]
struct TranslateBody<'a> {
    text: &'a str,
    src: &'a str,
    tgt: &'a str,
}

#[derive(Deserialize)]
struct TextReply {
    text: String,
}

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(120);

/// `POST {base}/translate` with `{"text","src","tgt"}`, reply `{"text"}`.
#[derive(Clone, Debug)]
pub struct HttpTranslationClient {
    id: String,
    endpoint: Endpoint,
}

impl HttpTranslationClient {
    pub fn new(id: impl Into<String>, base_url: &str, retry: RetryPolicy) -> Result<Self, ClientError> {
        Ok(Self { id: id.into(), endpoint: Endpoint::new(base_url, "translate", retry, DEFAULT_TIMEOUT)? })
    }
}

impl TranslationClient for HttpTranslationClient {
    fn id(&self) -> &str {
        &self.id
    }

    fn translate(&self, request: &TranslateRequest<'_>) -> Result<String, ClientError> {
        let body = TranslateBody { text: request.text, src: request.source.code(), tgt: request.target.code() };
        let reply: TextReply = self.endpoint.post(&body)?;
        if reply.text.trim().is_empty() && !request.text.trim().is_empty() {
            return Err(ClientError::Protocol("empty translation".into()));
        }
        Ok(reply.text)
    }
}

#[derive(Serialize)]
struct JudgeBody<'a> {
    image_b64: String,
    transcript: &'a str,
}

#[derive(Deserialize)]
struct JudgeReply {
    label: String,
}

/// `POST {base}/judge` with `{"image_b64","transcript"}`, reply `{"label"}`.
#[derive(Clone, Debug)]
pub struct HttpJudgeClient {
    id: String,
    endpoint: Endpoint,
}

impl HttpJudgeClient {
    pub fn new(id: impl Into<String>, base_url: &str, retry: RetryPolicy) -> Result<Self, ClientError> {
        Ok(Self { id: id.into(), endpoint: Endpoint::new(base_url, "judge", retry, DEFAULT_TIMEOUT)? })
    }
}

impl JudgeClient for HttpJudgeClient {
    fn id(&self) -> &str {
        &self.id
    }

    fn judge(&self, request: &JudgeRequest<'_>) -> Result<JudgeLabel, ClientError> {
        let body = JudgeBody { image_b64: STANDARD.encode(request.image), transcript: request.transcript };
        let reply: JudgeReply = self.endpoint.post(&body)?;
        JudgeLabel::parse(&reply.label)
    }
}

#[derive(Serialize)]
struct ChatBody<'a> {
    system: &'a str,
    text: &'a str,
    image_b64: String,
}

/// `POST {base}/chat` with `{"system","text","image_b64"}`, reply `{"text"}`.
/// Image references are resolved against `image_root`.
#[derive(Clone, Debug)]
pub struct HttpModelClient {
    id: String,
    endpoint: Endpoint,
    image_root: PathBuf,
}

impl HttpModelClient {
    pub fn new(
        id: impl Into<String>,
        base_url: &str,
        image_root: impl Into<PathBuf>,
        retry: RetryPolicy,
    ) -> Result<Self, ClientError> {
        Ok(Self {
            id: id.into(),
            endpoint: Endpoint::new(base_url, "chat", retry, DEFAULT_TIMEOUT)?,
            image_root: image_root.into(),
        })
    }
}

impl ModelClient for HttpModelClient {
    fn id(&self) -> &str {
        &self.id
    }

    fn chat(&self, request: &ChatRequest<'_>) -> Result<String, ClientError> {
        let path = self.image_root.join(request.image_ref);
        let image = std::fs::read(&path)
            .map_err(|e| ClientError::Protocol(format!("cannot read image {}: {e}", path.display())))?;
        let body = ChatBody { system: request.system, text: &request.text, image_b64: STANDARD.encode(image) };
        let reply: TextReply = self.endpoint.post(&body)?;
        Ok(reply.text)
    }
}
