//! Transport-agnostic model client interface used by the evaluation harness.

/// Failure talking to an external model or translation service.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClientError {
    /// Network or HTTP-level failure; callers may retry.
    #[error("transport error: {0}")]
    Transport(String),
    /// The service answered with something that violates the protocol.
    #[error("protocol error: {0}")]
    Protocol(String),
}

impl ClientError {
    pub fn is_retryable(&self) -> bool {
        matches!(self, ClientError::Transport(_))
    }
}

/// One chat turn: system prompt, user text and the problem image.
#[derive(Debug, Clone, PartialEq)]
pub struct ChatRequest<'a> {
    pub system: &'a str,
    pub text: String,
    pub image_ref: &'a str,
    /// Which independent run the request belongs to. Not sent over the wire.
    pub run_index: usize,
    pub problem_id: &'a str,
}

pub trait ModelClient: Sync {
    fn id(&self) -> &str;

    fn chat(&self, request: &ChatRequest<'_>) -> Result<String, ClientError>;
}

impl<C: ModelClient + ?Sized> ModelClient for &C {
    fn id(&self) -> &str {
        (**self).id()
    }

    fn chat(&self, request: &ChatRequest<'_>) -> Result<String, ClientError> {
        (**self).chat(request)
    }
}
