//! Deterministic offline model clients for tests, smoke runs and baselines.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::client::{ChatRequest, ClientError, ModelClient};
use crate::model::{AnswerKey, DatasetManifest};

/// Always answers with the correct key.
#[derive(Debug, Clone)]
pub struct KeyOracleClient {
    keys: HashMap<String, AnswerKey>,
}

impl KeyOracleClient {
    pub fn new<'a>(manifests: impl IntoIterator<Item = &'a DatasetManifest>) -> Self {
        let keys = manifests.into_iter().flat_map(|m| m.entries.iter().map(|p| (p.id.clone(), p.answer_key))).collect();
        Self { keys }
    }
}

impl ModelClient for KeyOracleClient {
    fn id(&self) -> &str {
        "mock-oracle"
    }

    fn chat(&self, request: &ChatRequest<'_>) -> Result<String, ClientError> {
        let key = self
            .keys
            .get(request.problem_id)
            .ok_or_else(|| ClientError::Protocol(format!("unknown problem {}", request.problem_id)))?;
        Ok(format!("Reasoning omitted. {})", key.letter()))
    }
}

/// Always answers with the same fixed text.
#[derive(Debug, Clone)]
pub struct ConstantClient {
    reply: String,
}

impl ConstantClient {
    pub fn new(reply: impl Into<String>) -> Self {
        Self { reply: reply.into() }
    }

    /// Always picks option A.
    pub fn always_a() -> Self {
        Self::new("A)")
    }
}

impl ModelClient for ConstantClient {
    fn id(&self) -> &str {
        "mock-constant"
    }

    fn chat(&self, _request: &ChatRequest<'_>) -> Result<String, ClientError> {
        Ok(self.reply.clone())
    }
}

/// Picks one of the five options uniformly, deterministically per
/// (problem id, run index, seed).
#[derive(Debug, Clone, Copy)]
pub struct UniformRandomClient {
    seed: u64,
}

impl UniformRandomClient {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn pick(&self, problem_id: &str, run_index: usize) -> AnswerKey {
        let mut rng = ChaCha8Rng::seed_from_u64(mix(self.seed, problem_id, run_index));
        AnswerKey::ALL[rng.random_range(0..AnswerKey::ALL.len())]
    }
}

impl ModelClient for UniformRandomClient {
    fn id(&self) -> &str {
        "mock-uniform"
    }

    fn chat(&self, request: &ChatRequest<'_>) -> Result<String, ClientError> {
        Ok(format!("{})", self.pick(request.problem_id, request.run_index).letter()))
    }
}

// FNV-1a; stable across platforms and toolchains, unlike the std hasher.
fn mix(seed: u64, id: &str, run: usize) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ seed;
    for b in id.bytes().chain((run as u64).to_le_bytes()) {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}
