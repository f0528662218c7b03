//! Activation steering as offline tensor algebra over exported activation
//! dumps: mean-difference vectors between a language and English, added to
//! hidden states of a forward (towards English) and a backward (away from
//! English) layer range.

use std::io::{self, Read, Write};
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::model::LanguageTag;
use crate::Scalar;

pub const DUMP_MAGIC: &[u8; 4] = b"ACTV";
pub const DUMP_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum SteeringError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid layer range: {0}")]
    InvalidRange(String),
    #[error("activation values must be finite")]
    NonFinite,
    #[error("bad dump format: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Token class of a dumped position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TokenClass {
    Text,
    Image,
}

impl TokenClass {
    fn from_byte(b: u8) -> Result<Self, SteeringError> {
        match b {
            0 => Ok(TokenClass::Text),
            1 => Ok(TokenClass::Image),
            other => Err(SteeringError::Format(format!("unknown token class {other}"))),
        }
    }

    fn to_byte(self) -> u8 {
        match self {
            TokenClass::Text => 0,
            TokenClass::Image => 1,
        }
    }
}

/// Layer-major activations: `values[(layer * num_samples + sample) * hidden_dim + d]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ActivationDump<T> {
    pub language: LanguageTag,
    num_layers: usize,
    num_samples: usize,
    hidden_dim: usize,
    values: Vec<T>,
    token_mask: Option<Vec<TokenClass>>,
}

impl<T: Scalar> ActivationDump<T> {
    pub fn new(
        language: LanguageTag,
        num_layers: usize,
        num_samples: usize,
        hidden_dim: usize,
        values: Vec<T>,
    ) -> Result<Self, SteeringError> {
        let expected = num_layers
            .checked_mul(num_samples)
            .and_then(|v| v.checked_mul(hidden_dim))
            .ok_or_else(|| SteeringError::ShapeMismatch("dimensions overflow".into()))?;
        if values.len() != expected {
            return Err(SteeringError::ShapeMismatch(format!(
                "{} values for {num_layers}x{num_samples}x{hidden_dim}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(SteeringError::NonFinite);
        }
        Ok(Self { language, num_layers, num_samples, hidden_dim, values, token_mask: None })
    }

    pub fn with_token_mask(mut self, mask: Vec<TokenClass>) -> Result<Self, SteeringError> {
        if mask.len() != self.num_samples {
            return Err(SteeringError::ShapeMismatch(format!(
                "token mask has {} entries for {} samples",
                mask.len(),
                self.num_samples
            )));
        }
        self.token_mask = Some(mask);
        Ok(self)
    }

    pub fn num_layers(&self) -> usize {
        self.num_layers
    }

    pub fn num_samples(&self) -> usize {
        self.num_samples
    }

    pub fn hidden_dim(&self) -> usize {
        self.hidden_dim
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn token_mask(&self) -> Option<&[TokenClass]> {
        self.token_mask.as_deref()
    }

    fn offset(&self, layer: usize, sample: usize) -> usize {
        (layer * self.num_samples + sample) * self.hidden_dim
    }

    /// Hidden state of one position.
    pub fn hidden(&self, layer: usize, sample: usize) -> &[T] {
        let o = self.offset(layer, sample);
        &self.values[o..o + self.hidden_dim]
    }

    fn hidden_mut(&mut self, layer: usize, sample: usize) -> &mut [T] {
        let o = self.offset(layer, sample);
        &mut self.values[o..o + self.hidden_dim]
    }

    /// Mean hidden state of a layer over all positions.
    pub fn layer_mean(&self, layer: usize) -> Vec<T> {
        let mut mean = vec![T::zero(); self.hidden_dim];
        for s in 0..self.num_samples {
            for (m, &v) in mean.iter_mut().zip(self.hidden(layer, s)) {
                *m += v;
            }
        }
        let n = T::from_usize_lossy(self.num_samples.max(1));
        mean.iter_mut().for_each(|m| *m /= n);
        mean
    }

    /// Serialize in the `ACTV` binary format (float32 little-endian payload).
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<(), SteeringError> {
        w.write_all(DUMP_MAGIC)?;
        w.write_all(&DUMP_VERSION.to_le_bytes())?;
        for dim in [self.num_layers, self.num_samples, self.hidden_dim] {
            let dim = u32::try_from(dim).map_err(|_| SteeringError::Format("dimension exceeds u32".into()))?;
            w.write_all(&dim.to_le_bytes())?;
        }
        w.write_all(&[self.token_mask.is_some() as u8])?;
        for v in &self.values {
            let f = v.to_f32().ok_or(SteeringError::NonFinite)?;
            w.write_all(&f.to_le_bytes())?;
        }
        if let Some(mask) = &self.token_mask {
            let bytes: Vec<u8> = mask.iter().map(|t| t.to_byte()).collect();
            w.write_all(&bytes)?;
        }
        Ok(())
    }

    /// Parse the `ACTV` binary format. The language is not stored in the file.
    pub fn read_from<R: Read>(mut r: R, language: LanguageTag) -> Result<Self, SteeringError> {
        let truncated = |e: io::Error| {
            if e.kind() == io::ErrorKind::UnexpectedEof {
                SteeringError::Format("truncated dump".into())
            } else {
                SteeringError::Io(e)
            }
        };
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic).map_err(truncated)?;
        if &magic != DUMP_MAGIC {
            return Err(SteeringError::Format(format!("bad magic {magic:?}")));
        }
        let mut word = [0u8; 4];
        let mut read_u32 = |r: &mut R| -> Result<u32, SteeringError> {
            r.read_exact(&mut word).map_err(truncated)?;
            Ok(u32::from_le_bytes(word))
        };
        let version = read_u32(&mut r)?;
        if version != DUMP_VERSION {
            return Err(SteeringError::Format(format!("unsupported version {version}")));
        }
        let num_layers = read_u32(&mut r)? as usize;
        let num_samples = read_u32(&mut r)? as usize;
        let hidden_dim = read_u32(&mut r)? as usize;
        let mut flag = [0u8; 1];
        r.read_exact(&mut flag).map_err(truncated)?;
        let has_mask = match flag[0] {
            0 => false,
            1 => true,
            other => return Err(SteeringError::Format(format!("bad token-mask flag {other}"))),
        };
        let count = num_layers
            .checked_mul(num_samples)
            .and_then(|v| v.checked_mul(hidden_dim))
            .ok_or_else(|| SteeringError::Format("dimensions overflow".into()))?;
        let mut payload =
            vec![0u8; count.checked_mul(4).ok_or_else(|| SteeringError::Format("dimensions overflow".into()))?];
        r.read_exact(&mut payload).map_err(truncated)?;
        let values: Vec<T> = payload
            .chunks_exact(4)
            .map(|c| T::from_f32(f32::from_le_bytes([c[0], c[1], c[2], c[3]])).ok_or(SteeringError::NonFinite))
            .collect::<Result<_, _>>()?;
        let mut dump = Self::new(language, num_layers, num_samples, hidden_dim, values)?;
        if has_mask {
            let mut mask = vec![0u8; num_samples];
            r.read_exact(&mut mask).map_err(truncated)?;
            let mask = mask.into_iter().map(TokenClass::from_byte).collect::<Result<_, _>>()?;
            dump = dump.with_token_mask(mask)?;
        }
        let mut rest = [0u8; 1];
        if r.read(&mut rest)? != 0 {
            return Err(SteeringError::Format("trailing bytes after dump".into()));
        }
        Ok(dump)
    }
}

/// Per-layer steering directions towards English (`forward`) and away from
/// it (`backward`, always the negation of `forward`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteeringVectors<T> {
    pub forward: Vec<Vec<T>>,
    pub backward: Vec<Vec<T>>,
}

impl<T: Scalar> SteeringVectors<T> {
    pub fn num_layers(&self) -> usize {
        self.forward.len()
    }

    pub fn hidden_dim(&self) -> usize {
        self.forward.first().map_or(0, Vec::len)
    }
}

/// Layer ranges and scale of a steering intervention.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteeringConfig<T> {
    pub c: T,
    pub forward_start_layer: usize,
    pub forward_num_layers: usize,
    pub backward_start_layer: usize,
    pub backward_num_layers: usize,
    pub total_layers: usize,
    /// Also steer positions marked as image tokens.
    #[serde(default)]
    pub steer_images: bool,
}

/// Scale `1 / (2N)` for `N` steered layers per direction.
pub fn half_inverse_scale<T: Scalar>(layers: usize) -> T {
    T::one() / T::from_usize_lossy(2 * layers)
}

impl<T: Scalar> SteeringConfig<T> {
    /// 36-layer model: forward on layers 6..=10, backward on 21..=25,
    /// `c = 1/(2N)` with `N = 5`.
    pub fn qwen25_3b() -> Self {
        Self {
            c: half_inverse_scale(5),
            forward_start_layer: 6,
            forward_num_layers: 5,
            backward_start_layer: 21,
            backward_num_layers: 5,
            total_layers: 36,
            steer_images: false,
        }
    }

    /// 28-layer model: forward on layer 5 only, backward on layer 20 only,
    /// `c = 0.3`.
    pub fn qwen25_7b() -> Self {
        Self {
            c: T::lit(0.3),
            forward_start_layer: 5,
            forward_num_layers: 1,
            backward_start_layer: 20,
            backward_num_layers: 1,
            total_layers: 28,
            steer_images: false,
        }
    }

    pub fn forward_range(&self) -> Range<usize> {
        self.forward_start_layer..self.forward_start_layer + self.forward_num_layers
    }

    pub fn backward_range(&self) -> Range<usize> {
        self.backward_start_layer..self.backward_start_layer + self.backward_num_layers
    }

    pub fn validate(&self) -> Result<(), SteeringError> {
        if !self.c.is_finite() {
            return Err(SteeringError::InvalidRange("c must be finite".into()));
        }
        let (f, b) = (self.forward_range(), self.backward_range());
        if f.end > self.total_layers || b.end > self.total_layers {
            return Err(SteeringError::InvalidRange(format!(
                "ranges {f:?} / {b:?} exceed {} layers",
                self.total_layers
            )));
        }
        if !f.is_empty() && !b.is_empty() && f.end > b.start {
            return Err(SteeringError::InvalidRange(format!("forward {f:?} does not precede backward {b:?}")));
        }
        Ok(())
    }
}

/// `forward[l] = mean(en, l) - mean(o, l)`, pooled over all positions;
/// `backward[l] = -forward[l]`.
pub fn compute_steering_vectors<T: Scalar>(
    dump_o: &ActivationDump<T>,
    dump_en: &ActivationDump<T>,
) -> Result<SteeringVectors<T>, SteeringError> {
    if dump_o.num_layers != dump_en.num_layers || dump_o.hidden_dim != dump_en.hidden_dim {
        return Err(SteeringError::ShapeMismatch(format!(
            "{}x{} vs {}x{} (layers x hidden)",
            dump_o.num_layers, dump_o.hidden_dim, dump_en.num_layers, dump_en.hidden_dim
        )));
    }
    if dump_o.num_samples == 0 || dump_en.num_samples == 0 {
        return Err(SteeringError::ShapeMismatch("dump has no samples".into()));
    }
    let forward: Vec<Vec<T>> = (0..dump_o.num_layers)
        .map(|l| {
            let mo = dump_o.layer_mean(l);
            dump_en.layer_mean(l).into_iter().zip(mo).map(|(e, o)| e - o).collect()
        })
        .collect();
    let backward = forward.iter().map(|z| z.iter().map(|&v| -v).collect()).collect();
    Ok(SteeringVectors { forward, backward })
}

/// Add `c * forward[l]` on the forward range and `c * backward[l]` on the
/// backward range; every other layer is copied unchanged. Image-token
/// positions are skipped unless `cfg.steer_images` is set.
pub fn apply_steering<T: Scalar>(
    dump: &ActivationDump<T>,
    vectors: &SteeringVectors<T>,
    cfg: &SteeringConfig<T>,
) -> Result<ActivationDump<T>, SteeringError> {
    cfg.validate()?;
    if cfg.total_layers != dump.num_layers || vectors.num_layers() != dump.num_layers {
        return Err(SteeringError::ShapeMismatch(format!(
            "config {} / vectors {} / dump {} layers",
            cfg.total_layers,
            vectors.num_layers(),
            dump.num_layers
        )));
    }
    if vectors.forward.iter().chain(&vectors.backward).any(|z| z.len() != dump.hidden_dim) {
        return Err(SteeringError::ShapeMismatch("steering vector width differs from hidden_dim".into()));
    }
    let mut out = dump.clone();
    let steerable = |s: usize| cfg.steer_images || dump.token_mask.as_ref().is_none_or(|m| m[s] == TokenClass::Text);
    let passes = [(cfg.forward_range(), &vectors.forward), (cfg.backward_range(), &vectors.backward)];
    for (range, z) in passes {
        for layer in range {
            for s in (0..dump.num_samples).filter(|&s| steerable(s)) {
                for (h, &dz) in out.hidden_mut(layer, s).iter_mut().zip(&z[layer]) {
                    *h += cfg.c * dz;
                }
            }
        }
    }
    Ok(out)
}
