//! Span relocation for fill-in-the-middle training:
//! `seq = Left ++ Span ++ Right` becomes
//! `Left ++ <Mask> ++ Right ++ <Mask> ++ Span ++ <EOM>`.

use crate::tokenizer::{BOP, EOM, EOS, MASK};
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MaskError {
    #[error("span [{start}, {start}+{len}) out of bounds for length {seq_len}")]
    SpanRange {
        start: usize,
        len: usize,
        seq_len: usize,
    },
    #[error("sequence has no <BOP> to anchor a path-aligned span")]
    NoPath,
    #[error("sequence has no maskable tokens")]
    NothingToMask,
    #[error("missing {0} <Mask> marker")]
    MissingMask(&'static str),
    #[error("more than two <Mask> markers")]
    ExtraMask,
    #[error("missing <EOM> after the span")]
    MissingEom,
    #[error("{0} tokens after <EOM>")]
    TrailingTokens(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaskedSample {
    pub masked: Vec<u16>,
    pub span_start: usize,
    pub span_len: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpanPolicy {
    /// A contiguous run of whole paths.
    #[default]
    PathAligned,
    /// Any contiguous run of tokens before `<EOS>`.
    TokenLevel,
}

pub fn apply_causal_mask(seq: &[u16], span_start: usize, span_len: usize) -> Result<MaskedSample, MaskError> {
    let end = span_start.checked_add(span_len);
    if span_len == 0 || end.map_or(true, |e| e > seq.len()) {
        return Err(MaskError::SpanRange {
            start: span_start,
            len: span_len,
            seq_len: seq.len(),
        });
    }
    let end = span_start + span_len;
    let mut masked = Vec::with_capacity(seq.len() + 3);
    masked.extend_from_slice(&seq[..span_start]);
    masked.push(MASK);
    masked.extend_from_slice(&seq[end..]);
    masked.push(MASK);
    masked.extend_from_slice(&seq[span_start..end]);
    masked.push(EOM);
    Ok(MaskedSample {
        masked,
        span_start,
        span_len,
    })
}

/// Picks `(span_start, span_len)`. The span never covers `<EOS>`.
pub fn sample_span<R: Rng + ?Sized>(seq: &[u16], rng: &mut R, policy: SpanPolicy) -> Result<(usize, usize), MaskError> {
    let limit = seq.iter().position(|&t| t == EOS).unwrap_or(seq.len());
    match policy {
        SpanPolicy::PathAligned => {
            let starts: Vec<usize> = seq[..limit]
                .iter()
                .enumerate()
                .filter(|&(_, &t)| t == BOP)
                .map(|(i, _)| i)
                .collect();
            if starts.is_empty() {
                return Err(MaskError::NoPath);
            }
            let first = rng.gen_range(0..starts.len());
            let count = rng.gen_range(1..=starts.len() - first);
            let end = starts.get(first + count).copied().unwrap_or(limit);
            Ok((starts[first], end - starts[first]))
        }
        SpanPolicy::TokenLevel => {
            if limit == 0 {
                return Err(MaskError::NothingToMask);
            }
            let start = rng.gen_range(0..limit);
            let len = rng.gen_range(1..=limit - start);
            Ok((start, len))
        }
    }
}

/// Moves the span back between Left and Right and strips the markers.
pub fn reassemble(seq: &[u16]) -> Result<Vec<u16>, MaskError> {
    let mut masks = seq.iter().enumerate().filter(|&(_, &t)| t == MASK).map(|(i, _)| i);
    let first = masks.next().ok_or(MaskError::MissingMask("first"))?;
    let second = masks.next().ok_or(MaskError::MissingMask("second"))?;
    if masks.next().is_some() {
        return Err(MaskError::ExtraMask);
    }
    let eom = seq[second + 1..]
        .iter()
        .position(|&t| t == EOM)
        .map(|p| p + second + 1)
        .ok_or(MaskError::MissingEom)?;
    if eom + 1 != seq.len() {
        return Err(MaskError::TrailingTokens(seq.len() - eom - 1));
    }
    let (left, right, span) = (&seq[..first], &seq[first + 1..second], &seq[second + 1..eom]);
    let mut out = Vec::with_capacity(seq.len() - 3);
    out.extend_from_slice(left);
    out.extend_from_slice(span);
    out.extend_from_slice(right);
    Ok(out)
}
