use super::{Record, MAX_ICON_TOKENS, SEQ_LEN};
use crate::joint::JointVocab;
use crate::masking::{apply_causal_mask, sample_span, SpanPolicy};
use crate::text::{self, TextSequence, TextVocab, TEXT_LEN};
use crate::tokenizer::{encode_icon, MASK};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TextMode {
    Keywords,
    Phrase,
    Blank,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Segment {
    Text,
    Icon,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SampleConfig {
    /// Probability of applying the span-relocation rewrite.
    pub mask_prob: f64,
    pub span_policy: SpanPolicy,
    pub keyword_ratio: f64,
    pub phrase_ratio: f64,
    /// Forces a single text mode instead of the ratio draw.
    pub fixed_text_mode: Option<TextMode>,
}

impl Default for SampleConfig {
    fn default() -> Self {
        Self {
            mask_prob: 0.5,
            span_policy: SpanPolicy::PathAligned,
            keyword_ratio: 0.6,
            phrase_ratio: 0.3,
            fixed_text_mode: None,
        }
    }
}

/// A fully laid-out training example over the joint vocabulary.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainingSample {
    /// `<SOS>` followed by `target_ids[..SEQ_LEN - 1]`.
    pub input_ids: Vec<u32>,
    /// 50 text ids then 512 icon ids, both padded.
    pub target_ids: Vec<u32>,
    pub loss_weight: Vec<f32>,
    pub segment: Vec<Segment>,
    pub text_mode: TextMode,
    pub masked: bool,
}

impl TrainingSample {
    /// Builds the shifted, weighted layout from a framed prompt and an icon
    /// token sequence (already masked, if masking applies).
    pub fn assemble(joint: &JointVocab, text: &TextSequence, icon_tokens: &[u16], text_mode: TextMode, masked: bool) -> Self {
        assert!(icon_tokens.len() <= MAX_ICON_TOKENS, "icon sequence exceeds the budget");
        let mut target_ids = Vec::with_capacity(SEQ_LEN);
        let mut loss_weight = Vec::with_capacity(SEQ_LEN);
        for &t in text.ids() {
            target_ids.push(joint.text(t));
            loss_weight.push(if t == text::PAD { 0.0 } else { 1.0 });
        }
        for &t in icon_tokens {
            target_ids.push(joint.svg(t));
            loss_weight.push(if t == MASK { 0.0 } else { 1.0 });
        }
        target_ids.resize(SEQ_LEN, joint.pad());
        loss_weight.resize(SEQ_LEN, 0.0);
        let mut input_ids = Vec::with_capacity(SEQ_LEN);
        input_ids.push(joint.sos());
        input_ids.extend_from_slice(&target_ids[..SEQ_LEN - 1]);
        let segment = (0..SEQ_LEN)
            .map(|i| if i < TEXT_LEN { Segment::Text } else { Segment::Icon })
            .collect();
        Self {
            input_ids,
            target_ids,
            loss_weight,
            segment,
            text_mode,
            masked,
        }
    }

    /// One past the last position with non-zero loss weight.
    pub fn effective_len(&self) -> usize {
        self.loss_weight.iter().rposition(|&w| w > 0.0).map_or(0, |i| i + 1)
    }
}

pub fn draw_text_mode<R: Rng + ?Sized>(rng: &mut R, cfg: &SampleConfig) -> TextMode {
    if let Some(m) = cfg.fixed_text_mode {
        return m;
    }
    let u: f64 = rng.gen();
    if u < cfg.keyword_ratio {
        TextMode::Keywords
    } else if u < cfg.keyword_ratio + cfg.phrase_ratio {
        TextMode::Phrase
    } else {
        TextMode::Blank
    }
}

/// Draws a text mode, encodes the prompt and icon, optionally relocates a
/// span, and lays the result out as a shifted training sample.
pub fn make_training_sample<R: Rng + ?Sized>(
    record: &Record,
    vocab: &TextVocab,
    joint: &JointVocab,
    rng: &mut R,
    cfg: &SampleConfig,
) -> TrainingSample {
    let mode = draw_text_mode(rng, cfg);
    let text = match (mode, &record.phrase) {
        (TextMode::Blank, _) => TextSequence::blank(),
        (TextMode::Phrase, Some(p)) => vocab.encode(p),
        // Missing phrases fall back to keywords.
        (TextMode::Phrase, None) | (TextMode::Keywords, _) => vocab.encode_keywords(&record.keywords, rng),
    };
    let icon = encode_icon(&record.icon);
    let mut tokens = icon.0;
    let mut masked = false;
    if rng.gen::<f64>() < cfg.mask_prob && tokens.len() + 3 <= MAX_ICON_TOKENS {
        if let Ok((start, len)) = sample_span(&tokens, rng, cfg.span_policy) {
            tokens = apply_causal_mask(&tokens, start, len).expect("sampled span is in bounds").masked;
            masked = true;
        }
    }
    TrainingSample::assemble(joint, &text, &tokens, mode, masked)
}

/// Endless stream of training samples: records are visited in a fresh
/// shuffled order each epoch and re-augmented on every visit.
pub struct BatchStream<'a> {
    records: &'a [Record],
    vocab: &'a TextVocab,
    joint: JointVocab,
    cfg: SampleConfig,
    rng: ChaCha8Rng,
    order: Vec<usize>,
    cursor: usize,
}

impl<'a> BatchStream<'a> {
    pub fn new(records: &'a [Record], vocab: &'a TextVocab, cfg: SampleConfig, seed: u64) -> Self {
        assert!(!records.is_empty(), "empty training set");
        Self {
            records,
            vocab,
            joint: JointVocab::new(vocab.len()),
            cfg,
            rng: ChaCha8Rng::seed_from_u64(seed),
            order: Vec::new(),
            cursor: 0,
        }
    }

    pub fn next_batch(&mut self, size: usize) -> Vec<TrainingSample> {
        (0..size)
            .map(|_| {
                if self.cursor == self.order.len() {
                    self.order = (0..self.records.len()).collect();
                    self.order.shuffle(&mut self.rng);
                    self.cursor = 0;
                }
                let r = &self.records[self.order[self.cursor]];
                self.cursor += 1;
                make_training_sample(r, self.vocab, &self.joint, &mut self.rng, &self.cfg)
            })
            .collect()
    }
}
