//! Autoregressive generation: text-conditioned sampling, infilling,
//! next-path suggestion and prompt interpolation.
//!
//! Every icon position draws from its own random stream, derived from the
//! strategy seed and the position index. A resumed generation (suggestion,
//! infill) therefore makes the same draws as a single uninterrupted run over
//! the same prefix.

mod grammar;

pub use grammar::{Allowed, Grammar, GrammarState};

use crate::dataset::MAX_ICON_TOKENS;
use crate::joint::JointVocab;
use crate::masking::{reassemble, MaskError};
use crate::model::{ModelError, Params, Session};
use crate::svg::{Icon, Point, SvgPath};
use crate::text::{TextSequence, TextVocab, TEXT_LEN};
use crate::tokenizer::{decode_icon, encode_paths, DecodeMode, TokenError, BOP, EOM, EOS, MASK, SVG_VOCAB_SIZE};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SampleError {
    #[error("invalid strategy: {0}")]
    Strategy(String),
    #[error("prompt needs {needed} icon positions, budget is {budget}")]
    PromptTooLong { needed: usize, budget: usize },
    #[error("generation failed: {0}")]
    Failed(String),
    #[error("budget of {0} tokens exhausted before the span closed")]
    Truncated(usize),
    #[error("alpha {0} outside [0, 1]")]
    Alpha(f64),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Token(#[from] TokenError),
    #[error(transparent)]
    Mask(#[from] MaskError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecodeKind {
    Greedy,
    Temperature,
    TopK,
    Nucleus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecodeStrategy {
    pub kind: DecodeKind,
    pub temperature: f64,
    pub k: usize,
    pub p: f64,
    pub grammar_constrained: bool,
    pub max_icon_tokens: usize,
    pub seed: u64,
}

impl Default for DecodeStrategy {
    fn default() -> Self {
        Self {
            kind: DecodeKind::Nucleus,
            temperature: 1.0,
            k: 50,
            p: 0.9,
            grammar_constrained: true,
            max_icon_tokens: MAX_ICON_TOKENS,
            seed: 0,
        }
    }
}

impl DecodeStrategy {
    pub fn greedy() -> Self {
        Self {
            kind: DecodeKind::Greedy,
            ..Default::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), SampleError> {
        let bad = |m: String| Err(SampleError::Strategy(m));
        if !(self.temperature.is_finite() && self.temperature > 0.0) {
            return bad(format!("temperature {} must be positive", self.temperature));
        }
        if self.kind == DecodeKind::TopK && self.k == 0 {
            return bad("top-k needs k >= 1".into());
        }
        if self.kind == DecodeKind::Nucleus && !(self.p > 0.0 && self.p <= 1.0) {
            return bad(format!("nucleus p {} outside (0, 1]", self.p));
        }
        if self.max_icon_tokens == 0 || self.max_icon_tokens > MAX_ICON_TOKENS {
            return bad(format!("max_icon_tokens {} outside [1, {MAX_ICON_TOKENS}]", self.max_icon_tokens));
        }
        Ok(())
    }

    fn rng_at(&self, position: usize) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(position as u64);
        r
    }

    /// Picks one candidate. `cands` holds `(svg id, logit)`.
    fn choose(&self, cands: &mut Vec<(u16, f64)>, position: usize) -> u16 {
        debug_assert!(!cands.is_empty());
        if self.kind == DecodeKind::Greedy {
            // Lowest id wins ties.
            let mut best = cands[0];
            for &c in cands.iter().skip(1) {
                if c.1 > best.1 {
                    best = c;
                }
            }
            return best.0;
        }
        let t = self.temperature;
        let max = cands.iter().fold(f64::NEG_INFINITY, |m, c| m.max(c.1));
        for c in cands.iter_mut() {
            c.1 = ((c.1 - max) / t).exp();
        }
        match self.kind {
            DecodeKind::TopK => {
                cands.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
                cands.truncate(self.k);
            }
            DecodeKind::Nucleus => {
                cands.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
                let total: f64 = cands.iter().map(|c| c.1).sum();
                let mut acc = 0.0;
                let mut keep = cands.len();
                for (i, c) in cands.iter().enumerate() {
                    acc += c.1 / total;
                    if acc >= self.p {
                        keep = i + 1;
                        break;
                    }
                }
                cands.truncate(keep);
            }
            _ => {}
        }
        let total: f64 = cands.iter().map(|c| c.1).sum();
        let u: f64 = self.rng_at(position).gen::<f64>() * total;
        let mut acc = 0.0;
        for c in cands.iter() {
            acc += c.1;
            if u < acc {
                return c.0;
            }
        }
        cands.last().unwrap().0
    }
}

/// Decoded tokens, plus the scores seen at each generated position when
/// tracing.
#[derive(Clone, Debug, PartialEq)]
pub struct DecodeTrace {
    pub tokens: Vec<u16>,
    pub logits: Vec<Vec<f32>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Suggestion {
    Path(SvgPath<Point>),
    EndOfIcon,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Filled {
    pub icon: Icon,
    /// The generated span as paths, in drawing order.
    pub span: Vec<SvgPath<Point>>,
}

/// Frozen parameters plus the text vocabulary they were trained with.
#[derive(Clone, Copy)]
pub struct Sampler<'a> {
    pub params: &'a Params<f32>,
    pub vocab: &'a TextVocab,
}

enum Stop {
    End,
    BoundaryAfterPath,
}

impl<'a> Sampler<'a> {
    pub fn new(params: &'a Params<f32>, vocab: &'a TextVocab) -> Self {
        Self { params, vocab }
    }

    fn joint(&self) -> JointVocab {
        self.params.config.joint()
    }

    /// Icon positions the model and strategy allow.
    pub fn budget(&self, strategy: &DecodeStrategy) -> usize {
        let positional = self.params.config.max_len.saturating_sub(TEXT_LEN);
        strategy.max_icon_tokens.min(positional)
    }

    pub fn encode_text(&self, text: &str) -> TextSequence {
        self.vocab.encode(text)
    }

    /// Pushes `<SOS>`, the framed prompt and `prefix`; returns the session and
    /// the scores for the next icon token.
    fn prompt(&self, text: &TextSequence, prefix: &[u16]) -> Result<(Session<'a, f32>, Vec<f32>), SampleError> {
        let joint = self.joint();
        let mut s = Session::new(self.params);
        let mut last = s.push_token(joint.sos())?;
        for &t in text.ids() {
            last = s.push_token(joint.text(t))?;
        }
        for &t in prefix {
            last = s.push_token(joint.svg(t))?;
        }
        Ok((s, last))
    }

    fn interpolated_prompt(&self, a: &TextSequence, b: &TextSequence, alpha: f64) -> Result<(Session<'a, f32>, Vec<f32>), SampleError> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(SampleError::Alpha(alpha));
        }
        let joint = self.joint();
        let (wa, wb) = ((1.0 - alpha) as f32, alpha as f32);
        let ids_a = std::iter::once(joint.sos()).chain(a.ids().iter().map(|&t| joint.text(t)));
        let ids_b = std::iter::once(joint.sos()).chain(b.ids().iter().map(|&t| joint.text(t)));
        let mut s = Session::new(self.params);
        let mut last = Vec::new();
        for (pos, (ia, ib)) in ids_a.zip(ids_b).enumerate() {
            let ea = self.params.embed_token(ia, pos)?;
            let eb = self.params.embed_token(ib, pos)?;
            let mixed = ea.iter().zip(&eb).map(|(&x, &y)| wa * x + wb * y).collect();
            last = s.push_embedding(mixed)?;
        }
        Ok((s, last))
    }

    fn candidates(&self, logits: &[f32], allowed: Option<&Allowed>) -> Vec<(u16, f64)> {
        let off = self.joint().svg_offset();
        let svg = &logits[off..off + SVG_VOCAB_SIZE];
        match allowed {
            None => svg.iter().enumerate().map(|(i, &l)| (i as u16, l as f64)).collect(),
            Some(Allowed::Tokens(t)) => t.iter().map(|&i| (i, svg[i as usize] as f64)).collect(),
            Some(Allowed::Locations) => (crate::tokenizer::LOC_BASE..BOP).map(|i| (i, svg[i as usize] as f64)).collect(),
        }
    }

    /// Samples icon tokens after `tokens` (the prefix already in `session`).
    /// Returns `Err(Truncated)` when the budget runs out before `stop`.
    #[allow(clippy::too_many_arguments)]
    fn decode(
        &self,
        session: &mut Session<'a, f32>,
        mut logits: Vec<f32>,
        tokens: &mut Vec<u16>,
        mut grammar: Grammar,
        stop: Stop,
        strategy: &DecodeStrategy,
        mut trace: Option<&mut Vec<Vec<f32>>>,
    ) -> Result<(), SampleError> {
        let budget = self.budget(strategy);
        let joint = self.joint();
        let mut seen_bop = false;
        loop {
            let pos = tokens.len();
            if pos >= budget {
                return Err(SampleError::Truncated(budget));
            }
            let allowed = if strategy.grammar_constrained {
                Some(grammar.allowed(budget - pos).ok_or(SampleError::Truncated(budget))?)
            } else {
                None
            };
            if let Some(t) = trace.as_deref_mut() {
                t.push(logits.clone());
            }
            let mut cands = self.candidates(&logits, allowed.as_ref());
            let tok = strategy.choose(&mut cands, pos);
            tokens.push(tok);
            if strategy.grammar_constrained {
                grammar.advance(tok);
            }
            let finished = match stop {
                Stop::End => tok == grammar.end,
                Stop::BoundaryAfterPath => {
                    let done = tok == EOS || (tok == BOP && seen_bop);
                    seen_bop |= tok == BOP;
                    done
                }
            };
            if finished {
                return Ok(());
            }
            if pos + 1 < budget {
                logits = session.push_token(joint.svg(tok))?;
            }
        }
    }

    fn check_prompt(&self, needed: usize, strategy: &DecodeStrategy) -> Result<(), SampleError> {
        strategy.validate()?;
        let budget = self.budget(strategy);
        if needed >= budget {
            return Err(SampleError::PromptTooLong { needed, budget });
        }
        Ok(())
    }

    pub fn generate_trace(&self, text: &str, strategy: &DecodeStrategy, record: bool) -> Result<DecodeTrace, SampleError> {
        self.check_prompt(0, strategy)?;
        let (mut s, logits) = self.prompt(&self.encode_text(text), &[])?;
        self.finish_generation(&mut s, logits, strategy, record)
    }

    fn finish_generation(
        &self,
        s: &mut Session<'a, f32>,
        logits: Vec<f32>,
        strategy: &DecodeStrategy,
        record: bool,
    ) -> Result<DecodeTrace, SampleError> {
        let mut tokens = Vec::new();
        let mut trace = Vec::new();
        let res = self.decode(
            s,
            logits,
            &mut tokens,
            Grammar::new(EOS),
            Stop::End,
            strategy,
            record.then_some(&mut trace),
        );
        match res {
            Ok(()) => {}
            // Unconstrained runs keep whatever was produced.
            Err(SampleError::Truncated(_)) if !strategy.grammar_constrained => {}
            Err(e) => return Err(e),
        }
        Ok(DecodeTrace { tokens, logits: trace })
    }

    fn decode_result(&self, tokens: &[u16], strategy: &DecodeStrategy) -> Result<Icon, SampleError> {
        let mode = if strategy.grammar_constrained {
            DecodeMode::Strict
        } else {
            DecodeMode::Lenient
        };
        decode_icon(tokens, mode).map_err(|e| SampleError::Failed(e.to_string()))
    }

    /// Samples an icon conditioned on `text` (blank for unconditional).
    pub fn generate(&self, text: &str, strategy: &DecodeStrategy) -> Result<Icon, SampleError> {
        let trace = self.generate_trace(text, strategy, false)?;
        self.decode_result(&trace.tokens, strategy)
    }

    pub fn interpolate_trace(
        &self,
        text_a: &str,
        text_b: &str,
        alpha: f64,
        strategy: &DecodeStrategy,
        record: bool,
    ) -> Result<DecodeTrace, SampleError> {
        self.check_prompt(0, strategy)?;
        let (a, b) = (self.encode_text(text_a), self.encode_text(text_b));
        let (mut s, logits) = self.interpolated_prompt(&a, &b, alpha)?;
        self.finish_generation(&mut s, logits, strategy, record)
    }

    /// Samples an icon conditioned on the position-wise blend
    /// `(1 - alpha) * embed(a) + alpha * embed(b)` of the two framed prompts.
    pub fn interpolate_generate(&self, text_a: &str, text_b: &str, alpha: f64, strategy: &DecodeStrategy) -> Result<Icon, SampleError> {
        let trace = self.interpolate_trace(text_a, text_b, alpha, strategy, false)?;
        self.decode_result(&trace.tokens, strategy)
    }

    /// Generates the paths between `left` and `right` from the prompt
    /// `left <Mask> right <EOS> <Mask>`, stopping at `<EOM>`.
    pub fn fill_in_middle(
        &self,
        text: &str,
        left: &[SvgPath<Point>],
        right: &[SvgPath<Point>],
        strategy: &DecodeStrategy,
    ) -> Result<Filled, SampleError> {
        let mut prompt = encode_paths(left);
        prompt.push(MASK);
        prompt.extend(encode_paths(right));
        prompt.push(EOS);
        prompt.push(MASK);
        self.check_prompt(prompt.len(), strategy)?;
        let (mut s, logits) = self.prompt(&self.encode_text(text), &prompt)?;
        let mut tokens = prompt.clone();
        let res = self.decode(&mut s, logits, &mut tokens, Grammar::new(EOM), Stop::End, strategy, None);
        match res {
            Ok(()) => {}
            Err(SampleError::Truncated(_)) if !strategy.grammar_constrained => tokens.push(EOM),
            Err(e) => return Err(e),
        }
        if !strategy.grammar_constrained {
            // Stray markers inside the span would break reassembly.
            let span_start = prompt.len();
            let end = tokens.len() - 1;
            if tokens[span_start..end].iter().any(|&t| t == MASK || t == EOM || t == EOS) {
                let cut = tokens[span_start..end]
                    .iter()
                    .position(|&t| t == MASK || t == EOM || t == EOS)
                    .unwrap();
                tokens.truncate(span_start + cut);
                tokens.push(EOM);
            }
        }
        let span_tokens = tokens[prompt.len()..tokens.len() - 1].to_vec();
        let full = reassemble(&tokens)?;
        let icon = self.decode_result(&full, strategy)?;
        let span = if span_tokens.is_empty() {
            Vec::new()
        } else {
            let mut with_end = span_tokens;
            with_end.push(EOS);
            match decode_icon(&with_end, DecodeMode::Lenient) {
                Ok(i) => i.into_paths(),
                Err(_) => Vec::new(),
            }
        };
        Ok(Filled { icon, span })
    }

    /// Continues generation after the whole paths in `partial` and returns
    /// the next complete path, or [`Suggestion::EndOfIcon`] when `<EOS>`
    /// comes first. Commands that extend the last partial path before the
    /// next `<BOP>` are not part of the suggestion.
    pub fn suggest_next_path(&self, text: &str, partial: &[SvgPath<Point>], strategy: &DecodeStrategy) -> Result<Suggestion, SampleError> {
        let prefix = encode_paths(partial);
        self.check_prompt(prefix.len(), strategy)?;
        let (mut s, logits) = self.prompt(&self.encode_text(text), &prefix)?;
        let grammar = if partial.is_empty() {
            Grammar::new(EOS)
        } else {
            Grammar::at_boundary(EOS)
        };
        let mut tokens = prefix.clone();
        let res = self.decode(&mut s, logits, &mut tokens, grammar, Stop::BoundaryAfterPath, strategy, None);
        let truncated = match res {
            Ok(()) => false,
            Err(SampleError::Truncated(_)) => true,
            Err(e) => return Err(e),
        };
        let new = &tokens[prefix.len()..];
        let Some(bop) = new.iter().position(|&t| t == BOP) else {
            return if truncated {
                Err(SampleError::Truncated(self.budget(strategy)))
            } else {
                Ok(Suggestion::EndOfIcon)
            };
        };
        let mut path = new[bop..].to_vec();
        if !truncated {
            path.pop();
        }
        path.push(EOS);
        let mode = if strategy.grammar_constrained && !truncated {
            DecodeMode::Strict
        } else {
            DecodeMode::Lenient
        };
        let icon = decode_icon(&path, mode).map_err(|e| SampleError::Failed(e.to_string()))?;
        Ok(Suggestion::Path(icon.into_paths().remove(0)))
    }
}
