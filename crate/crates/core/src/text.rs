//! Word-level prompt vocabulary and fixed-length `[CLS] … [SEP] [PAD]…`
//! framing.

use rand::seq::SliceRandom;
use rand::Rng;
use sha2::{Digest, Sha256};
use std::collections::HashMap;
use std::io::{self, BufRead, Write};
use thiserror::Error;

pub const TEXT_LEN: usize = 50;
/// Word slots between `[CLS]` and `[SEP]`.
pub const MAX_WORDS: usize = TEXT_LEN - 2;

pub const PAD: u32 = 0;
pub const UNK: u32 = 1;
pub const CLS: u32 = 2;
pub const SEP: u32 = 3;
const RESERVED: u32 = 4;

#[derive(Debug, Error)]
pub enum TextError {
    #[error("cannot build a vocabulary from an empty corpus")]
    EmptyCorpus,
    #[error("duplicate vocabulary entry `{token}` on line {line}")]
    Duplicate { token: String, line: usize },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Lowercases and splits on anything that is not alphanumeric.
pub fn words(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TextVocab {
    tokens: Vec<String>,
    index: HashMap<String, u32>,
}

impl TextVocab {
    /// Keeps words seen at least `min_freq` times; ids ordered by
    /// descending frequency, then lexicographically.
    pub fn build<S: AsRef<str>>(corpus: &[S], min_freq: usize) -> Result<Self, TextError> {
        if corpus.is_empty() {
            return Err(TextError::EmptyCorpus);
        }
        let mut freq: HashMap<String, usize> = HashMap::new();
        for line in corpus {
            for w in words(line.as_ref()) {
                *freq.entry(w).or_default() += 1;
            }
        }
        let mut kept: Vec<(String, usize)> = freq.into_iter().filter(|&(_, n)| n >= min_freq).collect();
        kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        Ok(Self::from_tokens(kept.into_iter().map(|(w, _)| w).collect()))
    }

    fn from_tokens(tokens: Vec<String>) -> Self {
        let index = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32 + RESERVED))
            .collect();
        Self { tokens, index }
    }

    /// Total id count, reserved ids included.
    pub fn len(&self) -> usize {
        self.tokens.len() + RESERVED as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn id(&self, word: &str) -> u32 {
        self.index.get(word).copied().unwrap_or(UNK)
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        match id {
            PAD => Some("[PAD]"),
            UNK => Some("[UNK]"),
            CLS => Some("[CLS]"),
            SEP => Some("[SEP]"),
            i => self.tokens.get((i - RESERVED) as usize).map(String::as_str),
        }
    }

    pub fn words(&self) -> &[String] {
        &self.tokens
    }

    fn frame(&self, ids: impl Iterator<Item = u32>) -> TextSequence {
        let mut out = Vec::with_capacity(TEXT_LEN);
        out.push(CLS);
        out.extend(ids.take(MAX_WORDS));
        out.push(SEP);
        out.resize(TEXT_LEN, PAD);
        TextSequence(out)
    }

    pub fn encode(&self, prompt: &str) -> TextSequence {
        self.frame(words(prompt).map(|w| self.id(&w)))
    }

    /// Keyword-mode encoding: keyword order is shuffled before framing.
    pub fn encode_keywords<S: AsRef<str>, R: Rng + ?Sized>(&self, keywords: &[S], rng: &mut R) -> TextSequence {
        let mut order: Vec<&str> = keywords.iter().map(AsRef::as_ref).collect();
        order.shuffle(rng);
        self.frame(order.into_iter().flat_map(words).map(|w| self.id(&w)))
    }

    /// One token per line; line `i` holds id `4 + i`.
    pub fn write<W: Write>(&self, mut w: W) -> io::Result<()> {
        for t in &self.tokens {
            writeln!(w, "{t}")?;
        }
        Ok(())
    }

    pub fn read<R: BufRead>(r: R) -> Result<Self, TextError> {
        let mut tokens = Vec::new();
        let mut seen = HashMap::new();
        for (n, line) in r.lines().enumerate() {
            let line = line?;
            if seen.insert(line.clone(), ()).is_some() {
                return Err(TextError::Duplicate { token: line, line: n + 1 });
            }
            tokens.push(line);
        }
        Ok(Self::from_tokens(tokens))
    }

    /// Hex SHA-256 of the serialized vocabulary.
    pub fn hash(&self) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf).expect("writing to memory");
        hex(&Sha256::digest(&buf))
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// A framed prompt, always [`TEXT_LEN`] ids long.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TextSequence(Vec<u32>);

impl TextSequence {
    pub fn ids(&self) -> &[u32] {
        &self.0
    }

    pub fn blank() -> Self {
        let mut v = vec![CLS, SEP];
        v.resize(TEXT_LEN, PAD);
        TextSequence(v)
    }
}
