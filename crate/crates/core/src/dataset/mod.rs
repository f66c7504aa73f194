//! Corpus handling: ingestion of annotated SVG directories, a procedural
//! stand-in corpus, and assembly of padded, shifted training samples.

mod cache;
mod ingest;
mod sample;
mod synth;

pub use cache::{read_prepared, write_prepared, Manifest, PreparedCorpus, MANIFEST, VOCAB_FILE};
pub use ingest::{ingest, split_for, IngestOptions, IngestReport, Split, INDEX_FILE};
pub use sample::{make_training_sample, BatchStream, SampleConfig, Segment, TextMode, TrainingSample};
pub use synth::{synth_corpus, Family, SynthConfig};

use crate::svg::{Icon, SvgError};
use crate::text::TextError;
use crate::tokenizer::TokenError;
use std::path::PathBuf;
use thiserror::Error;

/// Maximum icon sequence length, `<EOS>` included.
pub const MAX_ICON_TOKENS: usize = 512;
/// Text segment + icon segment.
pub const SEQ_LEN: usize = crate::text::TEXT_LEN + MAX_ICON_TOKENS;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("annotation line {line}: {message}")]
    Annotation { line: usize, message: String },
    #[error("corpus cache: {0}")]
    Cache(String),
    #[error(transparent)]
    Svg(#[from] SvgError),
    #[error(transparent)]
    Token(#[from] TokenError),
    #[error(transparent)]
    Text(#[from] TextError),
}

/// One annotated icon.
#[derive(Clone, Debug, PartialEq)]
pub struct Record {
    pub name: String,
    pub icon: Icon,
    pub keywords: Vec<String>,
    pub phrase: Option<String>,
}

impl Record {
    /// Every annotation string, for vocabulary building.
    pub fn texts(&self) -> impl Iterator<Item = &str> {
        self.keywords.iter().map(String::as_str).chain(self.phrase.as_deref())
    }
}
