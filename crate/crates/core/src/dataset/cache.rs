//! Prepared-corpus directory:
//!
//! - `manifest.json`: counts, split sizes, vocabulary hash
//! - `{train,val,test}.tokens`: one icon per line, whitespace-separated ids
//! - `{train,val,test}.tsv`: `name<TAB>kw1/kw2<TAB>phrase`, line-aligned
//! - `vocab.txt`: text vocabulary, one token per line

use super::{DatasetError, IngestReport, Record, Split};
use crate::text::TextVocab;
use crate::tokenizer::{decode_icon, encode_icon, read_token_lines, write_token_lines, DecodeMode, TokenSequence};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs;
use std::io::BufReader;
use std::path::Path;

pub const MANIFEST: &str = "manifest.json";
pub const VOCAB_FILE: &str = "vocab.txt";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u32,
    pub counts: BTreeMap<String, usize>,
    pub dropped_too_long: usize,
    pub skipped: usize,
    pub text_vocab_hash: String,
    pub text_vocab_size: usize,
    pub max_icon_tokens: usize,
}

#[derive(Debug)]
pub struct PreparedCorpus {
    pub manifest: Manifest,
    pub vocab: TextVocab,
    pub train: Vec<Record>,
    pub val: Vec<Record>,
    pub test: Vec<Record>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn write_prepared(dir: &Path, report: &IngestReport, vocab: &TextVocab) -> Result<Manifest, DatasetError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut counts = BTreeMap::new();
    for split in Split::ALL {
        let records = report.split(split);
        counts.insert(split.name().to_string(), records.len());
        let seqs: Vec<TokenSequence> = records.iter().map(|r| encode_icon(&r.icon)).collect();
        let tok_path = dir.join(format!("{}.tokens", split.name()));
        let mut buf = Vec::new();
        write_token_lines(&mut buf, &seqs).expect("writing to memory");
        fs::write(&tok_path, buf).map_err(io_err(&tok_path))?;

        let tsv_path = dir.join(format!("{}.tsv", split.name()));
        let mut tsv = String::new();
        for r in records {
            tsv.push_str(&format!(
                "{}\t{}\t{}\n",
                r.name,
                r.keywords.join("/"),
                r.phrase.as_deref().unwrap_or("")
            ));
        }
        fs::write(&tsv_path, tsv).map_err(io_err(&tsv_path))?;
    }
    let vocab_path = dir.join(VOCAB_FILE);
    let mut buf = Vec::new();
    vocab.write(&mut buf).expect("writing to memory");
    fs::write(&vocab_path, buf).map_err(io_err(&vocab_path))?;

    let manifest = Manifest {
        version: 1,
        counts,
        dropped_too_long: report.dropped_too_long,
        skipped: report.skipped.len(),
        text_vocab_hash: vocab.hash(),
        text_vocab_size: vocab.len(),
        max_icon_tokens: super::MAX_ICON_TOKENS,
    };
    let path = dir.join(MANIFEST);
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, json).map_err(io_err(&path))?;
    Ok(manifest)
}

pub fn read_prepared(dir: &Path) -> Result<PreparedCorpus, DatasetError> {
    let path = dir.join(MANIFEST);
    let text = fs::read_to_string(&path).map_err(io_err(&path))?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(|e| DatasetError::Cache(format!("{}: {e}", path.display())))?;
    let vocab_path = dir.join(VOCAB_FILE);
    let file = fs::File::open(&vocab_path).map_err(io_err(&vocab_path))?;
    let vocab = TextVocab::read(BufReader::new(file))?;
    if vocab.hash() != manifest.text_vocab_hash {
        return Err(DatasetError::Cache("vocabulary hash does not match the manifest".into()));
    }
    let mut splits = Vec::new();
    for split in Split::ALL {
        let tok_path = dir.join(format!("{}.tokens", split.name()));
        let file = fs::File::open(&tok_path).map_err(io_err(&tok_path))?;
        let seqs = read_token_lines(BufReader::new(file))?;
        let tsv_path = dir.join(format!("{}.tsv", split.name()));
        let tsv = fs::read_to_string(&tsv_path).map_err(io_err(&tsv_path))?;
        let rows: Vec<&str> = tsv.lines().collect();
        if rows.len() != seqs.len() {
            return Err(DatasetError::Cache(format!(
                "{}: {} annotation rows for {} icons",
                split.name(),
                rows.len(),
                seqs.len()
            )));
        }
        let mut records = Vec::with_capacity(seqs.len());
        for (i, (seq, row)) in seqs.iter().zip(rows).enumerate() {
            let (name, keywords, phrase) = super::ingest::parse_index_line(row, i + 1)?
                .ok_or_else(|| DatasetError::Cache(format!("{}: blank row {}", split.name(), i + 1)))?;
            records.push(Record {
                name,
                icon: decode_icon(seq, DecodeMode::Strict)?,
                keywords,
                phrase,
            });
        }
        splits.push(records);
    }
    let test = splits.pop().unwrap();
    let val = splits.pop().unwrap();
    let train = splits.pop().unwrap();
    Ok(PreparedCorpus {
        manifest,
        vocab,
        train,
        val,
        test,
    })
}
