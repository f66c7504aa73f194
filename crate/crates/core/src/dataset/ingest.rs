use super::{DatasetError, Record, MAX_ICON_TOKENS};
use crate::svg::{normalize_and_quantize, parse_svg, Icon, RawIcon};
use crate::tokenizer::encoded_len;
use sha2::{Digest, Sha256};
use std::fs;
use std::path::Path;

/// Annotation index: `filename<TAB>kw1/kw2/…<TAB>optional phrase`.
pub const INDEX_FILE: &str = "index.tsv";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Val, Split::Test];

    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }
}

fn name_hash(name: &str) -> u64 {
    let digest = Sha256::digest(name.as_bytes());
    u64::from_be_bytes(digest[..8].try_into().expect("8 bytes"))
}

/// Deterministic 90/5/5 assignment from the file name.
pub fn split_for(name: &str) -> Split {
    match name_hash(name) % 100 {
        0..=89 => Split::Train,
        90..=94 => Split::Val,
        _ => Split::Test,
    }
}

#[derive(Clone, Debug, Default)]
pub struct IngestOptions {
    /// Drop a leading path whose bounding box covers ≥ 98% of the canvas.
    pub drop_outer_frame: bool,
    /// Keep only the `n` records with the smallest name hashes.
    pub take_first: Option<usize>,
}

#[derive(Debug, Default)]
pub struct IngestReport {
    pub train: Vec<Record>,
    pub val: Vec<Record>,
    pub test: Vec<Record>,
    pub dropped_too_long: usize,
    /// `(file, reason)` for unreadable or unparsable files.
    pub skipped: Vec<(String, String)>,
}

impl IngestReport {
    pub fn split(&self, s: Split) -> &[Record] {
        match s {
            Split::Train => &self.train,
            Split::Val => &self.val,
            Split::Test => &self.test,
        }
    }
}

pub(crate) fn parse_index_line(line: &str, n: usize) -> Result<Option<(String, Vec<String>, Option<String>)>, DatasetError> {
    if line.trim().is_empty() {
        return Ok(None);
    }
    let mut fields = line.split('\t');
    let name = fields.next().unwrap_or("").trim();
    let keywords_field = fields.next().ok_or_else(|| DatasetError::Annotation {
        line: n,
        message: "expected at least two tab-separated fields".into(),
    })?;
    let phrase = fields.next().map(str::trim).filter(|p| !p.is_empty()).map(String::from);
    if fields.next().is_some() {
        return Err(DatasetError::Annotation {
            line: n,
            message: "too many fields".into(),
        });
    }
    if name.is_empty() {
        return Err(DatasetError::Annotation {
            line: n,
            message: "empty file name".into(),
        });
    }
    let keywords: Vec<String> = keywords_field
        .split('/')
        .map(str::trim)
        .filter(|k| !k.is_empty())
        .map(String::from)
        .collect();
    if keywords.is_empty() && phrase.is_none() {
        return Err(DatasetError::Annotation {
            line: n,
            message: "record has neither keywords nor a phrase".into(),
        });
    }
    Ok(Some((name.to_string(), keywords, phrase)))
}

fn without_outer_frame(raw: RawIcon) -> RawIcon {
    let quantized = normalize_and_quantize(&raw);
    if quantized.paths().len() < 2 {
        return raw;
    }
    let first = &quantized.paths()[0];
    let (mut lo_x, mut lo_y, mut hi_x, mut hi_y) = (u32::MAX, u32::MAX, 0, 0);
    for c in first.commands() {
        for p in c.points() {
            lo_x = lo_x.min(p.x());
            lo_y = lo_y.min(p.y());
            hi_x = hi_x.max(p.x());
            hi_y = hi_y.max(p.y());
        }
    }
    let area = (hi_x - lo_x) as f64 * (hi_y - lo_y) as f64;
    if area >= 0.98 * 99.0 * 99.0 {
        let rest = raw.into_paths().into_iter().skip(1).collect();
        Icon::new(rest).expect("at least one path remains")
    } else {
        raw
    }
}

/// Reads `dir/index.tsv` and every referenced SVG, simplifies and
/// quantizes them, drops icons longer than 512 tokens and splits the rest.
pub fn ingest(dir: &Path, opts: &IngestOptions) -> Result<IngestReport, DatasetError> {
    let index_path = dir.join(INDEX_FILE);
    let index = fs::read_to_string(&index_path).map_err(|source| DatasetError::Io {
        path: index_path.clone(),
        source,
    })?;
    let mut entries = Vec::new();
    for (i, line) in index.lines().enumerate() {
        if let Some(entry) = parse_index_line(line, i + 1)? {
            entries.push(entry);
        }
    }
    if let Some(n) = opts.take_first {
        entries.sort_by_key(|e| (name_hash(&e.0), e.0.clone()));
        entries.truncate(n);
    }

    let mut report = IngestReport::default();
    for (name, keywords, phrase) in entries {
        let path = dir.join(&name);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) => {
                log::warn!("skipping {}: {e}", path.display());
                report.skipped.push((name, e.to_string()));
                continue;
            }
        };
        let raw = match parse_svg(&text) {
            Ok(r) => r,
            Err(e) => {
                log::warn!("skipping {}: {e}", path.display());
                report.skipped.push((name, e.to_string()));
                continue;
            }
        };
        let raw = if opts.drop_outer_frame { without_outer_frame(raw) } else { raw };
        let icon = normalize_and_quantize(&raw);
        if encoded_len(&icon) > MAX_ICON_TOKENS {
            report.dropped_too_long += 1;
            continue;
        }
        let record = Record {
            name: name.clone(),
            icon,
            keywords,
            phrase,
        };
        match split_for(&name) {
            Split::Train => report.train.push(record),
            Split::Val => report.val.push(record),
            Split::Test => report.test.push(record),
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::svg::serialize_svg;
    use crate::tokenizer::encode_icon;

    fn write(dir: &Path, name: &str, body: &str) {
        fs::write(dir.join(name), body).unwrap();
    }

    #[test]
    fn boundary_is_inclusive() {
        let dir = tempfile::tempdir().unwrap();
        let mut d = String::from("M 0 0 C 1 1 2 2 3 3");
        for i in 0..251 {
            d.push_str(&format!(" L {} {}", (i * 3) % 99, (i * 11) % 99));
        }
        // BOP + M(2) + C(4) + 252 lines(504) + EOS = 512.
        d.push_str(" L 99 99");
        write(dir.path(), "a.svg", &format!(r#"<svg><path d="{d}"/></svg>"#));
        d.push_str(" L 98 98");
        write(dir.path(), "b.svg", &format!(r#"<svg><path d="{d}"/></svg>"#));
        write(dir.path(), "index.tsv", "a.svg\tx\nb.svg\ty\n");
        let report = ingest(dir.path(), &IngestOptions::default()).unwrap();
        let kept: Vec<&Record> = Split::ALL.iter().flat_map(|&s| report.split(s)).collect();
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].name, "a.svg");
        assert_eq!(encode_icon(&kept[0].icon).len(), 512);
        assert_eq!(report.dropped_too_long, 1);
    }

    #[test]
    fn splits_are_deterministic_and_roughly_90_5_5() {
        let mut counts = [0usize; 3];
        for i in 0..20_000 {
            let s = split_for(&format!("icon_{i}.svg"));
            counts[Split::ALL.iter().position(|&x| x == s).unwrap()] += 1;
            assert_eq!(s, split_for(&format!("icon_{i}.svg")));
        }
        assert!((counts[0] as f64 / 20_000.0 - 0.90).abs() < 0.01);
        assert!((counts[1] as f64 / 20_000.0 - 0.05).abs() < 0.01);
    }

    #[test]
    fn repeat_ingest_is_identical() {
        let dir = tempfile::tempdir().unwrap();
        let mut index = String::new();
        for i in 0..30 {
            write(dir.path(), &format!("{i}.svg"), &format!(r#"<svg><rect x="{i}" y="0" width="10" height="{}"/></svg>"#, i + 1));
            index.push_str(&format!("{i}.svg\tbox/shape\ta box\n"));
        }
        write(dir.path(), "index.tsv", &index);
        let a = ingest(dir.path(), &IngestOptions::default()).unwrap();
        let b = ingest(dir.path(), &IngestOptions::default()).unwrap();
        assert_eq!(a.train, b.train);
        assert_eq!(a.val, b.val);
        assert_eq!(a.test, b.test);
        assert_eq!(a.train.len() + a.val.len() + a.test.len(), 30);
        let firsts = ingest(dir.path(), &IngestOptions { take_first: Some(10), ..Default::default() }).unwrap();
        assert_eq!(firsts.train.len() + firsts.val.len() + firsts.test.len(), 10);
    }

    #[test]
    fn unreadable_files_are_skipped_and_bad_lines_fail() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "ok.svg", r#"<svg><circle cx="5" cy="5" r="3"/></svg>"#);
        write(dir.path(), "bad.svg", r#"<svg><text>x</text></svg>"#);
        write(dir.path(), "index.tsv", "ok.svg\tdot\nmissing.svg\tdot\nbad.svg\tdot\n");
        let r = ingest(dir.path(), &IngestOptions::default()).unwrap();
        assert_eq!(r.skipped.len(), 2);

        write(dir.path(), "index.tsv", "ok.svg\tdot\nno-tabs-here\n");
        match ingest(dir.path(), &IngestOptions::default()) {
            Err(DatasetError::Annotation { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn outer_frame_heuristic() {
        let dir = tempfile::tempdir().unwrap();
        write(
            dir.path(),
            "f.svg",
            r#"<svg><rect x="0" y="0" width="100" height="100"/><circle cx="50" cy="50" r="10"/></svg>"#,
        );
        write(dir.path(), "index.tsv", "f.svg\tframed\n");
        let opts = IngestOptions { drop_outer_frame: true, ..Default::default() };
        let r = ingest(dir.path(), &opts).unwrap();
        let rec = Split::ALL.iter().flat_map(|&s| r.split(s)).next().unwrap();
        assert_eq!(rec.icon.paths().len(), 1);
        // The remaining circle is re-normalized to fill the canvas.
        let svg = serialize_svg(&rec.icon);
        assert!(svg.contains("M 99 50"), "{svg}");
    }

    #[test]
    fn keywords_are_slash_separated() {
        let (name, kws, phrase) = parse_index_line("a.svg\tcat/face\tA cat face", 1).unwrap().unwrap();
        assert_eq!(name, "a.svg");
        assert_eq!(kws, vec!["cat", "face"]);
        assert_eq!(phrase.as_deref(), Some("A cat face"));
        assert!(parse_index_line("a.svg\t\t", 3).is_err());
    }
}
