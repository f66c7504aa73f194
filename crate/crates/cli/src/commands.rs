use crate::config::RunConfig;
use crate::error::CliError;
use crate::server::{router, AppState};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;
use vecticon_core::dataset::{
    ingest, make_training_sample, read_prepared, synth_corpus, write_prepared, BatchStream, Family, IngestOptions, Record,
    SynthConfig, INDEX_FILE, MANIFEST,
};
use vecticon_core::metrics::{report, FeatureExtractor, NearestCentroid, RasterDownsample};
use vecticon_core::model::{load_checkpoint, loss, save_checkpoint, Checkpoint, ForwardMode, LossBreakdown, Params, Trainer};
use vecticon_core::sampler::{Sampler, Suggestion};
use vecticon_core::svg::{normalize_and_quantize, parse_svg, serialize_svg, Icon, Point, SvgPath};
use vecticon_core::text::TextVocab;

#[derive(Debug, Parser)]
#[command(name = "vecticon", version, about = "Text-guided vector icon synthesis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Verb,
}

#[derive(Debug, Args, Clone, Default)]
pub struct ConfigArgs {
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override one key, e.g. `--set model.layers=2`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub overrides: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Verb {
    /// Ingest an SVG directory (with index.tsv) into a prepared cache.
    Prepare {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Write a labelled synthetic corpus as SVG files plus index.tsv.
    SynthData {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated family names; all families by default.
        #[arg(long, value_delimiter = ',')]
        families: Vec<String>,
        #[arg(long, default_value_t = 0)]
        min_extra: usize,
        #[arg(long, default_value_t = 2)]
        max_extra: usize,
    },
    /// Train from scratch; writes one checkpoint per epoch and metrics.json.
    Train {
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long, default_value = "run")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Generate icons from a text prompt.
    Sample {
        #[arg(long)]
        ckpt: PathBuf,
        #[arg(long, default_value = "")]
        text: String,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "samples")]
        out: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Regenerate paths `start..end` of an icon from the surrounding paths.
    Fill {
        #[arg(long)]
        ckpt: PathBuf,
        #[arg(long)]
        svg: PathBuf,
        /// Path range to replace, `i` or `i..j` (end exclusive).
        #[arg(long)]
        remove: String,
        #[arg(long, default_value = "")]
        text: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Append the suggested next path to a partial icon.
    Suggest {
        #[arg(long)]
        ckpt: PathBuf,
        /// Partial icon; omit to start from an empty canvas.
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, default_value = "")]
        text: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Sample along a blend of two prompts.
    Interpolate {
        #[arg(long)]
        ckpt: PathBuf,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        /// Number of blend points including both ends.
        #[arg(long, default_value_t = 5)]
        points: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "interpolation")]
        out: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Generate icons and score them against a reference corpus.
    Metrics {
        #[arg(long)]
        ckpt: PathBuf,
        #[arg(long, default_value_t = 100)]
        n: usize,
        /// Reference corpus; its train split also serves as the novelty set.
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long, default_value = "")]
        text: String,
        /// Prompt with each reference icon's first keyword and report a
        /// nearest-centroid label accuracy.
        #[arg(long)]
        labeled: bool,
        #[arg(long)]
        seed: Option<u64>,
        /// Report path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Serve the JSON API.
    Serve {
        #[arg(long)]
        ckpt: PathBuf,
        #[arg(long)]
        host: Option<String>,
        #[arg(long)]
        port: Option<u16>,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
}

fn load_config(args: &ConfigArgs, seed: Option<u64>) -> Result<RunConfig, CliError> {
    let cfg = RunConfig::load(args.config.as_deref(), &args.overrides)?;
    Ok(match seed {
        Some(s) => cfg.with_seed(s),
        None => cfg,
    })
}

fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(CliError::io(parent))?;
    }
    fs::write(path, bytes).map_err(CliError::io(path))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    write_file(path, text)
}

fn read_icon(path: &Path) -> Result<Icon, CliError> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    Ok(normalize_and_quantize(&parse_svg(&text)?))
}

/// Loaded corpus with its text vocabulary.
pub struct Corpus {
    pub vocab: TextVocab,
    pub train: Vec<Record>,
    pub val: Vec<Record>,
    pub test: Vec<Record>,
}

impl Corpus {
    pub fn all(&self) -> Vec<Record> {
        self.train.iter().chain(&self.val).chain(&self.test).cloned().collect()
    }
}

/// Reads a prepared cache, or ingests a raw directory on the fly.
pub fn load_corpus(dir: &Path, cfg: &RunConfig) -> Result<Corpus, CliError> {
    if dir.join(MANIFEST).exists() {
        let p = read_prepared(dir)?;
        return Ok(Corpus {
            vocab: p.vocab,
            train: p.train,
            val: p.val,
            test: p.test,
        });
    }
    let opts = IngestOptions {
        drop_outer_frame: cfg.corpus.drop_outer_frame,
        take_first: cfg.corpus.take_first,
    };
    let r = ingest(dir, &opts)?;
    let texts: Vec<&str> = r.train.iter().flat_map(|x| x.texts()).collect();
    let vocab = TextVocab::build(&texts, cfg.corpus.min_word_freq)?;
    Ok(Corpus {
        vocab,
        train: r.train,
        val: r.val,
        test: r.test,
    })
}

fn open_checkpoint(path: &Path) -> Result<Checkpoint, CliError> {
    Ok(load_checkpoint(path)?)
}

fn provenance(cfg: &RunConfig, ckpt: &Checkpoint, extra: serde_json::Value) -> serde_json::Value {
    json!({
        "checkpoint_id": ckpt.id(),
        "checkpoint_step": ckpt.step,
        "config": cfg.to_json(),
        "request": extra,
    })
}

fn svg_comment(meta: &serde_json::Value) -> String {
    // `--` may not appear inside an XML comment.
    format!("<!-- vecticon {} -->\n", meta.to_string().replace("--", "- -"))
}

fn write_svg(path: &Path, icon: &Icon, meta: &serde_json::Value) -> Result<(), CliError> {
    write_file(path, format!("{}{}\n", svg_comment(meta), serialize_svg(icon)))
}

fn parse_range(spec: &str, len: usize) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Config(format!("--remove `{spec}` is not `i` or `i..j` within 0..{len}"));
    let (a, b) = match spec.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
        None => {
            let i: usize = spec.trim().parse().map_err(|_| bad())?;
            (i, i + 1)
        }
    };
    if a >= b || b > len {
        return Err(bad());
    }
    Ok((a, b))
}

#[derive(Serialize)]
struct EpochMetrics {
    epoch: u64,
    step: u64,
    lr: f64,
    train_loss: f64,
    train_text: f64,
    train_icon: f64,
    grad_norm: f64,
    val: Option<LossBreakdown>,
    checkpoint: String,
    checkpoint_id: String,
    seconds: f64,
}

fn eval_loss(params: &Params<f32>, records: &[Record], vocab: &TextVocab, cfg: &RunConfig) -> Option<LossBreakdown> {
    if records.is_empty() {
        return None;
    }
    let joint = params.config.joint();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mut text, mut icon) = (0.0, 0.0);
    for r in records {
        let s = make_training_sample(r, vocab, &joint, &mut rng, &cfg.stream);
        let n = s.effective_len();
        let logits = params.forward(&s.input_ids[..n], ForwardMode::Eval).ok()?;
        let l = loss(&logits, &s.target_ids[..n], &s.loss_weight[..n], &s.segment[..n], params.config.lambda);
        text += l.text;
        icon += l.icon;
    }
    let n = records.len() as f64;
    Some(LossBreakdown::combine(text / n, icon / n, params.config.lambda))
}

fn train(corpus: Option<PathBuf>, out: &Path, mut cfg: RunConfig) -> Result<(), CliError> {
    if let Some(c) = corpus {
        cfg.corpus.dir = Some(c);
    }
    let dir = cfg
        .corpus
        .dir
        .clone()
        .ok_or_else(|| CliError::Config("no corpus: pass --corpus or set corpus.dir".into()))?;
    let data = load_corpus(&dir, &cfg)?;
    if data.train.is_empty() {
        return Err(CliError::Config(format!("{}: the train split is empty", dir.display())));
    }
    cfg.model.text_vocab_size = data.vocab.len();
    cfg.model.validate()?;
    fs::create_dir_all(out).map_err(CliError::io(out))?;
    write_json(&out.join("run_config.json"), &cfg.to_json())?;
    log::info!(
        "training {} parameters on {} icons for {} steps",
        cfg.model.param_count(),
        data.train.len(),
        cfg.train.steps
    );

    let mut trainer = Trainer::new(Params::<f32>::init(&cfg.model)?, &cfg.train);
    let mut stream = BatchStream::new(&data.train, &data.vocab, cfg.stream.clone(), cfg.seed);
    let mut epochs = Vec::new();
    let start = Instant::now();
    let (mut sum_total, mut sum_text, mut sum_icon, mut count) = (0.0, 0.0, 0.0, 0u64);
    for step in 0..cfg.train.steps {
        let m = trainer.step(&stream.next_batch(cfg.train.batch_size))?;
        sum_total += m.loss.total;
        sum_text += m.loss.text;
        sum_icon += m.loss.icon;
        count += 1;
        let done = step + 1;
        if done % cfg.train.steps_per_epoch == 0 || done == cfg.train.steps {
            let epoch = done.div_ceil(cfg.train.steps_per_epoch);
            let ckpt = Checkpoint {
                params: trainer.params.clone(),
                vocab: data.vocab.clone(),
                step: done,
                run_config: cfg.to_json(),
            };
            let name = format!("epoch-{epoch:04}.ckpt");
            save_checkpoint(&out.join(&name), &ckpt)?;
            let val = eval_loss(&trainer.params, &data.val, &data.vocab, &cfg);
            let c = count as f64;
            log::info!("epoch {epoch} step {done} loss {:.4} icon {:.4}", sum_total / c, sum_icon / c);
            epochs.push(EpochMetrics {
                epoch,
                step: done,
                lr: m.lr,
                train_loss: sum_total / c,
                train_text: sum_text / c,
                train_icon: sum_icon / c,
                grad_norm: m.grad_norm,
                val,
                checkpoint: name.clone(),
                checkpoint_id: ckpt.id(),
                seconds: start.elapsed().as_secs_f64(),
            });
            (sum_total, sum_text, sum_icon, count) = (0.0, 0.0, 0.0, 0);
            fs::copy(out.join(&name), out.join("final.ckpt")).map_err(CliError::io(out.join("final.ckpt")))?;
            write_json(
                &out.join("metrics.json"),
                &json!({
                    "config": cfg.to_json(),
                    "param_count": cfg.model.param_count(),
                    "train_icons": data.train.len(),
                    "val_icons": data.val.len(),
                    "epochs": epochs,
                }),
            )?;
        }
    }
    println!("{}", out.join("final.ckpt").display());
    Ok(())
}

fn synth_data(n: usize, seed: u64, out: &Path, families: &[String], min_extra: usize, max_extra: usize) -> Result<(), CliError> {
    let families = if families.is_empty() {
        Family::ALL.to_vec()
    } else {
        families
            .iter()
            .map(|f| Family::from_name(f).ok_or_else(|| CliError::Config(format!("unknown family `{f}`"))))
            .collect::<Result<_, _>>()?
    };
    if min_extra > max_extra {
        return Err(CliError::Config("--min-extra exceeds --max-extra".into()));
    }
    let cfg = SynthConfig {
        families: families.clone(),
        min_extra,
        max_extra,
    };
    let records = synth_corpus(n, &mut ChaCha8Rng::seed_from_u64(seed), &cfg);
    fs::create_dir_all(out).map_err(CliError::io(out))?;
    let mut index = String::new();
    for r in &records {
        write_file(&out.join(&r.name), format!("{}\n", serialize_svg(&r.icon)))?;
        index.push_str(&format!("{}\t{}\t{}\n", r.name, r.keywords.join("/"), r.phrase.as_deref().unwrap_or("")));
    }
    write_file(&out.join(INDEX_FILE), index)?;
    write_json(
        &out.join("synth.json"),
        &json!({
            "n": n,
            "seed": seed,
            "families": families.iter().map(|f| f.name()).collect::<Vec<_>>(),
            "min_extra": min_extra,
            "max_extra": max_extra,
        }),
    )?;
    println!("wrote {n} icons to {}", out.display());
    Ok(())
}

fn prepare(input: &Path, out: &Path, cfg: &RunConfig) -> Result<(), CliError> {
    let opts = IngestOptions {
        drop_outer_frame: cfg.corpus.drop_outer_frame,
        take_first: cfg.corpus.take_first,
    };
    let report = ingest(input, &opts)?;
    let texts: Vec<&str> = report.train.iter().flat_map(|r| r.texts()).collect();
    let vocab = TextVocab::build(&texts, cfg.corpus.min_word_freq)?;
    let manifest = write_prepared(out, &report, &vocab)?;
    write_json(&out.join("run_config.json"), &cfg.to_json())?;
    println!("{}", serde_json::to_string(&manifest).expect("serializable"));
    Ok(())
}

fn metrics_cmd(
    ckpt_path: &Path,
    n: usize,
    reference: &Path,
    text: &str,
    labeled: bool,
    out: Option<&Path>,
    cfg: &RunConfig,
) -> Result<(), CliError> {
    let ckpt = open_checkpoint(ckpt_path)?;
    let corpus = load_corpus(reference, cfg)?;
    let refs = corpus.all();
    let extractor = RasterDownsample {
        grid: cfg.metrics.grid,
        render: cfg.metrics.render,
    };
    let sampler = Sampler::new(&ckpt.params, &ckpt.vocab);
    let prompt = |i: usize| -> String {
        if labeled && !refs.is_empty() {
            refs[i % refs.len()].keywords.first().cloned().unwrap_or_default()
        } else {
            text.to_string()
        }
    };
    let mut generated = Vec::with_capacity(n);
    let mut prompts = Vec::with_capacity(n);
    let mut failures = 0usize;
    for i in 0..n {
        let p = prompt(i);
        let strategy = cfg.decode.clone().with_seed(cfg.decode.seed.wrapping_add(i as u64));
        match sampler.generate(&p, &strategy) {
            Ok(icon) => {
                generated.push(icon);
                prompts.push(p);
            }
            Err(e) => {
                log::warn!("sample {i} failed: {e}");
                failures += 1;
            }
        }
    }
    let train = if corpus.train.is_empty() { refs.clone() } else { corpus.train.clone() };
    let ref_icons: Vec<Icon> = refs.iter().map(|r| r.icon.clone()).collect();
    let train_icons: Vec<Icon> = train.iter().map(|r| r.icon.clone()).collect();
    let mut rep = report(&generated, &ref_icons, &train_icons, &extractor, cfg.metrics.tau)?;
    if labeled {
        let feats: Vec<_> = refs.iter().map(|r| extractor.raw_icon(&r.icon)).collect();
        let labels: Vec<String> = refs.iter().map(|r| r.keywords.first().cloned().unwrap_or_default()).collect();
        let clf = NearestCentroid::fit(&feats, &labels)?;
        let gen_feats: Vec<_> = generated.iter().map(|i| extractor.raw_icon(i)).collect();
        rep.label_accuracy_proxy = Some(clf.accuracy(&gen_feats, &prompts));
    }
    let mut value = serde_json::to_value(&rep).expect("serializable");
    let obj = value.as_object_mut().expect("report is an object");
    obj.insert("failed_samples".into(), json!(failures));
    obj.insert("checkpoint_id".into(), json!(ckpt.id()));
    obj.insert("config".into(), cfg.to_json());
    match out {
        Some(p) => write_json(p, &value)?,
        None => println!("{}", serde_json::to_string_pretty(&value).expect("serializable")),
    }
    Ok(())
}

async fn serve(ckpt: PathBuf, cfg: RunConfig) -> Result<(), CliError> {
    let state = AppState::loading(cfg.decode.clone(), cfg.serve.clone());
    let addr = format!("{}:{}", cfg.serve.host, cfg.serve.port);
    let listener = tokio::net::TcpListener::bind(&addr)
        .await
        .map_err(|e| CliError::Serve(format!("cannot bind {addr}: {e}")))?;
    log::info!("listening on {addr}");
    let loader = state.clone();
    tokio::task::spawn_blocking(move || match load_checkpoint(&ckpt) {
        Ok(c) => {
            log::info!("checkpoint {} ready", c.id());
            loader.set_ready(c);
        }
        Err(e) => {
            log::error!("checkpoint {} failed to load: {e}", ckpt.display());
            loader.set_failed(e.to_string());
        }
    });
    axum::serve(listener, router(state))
        .await
        .map_err(|e| CliError::Serve(e.to_string()))
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Verb::Prepare { input, out, cfg } => prepare(&input, &out, &load_config(&cfg, None)?),
        Verb::SynthData {
            n,
            seed,
            out,
            families,
            min_extra,
            max_extra,
        } => synth_data(n, seed, &out, &families, min_extra, max_extra),
        Verb::Train { corpus, out, seed, cfg } => train(corpus, &out, load_config(&cfg, seed)?),
        Verb::Sample {
            ckpt,
            text,
            n,
            seed,
            out,
            cfg,
        } => {
            let cfg = load_config(&cfg, seed)?;
            let c = open_checkpoint(&ckpt)?;
            let s = Sampler::new(&c.params, &c.vocab);
            for i in 0..n {
                let strategy = cfg.decode.clone().with_seed(cfg.decode.seed.wrapping_add(i as u64));
                let icon = s.generate(&text, &strategy)?;
                let meta = provenance(&cfg, &c, json!({ "verb": "sample", "text": text, "index": i, "seed": strategy.seed }));
                let path = out.join(format!("sample-{i:03}.svg"));
                write_svg(&path, &icon, &meta)?;
                println!("{}", path.display());
            }
            Ok(())
        }
        Verb::Fill {
            ckpt,
            svg,
            remove,
            text,
            seed,
            out,
            cfg,
        } => {
            let cfg = load_config(&cfg, seed)?;
            let c = open_checkpoint(&ckpt)?;
            let icon = read_icon(&svg)?;
            let (a, b) = parse_range(&remove, icon.paths().len())?;
            let s = Sampler::new(&c.params, &c.vocab);
            let filled = s.fill_in_middle(&text, &icon.paths()[..a], &icon.paths()[b..], &cfg.decode)?;
            let meta = provenance(&cfg, &c, json!({ "verb": "fill", "text": text, "source": svg, "removed": [a, b] }));
            write_svg(&out, &filled.icon, &meta)?;
            println!("{}", out.display());
            Ok(())
        }
        Verb::Suggest {
            ckpt,
            svg,
            text,
            seed,
            out,
            cfg,
        } => {
            let cfg = load_config(&cfg, seed)?;
            let c = open_checkpoint(&ckpt)?;
            let partial: Vec<SvgPath<Point>> = match &svg {
                Some(p) => read_icon(p)?.into_paths(),
                None => Vec::new(),
            };
            let s = Sampler::new(&c.params, &c.vocab);
            let mut paths = partial.clone();
            let ended = match s.suggest_next_path(&text, &partial, &cfg.decode)? {
                Suggestion::Path(p) => {
                    paths.push(p);
                    false
                }
                Suggestion::EndOfIcon => true,
            };
            if paths.is_empty() {
                return Err(CliError::Sample(vecticon_core::sampler::SampleError::Failed("nothing to write".into())));
            }
            let meta = provenance(&cfg, &c, json!({ "verb": "suggest", "text": text, "source": svg, "end_of_icon": ended }));
            write_svg(&out, &Icon::new(paths)?, &meta)?;
            println!("{}{}", out.display(), if ended { " (end of icon; unchanged)" } else { "" });
            Ok(())
        }
        Verb::Interpolate {
            ckpt,
            a,
            b,
            points,
            seed,
            out,
            cfg,
        } => {
            if points < 2 {
                return Err(CliError::Config("--points must be at least 2".into()));
            }
            let cfg = load_config(&cfg, seed)?;
            let c = open_checkpoint(&ckpt)?;
            let s = Sampler::new(&c.params, &c.vocab);
            for k in 0..points {
                let alpha = k as f64 / (points - 1) as f64;
                let icon = s.interpolate_generate(&a, &b, alpha, &cfg.decode)?;
                let meta = provenance(&cfg, &c, json!({ "verb": "interpolate", "a": a, "b": b, "alpha": alpha }));
                let path = out.join(format!("interp-{k:02}.svg"));
                write_svg(&path, &icon, &meta)?;
                println!("{}", path.display());
            }
            Ok(())
        }
        Verb::Metrics {
            ckpt,
            n,
            reference,
            text,
            labeled,
            seed,
            out,
            cfg,
        } => metrics_cmd(&ckpt, n, &reference, &text, labeled, out.as_deref(), &load_config(&cfg, seed)?),
        Verb::Serve { ckpt, host, port, cfg } => {
            let mut cfg = load_config(&cfg, None)?;
            if let Some(h) = host {
                cfg.serve.host = h;
            }
            if let Some(p) = port {
                cfg.serve.port = p;
            }
            let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::Serve(e.to_string()))?;
            rt.block_on(serve(ckpt, cfg))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn removal_ranges() {
        assert_eq!(parse_range("1", 3).unwrap(), (1, 2));
        assert_eq!(parse_range("0..2", 3).unwrap(), (0, 2));
        for bad in ["3", "2..2", "0..4", "x", "1..y"] {
            assert!(parse_range(bad, 3).is_err(), "{bad}");
        }
    }

    #[test]
    fn comments_never_contain_double_dash() {
        let c = svg_comment(&json!({ "text": "a--b" }));
        assert!(!c["<!--".len()..c.len() - "-->\n".len()].contains("--"));
    }
}
