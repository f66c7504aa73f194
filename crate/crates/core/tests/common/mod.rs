#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vecticon_core::dataset::{Segment, TextMode, TrainingSample};
use vecticon_core::model::{batch_loss_and_grad, ModelConfig, Params};

/// Straight-line forward pass with explicit loops, reading tensors by name.
/// Shares no code with the library forward pass.
pub fn naive_logits(p: &Params<f64>, ids: &[u32]) -> Vec<Vec<f64>> {
    let cfg = &p.config;
    let d = cfg.dim;
    let n = ids.len();
    let t = |name: &str| p.tensor(name).unwrap_or_else(|| panic!("missing {name}")).to_vec();
    let text = cfg.text_vocab_size as u32;
    let (svg_emb, cx, cy, text_emb, special, pos) =
        (t("svg_emb"), t("coord_x"), t("coord_y"), t("text_emb"), t("special_emb"), t("pos_emb"));
    let mut x = vec![vec![0.0; d]; n];
    for (i, &id) in ids.iter().enumerate() {
        for j in 0..d {
            let mut v = if id < text {
                text_emb[id as usize * d + j]
            } else if id < text + 10_007 {
                let s = (id - text) as usize;
                let mut e = svg_emb[s * d + j];
                if (3..10_003).contains(&s) {
                    let loc = s - 3;
                    e += cx[(loc / 100) * d + j] + cy[(loc % 100) * d + j];
                }
                e
            } else {
                special[(id - text - 10_007) as usize * d + j]
            };
            v += pos[i * d + j];
            x[i][j] = v;
        }
    }
    let norm = |row: &[f64], g: &[f64], b: &[f64]| -> Vec<f64> {
        let m = row.iter().sum::<f64>() / d as f64;
        let var = row.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / d as f64;
        (0..d).map(|j| g[j] * (row[j] - m) / (var + 1e-5).sqrt() + b[j]).collect()
    };
    let affine = |row: &[f64], w: &[f64], b: &[f64], out: usize| -> Vec<f64> {
        (0..out)
            .map(|o| b[o] + (0..row.len()).map(|k| row[k] * w[k * out + o]).sum::<f64>())
            .collect()
    };
    let heads = cfg.heads;
    let dh = d / heads;
    for l in 0..cfg.layers {
        let g = |s: &str| t(&format!("h{l}.{s}"));
        let h: Vec<Vec<f64>> = x.iter().map(|r| norm(r, &g("ln1.g"), &g("ln1.b"))).collect();
        let qkv: Vec<Vec<f64>> = h.iter().map(|r| affine(r, &g("attn.w_qkv"), &g("attn.b_qkv"), 3 * d)).collect();
        let mut att = vec![vec![0.0; d]; n];
        for hd in 0..heads {
            for i in 0..n {
                let mut scores = Vec::new();
                for j in 0..=i {
                    let mut s = 0.0;
                    for c in 0..dh {
                        s += qkv[i][hd * dh + c] * qkv[j][d + hd * dh + c];
                    }
                    scores.push(s / (dh as f64).sqrt());
                }
                let mx = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let z: f64 = scores.iter().map(|s| (s - mx).exp()).sum();
                for (j, s) in scores.iter().enumerate() {
                    let w = (s - mx).exp() / z;
                    for c in 0..dh {
                        att[i][hd * dh + c] += w * qkv[j][2 * d + hd * dh + c];
                    }
                }
            }
        }
        for i in 0..n {
            let a = affine(&att[i], &g("attn.w_o"), &g("attn.b_o"), d);
            for j in 0..d {
                x[i][j] += a[j];
            }
            let h2 = norm(&x[i], &g("ln2.g"), &g("ln2.b"));
            let f: Vec<f64> = affine(&h2, &g("mlp.w_fc"), &g("mlp.b_fc"), 4 * d)
                .into_iter()
                .map(|v| 0.5 * v * (1.0 + ((2.0 / std::f64::consts::PI).sqrt() * (v + 0.044715 * v.powi(3))).tanh()))
                .collect();
            let m = affine(&f, &g("mlp.w_proj"), &g("mlp.b_proj"), d);
            for j in 0..d {
                x[i][j] += m[j];
            }
        }
    }
    let vocab = cfg.text_vocab_size + 10_009;
    x.iter()
        .map(|r| affine(&norm(r, &t("ln_f.g"), &t("ln_f.b")), &t("head.w"), &t("head.b"), vocab))
        .collect()
}

pub fn grad_check_config() -> ModelConfig {
    ModelConfig {
        layers: 2,
        dim: 16,
        heads: 2,
        max_len: 24,
        text_vocab_size: 12,
        dropout: 0.0,
        seed: 21,
        ..Default::default()
    }
}

/// A length-`n` sample mixing text, command and location ids, with some
/// zero weights and both segments present.
pub fn random_sample(cfg: &ModelConfig, n: usize, rng: &mut ChaCha8Rng) -> TrainingSample {
    let joint = cfg.joint();
    let text_n = n / 3;
    let mut ids = Vec::with_capacity(n + 1);
    ids.push(joint.sos());
    for t in 0..n {
        let id = if t < text_n {
            rng.gen_range(0..cfg.text_vocab_size as u32)
        } else {
            match rng.gen_range(0..4) {
                0 => joint.svg(rng.gen_range(0..3)),
                1 => joint.svg(10_003),
                _ => joint.svg(rng.gen_range(3..10_003)),
            }
        };
        ids.push(id);
    }
    let target_ids = ids[1..].to_vec();
    let input_ids = ids[..n].to_vec();
    let loss_weight = (0..n).map(|t| if t % 7 == 3 { 0.0 } else { 1.0 }).collect();
    let segment = (0..n).map(|t| if t < text_n { Segment::Text } else { Segment::Icon }).collect();
    TrainingSample {
        input_ids,
        target_ids,
        loss_weight,
        segment,
        text_mode: TextMode::Keywords,
        masked: false,
    }
}

/// Randomizes every parameter (gains near 1, everything else around 0) so
/// all tensors carry gradient signal.
pub fn perturbed_params(cfg: &ModelConfig, seed: u64) -> Params<f64> {
    let mut p = Params::<f64>::init(cfg).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let specs = p.layout.specs().to_vec();
    for (i, spec) in specs.iter().enumerate() {
        let r = p.layout.range(i);
        let gain = spec.name.ends_with(".g");
        for x in &mut p.data[r] {
            *x = if gain { 1.0 + rng.gen_range(-0.3..0.3) } else { rng.gen_range(-0.3..0.3) };
        }
    }
    p
}

/// Gradients below this are roundoff on a loss of order 10.
pub const NUMERIC_ZERO: f64 = 1e-10;

pub struct GradCheck {
    pub min_abs_grad: f64,
    pub max_rel_error: f64,
    pub checked: usize,
    pub worst: (String, f64, f64),
}

/// Central differences with step `h` on `count` parameters drawn tensor by
/// tensor. Relative error is `|a - n| / max(|a|, |n|)`, taken as 0 when both
/// vanish.
pub fn grad_check(params: &Params<f64>, batch: &[TrainingSample], count: usize, h: f64, seed: u64) -> GradCheck {
    let (_, analytic) = batch_loss_and_grad(params, batch, None).unwrap();
    let specs = params.layout.specs().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Per tensor, the indices that can affect the loss. Unused embedding rows
    // and the key bias (softmax is shift-invariant) have zero gradient up to
    // roundoff and are skipped.
    let candidates: Vec<(String, Vec<usize>)> = specs
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let r = params.layout.range(i);
            let idx: Vec<usize> = r.filter(|&k| analytic[k].abs() > NUMERIC_ZERO).collect();
            (s.name.clone(), idx)
        })
        .filter(|(_, v)| !v.is_empty())
        .collect();
    let mut p = params.clone();
    let mut out = GradCheck {
        max_rel_error: 0.0,
        min_abs_grad: f64::INFINITY,
        checked: 0,
        worst: (String::new(), 0.0, 0.0),
    };
    for _ in 0..count {
        let (name, idx) = &candidates[rng.gen_range(0..candidates.len())];
        let k = idx[rng.gen_range(0..idx.len())];
        let orig = p.data[k];
        p.data[k] = orig + h;
        let up = batch_loss_and_grad(&p, batch, None).unwrap().0.total;
        p.data[k] = orig - h;
        let down = batch_loss_and_grad(&p, batch, None).unwrap().0.total;
        p.data[k] = orig;
        let numeric = (up - down) / (2.0 * h);
        let a = analytic[k];
        out.min_abs_grad = out.min_abs_grad.min(a.abs());
        let denom = a.abs().max(numeric.abs());
        let rel = if denom == 0.0 { 0.0 } else { (a - numeric).abs() / denom };
        if rel > out.max_rel_error {
            out.max_rel_error = rel;
            out.worst = (name.clone(), a, numeric);
        }
        out.checked += 1;
    }
    out
}
