mod common;

use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vecticon_core::dataset::{make_training_sample, synth_corpus, SampleConfig, SynthConfig, TextMode};
use vecticon_core::model::{
    batch_loss_and_grad, loss, ForwardMode, ModelConfig, Optimizer, Params, Schedule, Session, TrainConfig, Trainer,
};
use vecticon_core::text::TextVocab;
use vecticon_core::tokenizer::{pack_location, SvgToken};

fn toy_config() -> ModelConfig {
    ModelConfig {
        layers: 1,
        heads: 1,
        dim: 8,
        max_len: 6,
        text_vocab_size: 4,
        dropout: 0.0,
        ..Default::default()
    }
}

/// Deterministic, hand-chosen weights: every value is a fixed function of
/// its flat index.
fn hand_set(cfg: &ModelConfig) -> Params<f64> {
    let mut p = Params::<f64>::init(cfg).unwrap();
    for (i, x) in p.data.iter_mut().enumerate() {
        *x = 0.3 * ((i as f64) * 0.618).sin();
    }
    p
}

#[test]
fn single_block_matches_straight_line_recompute() {
    let cfg = toy_config();
    let p = hand_set(&cfg);
    let j = cfg.joint();
    let ids = [j.sos(), 2, 3, j.svg(0), j.svg(3 + 2010), j.svg(10_003)];
    let got = p.forward(&ids, ForwardMode::Eval).unwrap();
    let want = naive_logits(&p, &ids);
    for t in 0..ids.len() {
        for (a, b) in got.row(t).iter().zip(&want[t]) {
            assert!((a - b).abs() < 1e-10, "position {t}: {a} vs {b}");
        }
    }
}

#[test]
fn two_layer_multi_head_matches_recompute() {
    let cfg = ModelConfig {
        max_len: 24,
        ..grad_check_config()
    };
    let p = perturbed_params(&cfg, 4);
    let s = random_sample(&cfg, 24, &mut ChaCha8Rng::seed_from_u64(2));
    let got = p.forward(&s.input_ids, ForwardMode::Eval).unwrap();
    let want = naive_logits(&p, &s.input_ids);
    for t in 0..24 {
        for (a, b) in got.row(t).iter().zip(&want[t]) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}

#[test]
fn embedding_sums_token_and_coordinate_rows() {
    let cfg = toy_config();
    let p = hand_set(&cfg);
    let j = cfg.joint();
    let d = cfg.dim;
    let loc = pack_location(20, 10).unwrap();
    let e = p.embed_token(j.svg(3 + loc), 2).unwrap();
    let row = |name: &str, i: usize| p.tensor(name).unwrap()[i * d..(i + 1) * d].to_vec();
    let (w, wx, wy, pos) = (row("svg_emb", 3 + 2010), row("coord_x", 20), row("coord_y", 10), row("pos_emb", 2));
    for k in 0..d {
        assert!((e[k] - (w[k] + wx[k] + wy[k] + pos[k])).abs() < 1e-15);
    }
    let m = p.embed_token(j.svg(SvgToken::CmdM.id()), 1).unwrap();
    let (w, pos) = (row("svg_emb", 0), row("pos_emb", 1));
    for k in 0..d {
        assert_eq!(m[k], w[k] + pos[k]);
    }
}

#[test]
fn zero_coordinate_tables_reduce_to_plain_lookup() {
    let cfg = toy_config();
    let mut p = hand_set(&cfg);
    p.tensor_mut("coord_x").unwrap().iter_mut().for_each(|x| *x = 0.0);
    p.tensor_mut("coord_y").unwrap().iter_mut().for_each(|x| *x = 0.0);
    p.tensor_mut("pos_emb").unwrap().iter_mut().for_each(|x| *x = 0.0);
    let j = cfg.joint();
    let e = p.embed_token(j.svg(3 + 4321), 0).unwrap();
    assert_eq!(e, p.tensor("svg_emb").unwrap()[(3 + 4321) * 8..(3 + 4322) * 8].to_vec());
}

#[test]
fn gradient_matches_central_differences() {
    let cfg = grad_check_config();
    let p = perturbed_params(&cfg, 7);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let batch = vec![random_sample(&cfg, 24, &mut rng), random_sample(&cfg, 17, &mut rng)];
    let r = grad_check(&p, &batch, 200, 1e-4, 9);
    assert_eq!(r.checked, 200);
    assert!(r.max_rel_error < 1e-4, "max relative error {} at {:?}", r.max_rel_error, r.worst);
}

#[test]
fn learned_null_coordinates_are_differentiable() {
    let cfg = ModelConfig {
        coord_mode: vecticon_core::model::CoordMode::LearnedNull,
        ..grad_check_config()
    };
    let p = perturbed_params(&cfg, 3);
    let batch = vec![random_sample(&cfg, 20, &mut ChaCha8Rng::seed_from_u64(4))];
    let r = grad_check(&p, &batch, 60, 1e-4, 5);
    assert!(r.max_rel_error < 1e-4, "{} {:?}", r.max_rel_error, r.worst);
}

#[test]
fn softmax_rows_are_normalized() {
    let cfg = grad_check_config();
    let p = perturbed_params(&cfg, 1).cast::<f32>();
    let s = random_sample(&cfg, 24, &mut ChaCha8Rng::seed_from_u64(1));
    let logits = p.forward(&s.input_ids, ForwardMode::Eval).unwrap();
    for t in 0..24 {
        let sum: f64 = logits.softmax(t).iter().sum();
        assert!((sum - 1.0).abs() < 1e-5);
        assert!(logits.row(t).iter().all(|x| x.is_finite()));
    }
}

#[test]
fn eval_forward_is_bit_identical() {
    let cfg = grad_check_config();
    let p = perturbed_params(&cfg, 1).cast::<f32>();
    let s = random_sample(&cfg, 24, &mut ChaCha8Rng::seed_from_u64(1));
    let a = p.forward(&s.input_ids, ForwardMode::Eval).unwrap();
    let b = p.forward(&s.input_ids, ForwardMode::Eval).unwrap();
    assert_eq!(a.data, b.data);
}

#[test]
fn train_mode_dropout_follows_the_generator() {
    let cfg = ModelConfig {
        dropout: 0.1,
        ..grad_check_config()
    };
    let p = perturbed_params(&cfg, 1).cast::<f32>();
    let s = random_sample(&cfg, 24, &mut ChaCha8Rng::seed_from_u64(1));
    let run = |seed| {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        p.forward(&s.input_ids, ForwardMode::Train(&mut r)).unwrap().data
    };
    assert_eq!(run(5), run(5));
    assert_ne!(run(5), run(6));
    assert_ne!(run(5), p.forward(&s.input_ids, ForwardMode::Eval).unwrap().data);
}

#[test]
fn session_matches_full_forward() {
    let cfg = grad_check_config();
    let p = perturbed_params(&cfg, 11).cast::<f32>();
    let s = random_sample(&cfg, 24, &mut ChaCha8Rng::seed_from_u64(3));
    let full = p.forward(&s.input_ids, ForwardMode::Eval).unwrap();
    let mut sess = Session::new(&p);
    for (t, &id) in s.input_ids.iter().enumerate() {
        let row = sess.push_token(id).unwrap();
        for (a, b) in row.iter().zip(full.row(t)) {
            assert!((a - b).abs() < 1e-4, "position {t}");
        }
    }
    assert!(sess.push_token(0).is_err(), "max_len is enforced");
}

#[test]
fn rejects_out_of_vocabulary_ids_and_long_inputs() {
    let cfg = toy_config();
    let p = hand_set(&cfg);
    let bad = cfg.joint().len() as u32;
    assert!(p.forward(&[0, bad], ForwardMode::Eval).is_err());
    assert!(p.forward(&[0; 7], ForwardMode::Eval).is_err());
}

#[test]
fn batch_loss_agrees_with_standalone_loss() {
    let cfg = grad_check_config();
    let p = perturbed_params(&cfg, 2);
    let s = random_sample(&cfg, 24, &mut ChaCha8Rng::seed_from_u64(6));
    let logits = p.forward(&s.input_ids, ForwardMode::Eval).unwrap();
    let direct = loss(&logits, &s.target_ids, &s.loss_weight, &s.segment, cfg.lambda);
    let (batch, _) = batch_loss_and_grad(&p, std::slice::from_ref(&s), None).unwrap();
    assert!((direct.total - batch.total).abs() < 1e-10);
    assert!((direct.text - batch.text).abs() < 1e-10);
}

#[test]
fn zero_learning_rate_leaves_parameters_unchanged() {
    let cfg = grad_check_config();
    let mut p = perturbed_params(&cfg, 2).cast::<f32>();
    let before = p.data.clone();
    let s = random_sample(&cfg, 24, &mut ChaCha8Rng::seed_from_u64(6));
    let mut opt = Optimizer::new(p.data.len(), Default::default());
    let sched = Schedule::new(0.0, 10, 0.05);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..3 {
        vecticon_core::model::train_step(&mut p, &mut opt, std::slice::from_ref(&s), &sched, 1.0, &mut rng).unwrap();
    }
    assert!(p.data.iter().zip(&before).all(|(a, b)| a.to_bits() == b.to_bits()));
}

fn small_corpus_batch(cfg: &ModelConfig, n: usize) -> (Vec<vecticon_core::dataset::TrainingSample>, TextVocab) {
    let recs = synth_corpus(n, &mut ChaCha8Rng::seed_from_u64(3), &SynthConfig::default());
    let texts: Vec<&str> = recs.iter().flat_map(|r| r.texts()).collect();
    let vocab = TextVocab::build(&texts, 1).unwrap();
    let joint = vecticon_core::joint::JointVocab::new(vocab.len());
    let _ = cfg;
    let sc = SampleConfig {
        fixed_text_mode: Some(TextMode::Keywords),
        mask_prob: 0.0,
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let batch = recs.iter().map(|r| make_training_sample(r, &vocab, &joint, &mut rng, &sc)).collect();
    (batch, vocab)
}

#[test]
fn overfit_smoke_loss_trends_down() {
    let probe = ModelConfig::default();
    let (batch, vocab) = small_corpus_batch(&probe, 4);
    let cfg = ModelConfig {
        layers: 2,
        heads: 2,
        dim: 32,
        text_vocab_size: vocab.len(),
        dropout: 0.0,
        ..Default::default()
    };
    let tc = TrainConfig {
        steps: 50,
        lr: 3e-3,
        ..Default::default()
    };
    let mut tr = Trainer::new(Params::<f32>::init(&cfg).unwrap(), &tc);
    let losses: Vec<f64> = (0..50).map(|_| tr.step(&batch).unwrap().loss.total).collect();
    let avg: Vec<f64> = losses.windows(10).map(|w| w.iter().sum::<f64>() / 10.0).collect();
    for pair in avg.windows(2) {
        assert!(pair[1] < pair[0], "moving average rose: {avg:?}");
    }
}

#[test]
fn training_is_deterministic() {
    let probe = ModelConfig::default();
    let (batch, vocab) = small_corpus_batch(&probe, 2);
    let cfg = ModelConfig {
        layers: 1,
        heads: 2,
        dim: 16,
        text_vocab_size: vocab.len(),
        dropout: 0.1,
        ..Default::default()
    };
    let tc = TrainConfig {
        steps: 4,
        ..Default::default()
    };
    let run = || {
        let mut tr = Trainer::new(Params::<f32>::init(&cfg).unwrap(), &tc);
        for _ in 0..4 {
            tr.step(&batch).unwrap();
        }
        tr.params.data
    };
    assert_eq!(run(), run());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn later_inputs_never_move_earlier_logits(seed in any::<u64>(), t in 0usize..23) {
        let cfg = grad_check_config();
        let p = perturbed_params(&cfg, 5).cast::<f32>();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_sample(&cfg, 24, &mut rng);
        let mut changed = s.input_ids.clone();
        for id in &mut changed[t + 1..] {
            *id = rng.gen_range(0..cfg.joint().len() as u32);
        }
        let a = p.forward(&s.input_ids, ForwardMode::Eval).unwrap();
        let b = p.forward(&changed, ForwardMode::Eval).unwrap();
        for pos in 0..=t {
            for (x, y) in a.row(pos).iter().zip(b.row(pos)) {
                prop_assert!((x - y).abs() <= 1e-6);
            }
        }
    }
}
