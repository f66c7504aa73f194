use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use tower::ServiceExt;
use vecticon_cli::config::ServeConfig;
use vecticon_cli::server::{router, AppState};
use vecticon_cli::wire::paths_to_wire;
use vecticon_core::dataset::{synth_corpus, BatchStream, Family, Record, SampleConfig, SynthConfig, TextMode};
use vecticon_core::model::{Checkpoint, ModelConfig, Params, TrainConfig, Trainer};
use vecticon_core::sampler::DecodeStrategy;
use vecticon_core::text::{TextVocab, TEXT_LEN};

fn untrained(max_icon: usize) -> Checkpoint {
    let vocab = TextVocab::build(&["circle round", "square box"], 1).unwrap();
    let cfg = ModelConfig {
        layers: 1,
        heads: 2,
        dim: 16,
        max_len: TEXT_LEN + max_icon,
        text_vocab_size: vocab.len(),
        ..Default::default()
    };
    Checkpoint {
        params: Params::init(&cfg).unwrap(),
        vocab,
        step: 0,
        run_config: Value::Null,
    }
}

fn memorized() -> (Record, Checkpoint) {
    let cfg = SynthConfig {
        families: vec![Family::Plus],
        min_extra: 2,
        max_extra: 2,
    };
    let rec = synth_corpus(1, &mut ChaCha8Rng::seed_from_u64(4), &cfg).remove(0);
    let vocab = TextVocab::build(&rec.texts().collect::<Vec<_>>(), 1).unwrap();
    let mcfg = ModelConfig {
        layers: 2,
        heads: 2,
        dim: 32,
        max_len: TEXT_LEN + 128,
        text_vocab_size: vocab.len(),
        dropout: 0.0,
        ..Default::default()
    };
    let tcfg = TrainConfig {
        steps: 300,
        batch_size: 4,
        lr: 3e-3,
        ..Default::default()
    };
    let mut tr = Trainer::new(Params::init(&mcfg).unwrap(), &tcfg);
    let sc = SampleConfig {
        fixed_text_mode: Some(TextMode::Blank),
        ..Default::default()
    };
    let mut stream = BatchStream::new(std::slice::from_ref(&rec), &vocab, sc, 2);
    for _ in 0..tcfg.steps {
        tr.step(&stream.next_batch(tcfg.batch_size)).unwrap();
    }
    let ckpt = Checkpoint {
        params: tr.params,
        vocab,
        step: tcfg.steps,
        run_config: Value::Null,
    };
    (rec, ckpt)
}

fn app(ckpt: Checkpoint) -> Router {
    router(AppState::ready(ckpt, DecodeStrategy::default(), ServeConfig::default()))
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<String>) -> (StatusCode, Value) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map(Body::from).unwrap_or_else(Body::empty))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

async fn post(app: &Router, uri: &str, body: Value) -> (StatusCode, Value) {
    call(app, "POST", uri, Some(body.to_string())).await
}

#[tokio::test]
async fn loading_state_answers_503() {
    let state = AppState::loading(DecodeStrategy::default(), ServeConfig::default());
    let app = router(state.clone());
    let (code, body) = call(&app, "GET", "/health", None).await;
    assert_eq!(code, StatusCode::SERVICE_UNAVAILABLE);
    assert_eq!(body["status"], "loading");
    let (code, _) = post(&app, "/generate", json!({"text": "", "count": 1})).await;
    assert_eq!(code, StatusCode::SERVICE_UNAVAILABLE);

    let ckpt = untrained(64);
    let id = ckpt.id();
    state.set_ready(ckpt);
    let (code, body) = call(&app, "GET", "/health", None).await;
    assert_eq!(code, StatusCode::OK);
    assert_eq!(body, json!({"status": "ok", "checkpoint_id": id}));
}

#[tokio::test]
async fn generate_is_deterministic_per_seed() {
    let app = app(untrained(64));
    let req = json!({"text": "circle", "count": 2, "seed": 5});
    let (c1, a) = post(&app, "/generate", req.clone()).await;
    let (c2, b) = post(&app, "/generate", req).await;
    assert_eq!((c1, c2), (StatusCode::OK, StatusCode::OK));
    assert_eq!(a, b);
    let icons = a["icons"].as_array().unwrap();
    assert_eq!(icons.len(), 2);
    for icon in icons {
        for path in icon.as_array().unwrap() {
            assert_eq!(path[0]["kind"], "M");
        }
    }
}

#[tokio::test]
async fn empty_partial_suggestion_starts_with_move() {
    let app = app(untrained(64));
    for seed in 0..5 {
        let (code, body) = post(&app, "/suggest", json!({"text": "", "partial": [], "seed": seed})).await;
        assert_eq!(code, StatusCode::OK);
        assert_eq!(body["path"][0]["kind"], "M", "{body}");
    }
}

#[tokio::test]
async fn malformed_payloads_get_field_level_400() {
    let app = app(untrained(64));
    let cases = [
        (json!({"text": "", "count": "two"}), "/generate", "count"),
        (json!({"count": 1}), "/generate", "text"),
        (json!({"text": "", "count": 0}), "/generate", "count"),
        (json!({"text": "", "count": 1, "colour": 1}), "/generate", "colour"),
        (json!({"text": "", "partial": [[{"kind": "Q", "pts": [[1, 1]]}]]}), "/suggest", "partial[0][0].kind"),
        (json!({"text": "", "partial": [[{"kind": "M", "pts": [[1, 100]]}]]}), "/suggest", "partial[0][0].pts[0]"),
        (json!({"text": "", "left": [], "right": [[{"kind": "L", "pts": [[1, 1]]}]]}), "/fill", "right[0]"),
        (json!({"text": "", "left": [[{"kind": "M"}]], "right": []}), "/fill", "left[0][0]"),
    ];
    for (body, uri, field) in cases {
        let (code, resp) = post(&app, uri, body.clone()).await;
        assert_eq!(code, StatusCode::BAD_REQUEST, "{body}");
        let msg = resp["message"].as_str().unwrap();
        assert!(msg.contains(field), "{body}: {msg}");
    }
    let (code, _) = call(&app, "POST", "/generate", Some("{not json".into())).await;
    assert_eq!(code, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn oversized_prompt_is_422() {
    let app = app(untrained(32));
    let icon = synth_corpus(1, &mut ChaCha8Rng::seed_from_u64(1), &SynthConfig::default()).remove(0).icon;
    let partial = paths_to_wire(&[icon.paths(), icon.paths(), icon.paths()].concat());
    let (code, body) = post(&app, "/suggest", json!({"text": "", "partial": partial})).await;
    assert_eq!(code, StatusCode::UNPROCESSABLE_ENTITY, "{body}");
    let (code, _) = post(&app, "/fill", json!({"text": "", "left": partial, "right": []})).await;
    assert_eq!(code, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn fill_recovers_the_middle_of_a_memorized_icon() {
    let (rec, ckpt) = tokio::task::spawn_blocking(memorized).await.unwrap();
    let app = router(AppState::ready(ckpt, DecodeStrategy::greedy(), ServeConfig::default()));
    let paths = rec.icon.paths();
    assert!(paths.len() >= 3);
    let m = paths.len() / 2;
    let body = json!({
        "text": "",
        "left": paths_to_wire(&paths[..m]),
        "right": paths_to_wire(&paths[m + 1..]),
    });
    let (code, resp) = post(&app, "/fill", body).await;
    assert_eq!(code, StatusCode::OK, "{resp}");
    assert_eq!(resp["icon"], json!(paths_to_wire(paths)));
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_requests_are_independent() {
    let app = app(untrained(64));
    let (_, solo) = post(&app, "/generate", json!({"text": "square", "count": 1, "seed": 11})).await;
    let mut handles = Vec::new();
    for i in 0..8u64 {
        let app = app.clone();
        handles.push(tokio::spawn(async move {
            let seed = if i % 2 == 0 { 11 } else { 100 + i };
            (i, post(&app, "/generate", json!({"text": "square", "count": 1, "seed": seed})).await)
        }));
    }
    for h in handles {
        let (i, (code, body)) = h.await.unwrap();
        assert_eq!(code, StatusCode::OK);
        if i % 2 == 0 {
            assert_eq!(body, solo);
        }
    }
}
