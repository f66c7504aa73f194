use super::forward::ForwardMode;
use super::loss::row_cross_entropy;
use super::{LossBreakdown, ModelError, Params, Scalar};
use crate::dataset::{Segment, TrainingSample};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdamConfig {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub steps: u64,
    pub batch_size: usize,
    pub lr: f64,
    pub warmup_frac: f64,
    pub clip_norm: f64,
    pub adam: AdamConfig,
    /// Seeds batch order, dropout and sample augmentation.
    pub seed: u64,
    /// Steps per reported epoch in the metrics sidecar.
    pub steps_per_epoch: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            steps: 2000,
            batch_size: 8,
            lr: 6e-4,
            warmup_frac: 0.05,
            clip_norm: 1.0,
            adam: AdamConfig::default(),
            seed: 0,
            steps_per_epoch: 100,
        }
    }
}

/// Linear warmup to the peak rate, then linear decay to zero at
/// `total_steps`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Schedule {
    pub peak_lr: f64,
    pub total_steps: u64,
    pub warmup_steps: u64,
}

impl Schedule {
    pub fn new(peak_lr: f64, total_steps: u64, warmup_frac: f64) -> Self {
        let warmup_steps = ((total_steps as f64 * warmup_frac).round() as u64).clamp(1, total_steps.max(1));
        Self {
            peak_lr,
            total_steps,
            warmup_steps,
        }
    }

    pub fn factor(&self, step: u64) -> f64 {
        if step < self.warmup_steps {
            (step + 1) as f64 / self.warmup_steps as f64
        } else if step >= self.total_steps {
            0.0
        } else {
            (self.total_steps - step) as f64 / (self.total_steps - self.warmup_steps + 1) as f64
        }
    }

    pub fn lr(&self, step: u64) -> f64 {
        self.peak_lr * self.factor(step)
    }
}

/// Scales `grad` in place so its L2 norm is at most `max_norm`. Returns the
/// norm before clipping.
pub fn clip_global_norm<T: Scalar>(grad: &mut [T], max_norm: f64) -> f64 {
    let norm = grad.iter().map(|g| g.to_f64().unwrap().powi(2)).sum::<f64>().sqrt();
    if norm > max_norm && norm > 0.0 {
        let s = T::from_f64_lossy(max_norm / norm);
        for g in grad.iter_mut() {
            *g *= s;
        }
    }
    norm
}

#[derive(Clone, Debug)]
pub struct Optimizer<T> {
    pub adam: AdamConfig,
    pub m: Vec<T>,
    pub v: Vec<T>,
    pub step: u64,
}

impl<T: Scalar> Optimizer<T> {
    pub fn new(len: usize, adam: AdamConfig) -> Self {
        Self {
            adam,
            m: vec![T::zero(); len],
            v: vec![T::zero(); len],
            step: 0,
        }
    }

    pub fn update(&mut self, params: &mut [T], grad: &[T], lr: f64) {
        self.step += 1;
        let t = self.step as i32;
        let b1 = T::from_f64_lossy(self.adam.beta1);
        let b2 = T::from_f64_lossy(self.adam.beta2);
        let one = T::one();
        let bc1 = T::from_f64_lossy(1.0 - self.adam.beta1.powi(t));
        let bc2 = T::from_f64_lossy(1.0 - self.adam.beta2.powi(t));
        let eps = T::from_f64_lossy(self.adam.eps);
        let lr = T::from_f64_lossy(lr);
        for i in 0..params.len() {
            let g = grad[i];
            self.m[i] = b1 * self.m[i] + (one - b1) * g;
            self.v[i] = b2 * self.v[i] + (one - b2) * g * g;
            let mhat = self.m[i] / bc1;
            let vhat = self.v[i] / bc2;
            params[i] -= lr * mhat / (vhat.sqrt() + eps);
        }
    }
}

/// Batch loss and its gradient. Each segment's cross-entropy is averaged
/// over its weighted positions across the whole batch. Sequences are cut
/// after their last weighted target; causal attention makes the cut exact.
pub fn batch_loss_and_grad<T: Scalar>(
    params: &Params<T>,
    batch: &[TrainingSample],
    mut rng: Option<&mut dyn RngCore>,
) -> Result<(LossBreakdown, Vec<T>), ModelError> {
    let lambda = params.config.lambda;
    let mut counts = [0.0f64; 2];
    for s in batch {
        for (w, seg) in s.loss_weight.iter().zip(&s.segment) {
            counts[seg_index(*seg)] += *w as f64;
        }
    }
    let scales = [
        if counts[0] > 0.0 { 1.0 / counts[0] } else { 0.0 },
        if counts[1] > 0.0 { lambda / counts[1] } else { 0.0 },
    ];
    let v = params.joint_len();
    let mut grad = vec![T::zero(); params.data.len()];
    let mut sums = [0.0f64; 2];
    for s in batch {
        let n = s.effective_len();
        if n == 0 {
            continue;
        }
        let mode = match rng.as_deref_mut() {
            Some(r) => ForwardMode::Train(r),
            None => ForwardMode::Eval,
        };
        let cache = params.run(&s.input_ids[..n], mode)?;
        let rows: Vec<usize> = (0..n).filter(|&t| s.loss_weight[t] != 0.0).collect();
        let logits = params.head(&cache, &rows);
        let mut dlogits = vec![T::zero(); rows.len() * v];
        for (i, &t) in rows.iter().enumerate() {
            let seg = seg_index(s.segment[t]);
            let w = s.loss_weight[t] as f64;
            let scale = T::from_f64_lossy(w * scales[seg]);
            let ce = row_cross_entropy(
                &logits[i * v..(i + 1) * v],
                s.target_ids[t] as usize,
                Some((&mut dlogits[i * v..(i + 1) * v], scale)),
            );
            sums[seg] += w * ce;
        }
        params.backward(&cache, &rows, &dlogits, &mut grad);
    }
    let mean = |i: usize| if counts[i] > 0.0 { sums[i] / counts[i] } else { 0.0 };
    Ok((LossBreakdown::combine(mean(0), mean(1), lambda), grad))
}

fn seg_index(s: Segment) -> usize {
    match s {
        Segment::Text => 0,
        Segment::Icon => 1,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepMetrics {
    pub step: u64,
    pub lr: f64,
    pub loss: LossBreakdown,
    pub grad_norm: f64,
}

/// One optimizer step: gradient, clipping, scheduled Adam update.
pub fn train_step<T: Scalar>(
    params: &mut Params<T>,
    opt: &mut Optimizer<T>,
    batch: &[TrainingSample],
    schedule: &Schedule,
    clip_norm: f64,
    rng: &mut dyn RngCore,
) -> Result<StepMetrics, ModelError> {
    let step = opt.step;
    let (loss, mut grad) = batch_loss_and_grad(params, batch, Some(rng))?;
    if !loss.is_finite() {
        return Err(ModelError::NonFinite {
            step,
            text: loss.text,
            icon: loss.icon,
        });
    }
    let grad_norm = clip_global_norm(&mut grad, clip_norm);
    let lr = schedule.lr(step);
    opt.update(&mut params.data, &grad, lr);
    Ok(StepMetrics { step, lr, loss, grad_norm })
}

/// Parameters, optimizer state, schedule and dropout stream for a run.
pub struct Trainer<T> {
    pub params: Params<T>,
    pub opt: Optimizer<T>,
    pub schedule: Schedule,
    pub clip_norm: f64,
    rng: ChaCha8Rng,
}

impl<T: Scalar> Trainer<T> {
    pub fn new(params: Params<T>, cfg: &TrainConfig) -> Self {
        let opt = Optimizer::new(params.data.len(), cfg.adam);
        Self {
            params,
            opt,
            schedule: Schedule::new(cfg.lr, cfg.steps, cfg.warmup_frac),
            clip_norm: cfg.clip_norm,
            // Distinct from the batch stream, which callers seed with cfg.seed.
            rng: ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x0d20_9057),
        }
    }

    pub fn step(&mut self, batch: &[TrainingSample]) -> Result<StepMetrics, ModelError> {
        train_step(&mut self.params, &mut self.opt, batch, &self.schedule, self.clip_norm, &mut self.rng)
    }
}
