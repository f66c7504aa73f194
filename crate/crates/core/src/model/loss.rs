use super::{Logits, Scalar};
use crate::dataset::Segment;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LossBreakdown {
    pub total: f64,
    pub text: f64,
    pub icon: f64,
}

impl LossBreakdown {
    pub fn combine(text: f64, icon: f64, lambda: f64) -> Self {
        Self {
            total: text + lambda * icon,
            text,
            icon,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.total.is_finite() && self.text.is_finite() && self.icon.is_finite()
    }
}

/// Cross-entropy of one row against `target`. When `grad` is given, writes
/// `scale * (softmax - onehot)` into it.
pub(crate) fn row_cross_entropy<T: Scalar>(row: &[T], target: usize, grad: Option<(&mut [T], T)>) -> f64 {
    let max = row.iter().copied().fold(T::neg_infinity(), T::max);
    let sum: T = row.iter().map(|&x| (x - max).exp()).sum();
    let log_z = max + sum.ln();
    if let Some((g, scale)) = grad {
        let inv = T::one() / sum;
        for (gi, &x) in g.iter_mut().zip(row) {
            *gi = scale * (x - max).exp() * inv;
        }
        g[target] -= scale;
    }
    (log_z - row[target]).to_f64().unwrap()
}

/// Weighted mean cross-entropy per segment; a segment with no weight
/// contributes 0. `total = text + lambda * icon`.
pub fn loss<T: Scalar>(logits: &Logits<T>, target_ids: &[u32], weights: &[f32], segments: &[Segment], lambda: f64) -> LossBreakdown {
    assert_eq!(logits.positions, target_ids.len());
    assert_eq!(target_ids.len(), weights.len());
    assert_eq!(target_ids.len(), segments.len());
    let mut sums = [0.0f64; 2];
    let mut counts = [0.0f64; 2];
    for t in 0..target_ids.len() {
        let w = weights[t] as f64;
        if w == 0.0 {
            continue;
        }
        let seg = match segments[t] {
            Segment::Text => 0,
            Segment::Icon => 1,
        };
        sums[seg] += w * row_cross_entropy(logits.row(t), target_ids[t] as usize, None);
        counts[seg] += w;
    }
    let mean = |i: usize| if counts[i] > 0.0 { sums[i] / counts[i] } else { 0.0 };
    LossBreakdown::combine(mean(0), mean(1), lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn segs(n: usize, split: usize) -> Vec<Segment> {
        (0..n).map(|i| if i < split { Segment::Text } else { Segment::Icon }).collect()
    }

    #[test]
    fn uniform_logits_give_log_v() {
        let v = 37;
        let logits = Logits {
            positions: 6,
            vocab: v,
            data: vec![0.25f64; 6 * v],
        };
        let l = loss(&logits, &[0, 5, 36, 2, 3, 1], &[1.0; 6], &segs(6, 3), 7.0);
        let ln_v = (v as f64).ln();
        assert!((l.text - ln_v).abs() < 1e-12);
        assert!((l.icon - ln_v).abs() < 1e-12);
        assert!((l.total - 8.0 * ln_v).abs() < 1e-12);
    }

    #[test]
    fn zero_lambda_is_text_only() {
        let logits = Logits {
            positions: 4,
            vocab: 3,
            data: vec![0.1f64, 0.7, -0.3, 1.0, 0.0, 0.5, 2.0, -1.0, 0.0, 0.3, 0.3, 0.9],
        };
        let l = loss(&logits, &[0, 1, 2, 2], &[1.0; 4], &segs(4, 2), 0.0);
        assert_eq!(l.total, l.text);
        assert!(l.icon > 0.0);
    }

    #[test]
    fn confident_correct_logits_approach_zero() {
        let v = 10;
        let targets = [3u32, 7, 0, 9];
        let mut data = vec![0.0f64; 4 * v];
        for (t, &y) in targets.iter().enumerate() {
            data[t * v + y as usize] = 60.0;
        }
        let logits = Logits { positions: 4, vocab: v, data };
        let l = loss(&logits, &targets, &[1.0; 4], &segs(4, 2), 7.0);
        assert!(l.total < 1e-20);
    }

    #[test]
    fn zero_weights_contribute_nothing() {
        let logits = Logits {
            positions: 3,
            vocab: 2,
            data: vec![5.0f64, -5.0, 0.0, 0.0, -5.0, 5.0],
        };
        // Position 1 is uniform; masked out it must not move the mean.
        let with = loss(&logits, &[0, 0, 1], &[1.0, 0.0, 1.0], &segs(3, 0), 1.0);
        let without = loss(
            &Logits {
                positions: 2,
                vocab: 2,
                data: vec![5.0, -5.0, -5.0, 5.0],
            },
            &[0, 1],
            &[1.0, 1.0],
            &segs(2, 0),
            1.0,
        );
        assert!((with.icon - without.icon).abs() < 1e-15);
        assert_eq!(with.text, 0.0);
    }

    #[test]
    fn row_gradient_matches_difference_quotient() {
        let row = vec![0.3f64, -1.2, 0.8, 0.05];
        let mut g = vec![0.0; 4];
        row_cross_entropy(&row, 2, Some((&mut g, 1.0)));
        for i in 0..4 {
            let mut up = row.clone();
            let mut dn = row.clone();
            up[i] += 1e-6;
            dn[i] -= 1e-6;
            let fd = (row_cross_entropy(&up, 2, None) - row_cross_entropy(&dn, 2, None)) / 2e-6;
            assert!((fd - g[i]).abs() < 1e-8);
        }
    }
}
