use super::forward::{add_bias, gelu, layer_norm};
use super::scalar::{gemm, View, ViewMut};
use super::{ModelError, Params, Scalar};

/// Incremental decoder with a per-layer key/value cache. Each push appends
/// one position and returns the head scores at that position.
#[derive(Clone)]
pub struct Session<'a, T> {
    params: &'a Params<T>,
    keys: Vec<Vec<T>>,
    values: Vec<Vec<T>>,
    len: usize,
}

impl<'a, T: Scalar> Session<'a, T> {
    pub fn new(params: &'a Params<T>) -> Self {
        let layers = params.config.layers;
        Self {
            params,
            keys: vec![Vec::new(); layers],
            values: vec![Vec::new(); layers],
            len: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn params(&self) -> &'a Params<T> {
        self.params
    }

    /// Input vector for `id` at the next position.
    pub fn embed_next(&self, id: u32) -> Result<Vec<T>, ModelError> {
        self.params.embed_token(id, self.len)
    }

    pub fn push_token(&mut self, id: u32) -> Result<Vec<T>, ModelError> {
        let x = self.embed_next(id)?;
        self.push_embedding(x)
    }

    /// Appends a precomputed input vector (position term included).
    pub fn push_embedding(&mut self, mut x: Vec<T>) -> Result<Vec<T>, ModelError> {
        let p = self.params;
        let cfg = &p.config;
        let d = cfg.dim;
        if x.len() != d {
            return Err(ModelError::Config(format!("embedding has {} values, expected {d}", x.len())));
        }
        if self.len >= cfg.max_len {
            return Err(ModelError::TooLong {
                len: self.len + 1,
                max: cfg.max_len,
            });
        }
        let t = self.len;
        let dh = cfg.head_dim();
        let scale = T::one() / T::from_usize(dh).unwrap().sqrt();
        let mut h = vec![T::zero(); d];
        let mut qkv = vec![T::zero(); 3 * d];
        let mut att = vec![T::zero(); d];
        let mut tmp = vec![T::zero(); d];
        let mut fc = vec![T::zero(); 4 * d];
        let mut scores = vec![T::zero(); t + 1];
        for (li, lr) in p.layout.layers.iter().enumerate() {
            layer_norm(&x, p.slice(&lr.ln1_g), p.slice(&lr.ln1_b), &mut h, None);
            gemm(View::new(&h, 1, d), View::new(p.slice(&lr.w_qkv), d, 3 * d), T::zero(), ViewMut::new(&mut qkv, 1, 3 * d));
            add_bias(&mut qkv, p.slice(&lr.b_qkv));
            self.keys[li].extend_from_slice(&qkv[d..2 * d]);
            self.values[li].extend_from_slice(&qkv[2 * d..]);
            let (keys, values) = (&self.keys[li], &self.values[li]);
            for hd in 0..cfg.heads {
                let q = &qkv[hd * dh..(hd + 1) * dh];
                let mut max = T::neg_infinity();
                for (j, s) in scores.iter_mut().enumerate() {
                    let k = &keys[j * d + hd * dh..j * d + (hd + 1) * dh];
                    *s = q.iter().zip(k).map(|(&a, &b)| a * b).sum::<T>() * scale;
                    max = max.max(*s);
                }
                let mut sum = T::zero();
                for s in scores.iter_mut() {
                    *s = (*s - max).exp();
                    sum += *s;
                }
                let out = &mut att[hd * dh..(hd + 1) * dh];
                out.iter_mut().for_each(|o| *o = T::zero());
                for (j, &s) in scores.iter().enumerate() {
                    let w = s / sum;
                    let v = &values[j * d + hd * dh..j * d + (hd + 1) * dh];
                    for (o, &vv) in out.iter_mut().zip(v) {
                        *o += w * vv;
                    }
                }
            }
            gemm(View::new(&att, 1, d), View::new(p.slice(&lr.w_o), d, d), T::zero(), ViewMut::new(&mut tmp, 1, d));
            add_bias(&mut tmp, p.slice(&lr.b_o));
            x.iter_mut().zip(&tmp).for_each(|(a, &b)| *a += b);

            layer_norm(&x, p.slice(&lr.ln2_g), p.slice(&lr.ln2_b), &mut h, None);
            gemm(View::new(&h, 1, d), View::new(p.slice(&lr.w_fc), d, 4 * d), T::zero(), ViewMut::new(&mut fc, 1, 4 * d));
            add_bias(&mut fc, p.slice(&lr.b_fc));
            fc.iter_mut().for_each(|v| *v = gelu(*v));
            gemm(View::new(&fc, 1, 4 * d), View::new(p.slice(&lr.w_proj), 4 * d, d), T::zero(), ViewMut::new(&mut tmp, 1, d));
            add_bias(&mut tmp, p.slice(&lr.b_proj));
            x.iter_mut().zip(&tmp).for_each(|(a, &b)| *a += b);
        }
        layer_norm(&x, p.slice(&p.layout.lnf_g), p.slice(&p.layout.lnf_b), &mut h, None);
        let v = p.joint_len();
        let mut logits = vec![T::zero(); v];
        gemm(View::new(&h, 1, d), View::new(p.slice(&p.layout.head_w), d, v), T::zero(), ViewMut::new(&mut logits, 1, v));
        add_bias(&mut logits, p.slice(&p.layout.head_b));
        self.len += 1;
        Ok(logits)
    }
}
