use super::params::LayerRanges;
use super::scalar::{gemm, View, ViewMut};
use super::{CoordMode, ModelError, Params, Scalar, LN_EPS};
use crate::joint::JointToken;
use crate::svg::GRID;
use crate::tokenizer::{location_of, SVG_VOCAB_SIZE};
use rand::{Rng, RngCore};

pub enum ForwardMode<'a> {
    Eval,
    /// Dropout active, masks drawn from the given generator.
    Train(&'a mut dyn RngCore),
}

/// Per-position scores over the joint vocabulary.
#[derive(Clone, Debug, PartialEq)]
pub struct Logits<T> {
    pub positions: usize,
    pub vocab: usize,
    pub data: Vec<T>,
}

impl<T: Scalar> Logits<T> {
    pub fn row(&self, t: usize) -> &[T] {
        &self.data[t * self.vocab..(t + 1) * self.vocab]
    }

    pub fn softmax(&self, t: usize) -> Vec<f64> {
        softmax_f64(self.row(t))
    }
}

pub(crate) fn softmax_f64<T: Scalar>(row: &[T]) -> Vec<f64> {
    let max = row.iter().fold(f64::NEG_INFINITY, |m, x| m.max(x.to_f64().unwrap()));
    let e: Vec<f64> = row.iter().map(|x| (x.to_f64().unwrap() - max).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

pub(crate) struct NormCache<T> {
    pub xhat: Vec<T>,
    pub rstd: Vec<T>,
}

pub(crate) struct LayerCache<T> {
    ln1: NormCache<T>,
    h1: Vec<T>,
    qkv: Vec<T>,
    probs: Vec<T>,
    att: Vec<T>,
    drop_a: Option<Vec<T>>,
    ln2: NormCache<T>,
    h2: Vec<T>,
    fc: Vec<T>,
    act: Vec<T>,
    drop_m: Option<Vec<T>>,
}

pub(crate) struct Cache<T> {
    pub ids: Vec<u32>,
    drop0: Option<Vec<T>>,
    layers: Vec<LayerCache<T>>,
    lnf: NormCache<T>,
    /// Final normalized hidden states, `[n, dim]`.
    pub hf: Vec<T>,
}

pub(crate) fn layer_norm<T: Scalar>(x: &[T], g: &[T], b: &[T], out: &mut [T], cache: Option<&mut NormCache<T>>) {
    let d = g.len();
    let n = x.len() / d;
    let eps = T::from_f64_lossy(LN_EPS);
    let inv_d = T::one() / T::from_usize(d).unwrap();
    let mut cache = cache;
    for i in 0..n {
        let row = &x[i * d..(i + 1) * d];
        let mean = row.iter().copied().sum::<T>() * inv_d;
        let var = row.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() * inv_d;
        let rstd = T::one() / (var + eps).sqrt();
        for j in 0..d {
            let xh = (row[j] - mean) * rstd;
            out[i * d + j] = g[j] * xh + b[j];
            if let Some(c) = cache.as_deref_mut() {
                c.xhat[i * d + j] = xh;
            }
        }
        if let Some(c) = cache.as_deref_mut() {
            c.rstd[i] = rstd;
        }
    }
}

/// Accumulates into `dx`, `dg`, `db`.
fn layer_norm_backward<T: Scalar>(dy: &[T], c: &NormCache<T>, g: &[T], dx: &mut [T], dg: &mut [T], db: &mut [T]) {
    let d = g.len();
    let n = dy.len() / d;
    let inv_d = T::one() / T::from_usize(d).unwrap();
    let mut dxhat = vec![T::zero(); d];
    for i in 0..n {
        let dyr = &dy[i * d..(i + 1) * d];
        let xh = &c.xhat[i * d..(i + 1) * d];
        let mut mean_dxhat = T::zero();
        let mut mean_dxhat_xhat = T::zero();
        for j in 0..d {
            dg[j] += dyr[j] * xh[j];
            db[j] += dyr[j];
            dxhat[j] = dyr[j] * g[j];
            mean_dxhat += dxhat[j];
            mean_dxhat_xhat += dxhat[j] * xh[j];
        }
        mean_dxhat *= inv_d;
        mean_dxhat_xhat *= inv_d;
        let rstd = c.rstd[i];
        for j in 0..d {
            dx[i * d + j] += rstd * (dxhat[j] - mean_dxhat - xh[j] * mean_dxhat_xhat);
        }
    }
}

const GELU_C: f64 = 0.797_884_560_802_865_4; // sqrt(2 / pi)
const GELU_A: f64 = 0.044_715;

pub(crate) fn gelu<T: Scalar>(x: T) -> T {
    let c = T::from_f64_lossy(GELU_C);
    let a = T::from_f64_lossy(GELU_A);
    let half = T::from_f64_lossy(0.5);
    half * x * (T::one() + (c * (x + a * x * x * x)).tanh())
}

fn gelu_grad<T: Scalar>(x: T) -> T {
    let c = T::from_f64_lossy(GELU_C);
    let a = T::from_f64_lossy(GELU_A);
    let half = T::from_f64_lossy(0.5);
    let three = T::from_f64_lossy(3.0);
    let t = (c * (x + a * x * x * x)).tanh();
    half * (T::one() + t) + half * x * (T::one() - t * t) * c * (T::one() + three * a * x * x)
}

pub(crate) fn add_bias<T: Scalar>(x: &mut [T], b: &[T]) {
    for row in x.chunks_exact_mut(b.len()) {
        for (v, &bb) in row.iter_mut().zip(b) {
            *v += bb;
        }
    }
}

fn bias_grad<T: Scalar>(dy: &[T], db: &mut [T]) {
    for row in dy.chunks_exact(db.len()) {
        for (g, &v) in db.iter_mut().zip(row) {
            *g += v;
        }
    }
}

fn dropout_mask<T: Scalar, R: RngCore + ?Sized>(len: usize, p: f64, rng: &mut R) -> Vec<T> {
    let keep = T::from_f64_lossy(1.0 / (1.0 - p));
    (0..len).map(|_| if rng.gen::<f64>() < p { T::zero() } else { keep }).collect()
}

fn apply_mask<T: Scalar>(x: &mut [T], mask: &Option<Vec<T>>) {
    if let Some(m) = mask {
        for (v, &k) in x.iter_mut().zip(m) {
            *v *= k;
        }
    }
}

/// Causal scaled dot-product attention over all heads. `probs` receives
/// `[heads, n, n]` with zeros above the diagonal.
pub(crate) fn attention<T: Scalar>(qkv: &[T], n: usize, d: usize, heads: usize, probs: &mut [T], att: &mut [T]) {
    let dh = d / heads;
    let scale = T::one() / T::from_usize(dh).unwrap().sqrt();
    for h in 0..heads {
        let q = View::columns(qkv, n, 3 * d, h * dh, dh);
        let k = View::columns(qkv, n, 3 * d, d + h * dh, dh);
        let v = View::columns(qkv, n, 3 * d, 2 * d + h * dh, dh);
        let p = &mut probs[h * n * n..(h + 1) * n * n];
        gemm(q, k.t(), T::zero(), ViewMut::new(p, n, n));
        for i in 0..n {
            let row = &mut p[i * n..(i + 1) * n];
            let mut max = T::neg_infinity();
            for s in &mut row[..=i] {
                *s *= scale;
                max = max.max(*s);
            }
            let mut sum = T::zero();
            for s in &mut row[..=i] {
                *s = (*s - max).exp();
                sum += *s;
            }
            for s in &mut row[..=i] {
                *s /= sum;
            }
            for s in &mut row[i + 1..] {
                *s = T::zero();
            }
        }
        gemm(View::new(p, n, n), v, T::zero(), ViewMut::columns(att, n, d, h * dh, dh));
    }
}

impl<T: Scalar> Params<T> {
    pub(crate) fn joint_len(&self) -> usize {
        self.config.text_vocab_size + SVG_VOCAB_SIZE + 2
    }

    fn row<'a>(&'a self, r: &std::ops::Range<usize>, i: usize) -> &'a [T] {
        let d = self.config.dim;
        &self.data[r.start + i * d..r.start + (i + 1) * d]
    }

    /// Adds the token's table rows (without position) into `out`.
    fn add_token_rows(&self, id: u32, position: usize, out: &mut [T]) -> Result<(), ModelError> {
        let l = &self.layout;
        let joint = self.config.joint();
        let mut add = |src: &[T]| {
            for (o, &s) in out.iter_mut().zip(src) {
                *o += s;
            }
        };
        match joint.classify(id).ok_or(ModelError::TokenId { id, position })? {
            JointToken::Text(t) => add(self.row(&l.text_emb, t as usize)),
            JointToken::Svg(s) => {
                add(self.row(&l.svg_emb, s as usize));
                if let Some(v) = location_of(s) {
                    let (x, y) = (v as usize / GRID as usize, v as usize % GRID as usize);
                    add(self.row(&l.coord_x, x));
                    add(self.row(&l.coord_y, y));
                } else if self.config.coord_mode == CoordMode::LearnedNull {
                    add(self.row(&l.coord_x, GRID as usize));
                    add(self.row(&l.coord_y, GRID as usize));
                }
            }
            JointToken::Sos => add(self.row(&l.special_emb, 0)),
            JointToken::Pad => add(self.row(&l.special_emb, 1)),
        }
        Ok(())
    }

    /// Input vector for `id` at `position`: table rows plus the position row.
    pub fn embed_token(&self, id: u32, position: usize) -> Result<Vec<T>, ModelError> {
        if position >= self.config.max_len {
            return Err(ModelError::TooLong {
                len: position + 1,
                max: self.config.max_len,
            });
        }
        let mut out = vec![T::zero(); self.config.dim];
        self.add_token_rows(id, position, &mut out)?;
        for (o, &p) in out.iter_mut().zip(self.row(&self.layout.pos, position)) {
            *o += p;
        }
        Ok(out)
    }

    pub(crate) fn embed_sequence(&self, ids: &[u32]) -> Result<Vec<T>, ModelError> {
        if ids.len() > self.config.max_len {
            return Err(ModelError::TooLong {
                len: ids.len(),
                max: self.config.max_len,
            });
        }
        let d = self.config.dim;
        let mut x = vec![T::zero(); ids.len() * d];
        for (t, &id) in ids.iter().enumerate() {
            x[t * d..(t + 1) * d].copy_from_slice(&self.embed_token(id, t)?);
        }
        Ok(x)
    }

    /// Full logits at every position.
    pub fn forward(&self, ids: &[u32], mode: ForwardMode) -> Result<Logits<T>, ModelError> {
        let cache = self.run(ids, mode)?;
        let rows: Vec<usize> = (0..ids.len()).collect();
        Ok(Logits {
            positions: ids.len(),
            vocab: self.joint_len(),
            data: self.head(&cache, &rows),
        })
    }

    pub(crate) fn run(&self, ids: &[u32], mode: ForwardMode) -> Result<Cache<T>, ModelError> {
        let mut rng = match mode {
            ForwardMode::Eval => None,
            ForwardMode::Train(r) if self.config.dropout > 0.0 => Some(r),
            ForwardMode::Train(_) => None,
        };
        let cfg = &self.config;
        let (n, d) = (ids.len(), cfg.dim);
        let mut x = self.embed_sequence(ids)?;
        let drop0 = rng.as_mut().map(|r| dropout_mask(n * d, cfg.dropout, &mut **r));
        apply_mask(&mut x, &drop0);
        let mut layers = Vec::with_capacity(cfg.layers);
        for lr in &self.layout.layers {
            let lc = self.layer_forward(lr, &mut x, n, rng.as_mut());
            layers.push(lc);
        }
        let mut lnf = NormCache {
            xhat: vec![T::zero(); n * d],
            rstd: vec![T::zero(); n],
        };
        let mut hf = vec![T::zero(); n * d];
        layer_norm(&x, self.slice(&self.layout.lnf_g), self.slice(&self.layout.lnf_b), &mut hf, Some(&mut lnf));
        Ok(Cache {
            ids: ids.to_vec(),
            drop0,
            layers,
            lnf,
            hf,
        })
    }

    fn layer_forward(&self, lr: &LayerRanges, x: &mut [T], n: usize, mut rng: Option<&mut &mut dyn RngCore>) -> LayerCache<T> {
        let cfg = &self.config;
        let d = cfg.dim;
        let mut ln1 = NormCache {
            xhat: vec![T::zero(); n * d],
            rstd: vec![T::zero(); n],
        };
        let mut h1 = vec![T::zero(); n * d];
        layer_norm(x, self.slice(&lr.ln1_g), self.slice(&lr.ln1_b), &mut h1, Some(&mut ln1));
        let mut qkv = vec![T::zero(); n * 3 * d];
        gemm(
            View::new(&h1, n, d),
            View::new(self.slice(&lr.w_qkv), d, 3 * d),
            T::zero(),
            ViewMut::new(&mut qkv, n, 3 * d),
        );
        add_bias(&mut qkv, self.slice(&lr.b_qkv));
        let mut probs = vec![T::zero(); cfg.heads * n * n];
        let mut att = vec![T::zero(); n * d];
        attention(&qkv, n, d, cfg.heads, &mut probs, &mut att);
        let mut a = vec![T::zero(); n * d];
        gemm(View::new(&att, n, d), View::new(self.slice(&lr.w_o), d, d), T::zero(), ViewMut::new(&mut a, n, d));
        add_bias(&mut a, self.slice(&lr.b_o));
        let drop_a = rng.as_mut().map(|r| dropout_mask(n * d, cfg.dropout, &mut ***r));
        apply_mask(&mut a, &drop_a);
        for (xv, av) in x.iter_mut().zip(&a) {
            *xv += *av;
        }

        let mut ln2 = NormCache {
            xhat: vec![T::zero(); n * d],
            rstd: vec![T::zero(); n],
        };
        let mut h2 = vec![T::zero(); n * d];
        layer_norm(x, self.slice(&lr.ln2_g), self.slice(&lr.ln2_b), &mut h2, Some(&mut ln2));
        let mut fc = vec![T::zero(); n * 4 * d];
        gemm(
            View::new(&h2, n, d),
            View::new(self.slice(&lr.w_fc), d, 4 * d),
            T::zero(),
            ViewMut::new(&mut fc, n, 4 * d),
        );
        add_bias(&mut fc, self.slice(&lr.b_fc));
        let act: Vec<T> = fc.iter().map(|&v| gelu(v)).collect();
        let mut m = vec![T::zero(); n * d];
        gemm(
            View::new(&act, n, 4 * d),
            View::new(self.slice(&lr.w_proj), 4 * d, d),
            T::zero(),
            ViewMut::new(&mut m, n, d),
        );
        add_bias(&mut m, self.slice(&lr.b_proj));
        let drop_m = rng.map(|r| dropout_mask(n * d, cfg.dropout, &mut **r));
        apply_mask(&mut m, &drop_m);
        for (xv, mv) in x.iter_mut().zip(&m) {
            *xv += *mv;
        }
        LayerCache {
            ln1,
            h1,
            qkv,
            probs,
            att,
            drop_a,
            ln2,
            h2,
            fc,
            act,
            drop_m,
        }
    }

    /// Output-head scores for the listed positions, `[rows.len(), joint]`.
    pub(crate) fn head(&self, cache: &Cache<T>, rows: &[usize]) -> Vec<T> {
        let d = self.config.dim;
        let v = self.joint_len();
        let mut h = Vec::with_capacity(rows.len() * d);
        for &r in rows {
            h.extend_from_slice(&cache.hf[r * d..(r + 1) * d]);
        }
        let mut out = vec![T::zero(); rows.len() * v];
        gemm(
            View::new(&h, rows.len(), d),
            View::new(self.slice(&self.layout.head_w), d, v),
            T::zero(),
            ViewMut::new(&mut out, rows.len(), v),
        );
        add_bias(&mut out, self.slice(&self.layout.head_b));
        out
    }

    /// Accumulates parameter gradients into `grad` given the gradient of the
    /// loss with respect to the head outputs at `rows`.
    pub(crate) fn backward(&self, cache: &Cache<T>, rows: &[usize], dlogits: &[T], grad: &mut [T]) {
        let cfg = &self.config;
        let l = &self.layout;
        let (n, d, v) = (cache.ids.len(), cfg.dim, self.joint_len());
        let r = rows.len();

        let mut h = Vec::with_capacity(r * d);
        for &row in rows {
            h.extend_from_slice(&cache.hf[row * d..(row + 1) * d]);
        }
        gemm(
            View::new(&h, r, d).t(),
            View::new(dlogits, r, v),
            T::one(),
            ViewMut::new(&mut grad[l.head_w.clone()], d, v),
        );
        bias_grad(dlogits, &mut grad[l.head_b.clone()]);
        let mut dh = vec![T::zero(); r * d];
        gemm(
            View::new(dlogits, r, v),
            View::new(self.slice(&l.head_w), d, v).t(),
            T::zero(),
            ViewMut::new(&mut dh, r, d),
        );
        let mut dhf = vec![T::zero(); n * d];
        for (i, &row) in rows.iter().enumerate() {
            dhf[row * d..(row + 1) * d].copy_from_slice(&dh[i * d..(i + 1) * d]);
        }
        let mut dx = vec![T::zero(); n * d];
        {
            let (dg, db) = split_pair(grad, &l.lnf_g, &l.lnf_b);
            layer_norm_backward(&dhf, &cache.lnf, self.slice(&l.lnf_g), &mut dx, dg, db);
        }

        for (lr, lc) in l.layers.iter().zip(&cache.layers).rev() {
            self.layer_backward(lr, lc, &mut dx, n, grad);
        }

        apply_mask(&mut dx, &cache.drop0);
        self.embedding_backward(&cache.ids, &dx, grad);
    }

    fn layer_backward(&self, lr: &LayerRanges, lc: &LayerCache<T>, dx: &mut [T], n: usize, grad: &mut [T]) {
        let cfg = &self.config;
        let d = cfg.dim;
        let heads = cfg.heads;
        let dh = d / heads;

        // MLP branch.
        let mut dm = dx.to_vec();
        apply_mask(&mut dm, &lc.drop_m);
        gemm(
            View::new(&lc.act, n, 4 * d).t(),
            View::new(&dm, n, d),
            T::one(),
            ViewMut::new(&mut grad[lr.w_proj.clone()], 4 * d, d),
        );
        bias_grad(&dm, &mut grad[lr.b_proj.clone()]);
        let mut dact = vec![T::zero(); n * 4 * d];
        gemm(
            View::new(&dm, n, d),
            View::new(self.slice(&lr.w_proj), 4 * d, d).t(),
            T::zero(),
            ViewMut::new(&mut dact, n, 4 * d),
        );
        for (g, &f) in dact.iter_mut().zip(&lc.fc) {
            *g *= gelu_grad(f);
        }
        gemm(
            View::new(&lc.h2, n, d).t(),
            View::new(&dact, n, 4 * d),
            T::one(),
            ViewMut::new(&mut grad[lr.w_fc.clone()], d, 4 * d),
        );
        bias_grad(&dact, &mut grad[lr.b_fc.clone()]);
        let mut dh2 = vec![T::zero(); n * d];
        gemm(
            View::new(&dact, n, 4 * d),
            View::new(self.slice(&lr.w_fc), d, 4 * d).t(),
            T::zero(),
            ViewMut::new(&mut dh2, n, d),
        );
        {
            let (dg, db) = split_pair(grad, &lr.ln2_g, &lr.ln2_b);
            layer_norm_backward(&dh2, &lc.ln2, self.slice(&lr.ln2_g), dx, dg, db);
        }

        // Attention branch.
        let mut da = dx.to_vec();
        apply_mask(&mut da, &lc.drop_a);
        gemm(
            View::new(&lc.att, n, d).t(),
            View::new(&da, n, d),
            T::one(),
            ViewMut::new(&mut grad[lr.w_o.clone()], d, d),
        );
        bias_grad(&da, &mut grad[lr.b_o.clone()]);
        let mut datt = vec![T::zero(); n * d];
        gemm(
            View::new(&da, n, d),
            View::new(self.slice(&lr.w_o), d, d).t(),
            T::zero(),
            ViewMut::new(&mut datt, n, d),
        );
        let scale = T::one() / T::from_usize(dh).unwrap().sqrt();
        let mut dqkv = vec![T::zero(); n * 3 * d];
        let mut dp = vec![T::zero(); n * n];
        for h in 0..heads {
            let p = &lc.probs[h * n * n..(h + 1) * n * n];
            let datt_h = View::columns(&datt, n, d, h * dh, dh);
            let q = View::columns(&lc.qkv, n, 3 * d, h * dh, dh);
            let k = View::columns(&lc.qkv, n, 3 * d, d + h * dh, dh);
            let v = View::columns(&lc.qkv, n, 3 * d, 2 * d + h * dh, dh);
            gemm(datt_h, v.t(), T::zero(), ViewMut::new(&mut dp, n, n));
            gemm(
                View::new(p, n, n).t(),
                datt_h,
                T::zero(),
                ViewMut::columns(&mut dqkv, n, 3 * d, 2 * d + h * dh, dh),
            );
            for i in 0..n {
                let pr = &p[i * n..(i + 1) * n];
                let dr = &mut dp[i * n..(i + 1) * n];
                let dot: T = pr[..=i].iter().zip(&dr[..=i]).map(|(&a, &b)| a * b).sum();
                for j in 0..=i {
                    dr[j] = pr[j] * (dr[j] - dot) * scale;
                }
                for s in &mut dr[i + 1..] {
                    *s = T::zero();
                }
            }
            gemm(View::new(&dp, n, n), k, T::zero(), ViewMut::columns(&mut dqkv, n, 3 * d, h * dh, dh));
            gemm(View::new(&dp, n, n).t(), q, T::zero(), ViewMut::columns(&mut dqkv, n, 3 * d, d + h * dh, dh));
        }
        gemm(
            View::new(&lc.h1, n, d).t(),
            View::new(&dqkv, n, 3 * d),
            T::one(),
            ViewMut::new(&mut grad[lr.w_qkv.clone()], d, 3 * d),
        );
        bias_grad(&dqkv, &mut grad[lr.b_qkv.clone()]);
        let mut dh1 = vec![T::zero(); n * d];
        gemm(
            View::new(&dqkv, n, 3 * d),
            View::new(self.slice(&lr.w_qkv), d, 3 * d).t(),
            T::zero(),
            ViewMut::new(&mut dh1, n, d),
        );
        let (dg, db) = split_pair(grad, &lr.ln1_g, &lr.ln1_b);
        layer_norm_backward(&dh1, &lc.ln1, self.slice(&lr.ln1_g), dx, dg, db);
    }

    fn embedding_backward(&self, ids: &[u32], dx: &[T], grad: &mut [T]) {
        let d = self.config.dim;
        let l = &self.layout;
        let joint = self.config.joint();
        let mut add = |r: &std::ops::Range<usize>, i: usize, src: &[T]| {
            for (g, &s) in grad[r.start + i * d..r.start + (i + 1) * d].iter_mut().zip(src) {
                *g += s;
            }
        };
        for (t, &id) in ids.iter().enumerate() {
            let g = &dx[t * d..(t + 1) * d];
            add(&l.pos, t, g);
            match joint.classify(id).expect("ids validated during forward") {
                JointToken::Text(x) => add(&l.text_emb, x as usize, g),
                JointToken::Svg(s) => {
                    add(&l.svg_emb, s as usize, g);
                    if let Some(v) = location_of(s) {
                        add(&l.coord_x, v as usize / GRID as usize, g);
                        add(&l.coord_y, v as usize % GRID as usize, g);
                    } else if self.config.coord_mode == CoordMode::LearnedNull {
                        add(&l.coord_x, GRID as usize, g);
                        add(&l.coord_y, GRID as usize, g);
                    }
                }
                JointToken::Sos => add(&l.special_emb, 0, g),
                JointToken::Pad => add(&l.special_emb, 1, g),
            }
        }
    }
}

/// Two disjoint adjacent tensors (gain then bias) borrowed mutably.
fn split_pair<'a, T>(grad: &'a mut [T], a: &std::ops::Range<usize>, b: &std::ops::Range<usize>) -> (&'a mut [T], &'a mut [T]) {
    debug_assert_eq!(a.end, b.start);
    let (lo, hi) = grad[a.start..b.end].split_at_mut(a.len());
    (lo, hi)
}
