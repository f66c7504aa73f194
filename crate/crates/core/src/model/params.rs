use super::{ModelConfig, ModelError, Scalar};
use crate::tokenizer::SVG_VOCAB_SIZE;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::ops::Range;

const INIT_STD: f64 = 0.02;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorSpec {
    pub name: String,
    pub shape: Vec<usize>,
}

impl TensorSpec {
    pub fn numel(&self) -> usize {
        self.shape.iter().product()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Init {
    Normal,
    Zeros,
    Ones,
}

#[derive(Clone, Debug)]
pub(crate) struct LayerRanges {
    pub ln1_g: Range<usize>,
    pub ln1_b: Range<usize>,
    pub w_qkv: Range<usize>,
    pub b_qkv: Range<usize>,
    pub w_o: Range<usize>,
    pub b_o: Range<usize>,
    pub ln2_g: Range<usize>,
    pub ln2_b: Range<usize>,
    pub w_fc: Range<usize>,
    pub b_fc: Range<usize>,
    pub w_proj: Range<usize>,
    pub b_proj: Range<usize>,
}

/// Named tensors packed back to back in one flat buffer, in declaration
/// order. Matrices are row-major `[in, out]`; embedding tables are
/// `[rows, dim]`.
#[derive(Clone, Debug)]
pub struct Layout {
    specs: Vec<TensorSpec>,
    ranges: Vec<Range<usize>>,
    inits: Vec<Init>,
    pub(crate) svg_emb: Range<usize>,
    pub(crate) coord_x: Range<usize>,
    pub(crate) coord_y: Range<usize>,
    pub(crate) text_emb: Range<usize>,
    pub(crate) special_emb: Range<usize>,
    pub(crate) pos: Range<usize>,
    pub(crate) layers: Vec<LayerRanges>,
    pub(crate) lnf_g: Range<usize>,
    pub(crate) lnf_b: Range<usize>,
    pub(crate) head_w: Range<usize>,
    pub(crate) head_b: Range<usize>,
}

struct Builder {
    specs: Vec<TensorSpec>,
    ranges: Vec<Range<usize>>,
    inits: Vec<Init>,
    offset: usize,
}

impl Builder {
    fn add(&mut self, name: String, shape: &[usize], init: Init) -> Range<usize> {
        let n: usize = shape.iter().product();
        let r = self.offset..self.offset + n;
        self.offset += n;
        self.specs.push(TensorSpec {
            name,
            shape: shape.to_vec(),
        });
        self.ranges.push(r.clone());
        self.inits.push(init);
        r
    }
}

impl Layout {
    pub fn new(cfg: &ModelConfig) -> Self {
        let d = cfg.dim;
        let joint = cfg.joint().len();
        let mut b = Builder {
            specs: Vec::new(),
            ranges: Vec::new(),
            inits: Vec::new(),
            offset: 0,
        };
        let svg_emb = b.add("svg_emb".into(), &[SVG_VOCAB_SIZE, d], Init::Normal);
        let coord_x = b.add("coord_x".into(), &[cfg.coord_rows(), d], Init::Normal);
        let coord_y = b.add("coord_y".into(), &[cfg.coord_rows(), d], Init::Normal);
        let text_emb = b.add("text_emb".into(), &[cfg.text_vocab_size, d], Init::Normal);
        let special_emb = b.add("special_emb".into(), &[2, d], Init::Normal);
        let pos = b.add("pos_emb".into(), &[cfg.max_len, d], Init::Normal);
        let layers = (0..cfg.layers)
            .map(|i| LayerRanges {
                ln1_g: b.add(format!("h{i}.ln1.g"), &[d], Init::Ones),
                ln1_b: b.add(format!("h{i}.ln1.b"), &[d], Init::Zeros),
                w_qkv: b.add(format!("h{i}.attn.w_qkv"), &[d, 3 * d], Init::Normal),
                b_qkv: b.add(format!("h{i}.attn.b_qkv"), &[3 * d], Init::Zeros),
                w_o: b.add(format!("h{i}.attn.w_o"), &[d, d], Init::Normal),
                b_o: b.add(format!("h{i}.attn.b_o"), &[d], Init::Zeros),
                ln2_g: b.add(format!("h{i}.ln2.g"), &[d], Init::Ones),
                ln2_b: b.add(format!("h{i}.ln2.b"), &[d], Init::Zeros),
                w_fc: b.add(format!("h{i}.mlp.w_fc"), &[d, 4 * d], Init::Normal),
                b_fc: b.add(format!("h{i}.mlp.b_fc"), &[4 * d], Init::Zeros),
                w_proj: b.add(format!("h{i}.mlp.w_proj"), &[4 * d, d], Init::Normal),
                b_proj: b.add(format!("h{i}.mlp.b_proj"), &[d], Init::Zeros),
            })
            .collect();
        let lnf_g = b.add("ln_f.g".into(), &[d], Init::Ones);
        let lnf_b = b.add("ln_f.b".into(), &[d], Init::Zeros);
        let head_w = b.add("head.w".into(), &[d, joint], Init::Normal);
        let head_b = b.add("head.b".into(), &[joint], Init::Zeros);
        Self {
            specs: b.specs,
            ranges: b.ranges,
            inits: b.inits,
            svg_emb,
            coord_x,
            coord_y,
            text_emb,
            special_emb,
            pos,
            layers,
            lnf_g,
            lnf_b,
            head_w,
            head_b,
        }
    }

    pub fn specs(&self) -> &[TensorSpec] {
        &self.specs
    }

    pub fn range(&self, index: usize) -> Range<usize> {
        self.ranges[index].clone()
    }

    pub fn find(&self, name: &str) -> Option<Range<usize>> {
        self.specs.iter().position(|s| s.name == name).map(|i| self.range(i))
    }

    pub fn len(&self) -> usize {
        self.ranges.last().map_or(0, |r| r.end)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug)]
pub struct Params<T> {
    pub config: ModelConfig,
    pub layout: Layout,
    pub data: Vec<T>,
}

impl<T: Scalar> Params<T> {
    /// Normal(0, 0.02) weights, zero biases, unit norm gains. Values are drawn
    /// in `f64` so every element type starts from the same point.
    pub fn init(config: &ModelConfig) -> Result<Self, ModelError> {
        config.validate()?;
        let layout = Layout::new(config);
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let normal = Normal::new(0.0, INIT_STD).expect("valid std");
        let mut data = vec![T::zero(); layout.len()];
        for (r, init) in layout.ranges.iter().zip(&layout.inits) {
            for x in &mut data[r.clone()] {
                *x = match init {
                    Init::Normal => T::from_f64_lossy(normal.sample(&mut rng)),
                    Init::Zeros => T::zero(),
                    Init::Ones => T::one(),
                };
            }
        }
        Ok(Self {
            config: config.clone(),
            layout,
            data,
        })
    }

    pub fn from_data(config: &ModelConfig, data: Vec<T>) -> Result<Self, ModelError> {
        config.validate()?;
        let layout = Layout::new(config);
        if data.len() != layout.len() {
            return Err(ModelError::Config(format!(
                "parameter buffer has {} values, layout needs {}",
                data.len(),
                layout.len()
            )));
        }
        Ok(Self {
            config: config.clone(),
            layout,
            data,
        })
    }

    pub fn cast<U: Scalar>(&self) -> Params<U> {
        Params {
            config: self.config.clone(),
            layout: self.layout.clone(),
            data: self.data.iter().map(|&x| U::from_f64_lossy(x.to_f64().unwrap())).collect(),
        }
    }

    pub fn tensor(&self, name: &str) -> Option<&[T]> {
        self.layout.find(name).map(|r| &self.data[r])
    }

    pub fn tensor_mut(&mut self, name: &str) -> Option<&mut [T]> {
        self.layout.find(name).map(move |r| &mut self.data[r])
    }

    pub(crate) fn slice(&self, r: &Range<usize>) -> &[T] {
        &self.data[r.clone()]
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CoordMode;

    #[test]
    fn layout_matches_documented_count() {
        for (layers, dim, heads, text, coord_mode) in [
            (1, 8, 1, 5, CoordMode::Zero),
            (2, 16, 2, 30, CoordMode::Zero),
            (4, 128, 4, 200, CoordMode::Zero),
            (3, 24, 3, 7, CoordMode::LearnedNull),
        ] {
            let cfg = ModelConfig {
                layers,
                dim,
                heads,
                text_vocab_size: text,
                coord_mode,
                ..Default::default()
            };
            let layout = Layout::new(&cfg);
            let summed: usize = layout.specs().iter().map(TensorSpec::numel).sum();
            assert_eq!(layout.len(), summed);
            assert_eq!(layout.len(), cfg.param_count());
        }
    }

    #[test]
    fn desk_config_count_by_hand() {
        let cfg = ModelConfig {
            text_vocab_size: 100,
            ..Default::default()
        };
        // embeddings: 128 * (10007 + 200 + 100 + 2 + 562)
        let emb = 128 * 10_871;
        // blocks: 4 * (12 * 16384 + 13 * 128)
        let blocks = 4 * (196_608 + 1_664);
        let head = 129 * (100 + 10_009);
        assert_eq!(cfg.param_count(), emb + blocks + 256 + head);
    }

    #[test]
    fn init_is_seeded_and_type_independent() {
        let cfg = ModelConfig {
            layers: 1,
            dim: 8,
            heads: 2,
            seed: 9,
            ..Default::default()
        };
        let a = Params::<f32>::init(&cfg).unwrap();
        let b = Params::<f32>::init(&cfg).unwrap();
        assert_eq!(a.data, b.data);
        let c = Params::<f64>::init(&cfg).unwrap();
        for (x, y) in a.data.iter().zip(&c.data) {
            assert_eq!(*x, *y as f32);
        }
        assert!(a.tensor("h0.ln1.g").unwrap().iter().all(|&g| g == 1.0));
        assert!(a.tensor("head.b").unwrap().iter().all(|&g| g == 0.0));
        let std = {
            let w = a.tensor("svg_emb").unwrap();
            (w.iter().map(|x| (x * x) as f64).sum::<f64>() / w.len() as f64).sqrt()
        };
        assert!((std - 0.02).abs() < 0.001, "{std}");
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = ModelConfig {
            dim: 10,
            heads: 4,
            ..Default::default()
        };
        assert!(Params::<f32>::init(&bad).is_err());
        let bad = ModelConfig {
            layers: 0,
            ..Default::default()
        };
        assert!(Params::<f32>::init(&bad).is_err());
    }
}
