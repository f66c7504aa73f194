//! Sample-quality metrics over raster features: Fréchet distance between
//! Gaussian fits, uniqueness and novelty under a cosine threshold, and a
//! nearest-centroid label classifier.

use crate::svg::{rasterize, Icon, RasterImage};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Cosine threshold above which two samples count as the same.
pub const DEFAULT_TAU: f64 = 0.98;
/// Diagonal added to each covariance before the matrix square root.
pub const COV_SHRINKAGE: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("need at least {need} samples, got {got}")]
    TooFew { need: usize, got: usize },
    #[error("feature dimensions differ: {0} vs {1}")]
    Dimension(usize, usize),
    #[error("non-finite Fréchet distance (trace term {trace}, mean term {mean}, min eigenvalue {min_eig:e})")]
    Numerical { trace: f64, mean: f64, min_eig: f64 },
    #[error("{features} features but {labels} labels")]
    Labels { features: usize, labels: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub normalized: bool,
}

impl FeatureVector {
    pub fn raw(values: Vec<f64>) -> Self {
        Self {
            values,
            normalized: false,
        }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Unit-length copy. A zero vector maps to the first basis vector.
    pub fn l2_normalized(&self) -> Self {
        let n = self.norm();
        let values = if n > 0.0 {
            self.values.iter().map(|v| v / n).collect()
        } else {
            let mut e = vec![0.0; self.values.len()];
            if let Some(first) = e.first_mut() {
                *first = 1.0;
            }
            e
        };
        Self { values, normalized: true }
    }

    pub fn cosine(&self, other: &Self) -> f64 {
        let a = self.l2_normalized();
        let b = other.l2_normalized();
        a.values.iter().zip(&b.values).map(|(x, y)| x * y).sum()
    }
}

/// Image-to-vector map. Metric code depends only on this trait.
pub trait FeatureExtractor: Send + Sync {
    fn id(&self) -> String;
    /// Resolution the icon is rendered at before extraction.
    fn render_resolution(&self) -> usize;
    /// Features before L2 normalization.
    fn raw(&self, image: &RasterImage) -> FeatureVector;

    fn extract(&self, image: &RasterImage) -> FeatureVector {
        self.raw(image).l2_normalized()
    }

    fn raw_icon(&self, icon: &Icon) -> FeatureVector {
        self.raw(&rasterize(icon, self.render_resolution()))
    }
}

/// Area-averages the raster onto a `grid x grid` lattice and subtracts the
/// image's own mean intensity, so blank canvases map to the zero vector.
#[derive(Clone, Copy, Debug)]
pub struct RasterDownsample {
    pub grid: usize,
    pub render: usize,
}

impl Default for RasterDownsample {
    fn default() -> Self {
        Self { grid: 16, render: 64 }
    }
}

impl FeatureExtractor for RasterDownsample {
    fn id(&self) -> String {
        format!("raster-downsample-{}x{}@{}", self.grid, self.grid, self.render)
    }

    fn render_resolution(&self) -> usize {
        self.render
    }

    fn raw(&self, image: &RasterImage) -> FeatureVector {
        let res = image.resolution();
        let g = self.grid;
        let mut cells = vec![0.0f64; g * g];
        let mut weight = vec![0.0f64; g * g];
        // Each source pixel spreads over the target cells it overlaps.
        for r in 0..res {
            let (r0, r1) = (r as f64 * g as f64 / res as f64, (r + 1) as f64 * g as f64 / res as f64);
            for c in 0..res {
                let (c0, c1) = (c as f64 * g as f64 / res as f64, (c + 1) as f64 * g as f64 / res as f64);
                let v = image.get(r, c) as f64;
                for tr in (r0.floor() as usize)..(r1.ceil() as usize).min(g) {
                    let oy = (r1.min(tr as f64 + 1.0) - r0.max(tr as f64)).max(0.0);
                    for tc in (c0.floor() as usize)..(c1.ceil() as usize).min(g) {
                        let ox = (c1.min(tc as f64 + 1.0) - c0.max(tc as f64)).max(0.0);
                        cells[tr * g + tc] += v * ox * oy;
                        weight[tr * g + tc] += ox * oy;
                    }
                }
            }
        }
        for (c, w) in cells.iter_mut().zip(&weight) {
            *c /= w;
        }
        let mean = cells.iter().sum::<f64>() / cells.len() as f64;
        // Exact zeros for flat images.
        let values = cells.into_iter().map(|v| if (v - mean).abs() < 1e-12 { 0.0 } else { v - mean }).collect();
        FeatureVector::raw(values)
    }
}

pub fn extract_features(image: &RasterImage, extractor: &dyn FeatureExtractor) -> FeatureVector {
    extractor.extract(image)
}

fn gaussian_fit(set: &[FeatureVector]) -> (DVector<f64>, DMatrix<f64>) {
    let d = set[0].dim();
    let n = set.len() as f64;
    let mut mu = DVector::zeros(d);
    for f in set {
        mu += DVector::from_column_slice(&f.values);
    }
    mu /= n;
    let mut cov = DMatrix::zeros(d, d);
    for f in set {
        let c = DVector::from_column_slice(&f.values) - &mu;
        cov += &c * c.transpose();
    }
    cov /= n;
    for i in 0..d {
        cov[(i, i)] += COV_SHRINKAGE;
    }
    (mu, cov)
}

fn check_sets(a: &[FeatureVector], b: &[FeatureVector], need: usize) -> Result<(), MetricsError> {
    for s in [a, b] {
        if s.len() < need {
            return Err(MetricsError::TooFew { need, got: s.len() });
        }
    }
    let d = a[0].dim();
    for f in a.iter().chain(b) {
        if f.dim() != d {
            return Err(MetricsError::Dimension(d, f.dim()));
        }
    }
    Ok(())
}

/// Fréchet distance between Gaussians fitted to two feature sets
/// (population covariance plus [`COV_SHRINKAGE`] on the diagonal).
///
/// `Tr((Sa Sb)^1/2)` is taken as the trace of the square root of the
/// symmetric `Sa^1/2 Sb Sa^1/2`, with negative eigenvalues clamped to zero.
pub fn frechet_distance(a: &[FeatureVector], b: &[FeatureVector]) -> Result<f64, MetricsError> {
    check_sets(a, b, 2)?;
    let (mu_a, cov_a) = gaussian_fit(a);
    let (mu_b, cov_b) = gaussian_fit(b);
    let eig_a = SymmetricEigen::new(cov_a.clone());
    let sqrt_a = &eig_a.eigenvectors
        * DMatrix::from_diagonal(&eig_a.eigenvalues.map(|l| l.max(0.0).sqrt()))
        * eig_a.eigenvectors.transpose();
    let m = &sqrt_a * &cov_b * &sqrt_a;
    let m = (&m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(m);
    let min_eig = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let tr_sqrt: f64 = eig.eigenvalues.iter().map(|l| l.max(0.0).sqrt()).sum();
    let mean = (&mu_a - &mu_b).norm_squared();
    let trace = cov_a.trace() + cov_b.trace() - 2.0 * tr_sqrt;
    let fid = mean + trace;
    if !fid.is_finite() {
        return Err(MetricsError::Numerical { trace, mean, min_eig });
    }
    Ok(fid.max(0.0))
}

fn normalized(set: &[FeatureVector]) -> Vec<Vec<f64>> {
    set.iter()
        .map(|f| if f.normalized { f.values.clone() } else { f.l2_normalized().values })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Percentage of samples whose cosine similarity to every other sample is
/// below `tau`.
pub fn uniqueness(generated: &[FeatureVector], tau: f64) -> Result<f64, MetricsError> {
    if generated.len() < 2 {
        return Err(MetricsError::TooFew {
            need: 2,
            got: generated.len(),
        });
    }
    let v = normalized(generated);
    let unique = (0..v.len())
        .filter(|&i| (0..v.len()).all(|j| i == j || dot(&v[i], &v[j]) < tau))
        .count();
    Ok(100.0 * unique as f64 / v.len() as f64)
}

/// Percentage of samples whose best cosine similarity to the training set
/// is below `tau`.
pub fn novelty(generated: &[FeatureVector], training: &[FeatureVector], tau: f64) -> Result<f64, MetricsError> {
    if generated.is_empty() || training.is_empty() {
        return Err(MetricsError::TooFew {
            need: 1,
            got: generated.len().min(training.len()),
        });
    }
    let g = normalized(generated);
    let t = normalized(training);
    let novel = g.iter().filter(|x| t.iter().all(|y| dot(x, y) < tau)).count();
    Ok(100.0 * novel as f64 / g.len() as f64)
}

/// Labels a feature by the most similar class mean (cosine).
#[derive(Clone, Debug)]
pub struct NearestCentroid {
    labels: Vec<String>,
    centroids: Vec<Vec<f64>>,
}

impl NearestCentroid {
    pub fn fit(features: &[FeatureVector], labels: &[String]) -> Result<Self, MetricsError> {
        if features.len() != labels.len() {
            return Err(MetricsError::Labels {
                features: features.len(),
                labels: labels.len(),
            });
        }
        if features.is_empty() {
            return Err(MetricsError::TooFew { need: 1, got: 0 });
        }
        let mut names: Vec<String> = labels.to_vec();
        names.sort();
        names.dedup();
        let d = features[0].dim();
        let v = normalized(features);
        let centroids = names
            .iter()
            .map(|name| {
                let mut c = vec![0.0; d];
                for (f, l) in v.iter().zip(labels) {
                    if l == name {
                        c.iter_mut().zip(f).for_each(|(a, b)| *a += b);
                    }
                }
                FeatureVector::raw(c).l2_normalized().values
            })
            .collect();
        Ok(Self {
            labels: names,
            centroids,
        })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn predict(&self, f: &FeatureVector) -> &str {
        let v = if f.normalized { f.values.clone() } else { f.l2_normalized().values };
        let mut best = (f64::NEG_INFINITY, 0);
        for (i, c) in self.centroids.iter().enumerate() {
            let s = dot(&v, c);
            if s > best.0 {
                best = (s, i);
            }
        }
        &self.labels[best.1]
    }

    /// Fraction in `[0, 1]` of features predicted as their label.
    pub fn accuracy(&self, features: &[FeatureVector], labels: &[String]) -> f64 {
        if features.is_empty() {
            return 0.0;
        }
        let hits = features.iter().zip(labels).filter(|(f, l)| self.predict(f) == l.as_str()).count();
        hits as f64 / features.len() as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub fid: f64,
    pub uniqueness_pct: f64,
    pub novelty_pct: f64,
    pub n_generated: usize,
    pub n_reference: usize,
    pub extractor_id: String,
    pub tau: f64,
    /// Nearest-centroid label accuracy of generated icons; a stand-in for
    /// text-image alignment, only meaningful on labeled synthetic corpora.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label_accuracy_proxy: Option<f64>,
    pub feature_note: String,
}

pub const FEATURE_NOTE: &str =
    "features come from a raster-downsample extractor, not a pretrained image encoder; values are not comparable to published FID/CLIP numbers";

/// Runs every metric. `reference` feeds the distance, `training` feeds
/// novelty.
pub fn report(
    generated: &[Icon],
    reference: &[Icon],
    training: &[Icon],
    extractor: &dyn FeatureExtractor,
    tau: f64,
) -> Result<MetricsReport, MetricsError> {
    let raw = |icons: &[Icon]| -> Vec<FeatureVector> { icons.iter().map(|i| extractor.raw_icon(i)).collect() };
    let (g, r, t) = (raw(generated), raw(reference), raw(training));
    Ok(MetricsReport {
        fid: frechet_distance(&g, &r)?,
        uniqueness_pct: uniqueness(&g, tau)?,
        novelty_pct: novelty(&g, &t, tau)?,
        n_generated: generated.len(),
        n_reference: reference.len(),
        extractor_id: extractor.id(),
        tau,
        label_accuracy_proxy: None,
        feature_note: FEATURE_NOTE.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fv(v: &[f64]) -> FeatureVector {
        FeatureVector::raw(v.to_vec())
    }

    fn canvas(res: usize, ink: impl Fn(usize, usize) -> bool) -> RasterImage {
        let px = (0..res * res).map(|i| if ink(i / res, i % res) { 0.0 } else { 1.0 }).collect();
        RasterImage::from_pixels(res, px)
    }

    #[test]
    fn blank_canvas_falls_back_to_first_axis() {
        let ex = RasterDownsample::default();
        let raw = ex.raw(&canvas(64, |_, _| false));
        assert!(raw.values.iter().all(|&v| v == 0.0));
        let f = ex.extract(&canvas(64, |_, _| false));
        assert_eq!(f.values[0], 1.0);
        assert!((f.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identical_images_are_cosine_one() {
        let ex = RasterDownsample::default();
        let img = canvas(64, |r, c| r * r + c * c < 900);
        let (a, b) = (ex.extract(&img), ex.extract(&img));
        assert_eq!(a, b);
        assert!((a.cosine(&b) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn half_black_against_white_by_hand() {
        let ex = RasterDownsample::default();
        let half = ex.extract(&canvas(64, |_, c| c < 32));
        let white = ex.extract(&canvas(64, |_, _| false));
        // 16x16 cells: left 8 columns 0.0, right 8 columns 1.0, mean 0.5.
        let mut hand = [0.0f64; 256];
        for r in 0..16 {
            for c in 0..16 {
                hand[r * 16 + c] = if c < 8 { -0.5 } else { 0.5 };
            }
        }
        let n = hand.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut e0 = [0.0f64; 256];
        e0[0] = 1.0;
        let want: f64 = hand.iter().zip(&e0).map(|(a, b)| a / n * b).sum();
        assert!((half.cosine(&white) - want).abs() < 1e-12);
        assert!((want + 1.0 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn downsample_is_an_area_average() {
        // 20 px onto 16 cells: each cell spans 1.25 source pixels.
        let img = RasterImage::from_pixels(20, (0..400).map(|i| (i % 7) as f32 / 7.0).collect());
        let ex = RasterDownsample { grid: 16, render: 20 };
        let f = ex.raw(&img);
        assert!(f.values.iter().sum::<f64>().abs() < 1e-9);
        let p = |r: usize, c: usize| img.get(r, c) as f64;
        // Cell (0,0) is pixel (0,0) plus a quarter strip of its neighbours.
        let c00 = (p(0, 0) + 0.25 * p(0, 1) + 0.25 * p(1, 0) + 0.0625 * p(1, 1)) / 1.5625;
        // Cell (0,1) covers columns [1.25, 2.5).
        let c01 = (0.75 * p(0, 1) + 0.5 * p(0, 2) + 0.25 * (0.75 * p(1, 1) + 0.5 * p(1, 2))) / 1.5625;
        assert!(((f.values[1] - f.values[0]) - (c01 - c00)).abs() < 1e-9);
    }

    #[test]
    fn identical_sets_have_zero_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let set: Vec<FeatureVector> = (0..20).map(|_| fv(&(0..6).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>())).collect();
        assert!(frechet_distance(&set, &set).unwrap() <= 1e-6);
    }

    #[test]
    fn one_dimensional_shift_is_analytic() {
        let a = [fv(&[-1.0]), fv(&[1.0])];
        let b = [fv(&[0.0]), fv(&[2.0])];
        assert!((frechet_distance(&a, &b).unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn distance_grows_with_mean_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let base: Vec<Vec<f64>> = (0..30).map(|_| (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let set = |s: f64| -> Vec<FeatureVector> { base.iter().map(|v| fv(&v.iter().map(|x| x + s).collect::<Vec<_>>())).collect() };
        let a = set(0.0);
        let mut last = -1.0;
        for s in [0.0, 0.1, 0.5, 1.0, 3.0] {
            let d = frechet_distance(&a, &set(s)).unwrap();
            assert!(d > last);
            last = d;
        }
    }

    /// Dense oracle: `(Sa Sb)^1/2` by Denman-Beavers iteration with explicit
    /// loops and Gauss-Jordan inversion.
    fn oracle_fid(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
        let d = a[0].len();
        let fit = |s: &[Vec<f64>]| {
            let n = s.len() as f64;
            let mu: Vec<f64> = (0..d).map(|j| s.iter().map(|v| v[j]).sum::<f64>() / n).collect();
            let mut c = vec![vec![0.0; d]; d];
            for v in s {
                for i in 0..d {
                    for j in 0..d {
                        c[i][j] += (v[i] - mu[i]) * (v[j] - mu[j]) / n;
                    }
                }
            }
            for (i, row) in c.iter_mut().enumerate() {
                row[i] += 1e-6;
            }
            (mu, c)
        };
        let mul = |x: &Vec<Vec<f64>>, y: &Vec<Vec<f64>>| {
            let mut z = vec![vec![0.0; d]; d];
            for i in 0..d {
                for k in 0..d {
                    for j in 0..d {
                        z[i][j] += x[i][k] * y[k][j];
                    }
                }
            }
            z
        };
        let inv = |x: &Vec<Vec<f64>>| {
            let mut m: Vec<Vec<f64>> = x.clone();
            let mut r: Vec<Vec<f64>> = (0..d).map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
            for col in 0..d {
                let piv = (col..d).max_by(|&p, &q| m[p][col].abs().total_cmp(&m[q][col].abs())).unwrap();
                m.swap(col, piv);
                r.swap(col, piv);
                let pv = m[col][col];
                for j in 0..d {
                    m[col][j] /= pv;
                    r[col][j] /= pv;
                }
                for i in 0..d {
                    if i != col {
                        let f = m[i][col];
                        for j in 0..d {
                            m[i][j] -= f * m[col][j];
                            r[i][j] -= f * r[col][j];
                        }
                    }
                }
            }
            r
        };
        let (ma, ca) = fit(a);
        let (mb, cb) = fit(b);
        let mut y = mul(&ca, &cb);
        let mut z: Vec<Vec<f64>> = (0..d).map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        for _ in 0..100 {
            let (yi, zi) = (inv(&y), inv(&z));
            let ny: Vec<Vec<f64>> = (0..d).map(|i| (0..d).map(|j| 0.5 * (y[i][j] + zi[i][j])).collect()).collect();
            let nz: Vec<Vec<f64>> = (0..d).map(|i| (0..d).map(|j| 0.5 * (z[i][j] + yi[i][j])).collect()).collect();
            y = ny;
            z = nz;
        }
        let tr = |m: &Vec<Vec<f64>>| (0..d).map(|i| m[i][i]).sum::<f64>();
        let dm: f64 = ma.iter().zip(&mb).map(|(x, y)| (x - y) * (x - y)).sum();
        dm + tr(&ca) + tr(&cb) - 2.0 * tr(&y)
    }

    #[test]
    fn eight_dimensional_sets_match_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for trial in 0..5 {
            let mut draw = |n: usize, shift: f64, scale: f64| -> Vec<Vec<f64>> {
                (0..n).map(|_| (0..8).map(|j| shift + scale * rng.gen_range(-1.0..1.0) * (1.0 + j as f64 * 0.1)).collect()).collect()
            };
            let a = draw(40, 0.0, 1.0);
            let b = draw(35, 0.3 * trial as f64, 0.7);
            let want = oracle_fid(&a, &b);
            let fa: Vec<FeatureVector> = a.iter().map(|v| fv(v)).collect();
            let fb: Vec<FeatureVector> = b.iter().map(|v| fv(v)).collect();
            let got = frechet_distance(&fa, &fb).unwrap();
            assert!((got - want).abs() < 1e-6, "trial {trial}: {got} vs {want}");
        }
    }

    #[test]
    fn distance_input_checks() {
        assert!(matches!(frechet_distance(&[fv(&[1.0])], &[fv(&[1.0]), fv(&[2.0])]), Err(MetricsError::TooFew { .. })));
        assert!(matches!(
            frechet_distance(&[fv(&[1.0]), fv(&[2.0])], &[fv(&[1.0, 0.0]), fv(&[2.0, 0.0])]),
            Err(MetricsError::Dimension(..))
        ));
    }

    #[test]
    fn uniqueness_cases() {
        let a = fv(&[1.0, 0.0]);
        let b = fv(&[0.0, 1.0]);
        assert_eq!(uniqueness(&[a.clone(), a.clone(), a.clone()], DEFAULT_TAU).unwrap(), 0.0);
        assert_eq!(uniqueness(&[a.clone(), b.clone()], DEFAULT_TAU).unwrap(), 100.0);
        let u = uniqueness(&[a.clone(), a.clone(), b.clone()], DEFAULT_TAU).unwrap();
        assert!((u - 100.0 / 3.0).abs() < 1e-9);
        assert!(uniqueness(&[a], DEFAULT_TAU).is_err());
    }

    #[test]
    fn novelty_cases() {
        let a = fv(&[1.0, 0.0, 0.0]);
        let b = fv(&[0.0, 1.0, 0.0]);
        let c = fv(&[0.0, 0.0, 1.0]);
        assert_eq!(novelty(&[a.clone(), b.clone()], &[a.clone(), b.clone()], DEFAULT_TAU).unwrap(), 0.0);
        assert_eq!(novelty(&[c.clone()], &[a.clone(), b.clone()], DEFAULT_TAU).unwrap(), 100.0);
        assert_eq!(novelty(&[a.clone(), c.clone()], &[a.clone(), b.clone()], DEFAULT_TAU).unwrap(), 50.0);
    }

    #[test]
    fn centroid_classifier_separates_clusters() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut feats = Vec::new();
        let mut labels = Vec::new();
        for i in 0..40 {
            let (base, name) = if i % 2 == 0 { ([1.0, 0.0, 0.0], "circle") } else { ([0.0, 1.0, 0.0], "square") };
            feats.push(fv(&base.map(|v: f64| v + rng.gen_range(-0.2..0.2))));
            labels.push(name.to_string());
        }
        let clf = NearestCentroid::fit(&feats, &labels).unwrap();
        assert_eq!(clf.labels(), &["circle".to_string(), "square".to_string()]);
        assert_eq!(clf.accuracy(&feats, &labels), 1.0);
        assert_eq!(clf.predict(&fv(&[0.9, 0.1, 0.0])), "circle");
    }

    proptest! {
        #[test]
        fn distance_is_symmetric_and_non_negative(seed in any::<u64>(), n in 3usize..12, m in 3usize..12) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut set = |k: usize| -> Vec<FeatureVector> { (0..k).map(|_| fv(&(0..5).map(|_| rng.gen_range(-2.0..2.0)).collect::<Vec<_>>())).collect() };
            let (a, b) = (set(n), set(m));
            let ab = frechet_distance(&a, &b).unwrap();
            let ba = frechet_distance(&b, &a).unwrap();
            prop_assert!(ab >= 0.0);
            prop_assert!((ab - ba).abs() < 1e-6);
        }

        #[test]
        fn set_metrics_ignore_order(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut set: Vec<FeatureVector> = (0..8).map(|_| {
                let k = rng.gen_range(0..3);
                let mut v = vec![0.0; 3];
                v[k] = 1.0;
                v[(k + 1) % 3] = rng.gen_range(0.0..0.1);
                fv(&v)
            }).collect();
            let train = set[..3].to_vec();
            let u = uniqueness(&set, DEFAULT_TAU).unwrap();
            let nv = novelty(&set, &train, DEFAULT_TAU).unwrap();
            set.reverse();
            set.swap(0, 5);
            prop_assert_eq!(u, uniqueness(&set, DEFAULT_TAU).unwrap());
            prop_assert_eq!(nv, novelty(&set, &train, DEFAULT_TAU).unwrap());
        }
    }
}
