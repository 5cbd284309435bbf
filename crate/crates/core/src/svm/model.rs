//! Standardization, binary prediction, one-vs-one training/voting, and the
//! versioned model file.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::kernel::{rbf_unchecked, GramMatrix};
use super::smo::solve_dual;
use super::SvmError;

/// Bumped whenever the model file layout changes.
pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Multipliers below this are dropped when extracting support vectors.
const SV_EPSILON: f64 = 1e-10;

/// Floor for per-dimension standard deviations (zero-variance dimensions).
const STD_FLOOR: f64 = 1e-12;

/// Per-dimension mean and standard deviation frozen from a training set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizationStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl StandardizationStats {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Applies the frozen transform to one vector.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>, SvmError> {
        if x.len() != self.dim() {
            return Err(SvmError::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(x.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(v, (m, s))| (v - m) / s)
            .collect())
    }
}

/// Zero-mean unit-variance scaling per dimension (population variance).
///
/// Dimensions with zero variance get their deviation floored, which maps
/// every value of that dimension to 0.
pub fn standardize(
    vectors: &[Vec<f64>],
) -> Result<(Vec<Vec<f64>>, StandardizationStats), SvmError> {
    if vectors.len() < 2 {
        return Err(SvmError::TooFewSamples {
            needed: 2,
            got: vectors.len(),
        });
    }
    let dim = vectors[0].len();
    if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
        return Err(SvmError::DimensionMismatch {
            expected: dim,
            got: v.len(),
        });
    }
    let n = vectors.len() as f64;
    let mut mean = vec![0.0f64; dim];
    for v in vectors {
        for (m, x) in mean.iter_mut().zip(v) {
            *m += x;
        }
    }
    for m in mean.iter_mut() {
        *m /= n;
    }
    let mut std = vec![0.0f64; dim];
    for v in vectors {
        for ((s, x), m) in std.iter_mut().zip(v).zip(&mean) {
            *s += (x - m) * (x - m);
        }
    }
    for s in std.iter_mut() {
        *s = (*s / n).sqrt().max(STD_FLOOR);
    }
    let stats = StandardizationStats { mean, std };
    let out = vectors
        .iter()
        .map(|v| stats.apply(v).expect("dims checked above"))
        .collect();
    Ok((out, stats))
}

/// One trained two-class decision function in standardized space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinarySvmModel {
    /// Training points with nonzero multipliers.
    pub support_vectors: Vec<Vec<f64>>,
    /// a_n * t_n per support vector.
    pub dual_coeffs: Vec<f64>,
    pub bias: f64,
    pub gamma: f64,
}

/// Decision score and sign for an already-standardized point.
///
/// A score of exactly 0 resolves to +1.
pub fn predict_binary(model: &BinarySvmModel, x: &[f64]) -> Result<(f64, i8), SvmError> {
    if let Some(sv) = model.support_vectors.first() {
        if sv.len() != x.len() {
            return Err(SvmError::DimensionMismatch {
                expected: sv.len(),
                got: x.len(),
            });
        }
    }
    let score: f64 = model
        .support_vectors
        .iter()
        .zip(&model.dual_coeffs)
        .map(|(sv, coeff)| coeff * rbf_unchecked(x, sv, model.gamma))
        .sum::<f64>()
        + model.bias;
    Ok((score, if score >= 0.0 { 1 } else { -1 }))
}

/// Kernel width choice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gamma {
    /// 1 / (d * mean per-dimension variance of the standardized training
    /// set); 1/d when nothing degenerates.
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmConfig {
    pub gamma: Gamma,
    pub c: f64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        Self {
            gamma: Gamma::Auto,
            c: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct PairwiseModel {
    /// Index into `class_labels` of the class scored positive.
    pos: usize,
    /// Index of the class scored negative.
    neg: usize,
    model: BinarySvmModel,
}

/// K(K-1)/2 pairwise models plus the frozen standardization.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedOvoModel {
    class_labels: Vec<String>,
    pairwise: Vec<PairwiseModel>,
    stats: StandardizationStats,
    gamma: f64,
    c: f64,
}

impl TrainedOvoModel {
    pub fn class_labels(&self) -> &[String] {
        &self.class_labels
    }

    pub fn n_pairwise(&self) -> usize {
        self.pairwise.len()
    }

    pub fn stats(&self) -> &StandardizationStats {
        &self.stats
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn save(&self, path: &Path) -> Result<(), SvmError> {
        let file = ModelFile {
            format_version: MODEL_FORMAT_VERSION,
            class_labels: self.class_labels.clone(),
            stats: self.stats.clone(),
            gamma: self.gamma,
            c: self.c,
            pairwise: self.pairwise.clone(),
        };
        let json = serde_json::to_string_pretty(&file).map_err(|e| SvmError::ModelFile {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        fs::write(path, json).map_err(|e| SvmError::ModelFile {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, SvmError> {
        let text = fs::read_to_string(path).map_err(|e| SvmError::ModelFile {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        let file: ModelFile = serde_json::from_str(&text).map_err(|e| SvmError::ModelFile {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        if file.format_version != MODEL_FORMAT_VERSION {
            return Err(SvmError::ModelFile {
                path: path.to_path_buf(),
                reason: format!(
                    "format version {} unsupported (expected {MODEL_FORMAT_VERSION})",
                    file.format_version
                ),
            });
        }
        Ok(Self {
            class_labels: file.class_labels,
            pairwise: file.pairwise,
            stats: file.stats,
            gamma: file.gamma,
            c: file.c,
        })
    }
}

/// On-disk layout: human-readable JSON with an explicit version.
#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    class_labels: Vec<String>,
    stats: StandardizationStats,
    gamma: f64,
    c: f64,
    pairwise: Vec<PairwiseModel>,
}

fn resolve_gamma(standardized: &[Vec<f64>], choice: Gamma) -> Result<f64, SvmError> {
    match choice {
        Gamma::Fixed(g) => {
            if g > 0.0 && g.is_finite() {
                Ok(g)
            } else {
                Err(SvmError::InvalidGamma(g))
            }
        }
        Gamma::Auto => {
            let dim = standardized[0].len();
            let n = standardized.len() as f64;
            let mut mean_var = 0.0;
            for d in 0..dim {
                let mean: f64 = standardized.iter().map(|v| v[d]).sum::<f64>() / n;
                mean_var += standardized
                    .iter()
                    .map(|v| (v[d] - mean) * (v[d] - mean))
                    .sum::<f64>()
                    / n;
            }
            mean_var /= dim as f64;
            if mean_var <= 0.0 {
                return Ok(1.0 / dim as f64);
            }
            Ok(1.0 / (dim as f64 * mean_var))
        }
    }
}

/// Trains one binary SVM per unordered class pair on standardized features.
///
/// Class labels are ordered lexicographically; in the pair (i, j) with i < j,
/// class i is scored positive. Deterministic for a fixed input order.
pub fn train_ovo(
    samples: &[Vec<f64>],
    labels: &[String],
    config: &SvmConfig,
) -> Result<TrainedOvoModel, SvmError> {
    if samples.len() != labels.len() {
        return Err(SvmError::LabelCountMismatch {
            samples: samples.len(),
            labels: labels.len(),
        });
    }
    let mut class_labels: Vec<String> = labels.to_vec();
    class_labels.sort();
    class_labels.dedup();
    if class_labels.len() < 2 {
        return Err(SvmError::TooFewClasses(class_labels.len()));
    }

    let (standardized, stats) = standardize(samples)?;
    let gamma = resolve_gamma(&standardized, config.gamma)?;

    let by_class: Vec<Vec<usize>> = class_labels
        .iter()
        .map(|label| {
            (0..labels.len())
                .filter(|&i| &labels[i] == label)
                .collect()
        })
        .collect();

    let mut pairwise = Vec::with_capacity(class_labels.len() * (class_labels.len() - 1) / 2);
    for pos in 0..class_labels.len() {
        for neg in pos + 1..class_labels.len() {
            let mut points = Vec::new();
            let mut targets = Vec::new();
            for &i in &by_class[pos] {
                points.push(standardized[i].clone());
                targets.push(1.0);
            }
            for &i in &by_class[neg] {
                points.push(standardized[i].clone());
                targets.push(-1.0);
            }
            let gram = GramMatrix::from_points(&points, gamma)?;
            let sol = solve_dual(&gram, &targets, config.c)?;
            let mut support_vectors = Vec::new();
            let mut dual_coeffs = Vec::new();
            for (k, &a) in sol.alpha.iter().enumerate() {
                if a > SV_EPSILON {
                    support_vectors.push(points[k].clone());
                    dual_coeffs.push(a * targets[k]);
                }
            }
            pairwise.push(PairwiseModel {
                pos,
                neg,
                model: BinarySvmModel {
                    support_vectors,
                    dual_coeffs,
                    bias: sol.bias,
                    gamma,
                },
            });
        }
    }

    Ok(TrainedOvoModel {
        class_labels,
        pairwise,
        stats,
        gamma,
        c: config.c,
    })
}

/// Majority vote over the pairwise models; the input is standardized with
/// the model's stored stats.
///
/// Vote ties break to the class with the largest summed |score| over the
/// models it won, then to label order.
pub fn predict_ovo<'m>(model: &'m TrainedOvoModel, x: &[f64]) -> Result<&'m str, SvmError> {
    let z = model.stats.apply(x)?;
    let k = model.class_labels.len();
    let mut votes = vec![0usize; k];
    let mut weight = vec![0.0f64; k];
    for pair in &model.pairwise {
        let (score, label) = predict_binary(&pair.model, &z)?;
        let winner = if label > 0 { pair.pos } else { pair.neg };
        votes[winner] += 1;
        weight[winner] += score.abs();
    }
    let mut best = 0usize;
    for c in 1..k {
        if votes[c] > votes[best] || (votes[c] == votes[best] && weight[c] > weight[best]) {
            best = c;
        }
    }
    Ok(&model.class_labels[best])
}
