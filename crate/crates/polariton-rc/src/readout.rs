//! Trained output layer: feature standardization, multinomial logistic
//! regression by full-batch gradient descent, prediction and ensemble
//! concatenation.
//!
//! Training is deliberately single-threaded and starts from zero weights:
//! the loss is convex, so the run is exactly reproducible.

use crate::error::{Error, Result};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

pub const NUM_CLASSES: usize = 10;

/// Row-major feature rows plus one label per row.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
    pub labels: Vec<u8>,
}

impl FeatureMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>, labels: Vec<u8>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Parameter(format!(
                "{} values for a {rows}x{cols} feature matrix",
                data.len()
            )));
        }
        if labels.len() != rows {
            return Err(Error::Data(format!(
                "{} labels for {rows} feature rows",
                labels.len()
            )));
        }
        if labels.iter().any(|&l| l as usize >= NUM_CLASSES) {
            return Err(Error::Data("label outside 0..=9".into()));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::Data("non-finite feature value".into()));
        }
        Ok(Self {
            rows,
            cols,
            data,
            labels,
        })
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
}

/// Per-feature standardization statistics fitted on a training set.
/// Zero-variance features get std 1 so they pass through centered.
pub fn standardize_fit(train: &FeatureMatrix) -> Result<(Vec<f64>, Vec<f64>)> {
    if train.rows == 0 {
        return Err(Error::Parameter("cannot standardize an empty set".into()));
    }
    let n = train.rows as f64;
    let mut means = vec![0.0; train.cols];
    for i in 0..train.rows {
        for (m, &x) in means.iter_mut().zip(train.row(i)) {
            *m += x;
        }
    }
    for m in means.iter_mut() {
        *m /= n;
    }
    let mut vars = vec![0.0; train.cols];
    for i in 0..train.rows {
        for ((v, &m), &x) in vars.iter_mut().zip(&means).zip(train.row(i)) {
            let d = x - m;
            *v += d * d;
        }
    }
    let stds = vars
        .iter()
        .map(|&v| {
            let s = (v / n).sqrt();
            if s > 0.0 {
                s
            } else {
                1.0
            }
        })
        .collect();
    Ok((means, stds))
}

/// Apply fitted standardization to a feature matrix.
pub fn standardize_apply(x: &FeatureMatrix, means: &[f64], stds: &[f64]) -> Result<FeatureMatrix> {
    if means.len() != x.cols || stds.len() != x.cols {
        return Err(Error::Parameter(format!(
            "standardization vectors of length {}/{} for {} features",
            means.len(),
            stds.len(),
            x.cols
        )));
    }
    let mut data = Vec::with_capacity(x.data.len());
    for i in 0..x.rows {
        for ((&v, &m), &s) in x.row(i).iter().zip(means).zip(stds) {
            data.push((v - m) / s);
        }
    }
    FeatureMatrix::new(x.rows, x.cols, data, x.labels.clone())
}

/// Numerically stable softmax (max-shifted).
pub fn softmax(z: &[f64]) -> Vec<f64> {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = z.iter().map(|&v| (v - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.iter().map(|&e| e / sum).collect()
}

/// Multinomial logistic readout: `(D+1) x 10` weights (bias row last) plus
/// the standardization statistics the model was trained with.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutModel {
    pub weights: Vec<f64>, // row-major (cols+1) x NUM_CLASSES
    pub feature_means: Vec<f64>,
    pub feature_stds: Vec<f64>,
}

impl ReadoutModel {
    pub fn feature_dim(&self) -> usize {
        self.feature_means.len()
    }

    /// Class scores for one already-standardized feature row.
    fn scores_std(&self, row: &[f64]) -> [f64; NUM_CLASSES] {
        let d = self.feature_dim();
        let mut z = [0.0; NUM_CLASSES];
        for (j, &x) in row.iter().enumerate() {
            let wrow = &self.weights[j * NUM_CLASSES..(j + 1) * NUM_CLASSES];
            for (zk, &w) in z.iter_mut().zip(wrow) {
                *zk += w * x;
            }
        }
        let bias = &self.weights[d * NUM_CLASSES..(d + 1) * NUM_CLASSES];
        for (zk, &b) in z.iter_mut().zip(bias) {
            *zk += b;
        }
        z
    }
}

/// Hyperparameters for [`train_logreg`].
#[derive(Debug, Clone, PartialEq)]
pub struct TrainParams {
    /// L2 penalty on non-bias weights.
    pub l2: f64,
    /// Fixed learning rate.
    pub lr: f64,
    pub max_iters: usize,
    /// Stop when the gradient infinity-norm falls below this.
    pub grad_tol: f64,
}

impl Default for TrainParams {
    fn default() -> Self {
        Self {
            l2: 1e-4,
            lr: 0.5,
            max_iters: 5000,
            grad_tol: 1e-6,
        }
    }
}

/// Convergence record of a training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainStats {
    pub iterations: usize,
    pub final_loss: f64,
    pub final_grad_inf: f64,
}

/// Mean cross-entropy plus `(l2/2) * ||W_no_bias||^2` for standardized
/// features; exposed for tests and diagnostics.
pub fn logreg_loss(x: &FeatureMatrix, weights: &[f64], l2: f64) -> f64 {
    let d = x.cols;
    let model = ReadoutModel {
        weights: weights.to_vec(),
        feature_means: vec![0.0; d],
        feature_stds: vec![1.0; d],
    };
    let mut loss = 0.0;
    for i in 0..x.rows {
        let z = model.scores_std(x.row(i));
        let p = softmax(&z);
        loss -= p[x.labels[i] as usize].max(f64::MIN_POSITIVE).ln();
    }
    loss /= x.rows as f64;
    let penalty: f64 = weights[..d * NUM_CLASSES].iter().map(|w| w * w).sum();
    loss + 0.5 * l2 * penalty
}

/// Gradient of [`logreg_loss`] with respect to the weights, same layout.
pub fn logreg_grad(x: &FeatureMatrix, weights: &[f64], l2: f64) -> Vec<f64> {
    let d = x.cols;
    let model = ReadoutModel {
        weights: weights.to_vec(),
        feature_means: vec![0.0; d],
        feature_stds: vec![1.0; d],
    };
    let inv_n = 1.0 / x.rows as f64;
    let mut grad = vec![0.0; (d + 1) * NUM_CLASSES];
    for i in 0..x.rows {
        let row = x.row(i);
        let z = model.scores_std(row);
        let mut p = softmax(&z);
        p[x.labels[i] as usize] -= 1.0;
        for (j, &xij) in row.iter().enumerate() {
            let grow = &mut grad[j * NUM_CLASSES..(j + 1) * NUM_CLASSES];
            for (gk, &pk) in grow.iter_mut().zip(&p) {
                *gk += xij * pk * inv_n;
            }
        }
        let gbias = &mut grad[d * NUM_CLASSES..(d + 1) * NUM_CLASSES];
        for (gk, &pk) in gbias.iter_mut().zip(&p) {
            *gk += pk * inv_n;
        }
    }
    for (gk, &wk) in grad[..d * NUM_CLASSES].iter_mut().zip(weights) {
        *gk += l2 * wk;
    }
    grad
}

/// Train the readout by full-batch gradient descent from zero init on
/// standardized features. Deterministic; errors if the loss goes non-finite.
pub fn train_logreg(features: &FeatureMatrix, tp: &TrainParams) -> Result<(ReadoutModel, TrainStats)> {
    if features.rows < 2 {
        return Err(Error::Parameter("training needs at least 2 rows".into()));
    }
    if tp.lr <= 0.0 || tp.l2 < 0.0 {
        return Err(Error::Parameter("lr must be > 0 and l2 >= 0".into()));
    }
    let (means, stds) = standardize_fit(features)?;
    let x = standardize_apply(features, &means, &stds)?;
    let d = x.cols;
    let mut weights = vec![0.0; (d + 1) * NUM_CLASSES];
    let mut iters = 0;
    let mut grad_inf = f64::INFINITY;
    while iters < tp.max_iters {
        let grad = logreg_grad(&x, &weights, tp.l2);
        grad_inf = grad.iter().fold(0.0f64, |m, &g| m.max(g.abs()));
        if !grad_inf.is_finite() {
            return Err(Error::Divergence(format!(
                "non-finite gradient at iteration {iters} (learning rate too large?)"
            )));
        }
        if grad_inf < tp.grad_tol {
            break;
        }
        for (w, g) in weights.iter_mut().zip(&grad) {
            *w -= tp.lr * g;
        }
        iters += 1;
    }
    let final_loss = logreg_loss(&x, &weights, tp.l2);
    if !final_loss.is_finite() {
        return Err(Error::Divergence(
            "training loss diverged (learning rate too large?)".into(),
        ));
    }
    Ok((
        ReadoutModel {
            weights,
            feature_means: means,
            feature_stds: stds,
        },
        TrainStats {
            iterations: iters,
            final_loss,
            final_grad_inf: grad_inf,
        },
    ))
}

/// Predicted class per row: argmax of scores, ties broken by lowest class id.
pub fn predict(model: &ReadoutModel, features: &FeatureMatrix) -> Result<Vec<u8>> {
    if features.cols != model.feature_dim() {
        return Err(Error::Parameter(format!(
            "{} features per row, model expects {}",
            features.cols,
            model.feature_dim()
        )));
    }
    let mut out = Vec::with_capacity(features.rows);
    for i in 0..features.rows {
        let std_row: Vec<f64> = features
            .row(i)
            .iter()
            .zip(&model.feature_means)
            .zip(&model.feature_stds)
            .map(|((&v, &m), &s)| (v - m) / s)
            .collect();
        let z = model.scores_std(&std_row);
        let mut best = 0usize;
        for (k, &zk) in z.iter().enumerate() {
            if zk > z[best] {
                best = k;
            }
        }
        out.push(best as u8);
    }
    Ok(out)
}

/// Fraction of matching predictions.
pub fn accuracy(pred: &[u8], labels: &[u8]) -> Result<f64> {
    if pred.len() != labels.len() {
        return Err(Error::Parameter(format!(
            "{} predictions vs {} labels",
            pred.len(),
            labels.len()
        )));
    }
    if pred.is_empty() {
        return Err(Error::Parameter("empty prediction set".into()));
    }
    let hits = pred.iter().zip(labels).filter(|(p, l)| p == l).count();
    Ok(hits as f64 / pred.len() as f64)
}

/// 10x10 confusion counts, `counts[true][predicted]`.
pub fn confusion(pred: &[u8], labels: &[u8]) -> Result<Vec<Vec<u64>>> {
    if pred.len() != labels.len() {
        return Err(Error::Parameter(format!(
            "{} predictions vs {} labels",
            pred.len(),
            labels.len()
        )));
    }
    let mut counts = vec![vec![0u64; NUM_CLASSES]; NUM_CLASSES];
    for (&p, &l) in pred.iter().zip(labels) {
        counts[l as usize][p as usize] += 1;
    }
    Ok(counts)
}

/// Horizontally concatenate aligned feature sets (same rows, same labels).
pub fn concat_ensemble(feature_sets: &[FeatureMatrix]) -> Result<FeatureMatrix> {
    let first = feature_sets
        .first()
        .ok_or_else(|| Error::Parameter("empty ensemble".into()))?;
    for fs in feature_sets.iter().skip(1) {
        if fs.rows != first.rows {
            return Err(Error::Data(format!(
                "row count mismatch: {} vs {}",
                fs.rows, first.rows
            )));
        }
        if fs.labels != first.labels {
            return Err(Error::Data("label mismatch between feature sets".into()));
        }
    }
    let cols: usize = feature_sets.iter().map(|fs| fs.cols).sum();
    let mut data = Vec::with_capacity(first.rows * cols);
    for i in 0..first.rows {
        for fs in feature_sets {
            data.extend_from_slice(fs.row(i));
        }
    }
    FeatureMatrix::new(first.rows, cols, data, first.labels.clone())
}

/// Serialize a model: `D`, means, stds, then the (D+1)x10 weight rows,
/// full double precision.
pub fn write_model(model: &ReadoutModel, path: &Path) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    let d = model.feature_dim();
    writeln!(out, "{d}")?;
    let join = |v: &[f64]| v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",");
    writeln!(out, "{}", join(&model.feature_means))?;
    writeln!(out, "{}", join(&model.feature_stds))?;
    for j in 0..=d {
        writeln!(out, "{}", join(&model.weights[j * NUM_CLASSES..(j + 1) * NUM_CLASSES]))?;
    }
    Ok(())
}

pub fn read_model(path: &Path) -> Result<ReadoutModel> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut lines = reader.lines();
    let mut next_line = || -> Result<String> {
        lines
            .next()
            .ok_or_else(|| Error::Format("model file truncated".into()))?
            .map_err(Error::from)
    };
    let d: usize = next_line()?
        .trim()
        .parse()
        .map_err(|_| Error::Format("bad feature dimension".into()))?;
    let parse_row = |line: String, expect: usize| -> Result<Vec<f64>> {
        let v: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Format("bad model row".into()))?;
        if v.len() != expect {
            return Err(Error::Length(format!(
                "model row has {} values, expected {expect}",
                v.len()
            )));
        }
        Ok(v)
    };
    let feature_means = parse_row(next_line()?, d)?;
    let feature_stds = parse_row(next_line()?, d)?;
    let mut weights = Vec::with_capacity((d + 1) * NUM_CLASSES);
    for _ in 0..=d {
        weights.extend(parse_row(next_line()?, NUM_CLASSES)?);
    }
    Ok(ReadoutModel {
        weights,
        feature_means,
        feature_stds,
    })
}
