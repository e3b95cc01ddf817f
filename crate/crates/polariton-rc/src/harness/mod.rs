//! Config-driven experiments with deterministic CSV reports.
//!
//! All experiment modes share one protocol: a digit pool of
//! `n_train + n_test` samples is drawn once from the dataset with
//! `pool_seed`, expensive per-digit simulations run once over the pool, and
//! every split seed then reshuffles the pool into train/test for an
//! independent readout training. Statistics are aggregated in a fixed order,
//! and batch work is collected in input order, so reports are byte-identical
//! across runs and thread counts.

pub mod config;
mod report;

pub use config::{ExperimentConfig, Mode};
pub use report::write_csv;

use crate::encoder::{self, ProjectionMatrix};
use crate::error::{Error, Result};
use crate::exec;
use crate::lattice::{self, ComplexField};
use crate::mnist::{self, LabeledDataset};
use crate::readout::{self, FeatureMatrix};
use report::{format_f64, Csv};
use std::path::Path;
use std::time::Instant;

/// Accuracy of one train/test repetition.
#[derive(Debug, Clone, PartialEq)]
pub struct RepAccuracy {
    pub seed: u64,
    pub accuracy: f64,
}

/// Mean accuracy with its standard error over repetitions.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateAccuracy {
    pub reps: Vec<RepAccuracy>,
    pub mean: f64,
    pub sem: f64,
}

/// Settling statistics of a batch of steady-state solves.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStats {
    pub digits: usize,
    pub converged: usize,
    pub mean_settle_time: f64,
}

/// Report of a baseline or reservoir classification run.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport {
    pub pixels_or_reservoir: AggregateAccuracy,
    /// Baseline mode only: accuracy on the encoded node intensities.
    pub encoded: Option<AggregateAccuracy>,
    /// Test-set confusion counts summed over repetitions.
    pub confusion: Vec<Vec<u64>>,
    pub convergence: Option<ConvergenceStats>,
    pub wall_seconds: f64,
}

/// Report of an ensemble run: accuracy versus number of concatenated masks.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleReport {
    pub per_mask_count: Vec<EnsemblePoint>,
    pub confusion: Vec<Vec<u64>>,
    pub convergence: ConvergenceStats,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsemblePoint {
    pub masks: usize,
    pub aggregate: AggregateAccuracy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveReport {
    pub up: Option<Vec<(f64, f64)>>,
    pub down: Option<Vec<(f64, f64)>>,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConnectivityReport {
    pub curves: lattice::ConnectivityCurves,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub axis: String,
    pub points: Vec<SweepPoint>,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub aggregate: AggregateAccuracy,
}

/// Output of [`run_experiment`].
#[derive(Debug, Clone, PartialEq)]
pub enum RunOutput {
    Classification(ClassificationReport),
    Ensemble(EnsembleReport),
    Curve(CurveReport),
    Connectivity(ConnectivityReport),
    Sweep(SweepReport),
}

/// Run the experiment selected by `cfg.run.mode`, writing reports under
/// `out_dir`. `raw_config` is echoed byte-for-byte into the report
/// directory.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    raw_config: &str,
    out_dir: &Path,
) -> Result<RunOutput> {
    cfg.validate()?;
    std::fs::create_dir_all(out_dir)?;
    std::fs::write(out_dir.join("config_echo.cfg"), raw_config)?;
    match cfg.run.mode {
        Mode::Baseline => run_baseline(cfg, out_dir).map(RunOutput::Classification),
        Mode::Reservoir => run_reservoir(cfg, out_dir).map(RunOutput::Classification),
        Mode::Ensemble => run_ensemble(cfg, out_dir).map(RunOutput::Ensemble),
        Mode::Curve => run_curve(cfg, out_dir).map(RunOutput::Curve),
        Mode::Connectivity => run_connectivity(cfg, out_dir).map(RunOutput::Connectivity),
        Mode::Sweep => run_sweep(cfg, out_dir).map(RunOutput::Sweep),
    }
}

fn mean_sem(xs: &[f64]) -> (f64, f64) {
    let m = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / m;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (m - 1.0);
    (mean, var.sqrt() / m.sqrt())
}

fn aggregate(reps: Vec<RepAccuracy>) -> AggregateAccuracy {
    let accs: Vec<f64> = reps.iter().map(|r| r.accuracy).collect();
    let (mean, sem) = mean_sem(&accs);
    AggregateAccuracy { reps, mean, sem }
}

/// Load the digit pool: read IDX files, select `n_train + n_test` digits
/// with `pool_seed`, downsample to the configured resolution.
pub fn load_pool(cfg: &ExperimentConfig) -> Result<LabeledDataset> {
    let full = mnist::load_dataset(&cfg.dataset.images, &cfg.dataset.labels)?;
    let pool_size = cfg.dataset.n_train + cfg.dataset.n_test;
    let (pool, _) = mnist::split_shuffle(&full, cfg.dataset.pool_seed, pool_size, 0)?;
    mnist::downsample_dataset(&pool, cfg.dataset.resolution)
}

fn require_test_samples(cfg: &ExperimentConfig) -> Result<()> {
    if cfg.dataset.n_test == 0 {
        return Err(Error::Parameter("empty test set (n_test = 0)".into()));
    }
    Ok(())
}

/// Raw pixel features of a pool.
fn pixel_features(pool: &LabeledDataset) -> Result<FeatureMatrix> {
    let cols = pool.resolution * pool.resolution;
    let mut data = Vec::with_capacity(pool.len() * cols);
    for img in &pool.images {
        data.extend_from_slice(img.pixels());
    }
    FeatureMatrix::new(pool.len(), cols, data, pool.labels.clone())
}

/// Encoded node intensities `b = W a` per digit.
fn encoded_features(pool: &LabeledDataset, mask: &ProjectionMatrix) -> Result<FeatureMatrix> {
    let mut data = Vec::with_capacity(pool.len() * mask.out_dim());
    for img in &pool.images {
        data.extend_from_slice(&encoder::encode(img.pixels(), mask)?);
    }
    FeatureMatrix::new(pool.len(), mask.out_dim(), data, pool.labels.clone())
}

/// Simulate the lattice for every digit in the pool and return the sampled
/// camera images as features, plus settling statistics.
fn reservoir_features(
    pool: &LabeledDataset,
    mask: &ProjectionMatrix,
    cfg: &ExperimentConfig,
) -> Result<(FeatureMatrix, ConvergenceStats)> {
    let p0 = cfg.encoder.p0_frac * cfg.encoder.p_peak;
    let encoded: Vec<Vec<f64>> = pool
        .images
        .iter()
        .map(|img| encoder::encode(img.pixels(), mask))
        .collect::<Result<_>>()?;
    // Normalize so the pool-maximum node power lands on p_peak.
    let b_max = encoded
        .iter()
        .flat_map(|b| b.iter().copied())
        .fold(0.0f64, f64::max);
    let scale = if b_max > 0.0 {
        (cfg.encoder.p_peak - p0) / b_max
    } else {
        1.0
    };

    let lat = cfg.lattice.clone();
    let cam = cfg.camera.clone();
    let results = exec::batch_map(&encoded, |b| -> Result<(Vec<f64>, bool, f64)> {
        let pump = encoder::to_pump(b, p0, scale, lat.n)?;
        let out = lattice::evolve_to_steady(&ComplexField::zeros(lat.n), &pump, &lat)?;
        let image = lattice::render_camera(&out.intensity, lat.n, cam.resolution, cam.sigma)?;
        Ok((image, out.converged, out.t_elapsed))
    });

    let cols = cfg.camera.resolution * cfg.camera.resolution;
    let mut data = Vec::with_capacity(pool.len() * cols);
    let mut converged = 0usize;
    let mut settle_sum = 0.0;
    for (i, res) in results.into_iter().enumerate() {
        match res {
            Ok((image, conv, t)) => {
                data.extend_from_slice(&image);
                if conv {
                    converged += 1;
                }
                settle_sum += t;
            }
            Err(e) => {
                return Err(Error::Divergence(format!(
                    "simulation of pool digit {i} failed: {e}"
                )))
            }
        }
    }
    let stats = ConvergenceStats {
        digits: pool.len(),
        converged,
        mean_settle_time: settle_sum / pool.len() as f64,
    };
    Ok((
        FeatureMatrix::new(pool.len(), cols, data, pool.labels.clone())?,
        stats,
    ))
}

fn gather(features: &FeatureMatrix, idx: &[usize]) -> FeatureMatrix {
    let mut data = Vec::with_capacity(idx.len() * features.cols);
    let mut labels = Vec::with_capacity(idx.len());
    for &i in idx {
        data.extend_from_slice(features.row(i));
        labels.push(features.labels[i]);
    }
    FeatureMatrix {
        rows: idx.len(),
        cols: features.cols,
        data,
        labels,
    }
}

/// Train/evaluate one repetition; returns test accuracy and confusion.
fn evaluate_split(
    features: &FeatureMatrix,
    seed: u64,
    cfg: &ExperimentConfig,
) -> Result<(f64, Vec<Vec<u64>>)> {
    let (train_idx, test_idx) = mnist::split_indices(
        features.rows,
        seed,
        cfg.dataset.n_train,
        cfg.dataset.n_test,
    )?;
    let train = gather(features, &train_idx);
    let test = gather(features, &test_idx);
    let (model, _) = readout::train_logreg(&train, &cfg.readout)?;
    let pred = readout::predict(&model, &test)?;
    let acc = readout::accuracy(&pred, &test.labels)?;
    let conf = readout::confusion(&pred, &test.labels)?;
    Ok((acc, conf))
}

/// Accuracy over all split seeds, with the confusion counts summed.
fn evaluate_all_splits(
    features: &FeatureMatrix,
    cfg: &ExperimentConfig,
) -> Result<(AggregateAccuracy, Vec<Vec<u64>>)> {
    let mut reps = Vec::new();
    let mut confusion = vec![vec![0u64; readout::NUM_CLASSES]; readout::NUM_CLASSES];
    for &seed in &cfg.dataset.split_seeds {
        let (acc, conf) = evaluate_split(features, seed, cfg)?;
        reps.push(RepAccuracy {
            seed,
            accuracy: acc,
        });
        for (row, crow) in confusion.iter_mut().zip(&conf) {
            for (c, &v) in row.iter_mut().zip(crow) {
                *c += v;
            }
        }
    }
    Ok((aggregate(reps), confusion))
}

fn write_confusion(confusion: &[Vec<u64>], out_dir: &Path) -> Result<()> {
    let mut csv = Csv::new(vec![
        "true_class".into(),
        "pred_0".into(),
        "pred_1".into(),
        "pred_2".into(),
        "pred_3".into(),
        "pred_4".into(),
        "pred_5".into(),
        "pred_6".into(),
        "pred_7".into(),
        "pred_8".into(),
        "pred_9".into(),
    ]);
    for (t, row) in confusion.iter().enumerate() {
        let mut fields = vec![t.to_string()];
        fields.extend(row.iter().map(|v| v.to_string()));
        csv.row(fields);
    }
    write_csv(&csv, &out_dir.join("confusion.csv"))
}

fn write_summary(out_dir: &Path, lines: &[String]) -> Result<()> {
    std::fs::write(out_dir.join("summary.txt"), lines.join("\n") + "\n")?;
    Ok(())
}

/// Logistic regression directly on downsampled pixels, and optionally on
/// the encoded node intensities; no lattice simulation.
pub fn run_baseline(cfg: &ExperimentConfig, out_dir: &Path) -> Result<ClassificationReport> {
    let start = Instant::now();
    require_test_samples(cfg)?;
    let pool = load_pool(cfg)?;

    let pixels = pixel_features(&pool)?;
    let (pixel_agg, confusion) = evaluate_all_splits(&pixels, cfg)?;

    let encoded_agg = if cfg.run.baseline_encoded {
        let mask = encoder::build_projection(
            cfg.encoder.mask_seed,
            cfg.input_dim(),
            cfg.lattice.nodes(),
            cfg.encoder.density,
        )?;
        let enc = encoded_features(&pool, &mask)?;
        let (agg, _) = evaluate_all_splits(&enc, cfg)?;
        Some(agg)
    } else {
        None
    };

    let mut csv = if encoded_agg.is_some() {
        Csv::new(vec![
            "rep".into(),
            "split_seed".into(),
            "accuracy_pixels".into(),
            "accuracy_encoded".into(),
        ])
    } else {
        Csv::new(vec![
            "rep".into(),
            "split_seed".into(),
            "accuracy_pixels".into(),
        ])
    };
    for (i, rep) in pixel_agg.reps.iter().enumerate() {
        let mut fields = vec![
            i.to_string(),
            rep.seed.to_string(),
            format_f64(rep.accuracy),
        ];
        if let Some(enc) = &encoded_agg {
            fields.push(format_f64(enc.reps[i].accuracy));
        }
        csv.row(fields);
    }
    write_csv(&csv, &out_dir.join("report.csv"))?;
    write_confusion(&confusion, out_dir)?;

    let wall = start.elapsed().as_secs_f64();
    let mut summary = vec![
        "mode: baseline".to_string(),
        format!(
            "pool: {} digits at {}x{}",
            pool.len(),
            cfg.dataset.resolution,
            cfg.dataset.resolution
        ),
    ];
    summary.push(format!(
        "accuracy_pixels: mean {} sem {} over {} repetitions",
        format_f64(pixel_agg.mean),
        format_f64(pixel_agg.sem),
        pixel_agg.reps.len()
    ));
    if let Some(enc) = &encoded_agg {
        summary.push(format!(
            "accuracy_encoded: mean {} sem {}",
            format_f64(enc.mean),
            format_f64(enc.sem)
        ));
    }
    summary.push(format!("wall_seconds: {wall:.3}"));
    write_summary(out_dir, &summary)?;

    Ok(ClassificationReport {
        pixels_or_reservoir: pixel_agg,
        encoded: encoded_agg,
        confusion,
        convergence: None,
        wall_seconds: wall,
    })
}

/// Full reservoir pipeline: encode, pump, settle, sample, train, test.
pub fn run_reservoir(cfg: &ExperimentConfig, out_dir: &Path) -> Result<ClassificationReport> {
    let start = Instant::now();
    require_test_samples(cfg)?;
    let pool = load_pool(cfg)?;

    let mask = encoder::build_projection(
        cfg.encoder.mask_seed,
        cfg.input_dim(),
        cfg.lattice.nodes(),
        cfg.encoder.density,
    )?;
    encoder::write_mask_csv(&mask, &out_dir.join("mask_00.csv"))?;

    let (features, stats) = reservoir_features(&pool, &mask, cfg)?;
    let (agg, confusion) = evaluate_all_splits(&features, cfg)?;

    let mut csv = Csv::new(vec![
        "rep".into(),
        "split_seed".into(),
        "accuracy".into(),
    ]);
    for (i, rep) in agg.reps.iter().enumerate() {
        csv.row(vec![
            i.to_string(),
            rep.seed.to_string(),
            format_f64(rep.accuracy),
        ]);
    }
    write_csv(&csv, &out_dir.join("report.csv"))?;
    write_confusion(&confusion, out_dir)?;
    export_sample_digit(&pool, &mask, cfg, out_dir)?;

    let wall = start.elapsed().as_secs_f64();
    write_summary(
        out_dir,
        &[
            "mode: reservoir".to_string(),
            format!(
                "pool: {} digits at {}x{}",
                pool.len(),
                cfg.dataset.resolution,
                cfg.dataset.resolution
            ),
            format!(
                "settling: {}/{} converged, mean settle time {}",
                stats.converged,
                stats.digits,
                format_f64(stats.mean_settle_time)
            ),
            format!(
                "accuracy: mean {} sem {} over {} repetitions",
                format_f64(agg.mean),
                format_f64(agg.sem),
                agg.reps.len()
            ),
            format!("wall_seconds: {wall:.3}"),
        ],
    )?;

    Ok(ClassificationReport {
        pixels_or_reservoir: agg,
        encoded: None,
        confusion,
        convergence: Some(stats),
        wall_seconds: wall,
    })
}

/// Write the steady field, camera image and quadratic-deviation image of the
/// first pool digit, full precision.
fn export_sample_digit(
    pool: &LabeledDataset,
    mask: &ProjectionMatrix,
    cfg: &ExperimentConfig,
    out_dir: &Path,
) -> Result<()> {
    let Some(img) = pool.images.first() else {
        return Ok(());
    };
    let p0 = cfg.encoder.p0_frac * cfg.encoder.p_peak;
    let encoded: Vec<Vec<f64>> = pool
        .images
        .iter()
        .map(|im| encoder::encode(im.pixels(), mask))
        .collect::<Result<_>>()?;
    let b_max = encoded
        .iter()
        .flat_map(|b| b.iter().copied())
        .fold(0.0f64, f64::max);
    let scale = if b_max > 0.0 {
        (cfg.encoder.p_peak - p0) / b_max
    } else {
        1.0
    };
    let b = encoder::encode(img.pixels(), mask)?;
    let pump = encoder::to_pump(&b, p0, scale, cfg.lattice.n)?;
    let out = lattice::evolve_to_steady(&ComplexField::zeros(cfg.lattice.n), &pump, &cfg.lattice)?;

    let n = cfg.lattice.n;
    let mut field_csv = Csv::new(vec!["row".into(), "col".into(), "re".into(), "im".into()]);
    for row in 0..n {
        for col in 0..n {
            let z = out.field.get(row, col);
            field_csv.row(vec![
                row.to_string(),
                col.to_string(),
                format_f64(z.re),
                format_f64(z.im),
            ]);
        }
    }
    write_csv(&field_csv, &out_dir.join("sample_field.csv"))?;

    let image = lattice::render_camera(
        &out.intensity,
        n,
        cfg.camera.resolution,
        cfg.camera.sigma,
    )?;
    write_grid_csv(&image, cfg.camera.resolution, &out_dir.join("sample_camera.csv"))?;
    let quad = lattice::quad_dev_image(&out.intensity)?;
    write_grid_csv(&quad, n, &out_dir.join("sample_quaddev.csv"))?;
    Ok(())
}

fn write_grid_csv(values: &[f64], side: usize, path: &Path) -> Result<()> {
    let mut csv = Csv::new((0..side).map(|c| format!("col_{c}")).collect());
    for row in 0..side {
        csv.row(
            values[row * side..(row + 1) * side]
                .iter()
                .map(|&v| format_f64(v))
                .collect(),
        );
    }
    write_csv(&csv, path)
}

/// Reservoir runs for `mask_count` masks; features are concatenated mask by
/// mask and the accuracy is reported for every prefix size 1..=k.
pub fn run_ensemble(cfg: &ExperimentConfig, out_dir: &Path) -> Result<EnsembleReport> {
    let start = Instant::now();
    require_test_samples(cfg)?;
    let pool = load_pool(cfg)?;
    let masks = encoder::make_mask_family(
        cfg.encoder.mask_seed,
        cfg.encoder.mask_count,
        cfg.input_dim(),
        cfg.lattice.nodes(),
        cfg.encoder.density,
    )?;

    let mut feature_sets = Vec::with_capacity(masks.len());
    let mut digits = 0usize;
    let mut converged = 0usize;
    let mut settle_sum = 0.0;
    for (i, mask) in masks.iter().enumerate() {
        encoder::write_mask_csv(mask, &out_dir.join(format!("mask_{i:02}.csv")))?;
        let (features, stats) = reservoir_features(&pool, mask, cfg)?;
        digits += stats.digits;
        converged += stats.converged;
        settle_sum += stats.mean_settle_time * stats.digits as f64;
        feature_sets.push(features);
    }
    let convergence = ConvergenceStats {
        digits,
        converged,
        mean_settle_time: settle_sum / digits as f64,
    };

    let mut per_mask_count = Vec::with_capacity(masks.len());
    let mut confusion_final = Vec::new();
    let mut rep_csv = Csv::new(vec![
        "rep".into(),
        "split_seed".into(),
        "masks".into(),
        "accuracy".into(),
    ]);
    for m in 1..=feature_sets.len() {
        let joined = readout::concat_ensemble(&feature_sets[..m])?;
        let (agg, confusion) = evaluate_all_splits(&joined, cfg)?;
        for (i, rep) in agg.reps.iter().enumerate() {
            rep_csv.row(vec![
                i.to_string(),
                rep.seed.to_string(),
                m.to_string(),
                format_f64(rep.accuracy),
            ]);
        }
        if m == feature_sets.len() {
            confusion_final = confusion;
        }
        per_mask_count.push(EnsemblePoint {
            masks: m,
            aggregate: agg,
        });
    }
    write_csv(&rep_csv, &out_dir.join("report.csv"))?;

    let mut curve_csv = Csv::new(vec![
        "masks".into(),
        "mean_accuracy".into(),
        "sem".into(),
    ]);
    for point in &per_mask_count {
        curve_csv.row(vec![
            point.masks.to_string(),
            format_f64(point.aggregate.mean),
            format_f64(point.aggregate.sem),
        ]);
    }
    write_csv(&curve_csv, &out_dir.join("ensemble.csv"))?;
    write_confusion(&confusion_final, out_dir)?;

    let wall = start.elapsed().as_secs_f64();
    let first = &per_mask_count[0].aggregate;
    let last = &per_mask_count[per_mask_count.len() - 1].aggregate;
    write_summary(
        out_dir,
        &[
            "mode: ensemble".to_string(),
            format!("masks: {}", feature_sets.len()),
            format!(
                "settling: {}/{} converged, mean settle time {}",
                convergence.converged,
                convergence.digits,
                format_f64(convergence.mean_settle_time)
            ),
            format!(
                "accuracy: 1 mask {} -> {} masks {}",
                format_f64(first.mean),
                per_mask_count.len(),
                format_f64(last.mean)
            ),
            format!("wall_seconds: {wall:.3}"),
        ],
    )?;

    Ok(EnsembleReport {
        per_mask_count,
        confusion: confusion_final,
        convergence,
        wall_seconds: wall,
    })
}

/// Steady response versus drive power for the configured lattice.
pub fn run_curve(cfg: &ExperimentConfig, out_dir: &Path) -> Result<CurveReport> {
    let start = Instant::now();
    let mut csv = Csv::new(vec![
        "direction".into(),
        "input_power".into(),
        "output_intensity".into(),
    ]);
    let want_up = matches!(
        cfg.curve.direction,
        config::CurveDirection::Up | config::CurveDirection::Both
    );
    let want_down = matches!(
        cfg.curve.direction,
        config::CurveDirection::Down | config::CurveDirection::Both
    );
    let up = if want_up {
        let c = lattice::response_curve(&cfg.lattice, &cfg.curve.powers, lattice::SweepDirection::Up)?;
        for &(p, i) in &c {
            csv.row(vec!["up".into(), format_f64(p), format_f64(i)]);
        }
        Some(c)
    } else {
        None
    };
    let down = if want_down {
        let c = lattice::response_curve(
            &cfg.lattice,
            &cfg.curve.powers,
            lattice::SweepDirection::Down,
        )?;
        for &(p, i) in &c {
            csv.row(vec!["down".into(), format_f64(p), format_f64(i)]);
        }
        Some(c)
    } else {
        None
    };
    write_csv(&csv, &out_dir.join("curve.csv"))?;
    let wall = start.elapsed().as_secs_f64();
    write_summary(
        out_dir,
        &[
            "mode: curve".to_string(),
            format!("points: {}", cfg.curve.powers.len()),
            format!("wall_seconds: {wall:.3}"),
        ],
    )?;
    Ok(CurveReport {
        up,
        down,
        wall_seconds: wall,
    })
}

/// Probe-node activation by its pumped neighborhood, both scenarios.
pub fn run_connectivity(cfg: &ExperimentConfig, out_dir: &Path) -> Result<ConnectivityReport> {
    let start = Instant::now();
    let curves = lattice::connectivity_experiment(&cfg.lattice, &cfg.connectivity.powers)?;
    let mut csv = Csv::new(vec![
        "pump_power".into(),
        "probe_intensity_all".into(),
        "probe_intensity_second_only".into(),
        "ratio_second_to_all".into(),
    ]);
    for i in 0..curves.powers.len() {
        csv.row(vec![
            format_f64(curves.powers[i]),
            format_f64(curves.all_neighbors[i]),
            format_f64(curves.second_only[i]),
            format_f64(curves.ratio[i]),
        ]);
    }
    write_csv(&csv, &out_dir.join("connectivity.csv"))?;
    let wall = start.elapsed().as_secs_f64();
    write_summary(
        out_dir,
        &[
            "mode: connectivity".to_string(),
            format!("probe: ({}, {})", curves.probe.0, curves.probe.1),
            format!("points: {}", curves.powers.len()),
            format!("wall_seconds: {wall:.3}"),
        ],
    )?;
    Ok(ConnectivityReport {
        curves,
        wall_seconds: wall,
    })
}

/// Override one exposed parameter on a copy of the config.
pub fn apply_axis(cfg: &ExperimentConfig, axis: &str, value: f64) -> Result<ExperimentConfig> {
    let mut out = cfg.clone();
    match axis {
        "g" => out.lattice.g = value,
        "delta" => out.lattice.delta = value,
        "gamma" => out.lattice.gamma = value,
        "j" => out.lattice.j = value,
        "j2" => out.lattice.j2 = value,
        "dt" => out.lattice.dt = value,
        "t_max" => out.lattice.t_max = value,
        "tol" => out.lattice.tol = value,
        "p_peak" => out.encoder.p_peak = value,
        "p0_frac" => out.encoder.p0_frac = value,
        "density" => out.encoder.density = value,
        "camera_sigma" => out.camera.sigma = value,
        "lr" => out.readout.lr = value,
        "l2" => out.readout.l2 = value,
        other => {
            return Err(Error::Parameter(format!(
                "unknown sweep axis {other:?}"
            )))
        }
    }
    out.validate().map_err(|e| Error::Parameter(e.to_string()))?;
    Ok(out)
}

/// One full reservoir run per sweep value; accuracy curve over the axis.
pub fn run_sweep(cfg: &ExperimentConfig, out_dir: &Path) -> Result<SweepReport> {
    let start = Instant::now();
    require_test_samples(cfg)?;
    if cfg.sweep.values.is_empty() {
        return Err(Error::Parameter("sweep needs at least one value".into()));
    }
    let pool = load_pool(cfg)?;
    let mask = encoder::build_projection(
        cfg.encoder.mask_seed,
        cfg.input_dim(),
        cfg.lattice.nodes(),
        cfg.encoder.density,
    )?;

    let mut rep_csv = Csv::new(vec![
        "rep".into(),
        "split_seed".into(),
        "axis".into(),
        "value".into(),
        "accuracy".into(),
    ]);
    let mut points = Vec::with_capacity(cfg.sweep.values.len());
    for &value in &cfg.sweep.values {
        let sub = apply_axis(cfg, &cfg.sweep.axis, value)?;
        let (features, _) = reservoir_features(&pool, &mask, &sub)?;
        let (agg, _) = evaluate_all_splits(&features, &sub)?;
        for (i, rep) in agg.reps.iter().enumerate() {
            rep_csv.row(vec![
                i.to_string(),
                rep.seed.to_string(),
                cfg.sweep.axis.clone(),
                format_f64(value),
                format_f64(rep.accuracy),
            ]);
        }
        points.push(SweepPoint {
            value,
            aggregate: agg,
        });
    }
    write_csv(&rep_csv, &out_dir.join("report.csv"))?;

    let mut sweep_csv = Csv::new(vec![
        "axis".into(),
        "value".into(),
        "mean_accuracy".into(),
        "sem".into(),
    ]);
    for point in &points {
        sweep_csv.row(vec![
            cfg.sweep.axis.clone(),
            format_f64(point.value),
            format_f64(point.aggregate.mean),
            format_f64(point.aggregate.sem),
        ]);
    }
    write_csv(&sweep_csv, &out_dir.join("sweep.csv"))?;

    let wall = start.elapsed().as_secs_f64();
    write_summary(
        out_dir,
        &[
            "mode: sweep".to_string(),
            format!("axis: {}", cfg.sweep.axis),
            format!("values: {}", cfg.sweep.values.len()),
            format!("wall_seconds: {wall:.3}"),
        ],
    )?;
    Ok(SweepReport {
        axis: cfg.sweep.axis.clone(),
        points,
        wall_seconds: wall,
    })
}
