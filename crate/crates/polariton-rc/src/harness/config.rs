//! Plain-text experiment configuration: `key = value` lines grouped under
//! `[section]` headers, `#` comments. Every key has a documented default, so
//! a config file only states what it overrides. `emit` writes the canonical
//! form and `parse(emit(cfg)) == cfg` exactly.

use crate::error::{Error, Result};
use crate::lattice::LatticeParams;
use crate::readout::TrainParams;
use std::fmt::Write as _;
use std::path::PathBuf;

/// Experiment kind; the CLI subcommand must agree with it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Baseline,
    Reservoir,
    Ensemble,
    Curve,
    Connectivity,
    Sweep,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Baseline => "baseline",
            Mode::Reservoir => "reservoir",
            Mode::Ensemble => "ensemble",
            Mode::Curve => "curve",
            Mode::Connectivity => "connectivity",
            Mode::Sweep => "sweep",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "baseline" => Mode::Baseline,
            "reservoir" => Mode::Reservoir,
            "ensemble" => Mode::Ensemble,
            "curve" => Mode::Curve,
            "connectivity" => Mode::Connectivity,
            "sweep" => Mode::Sweep,
            other => return Err(Error::Config(format!("unknown mode {other:?}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetConfig {
    pub images: PathBuf,
    pub labels: PathBuf,
    /// Input resolution after downsampling; 7 or 4.
    pub resolution: usize,
    /// Seed selecting the digit pool of `n_train + n_test` samples.
    pub pool_seed: u64,
    pub n_train: usize,
    pub n_test: usize,
    /// One repetition per seed; each reshuffles the pool into train/test.
    pub split_seeds: Vec<u64>,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        Self {
            images: PathBuf::from("data/mnist/train-images-idx3-ubyte"),
            labels: PathBuf::from("data/mnist/train-labels-idx1-ubyte"),
            resolution: 4,
            pool_seed: 42,
            n_train: 4000,
            n_test: 1000,
            split_seeds: vec![101, 102, 103, 104, 105],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncoderConfig {
    pub mask_seed: u64,
    pub mask_count: usize,
    pub density: f64,
    /// Dataset-maximum node pump power after normalization.
    pub p_peak: f64,
    /// Background power as a fraction of `p_peak`.
    pub p0_frac: f64,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        Self {
            mask_seed: 7,
            mask_count: 1,
            density: 0.5,
            p_peak: 60.0,
            p0_frac: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CameraConfig {
    /// Output image side; features are `resolution^2` pixels.
    pub resolution: usize,
    /// Gaussian point-spread width in node-pitch units.
    pub sigma: f64,
}

impl Default for CameraConfig {
    fn default() -> Self {
        Self {
            resolution: 8,
            sigma: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    /// Baseline mode: also train on the encoded node intensities `b = W a`.
    pub baseline_encoded: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Baseline,
            baseline_encoded: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveDirection {
    Up,
    Down,
    Both,
}

impl CurveDirection {
    fn as_str(self) -> &'static str {
        match self {
            CurveDirection::Up => "up",
            CurveDirection::Down => "down",
            CurveDirection::Both => "both",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveConfig {
    /// Ascending drive powers.
    pub powers: Vec<f64>,
    pub direction: CurveDirection,
}

impl Default for CurveConfig {
    fn default() -> Self {
        Self {
            powers: linspace(0.0, 30.0, 61),
            direction: CurveDirection::Both,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConnectivityConfig {
    /// Ascending per-node pump powers for the neighborhood scan.
    pub powers: Vec<f64>,
}

impl Default for ConnectivityConfig {
    fn default() -> Self {
        Self {
            powers: linspace(2.0, 80.0, 40),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// Parameter to vary; one reservoir run per value.
    pub axis: String,
    pub values: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            axis: "g".into(),
            values: vec![0.0, 0.005, 0.01, 0.02],
        }
    }
}

/// Full experiment description; see the module docs for file syntax.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentConfig {
    pub dataset: DatasetConfig,
    pub encoder: EncoderConfig,
    pub lattice: LatticeParams,
    pub camera: CameraConfig,
    pub readout: TrainParams,
    pub run: RunConfig,
    pub curve: CurveConfig,
    pub connectivity: ConnectivityConfig,
    pub sweep: SweepConfig,
}

pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..count)
            .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

impl ExperimentConfig {
    /// Parse config text, starting from defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut section = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = strip_comment(raw).trim().to_string();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| Error::Config(format!("line {}: unterminated section", lineno + 1)))?;
                section = name.trim().to_string();
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let key = key.trim();
            let value = value.trim();
            cfg.apply(&section, key, value)
                .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn parse_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    fn apply(&mut self, section: &str, key: &str, value: &str) -> Result<()> {
        match (section, key) {
            ("dataset", "images") => self.dataset.images = PathBuf::from(value),
            ("dataset", "labels") => self.dataset.labels = PathBuf::from(value),
            ("dataset", "resolution") => self.dataset.resolution = parse_num(value)?,
            ("dataset", "pool_seed") => self.dataset.pool_seed = parse_num(value)?,
            ("dataset", "n_train") => self.dataset.n_train = parse_num(value)?,
            ("dataset", "n_test") => self.dataset.n_test = parse_num(value)?,
            ("dataset", "split_seeds") => self.dataset.split_seeds = parse_u64_list(value)?,
            ("encoder", "mask_seed") => self.encoder.mask_seed = parse_num(value)?,
            ("encoder", "mask_count") => self.encoder.mask_count = parse_num(value)?,
            ("encoder", "density") => self.encoder.density = parse_num(value)?,
            ("encoder", "p_peak") => self.encoder.p_peak = parse_num(value)?,
            ("encoder", "p0_frac") => self.encoder.p0_frac = parse_num(value)?,
            ("lattice", "n") => self.lattice.n = parse_num(value)?,
            ("lattice", "delta") => self.lattice.delta = parse_num(value)?,
            ("lattice", "gamma") => self.lattice.gamma = parse_num(value)?,
            ("lattice", "g") => self.lattice.g = parse_num(value)?,
            ("lattice", "j") => self.lattice.j = parse_num(value)?,
            ("lattice", "j2") => self.lattice.j2 = parse_num(value)?,
            ("lattice", "dt") => self.lattice.dt = parse_num(value)?,
            ("lattice", "t_max") => self.lattice.t_max = parse_num(value)?,
            ("lattice", "tol") => self.lattice.tol = parse_num(value)?,
            ("camera", "resolution") => self.camera.resolution = parse_num(value)?,
            ("camera", "sigma") => self.camera.sigma = parse_num(value)?,
            ("readout", "l2") => self.readout.l2 = parse_num(value)?,
            ("readout", "lr") => self.readout.lr = parse_num(value)?,
            ("readout", "max_iters") => self.readout.max_iters = parse_num(value)?,
            ("readout", "grad_tol") => self.readout.grad_tol = parse_num(value)?,
            ("run", "mode") => self.run.mode = Mode::parse(value)?,
            ("run", "baseline_encoded") => self.run.baseline_encoded = parse_bool(value)?,
            ("curve", "powers") => self.curve.powers = parse_f64_list(value)?,
            ("curve", "direction") => {
                self.curve.direction = match value {
                    "up" => CurveDirection::Up,
                    "down" => CurveDirection::Down,
                    "both" => CurveDirection::Both,
                    other => return Err(Error::Config(format!("unknown direction {other:?}"))),
                }
            }
            ("connectivity", "powers") => self.connectivity.powers = parse_f64_list(value)?,
            ("sweep", "axis") => self.sweep.axis = value.to_string(),
            ("sweep", "values") => self.sweep.values = parse_f64_list(value)?,
            _ => {
                return Err(Error::Config(format!(
                    "unknown key {key:?} in section [{section}]"
                )))
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.dataset.resolution != 7 && self.dataset.resolution != 4 {
            return Err(Error::Config(format!(
                "input resolution {} not supported (7 or 4)",
                self.dataset.resolution
            )));
        }
        if self.dataset.split_seeds.is_empty() {
            return Err(Error::Config("split_seeds must not be empty".into()));
        }
        if self.encoder.mask_count < 1 {
            return Err(Error::Config("mask_count must be >= 1".into()));
        }
        if !(self.encoder.density > 0.0 && self.encoder.density <= 1.0) {
            return Err(Error::Config(format!(
                "density {} outside (0, 1]",
                self.encoder.density
            )));
        }
        if self.encoder.p_peak <= 0.0 {
            return Err(Error::Config("p_peak must be > 0".into()));
        }
        if !(0.0..1.0).contains(&self.encoder.p0_frac) {
            return Err(Error::Config("p0_frac must lie in [0, 1)".into()));
        }
        self.lattice.validate().map_err(|e| Error::Config(e.to_string()))?;
        if self.camera.resolution < 1 || self.camera.sigma <= 0.0 {
            return Err(Error::Config("camera needs resolution >= 1 and sigma > 0".into()));
        }
        Ok(())
    }

    /// Input dimension implied by the dataset resolution.
    pub fn input_dim(&self) -> usize {
        self.dataset.resolution * self.dataset.resolution
    }

    /// Canonical text form; parsing it reproduces `self` exactly.
    pub fn emit(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "[dataset]");
        let _ = writeln!(s, "images = {}", self.dataset.images.display());
        let _ = writeln!(s, "labels = {}", self.dataset.labels.display());
        let _ = writeln!(s, "resolution = {}", self.dataset.resolution);
        let _ = writeln!(s, "pool_seed = {}", self.dataset.pool_seed);
        let _ = writeln!(s, "n_train = {}", self.dataset.n_train);
        let _ = writeln!(s, "n_test = {}", self.dataset.n_test);
        let _ = writeln!(s, "split_seeds = {}", join_u64(&self.dataset.split_seeds));
        let _ = writeln!(s);
        let _ = writeln!(s, "[encoder]");
        let _ = writeln!(s, "mask_seed = {}", self.encoder.mask_seed);
        let _ = writeln!(s, "mask_count = {}", self.encoder.mask_count);
        let _ = writeln!(s, "density = {}", self.encoder.density);
        let _ = writeln!(s, "p_peak = {}", self.encoder.p_peak);
        let _ = writeln!(s, "p0_frac = {}", self.encoder.p0_frac);
        let _ = writeln!(s);
        let _ = writeln!(s, "[lattice]");
        let _ = writeln!(s, "n = {}", self.lattice.n);
        let _ = writeln!(s, "delta = {}", self.lattice.delta);
        let _ = writeln!(s, "gamma = {}", self.lattice.gamma);
        let _ = writeln!(s, "g = {}", self.lattice.g);
        let _ = writeln!(s, "j = {}", self.lattice.j);
        let _ = writeln!(s, "j2 = {}", self.lattice.j2);
        let _ = writeln!(s, "dt = {}", self.lattice.dt);
        let _ = writeln!(s, "t_max = {}", self.lattice.t_max);
        let _ = writeln!(s, "tol = {}", self.lattice.tol);
        let _ = writeln!(s);
        let _ = writeln!(s, "[camera]");
        let _ = writeln!(s, "resolution = {}", self.camera.resolution);
        let _ = writeln!(s, "sigma = {}", self.camera.sigma);
        let _ = writeln!(s);
        let _ = writeln!(s, "[readout]");
        let _ = writeln!(s, "l2 = {}", self.readout.l2);
        let _ = writeln!(s, "lr = {}", self.readout.lr);
        let _ = writeln!(s, "max_iters = {}", self.readout.max_iters);
        let _ = writeln!(s, "grad_tol = {}", self.readout.grad_tol);
        let _ = writeln!(s);
        let _ = writeln!(s, "[run]");
        let _ = writeln!(s, "mode = {}", self.run.mode.as_str());
        let _ = writeln!(s, "baseline_encoded = {}", self.run.baseline_encoded);
        let _ = writeln!(s);
        let _ = writeln!(s, "[curve]");
        let _ = writeln!(s, "powers = {}", join_f64(&self.curve.powers));
        let _ = writeln!(s, "direction = {}", self.curve.direction.as_str());
        let _ = writeln!(s);
        let _ = writeln!(s, "[connectivity]");
        let _ = writeln!(s, "powers = {}", join_f64(&self.connectivity.powers));
        let _ = writeln!(s);
        let _ = writeln!(s, "[sweep]");
        let _ = writeln!(s, "axis = {}", self.sweep.axis);
        let _ = writeln!(s, "values = {}", join_f64(&self.sweep.values));
        s
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    }
}

fn parse_num<T: std::str::FromStr>(value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("cannot parse {value:?}")))
}

fn parse_bool(value: &str) -> Result<bool> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(Error::Config(format!("expected true/false, got {other:?}"))),
    }
}

fn parse_u64_list(value: &str) -> Result<Vec<u64>> {
    value.split(',').map(|s| parse_num(s.trim())).collect()
}

/// Comma list (`0.5,1,2`) or range form `start:stop:count`.
fn parse_f64_list(value: &str) -> Result<Vec<f64>> {
    if value.contains(':') {
        let parts: Vec<&str> = value.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Config(format!(
                "range must be start:stop:count, got {value:?}"
            )));
        }
        let start: f64 = parse_num(parts[0].trim())?;
        let stop: f64 = parse_num(parts[1].trim())?;
        let count: usize = parse_num(parts[2].trim())?;
        return Ok(linspace(start, stop, count));
    }
    if value.trim().is_empty() {
        return Ok(Vec::new());
    }
    value.split(',').map(|s| parse_num(s.trim())).collect()
}

fn join_u64(v: &[u64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn join_f64(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",")
}
