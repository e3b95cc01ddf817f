//! MNIST ingestion: IDX file parsing, block-average downsampling and seeded
//! train/test splits.
//!
//! Images are stored as intensities in `[0, 1]` (byte value / 255). The IDX
//! container is parsed byte-exactly: big-endian header, magic `0x00000803`
//! for images and `0x00000801` for labels.

use crate::error::{Error, Result};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::Path;

pub const IMAGE_MAGIC: u32 = 0x0000_0803;
pub const LABEL_MAGIC: u32 = 0x0000_0801;

/// Square grayscale digit, intensities in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DigitImage {
    resolution: usize,
    pixels: Vec<f64>,
}

impl DigitImage {
    pub fn new(resolution: usize, pixels: Vec<f64>) -> Result<Self> {
        if pixels.len() != resolution * resolution {
            return Err(Error::Parameter(format!(
                "expected {}x{} = {} pixels, got {}",
                resolution,
                resolution,
                resolution * resolution,
                pixels.len()
            )));
        }
        if pixels.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
            return Err(Error::Parameter("pixel intensity outside [0, 1]".into()));
        }
        Ok(Self { resolution, pixels })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn pixel(&self, row: usize, col: usize) -> f64 {
        self.pixels[row * self.resolution + col]
    }
}

/// Images plus class labels in `0..=9`, all at one resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub images: Vec<DigitImage>,
    pub labels: Vec<u8>,
    pub resolution: usize,
}

impl LabeledDataset {
    pub fn new(images: Vec<DigitImage>, labels: Vec<u8>, resolution: usize) -> Result<Self> {
        if images.len() != labels.len() {
            return Err(Error::Data(format!(
                "{} images but {} labels",
                images.len(),
                labels.len()
            )));
        }
        if labels.iter().any(|&l| l > 9) {
            return Err(Error::Data("label outside 0..=9".into()));
        }
        if images.iter().any(|im| im.resolution != resolution) {
            return Err(Error::Data("mixed image resolutions".into()));
        }
        Ok(Self {
            images,
            labels,
            resolution,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

fn read_u32_be(bytes: &[u8], offset: usize, what: &str) -> Result<u32> {
    let end = offset + 4;
    if bytes.len() < end {
        return Err(Error::Length(format!("file too short to hold {what}")));
    }
    Ok(u32::from_be_bytes([
        bytes[offset],
        bytes[offset + 1],
        bytes[offset + 2],
        bytes[offset + 3],
    ]))
}

/// Load 28x28 images from an uncompressed IDX3 file.
pub fn load_idx_images(path: &Path) -> Result<Vec<DigitImage>> {
    let bytes = std::fs::read(path)?;
    parse_idx_images(&bytes)
}

pub fn parse_idx_images(bytes: &[u8]) -> Result<Vec<DigitImage>> {
    let magic = read_u32_be(bytes, 0, "image magic")?;
    if magic != IMAGE_MAGIC {
        return Err(Error::Format(format!(
            "bad image magic {magic:#010x}, expected {IMAGE_MAGIC:#010x}"
        )));
    }
    let count = read_u32_be(bytes, 4, "image count")? as usize;
    let rows = read_u32_be(bytes, 8, "row count")? as usize;
    let cols = read_u32_be(bytes, 12, "column count")? as usize;
    if count > 0 && (rows != 28 || cols != 28) {
        return Err(Error::Format(format!(
            "expected 28x28 images, file declares {rows}x{cols}"
        )));
    }
    let expected = 16 + count * rows * cols;
    if bytes.len() != expected {
        return Err(Error::Length(format!(
            "image payload is {} bytes, header requires {}",
            bytes.len(),
            expected
        )));
    }
    let mut images = Vec::with_capacity(count);
    for i in 0..count {
        let start = 16 + i * rows * cols;
        let pixels: Vec<f64> = bytes[start..start + rows * cols]
            .iter()
            .map(|&b| f64::from(b) / 255.0)
            .collect();
        images.push(DigitImage {
            resolution: 28,
            pixels,
        });
    }
    Ok(images)
}

/// Load class labels from an uncompressed IDX1 file.
pub fn load_idx_labels(path: &Path) -> Result<Vec<u8>> {
    let bytes = std::fs::read(path)?;
    parse_idx_labels(&bytes)
}

pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<u8>> {
    let magic = read_u32_be(bytes, 0, "label magic")?;
    if magic != LABEL_MAGIC {
        return Err(Error::Format(format!(
            "bad label magic {magic:#010x}, expected {LABEL_MAGIC:#010x}"
        )));
    }
    let count = read_u32_be(bytes, 4, "label count")? as usize;
    let expected = 8 + count;
    if bytes.len() != expected {
        return Err(Error::Length(format!(
            "label payload is {} bytes, header requires {}",
            bytes.len(),
            expected
        )));
    }
    let labels = bytes[8..].to_vec();
    if let Some(&bad) = labels.iter().find(|&&l| l > 9) {
        return Err(Error::Data(format!("label byte {bad} outside 0..=9")));
    }
    Ok(labels)
}

/// Load images and labels into one dataset at the native 28x28 resolution.
pub fn load_dataset(images_path: &Path, labels_path: &Path) -> Result<LabeledDataset> {
    let images = load_idx_images(images_path)?;
    let labels = load_idx_labels(labels_path)?;
    LabeledDataset::new(images, labels, 28)
}

/// Crop geometry used by [`downsample`]: `(crop side, offset, block side)`.
///
/// MNIST digits are size-normalized into a centered 20x20 box, so the
/// 4-pixel margins carry almost no signal and would dilute coarse block
/// means. Each target resolution therefore averages over the smallest
/// r-divisible window covering that box: 21x21 for r = 7 (3x3 blocks) and
/// 20x20 for r = 4 (5x5 blocks), both at offset (4, 4).
pub fn crop_geometry(r: usize) -> Result<(usize, usize, usize)> {
    match r {
        7 => Ok((21, 4, 3)),
        4 => Ok((20, 4, 5)),
        _ => Err(Error::Parameter(format!(
            "unsupported target resolution {r}, expected 7 or 4"
        ))),
    }
}

/// Reduce a 28x28 digit to `r`x`r` by block-averaging the centered
/// content window; see [`crop_geometry`].
pub fn downsample(img: &DigitImage, r: usize) -> Result<DigitImage> {
    if img.resolution != 28 {
        return Err(Error::Parameter(format!(
            "downsample expects a 28x28 source, got {}x{}",
            img.resolution, img.resolution
        )));
    }
    let (_, offset, block) = crop_geometry(r)?;
    let area = (block * block) as f64;
    let mut pixels = Vec::with_capacity(r * r);
    for br in 0..r {
        for bc in 0..r {
            let mut sum = 0.0;
            for dr in 0..block {
                for dc in 0..block {
                    sum += img.pixel(offset + br * block + dr, offset + bc * block + dc);
                }
            }
            pixels.push(sum / area);
        }
    }
    Ok(DigitImage {
        resolution: r,
        pixels,
    })
}

/// Downsample every image in a dataset.
pub fn downsample_dataset(ds: &LabeledDataset, r: usize) -> Result<LabeledDataset> {
    let images = ds
        .images
        .iter()
        .map(|im| downsample(im, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(LabeledDataset {
        images,
        labels: ds.labels.clone(),
        resolution: r,
    })
}

/// Seeded permutation of `0..len` cut into disjoint train/test index sets.
pub fn split_indices(
    len: usize,
    seed: u64,
    n_train: usize,
    n_test: usize,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if n_train + n_test > len {
        return Err(Error::Parameter(format!(
            "requested {n_train} train + {n_test} test from {len} samples"
        )));
    }
    let mut order: Vec<usize> = (0..len).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    order.truncate(n_train + n_test);
    let test = order.split_off(n_train);
    Ok((order, test))
}

/// Shuffle a dataset with a seeded permutation and cut disjoint train/test
/// subsets of the requested sizes.
pub fn split_shuffle(
    ds: &LabeledDataset,
    seed: u64,
    n_train: usize,
    n_test: usize,
) -> Result<(LabeledDataset, LabeledDataset)> {
    let (train_idx, test_idx) = split_indices(ds.len(), seed, n_train, n_test)?;
    let take = |idx: &[usize]| LabeledDataset {
        images: idx.iter().map(|&i| ds.images[i].clone()).collect(),
        labels: idx.iter().map(|&i| ds.labels[i]).collect(),
        resolution: ds.resolution,
    };
    Ok((take(&train_idx), take(&test_idx)))
}
