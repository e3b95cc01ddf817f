//! Camera model: sample node intensities onto an R x R image through a
//! Gaussian point-spread function.

use crate::error::{Error, Result};

/// Render node intensities to an `r x r` image. Nodes sit on the integer
/// grid `(0..n, 0..n)` with unit pitch; the image spans the lattice
/// footprint `[-0.5, n - 0.5]` in both axes, so `r = n` places one pixel
/// center on every node. `sigma` is the point-spread width in units of the
/// node pitch.
pub fn render_camera(intensities: &[f64], n: usize, r: usize, sigma: f64) -> Result<Vec<f64>> {
    if intensities.len() != n * n {
        return Err(Error::Parameter(format!(
            "{} intensities for an {n}x{n} lattice",
            intensities.len()
        )));
    }
    if r < 1 {
        return Err(Error::Parameter("camera resolution must be >= 1".into()));
    }
    if sigma <= 0.0 {
        return Err(Error::Parameter(format!("point-spread width {sigma} <= 0")));
    }
    let pitch = n as f64 / r as f64;
    let inv_two_sigma_sq = 1.0 / (2.0 * sigma * sigma);
    let mut image = vec![0.0; r * r];
    for pr in 0..r {
        let y = -0.5 + (pr as f64 + 0.5) * pitch;
        for pc in 0..r {
            let x = -0.5 + (pc as f64 + 0.5) * pitch;
            let mut acc = 0.0;
            for nr in 0..n {
                let dy = y - nr as f64;
                for nc in 0..n {
                    let dx = x - nc as f64;
                    acc += intensities[nr * n + nc]
                        * (-(dx * dx + dy * dy) * inv_two_sigma_sq).exp();
                }
            }
            image[pr * r + pc] = acc;
        }
    }
    Ok(image)
}

/// Elementwise squared deviation from the mean, `(I_n - mean(I))^2`.
/// Visualization aid; never used as a classifier feature.
pub fn quad_dev_image(intensities: &[f64]) -> Result<Vec<f64>> {
    if intensities.is_empty() {
        return Err(Error::Parameter("empty intensity array".into()));
    }
    let mean: f64 = intensities.iter().sum::<f64>() / intensities.len() as f64;
    Ok(intensities.iter().map(|&x| (x - mean) * (x - mean)).collect())
}
