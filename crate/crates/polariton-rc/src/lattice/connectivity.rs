//! Node-connectivity experiment: how strongly an unpumped probe node is lit
//! up by its pumped neighborhood.
//!
//! Two pumping scenarios are swept over a list of per-node pump powers:
//!
//! * scenario "all": every node is pumped except the central probe A;
//! * scenario "second": the probe's edge-adjacent first neighbors A' are
//!   switched off as well, so A is fed only through its diagonal second
//!   neighbors A''.
//!
//! The reported ratio second/all measures the relative strength of the
//! diagonal connection route.

use super::{evolve_to_steady, ComplexField, LatticeParams};
use crate::encoder::{checkerboard_sign, PumpPattern};
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Probe-node intensities versus pump power for both scenarios.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectivityCurves {
    /// Probe node (row, col).
    pub probe: (usize, usize),
    /// Scanned per-node pump powers, ascending.
    pub powers: Vec<f64>,
    /// Probe intensity with all other nodes pumped.
    pub all_neighbors: Vec<f64>,
    /// Probe intensity with first neighbors also off.
    pub second_only: Vec<f64>,
    /// `second_only / all_neighbors` per power (0 when the denominator is 0).
    pub ratio: Vec<f64>,
}

fn masked_uniform_pump(power: f64, n: usize, off: &[(usize, usize)]) -> PumpPattern {
    let mut b = vec![power; n * n];
    for &(r, c) in off {
        b[r * n + c] = 0.0;
    }
    // Build the drive directly so "off" means exactly zero power.
    let drive: Vec<Complex64> = (0..n * n)
        .map(|idx| {
            let (r, c) = (idx / n, idx % n);
            Complex64::new(b[idx].sqrt() * checkerboard_sign(r, c), 0.0)
        })
        .collect();
    PumpPattern::from_drive(n, drive)
}

/// Run both scenarios over an ascending power scan. Each scenario sweeps
/// warm-started from the previous power, starting cold at the lowest.
pub fn connectivity_experiment(p: &LatticeParams, powers: &[f64]) -> Result<ConnectivityCurves> {
    p.validate()?;
    if p.n < 5 {
        return Err(Error::Parameter(
            "connectivity experiment needs a lattice of side >= 5".into(),
        ));
    }
    if powers.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Parameter("pump powers must be ascending".into()));
    }
    if let Some(&neg) = powers.iter().find(|&&x| x < 0.0) {
        return Err(Error::Parameter(format!("negative pump power {neg}")));
    }
    let center = (p.n / 2, p.n / 2);
    let (cr, cc) = center;
    let probe_only = vec![center];
    let mut probe_and_first = vec![center];
    probe_and_first.extend_from_slice(&[
        (cr - 1, cc),
        (cr + 1, cc),
        (cr, cc - 1),
        (cr, cc + 1),
    ]);

    let sweep = |off: &[(usize, usize)]| -> Result<Vec<f64>> {
        let mut curve = Vec::with_capacity(powers.len());
        let mut psi = ComplexField::zeros(p.n);
        for &power in powers {
            let pump = masked_uniform_pump(power, p.n, off);
            let out = evolve_to_steady(&psi, &pump, p)?;
            curve.push(out.intensity[cr * p.n + cc]);
            psi = out.field;
        }
        Ok(curve)
    };

    let all_neighbors = sweep(&probe_only)?;
    let second_only = sweep(&probe_and_first)?;
    let ratio = all_neighbors
        .iter()
        .zip(&second_only)
        .map(|(&a, &s)| if a > 0.0 { s / a } else { 0.0 })
        .collect();
    Ok(ConnectivityCurves {
        probe: center,
        powers: powers.to_vec(),
        all_neighbors,
        second_only,
        ratio,
    })
}
