//! Input encoding: seeded sparse random projection of digit pixels onto the
//! lattice, and conversion of node intensities to a complex pump field with
//! a pi-checkerboard phase.

use crate::error::{Error, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

/// Sparse nonnegative random matrix mapping input pixels to node pump
/// intensities. Reproducible from its seed.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionMatrix {
    out_dim: usize,
    in_dim: usize,
    entries: Vec<f64>, // row-major out_dim x in_dim
    seed: u64,
    density: f64,
}

impl ProjectionMatrix {
    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.in_dim + col]
    }

    pub fn nonzero_count(&self) -> usize {
        self.entries.iter().filter(|&&e| e != 0.0).count()
    }
}

/// Draw a sparse random projection: each entry is nonzero with probability
/// `density`, and nonzero values are uniform on (0, 1].
pub fn build_projection(
    seed: u64,
    in_dim: usize,
    out_dim: usize,
    density: f64,
) -> Result<ProjectionMatrix> {
    if in_dim < 1 || out_dim < 1 {
        return Err(Error::Parameter(format!(
            "projection dims must be >= 1, got {out_dim}x{in_dim}"
        )));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::Parameter(format!(
            "density {density} outside (0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = Vec::with_capacity(out_dim * in_dim);
    for _ in 0..out_dim * in_dim {
        let keep: f64 = rng.random();
        if keep < density {
            // 1 - U[0,1) lies in (0, 1].
            entries.push(1.0 - rng.random::<f64>());
        } else {
            entries.push(0.0);
        }
    }
    Ok(ProjectionMatrix {
        out_dim,
        in_dim,
        entries,
        seed,
        density,
    })
}

/// `k` projections with derived seeds `base_seed + 0..k-1`.
pub fn make_mask_family(
    base_seed: u64,
    k: usize,
    in_dim: usize,
    out_dim: usize,
    density: f64,
) -> Result<Vec<ProjectionMatrix>> {
    if k < 1 {
        return Err(Error::Parameter("mask family needs k >= 1".into()));
    }
    (0..k)
        .map(|i| build_projection(base_seed.wrapping_add(i as u64), in_dim, out_dim, density))
        .collect()
}

/// Node intensities `b = W a`.
pub fn encode(a: &[f64], w: &ProjectionMatrix) -> Result<Vec<f64>> {
    if a.len() != w.in_dim {
        return Err(Error::Parameter(format!(
            "input has {} entries, projection expects {}",
            a.len(),
            w.in_dim
        )));
    }
    let mut b = vec![0.0; w.out_dim];
    for (i, bi) in b.iter_mut().enumerate() {
        let row = &w.entries[i * w.in_dim..(i + 1) * w.in_dim];
        *bi = row.iter().zip(a).map(|(wij, aj)| wij * aj).sum();
    }
    Ok(b)
}

/// Complex drive per lattice node. Power is `P0 + s*b_n`; the phase
/// alternates by pi on a checkerboard, so adjacent nodes are driven in
/// antiphase.
#[derive(Debug, Clone, PartialEq)]
pub struct PumpPattern {
    n: usize,
    drive: Vec<Complex64>,
    background_power: f64,
    scale: f64,
}

impl PumpPattern {
    /// Wrap a raw drive field (used by experiments that switch individual
    /// nodes off). Background power and scale are recorded as 0 and 1.
    pub fn from_drive(n: usize, drive: Vec<Complex64>) -> Self {
        assert_eq!(drive.len(), n * n, "drive length must be n*n");
        Self {
            n,
            drive,
            background_power: 0.0,
            scale: 1.0,
        }
    }

    pub fn lattice_side(&self) -> usize {
        self.n
    }

    pub fn drive(&self) -> &[Complex64] {
        &self.drive
    }

    pub fn background_power(&self) -> f64 {
        self.background_power
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn power(&self, idx: usize) -> f64 {
        self.drive[idx].norm_sqr()
    }
}

/// Checkerboard sign for node `(row, col)`: +1 on even parity, -1 on odd,
/// i.e. phase 0 or pi exactly.
#[inline]
pub fn checkerboard_sign(row: usize, col: usize) -> f64 {
    if (row + col).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Build the pump field `F_n = sqrt(P0 + s*b_n) * exp(i*pi*((row+col) mod 2))`
/// over an `n`x`n` lattice.
pub fn to_pump(b: &[f64], p0: f64, s: f64, n: usize) -> Result<PumpPattern> {
    if b.len() != n * n {
        return Err(Error::Parameter(format!(
            "{} node intensities for a {n}x{n} lattice",
            b.len()
        )));
    }
    if p0 < 0.0 {
        return Err(Error::Parameter(format!("background power {p0} < 0")));
    }
    if s <= 0.0 {
        return Err(Error::Parameter(format!("pump scale {s} <= 0")));
    }
    if let Some(bad) = b.iter().find(|&&x| x < 0.0) {
        return Err(Error::Parameter(format!("negative node intensity {bad}")));
    }
    let mut drive = Vec::with_capacity(n * n);
    for row in 0..n {
        for col in 0..n {
            let power = p0 + s * b[row * n + col];
            drive.push(Complex64::new(
                power.sqrt() * checkerboard_sign(row, col),
                0.0,
            ));
        }
    }
    Ok(PumpPattern {
        n,
        drive,
        background_power: p0,
        scale: s,
    })
}

/// Uniform pump at power `p` per node with the checkerboard phase; used by
/// response sweeps and the connectivity experiment.
pub fn uniform_pump(p: f64, n: usize) -> Result<PumpPattern> {
    if p < 0.0 {
        return Err(Error::Parameter(format!("pump power {p} < 0")));
    }
    to_pump(&vec![0.0; n * n], p, 1.0, n)
}

/// Write a projection matrix as flat CSV: `out_dim,in_dim` then one
/// row-major line per output row, full double precision.
pub fn write_mask_csv(w: &ProjectionMatrix, path: &Path) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "{},{}", w.out_dim, w.in_dim)?;
    for i in 0..w.out_dim {
        let row: Vec<String> = (0..w.in_dim).map(|j| format!("{}", w.entry(i, j))).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// Read a projection matrix written by [`write_mask_csv`]. Seed and density
/// are not stored in the file; the returned matrix carries seed 0 and the
/// measured nonzero fraction.
pub fn read_mask_csv(path: &Path) -> Result<ProjectionMatrix> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("empty mask file".into()))??;
    let mut dims = header.split(',');
    let out_dim: usize = dims
        .next()
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| Error::Format("bad mask header".into()))?;
    let in_dim: usize = dims
        .next()
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| Error::Format("bad mask header".into()))?;
    let mut entries = Vec::with_capacity(out_dim * in_dim);
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        for field in line.split(',') {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| Error::Format(format!("bad mask entry {field:?}")))?;
            if v < 0.0 {
                return Err(Error::Data(format!("negative mask entry {v}")));
            }
            entries.push(v);
        }
    }
    if entries.len() != out_dim * in_dim {
        return Err(Error::Length(format!(
            "mask file has {} entries, header requires {}",
            entries.len(),
            out_dim * in_dim
        )));
    }
    let nnz = entries.iter().filter(|&&e| e != 0.0).count();
    let density = nnz as f64 / entries.len() as f64;
    Ok(ProjectionMatrix {
        out_dim,
        in_dim,
        entries,
        seed: 0,
        density,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn projection_has_requested_shape() {
        let w = build_projection(42, 16, 64, 0.5).unwrap();
        assert_eq!(w.out_dim(), 64);
        assert_eq!(w.in_dim(), 16);
        assert_eq!(w.entries().len(), 64 * 16);
        let w2 = build_projection(42, 49, 64, 0.5).unwrap();
        assert_eq!((w2.out_dim(), w2.in_dim()), (64, 49));
    }

    #[test]
    fn projection_is_deterministic() {
        let a = build_projection(7, 49, 64, 0.5).unwrap();
        let b = build_projection(7, 49, 64, 0.5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn projection_rejects_bad_density() {
        assert!(matches!(
            build_projection(1, 4, 4, 0.0),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            build_projection(1, 4, 4, 1.5),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn full_density_has_no_zeros() {
        let w = build_projection(3, 10, 10, 1.0).unwrap();
        assert_eq!(w.nonzero_count(), 100);
        assert!(w.entries().iter().all(|&e| e > 0.0 && e <= 1.0));
    }

    #[test]
    fn nonzero_fraction_tracks_declared_density() {
        // One row of entries is the documented tolerance band.
        for seed in [7u64, 8, 9, 10, 11, 12] {
            let w = build_projection(seed, 49, 64, 0.5).unwrap();
            let target = 0.5 * (64 * 49) as f64;
            let slack = 49.0;
            let nnz = w.nonzero_count() as f64;
            assert!(
                (nnz - target).abs() <= slack,
                "seed {seed}: {nnz} nonzeros vs target {target}"
            );
        }
    }

    #[test]
    fn encode_zero_input_gives_zero() {
        let w = build_projection(1, 16, 64, 0.5).unwrap();
        let b = encode(&[0.0; 16], &w).unwrap();
        assert!(b.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn encode_single_entry_matrix() {
        let mut w = build_projection(1, 3, 2, 1.0).unwrap();
        w.entries = vec![0.25, 0.0, 0.0, 0.0, 0.0, 0.0];
        let b = encode(&[2.0, 5.0, 7.0], &w).unwrap();
        assert_eq!(b, vec![0.5, 0.0]);
    }

    #[test]
    fn encode_rejects_dimension_mismatch() {
        let w = build_projection(1, 16, 64, 0.5).unwrap();
        assert!(matches!(encode(&[0.0; 15], &w), Err(Error::Parameter(_))));
    }

    #[test]
    fn pump_of_zero_input_is_uniform_with_alternating_sign() {
        let pump = to_pump(&[0.0; 16], 2.0, 1.0, 4).unwrap();
        for row in 0..4 {
            for col in 0..4 {
                let f = pump.drive()[row * 4 + col];
                assert!((f.norm_sqr() - 2.0).abs() < 1e-15);
                assert_eq!(f.re.signum(), checkerboard_sign(row, col));
                assert_eq!(f.im, 0.0);
            }
        }
    }

    #[test]
    fn adjacent_nodes_differ_by_pi_exactly() {
        let b: Vec<f64> = (0..64).map(|i| f64::from(i) * 0.1).collect();
        let pump = to_pump(&b, 1.0, 2.0, 8).unwrap();
        for row in 0..8 {
            for col in 0..8 {
                let a = pump.drive()[row * 8 + col].arg();
                if col + 1 < 8 {
                    let b = pump.drive()[row * 8 + col + 1].arg();
                    assert_eq!((a - b).abs(), PI);
                }
                if row + 1 < 8 {
                    let b = pump.drive()[(row + 1) * 8 + col].arg();
                    assert_eq!((a - b).abs(), PI);
                }
            }
        }
    }

    #[test]
    fn pump_power_is_affine_in_input() {
        let b: Vec<f64> = (0..16).map(|i| f64::from(i) * 0.37).collect();
        let pump = to_pump(&b, 0.5, 3.0, 4).unwrap();
        for (i, &bi) in b.iter().enumerate() {
            let expected = 0.5 + 3.0 * bi;
            assert!((pump.power(i) - expected).abs() <= 1e-12 * expected.max(1.0));
        }
    }

    #[test]
    fn pump_rejects_negative_intensity() {
        assert!(matches!(
            to_pump(&[0.0, -0.1, 0.0, 0.0], 1.0, 1.0, 2),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn mask_family_counts_and_base_equivalence() {
        let fam = make_mask_family(100, 6, 16, 64, 0.5).unwrap();
        assert_eq!(fam.len(), 6);
        let single = make_mask_family(100, 1, 16, 64, 0.5).unwrap();
        assert_eq!(single[0], build_projection(100, 16, 64, 0.5).unwrap());
        // Derived seeds give distinct matrices.
        for i in 0..6 {
            for j in i + 1..6 {
                assert_ne!(fam[i].entries(), fam[j].entries(), "masks {i} and {j}");
            }
        }
    }

    #[test]
    fn mask_csv_roundtrip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mask.csv");
        let w = build_projection(11, 16, 64, 0.5).unwrap();
        write_mask_csv(&w, &path).unwrap();
        let r = read_mask_csv(&path).unwrap();
        assert_eq!(r.out_dim(), w.out_dim());
        assert_eq!(r.in_dim(), w.in_dim());
        assert_eq!(r.entries(), w.entries());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn encode_is_homogeneous(
                seed in 0u64..1000,
                alpha in 0.0f64..10.0,
                a in proptest::collection::vec(0.0f64..1.0, 16),
            ) {
                let w = build_projection(seed, 16, 32, 0.5).unwrap();
                let b = encode(&a, &w).unwrap();
                let scaled: Vec<f64> = a.iter().map(|x| alpha * x).collect();
                let bs = encode(&scaled, &w).unwrap();
                for (x, y) in b.iter().zip(&bs) {
                    prop_assert!((alpha * x - y).abs() <= 1e-12 * (1.0 + alpha * x.abs()));
                }
            }

            #[test]
            fn encoded_intensities_are_nonnegative(
                seed in 0u64..1000,
                a in proptest::collection::vec(0.0f64..1.0, 16),
            ) {
                let w = build_projection(seed, 16, 16, 0.3).unwrap();
                let b = encode(&a, &w).unwrap();
                prop_assert!(b.iter().all(|&x| x >= 0.0));
                let pump = to_pump(&b, 0.2, 1.7, 4).unwrap();
                prop_assert!((0..16).all(|i| pump.power(i) >= 0.0));
            }

            #[test]
            fn pump_power_matches_projection_affinely(
                seed in 0u64..200,
                a in proptest::collection::vec(0.0f64..1.0, 16),
            ) {
                let w = build_projection(seed, 16, 64, 0.5).unwrap();
                let b = encode(&a, &w).unwrap();
                let pump = to_pump(&b, 0.4, 2.5, 8).unwrap();
                for (i, &bi) in b.iter().enumerate() {
                    let expected = 0.4 + 2.5 * bi;
                    prop_assert!((pump.power(i) - expected).abs() <= 1e-12 * expected.max(1.0));
                }
            }
        }
    }
}
