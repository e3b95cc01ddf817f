//! Single-node steady-state roots and hysteresis-capable power sweeps.
//!
//! A single driven Kerr node has steady intensities `n` solving
//!
//! ```text
//! n * [ (g*n - delta)^2 + gamma^2/4 ] = |F|^2
//! ```
//!
//! a cubic in `n` with one, two (degenerate) or three nonnegative roots.
//! Three roots appear only for `delta > sqrt(3)*gamma/2`; the outer two are
//! the stable branches of the bistable S-curve.

use super::{evolve_to_steady, ComplexField, LatticeParams};
use crate::encoder::uniform_pump;
use crate::error::Result;

/// Sweep orientation for [`response_curve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepDirection {
    /// Ascending drive power, warm-started from the low branch.
    Up,
    /// Descending drive power, warm-started from the high branch.
    Down,
}

/// All real nonnegative steady intensities of a single node at the given
/// drive power, ascending. Uses the closed form for `g = 0` and bracketed
/// bisection plus Newton polishing otherwise.
pub fn single_node_roots(p: &LatticeParams, drive_power: f64) -> Vec<f64> {
    let (delta, gamma, g) = (p.delta, p.gamma, p.g);
    let s = drive_power;
    let lorentz = delta * delta + gamma * gamma / 4.0;
    if s == 0.0 {
        return vec![0.0];
    }
    if g == 0.0 {
        return vec![s / lorentz];
    }

    // Monic cubic x^3 + a x^2 + b x + c.
    let a = -2.0 * delta / g;
    let b = lorentz / (g * g);
    let c = -s / (g * g);
    let f = |x: f64| ((x + a) * x + b) * x + c;

    // Upper bound: f is eventually positive; double until past every root.
    let mut ub = 1.0 + a.abs().max(b.abs()).max(c.abs());
    while f(ub) <= 0.0 {
        ub *= 2.0;
    }

    let mut roots = Vec::with_capacity(3);
    let disc = a * a - 3.0 * b; // sign decides whether f has turning points
    if disc <= 0.0 {
        roots.push(bisect(f, 0.0, ub));
    } else {
        let sq = disc.sqrt();
        let x_lo = (-a - sq) / 3.0; // local max
        let x_hi = (-a + sq) / 3.0; // local min
        let f_lo = f(x_lo);
        let f_hi = f(x_hi);
        // f(0) = c < 0 for s > 0, so the leftmost sign change is after 0.
        if f_lo > 0.0 && f_hi < 0.0 {
            roots.push(bisect(f, 0.0, x_lo));
            roots.push(bisect(f, x_lo, x_hi));
            roots.push(bisect(f, x_hi, ub));
        } else if f_lo > 0.0 && f_hi == 0.0 {
            roots.push(bisect(f, 0.0, x_lo));
            roots.push(x_hi);
        } else if f_lo == 0.0 {
            roots.push(x_lo);
            roots.push(bisect(f, x_hi.max(x_lo), ub));
        } else if f_lo > 0.0 {
            roots.push(bisect(f, 0.0, x_lo));
        } else {
            roots.push(bisect(f, x_hi.max(0.0), ub));
        }
    }

    // Newton polish against the original scaled residual.
    for r in roots.iter_mut() {
        for _ in 0..4 {
            let fr = ((*r + a) * *r + b) * *r + c;
            let dfr = (3.0 * *r + 2.0 * a) * *r + b;
            if dfr.abs() > 0.0 {
                let step = fr / dfr;
                if step.is_finite() {
                    *r -= step;
                }
            }
        }
        if *r < 0.0 && *r > -1e-12 {
            *r = 0.0;
        }
    }
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    roots.dedup_by(|x, y| (*x - *y).abs() <= 1e-9 * (1.0 + y.abs()));
    roots
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let f_lo = f(lo);
    if f_lo == 0.0 {
        return lo;
    }
    let rising = f_lo < 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == rising {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Steady output intensity versus drive power, sweeping through the supplied
/// ascending powers in the given direction. Each point warm-starts from the
/// previous steady field, so bistable parameters trace hysteresis branches.
/// Returns `(input power, mean output intensity)` in sweep order.
pub fn response_curve(
    p: &LatticeParams,
    drive_powers: &[f64],
    sweep: SweepDirection,
) -> Result<Vec<(f64, f64)>> {
    p.validate()?;
    if drive_powers.windows(2).any(|w| w[0] > w[1]) {
        return Err(crate::error::Error::Parameter(
            "drive powers must be ascending".into(),
        ));
    }
    if let Some(&neg) = drive_powers.iter().find(|&&x| x < 0.0) {
        return Err(crate::error::Error::Parameter(format!(
            "negative drive power {neg}"
        )));
    }
    let order: Vec<f64> = match sweep {
        SweepDirection::Up => drive_powers.to_vec(),
        SweepDirection::Down => drive_powers.iter().rev().copied().collect(),
    };
    let mut curve = Vec::with_capacity(order.len());
    let mut psi = ComplexField::zeros(p.n);
    for &power in &order {
        let pump = uniform_pump(power, p.n)?;
        let out = evolve_to_steady(&psi, &pump, p)?;
        let mean: f64 = out.intensity.iter().sum::<f64>() / out.intensity.len() as f64;
        curve.push((power, mean));
        psi = out.field;
    }
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node(delta: f64, gamma: f64, g: f64) -> LatticeParams {
        LatticeParams {
            n: 1,
            delta,
            gamma,
            g,
            j: 0.0,
            j2: 0.0,
            dt: 0.01,
            t_max: 500.0,
            tol: 1e-11,
        }
    }

    /// Independent oracle: count sign changes of the cubic on a fine grid.
    /// A grid point landing exactly on a root counts once.
    fn scan_roots(p: &LatticeParams, s: f64, x_max: f64, steps: usize) -> Vec<f64> {
        let f = |x: f64| x * ((p.g * x - p.delta).powi(2) + p.gamma * p.gamma / 4.0) - s;
        let sign = |v: f64| {
            if v > 0.0 {
                1i8
            } else if v < 0.0 {
                -1
            } else {
                0
            }
        };
        let mut roots = Vec::new();
        let mut prev_x = 0.0;
        let mut prev_sign = sign(f(0.0));
        if prev_sign == 0 {
            roots.push(0.0);
        }
        for k in 1..=steps {
            let x = x_max * k as f64 / steps as f64;
            let cur_sign = sign(f(x));
            if cur_sign == 0 {
                roots.push(x);
            } else if prev_sign != 0 && cur_sign != prev_sign {
                roots.push(0.5 * (prev_x + x));
            }
            prev_x = x;
            prev_sign = cur_sign;
        }
        roots
    }

    #[test]
    fn zero_drive_has_only_the_dark_root() {
        assert_eq!(single_node_roots(&node(2.0, 1.0, 0.05), 0.0), vec![0.0]);
    }

    #[test]
    fn linear_node_has_the_lorentzian_root() {
        let p = node(1.5, 1.0, 0.0);
        let roots = single_node_roots(&p, 3.0);
        assert_eq!(roots.len(), 1);
        let expected = 3.0 / (1.5 * 1.5 + 0.25);
        assert!((roots[0] - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn bistable_window_exists_at_delta_2gamma_and_not_at_zero_detuning() {
        let p = node(2.0, 1.0, 0.05);
        let mut windows = 0usize;
        for k in 1..400 {
            let s = 0.05 * k as f64;
            let roots = single_node_roots(&p, s);
            let scanned = scan_roots(&p, s, 200.0, 40_000);
            assert_eq!(
                roots.len(),
                scanned.len(),
                "root count mismatch vs scan at s = {s}"
            );
            for (r, approx) in roots.iter().zip(&scanned) {
                assert!((r - approx).abs() < 1e-2 * (1.0 + r), "s={s}: {r} vs {approx}");
            }
            if roots.len() == 3 {
                windows += 1;
            }
        }
        assert!(windows > 0, "no three-root drive interval found");

        let flat = node(0.0, 1.0, 0.05);
        for k in 1..200 {
            let s = 0.1 * k as f64;
            assert_eq!(single_node_roots(&flat, s).len(), 1, "s = {s}");
        }
    }

    #[test]
    fn roots_satisfy_the_steady_state_equation() {
        let p = node(2.0, 1.0, 0.05);
        for &s in &[0.5, 2.0, 8.0, 20.0, 60.0] {
            for r in single_node_roots(&p, s) {
                let lhs = r * ((p.g * r - p.delta).powi(2) + 0.25);
                assert!(
                    (lhs - s).abs() <= 1e-9 * s.max(1.0),
                    "s={s}: residual {}",
                    (lhs - s).abs()
                );
            }
        }
    }

    #[test]
    fn linear_response_curve_has_lorentzian_slope() {
        let p = node(1.5, 1.0, 0.0);
        let powers: Vec<f64> = (0..=10).map(|k| 0.5 * k as f64).collect();
        let curve = response_curve(&p, &powers, SweepDirection::Up).unwrap();
        let slope = 1.0 / (p.delta * p.delta + p.gamma * p.gamma / 4.0);
        for &(input, output) in &curve {
            assert!((output - slope * input).abs() <= 1e-8 * (1.0 + input));
        }
    }

    #[test]
    fn empty_drive_list_yields_empty_curve() {
        let p = node(1.5, 1.0, 0.0);
        assert!(response_curve(&p, &[], SweepDirection::Up)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn unsorted_drive_list_is_rejected() {
        let p = node(1.5, 1.0, 0.0);
        assert!(response_curve(&p, &[1.0, 0.5], SweepDirection::Up).is_err());
    }

    #[test]
    fn up_and_down_sweeps_agree_with_the_root_oracle() {
        let mut p = node(2.0, 1.0, 0.05);
        p.t_max = 2000.0;
        // The three-root window for these parameters is roughly s in
        // (9.8, 27.3); the scan must straddle both fold points so each
        // sweep direction can lock onto its own branch.
        let powers: Vec<f64> = (0..=68).map(|k| 1.0 + 0.5 * k as f64).collect();
        let up = response_curve(&p, &powers, SweepDirection::Up).unwrap();
        let down = response_curve(&p, &powers, SweepDirection::Down).unwrap();
        let mut hysteresis = false;
        for (&(s_up, i_up), &(s_dn, i_dn)) in up.iter().zip(down.iter().rev()) {
            assert_eq!(s_up, s_dn);
            let roots = single_node_roots(&p, s_up);
            let near = |x: f64| {
                roots
                    .iter()
                    .any(|r| (x - r).abs() <= 1e-6 * (1.0 + r.abs()))
            };
            assert!(near(i_up), "up-sweep intensity {i_up} off-branch at {s_up}");
            assert!(near(i_dn), "down-sweep intensity {i_dn} off-branch at {s_dn}");
            if (i_up - i_dn).abs() > 1e-3 * (1.0 + i_up.abs()) {
                hysteresis = true;
            }
        }
        assert!(hysteresis, "no hysteresis across the bistable window");
    }
}
