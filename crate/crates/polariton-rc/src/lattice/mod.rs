//! Driven-dissipative Kerr lattice: coupled-mode equations of motion, RK4
//! time stepping, steady-state solver and intensity readout.
//!
//! The model is a square lattice of nonlinear nodes in the rotating frame of
//! the pump,
//!
//! ```text
//! i dpsi_n/dt = (-delta - i*gamma/2) psi_n
//!               - j  * sum_{m in NN(n)}  psi_m
//!               - j2 * sum_{m in NN2(n)} psi_m
//!               + g |psi_n|^2 psi_n + F_n
//! ```
//!
//! with edge-adjacent neighbors `NN`, diagonal neighbors `NN2` and open
//! boundaries. Units are dimensionless with the loss rate as the frequency
//! scale (`gamma = 1` sets the time unit; detuning, hoppings, Kerr shift and
//! powers are quoted in units of gamma). In polariton lattices the lifetime
//! `1/gamma` is of order picoseconds, so the ~40/gamma settling times seen
//! here correspond to a few tens of ps.

mod bistability;
mod camera;
mod connectivity;

pub use bistability::{response_curve, single_node_roots, SweepDirection};
pub use camera::{quad_dev_image, render_camera};
pub use connectivity::{connectivity_experiment, ConnectivityCurves};

use crate::encoder::PumpPattern;
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Physical and numerical parameters of the lattice model.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeParams {
    /// Lattice side; the array has `n * n` nodes.
    pub n: usize,
    /// Pump-resonance detuning (units of gamma).
    pub delta: f64,
    /// Loss rate; must be positive.
    pub gamma: f64,
    /// Kerr coefficient per intensity unit.
    pub g: f64,
    /// Nearest-neighbor (edge) hopping.
    pub j: f64,
    /// Second-neighbor (diagonal) hopping.
    pub j2: f64,
    /// Integration step.
    pub dt: f64,
    /// Maximum integration time for the steady-state solver.
    pub t_max: f64,
    /// Steady-state residual tolerance.
    pub tol: f64,
}

impl Default for LatticeParams {
    fn default() -> Self {
        Self {
            n: 8,
            delta: 1.5,
            gamma: 1.0,
            g: 0.01,
            j: 0.3,
            j2: 0.15,
            dt: 0.01,
            t_max: 200.0,
            tol: 1e-9,
        }
    }
}

impl LatticeParams {
    pub fn nodes(&self) -> usize {
        self.n * self.n
    }

    /// Check parameter invariants, including the explicit-stepper stability
    /// guard `dt * max(|delta|, gamma, |j|) < 0.5`.
    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::Parameter("lattice side must be >= 1".into()));
        }
        if self.gamma <= 0.0 {
            return Err(Error::Parameter(format!("gamma {} <= 0", self.gamma)));
        }
        if self.dt <= 0.0 {
            return Err(Error::Parameter(format!("dt {} <= 0", self.dt)));
        }
        if self.g < 0.0 {
            return Err(Error::Parameter(format!("kerr coefficient {} < 0", self.g)));
        }
        if self.t_max <= 0.0 || self.tol <= 0.0 {
            return Err(Error::Parameter("t_max and tol must be positive".into()));
        }
        let rate = self.delta.abs().max(self.gamma).max(self.j.abs());
        if self.dt * rate >= 0.5 {
            return Err(Error::Parameter(format!(
                "dt {} too large for rates up to {rate} (dt*rate must stay below 0.5)",
                self.dt
            )));
        }
        Ok(())
    }
}

/// N x N complex node amplitudes, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexField {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::ZERO; n * n],
        }
    }

    pub fn from_vec(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Parameter(format!(
                "{} amplitudes for a {n}x{n} field",
                data.len()
            )));
        }
        Ok(Self { n, data })
    }

    pub fn lattice_side(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.n + col]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Total norm `sum |psi_n|^2`.
    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Node intensities `|psi_n|^2`, row-major.
    pub fn intensities(&self) -> Vec<f64> {
        self.data.iter().map(|z| z.norm_sqr()).collect()
    }
}

/// Transmission intensities `I_n = |psi_n|^2`.
pub fn transmission(psi: &ComplexField) -> Vec<f64> {
    psi.intensities()
}

/// Evaluate the equations of motion into `out`. No allocation; callers in
/// the integrator loop reuse buffers.
fn rhs_into(psi: &[Complex64], pump: &[Complex64], p: &LatticeParams, out: &mut [Complex64]) {
    let n = p.n;
    let linear = Complex64::new(-p.delta, -p.gamma / 2.0);
    for row in 0..n {
        for col in 0..n {
            let idx = row * n + col;
            let z = psi[idx];

            let mut hop = Complex64::ZERO;
            if col > 0 {
                hop += psi[idx - 1];
            }
            if col + 1 < n {
                hop += psi[idx + 1];
            }
            if row > 0 {
                hop += psi[idx - n];
            }
            if row + 1 < n {
                hop += psi[idx + n];
            }

            let mut hop2 = Complex64::ZERO;
            if row > 0 && col > 0 {
                hop2 += psi[idx - n - 1];
            }
            if row > 0 && col + 1 < n {
                hop2 += psi[idx - n + 1];
            }
            if row + 1 < n && col > 0 {
                hop2 += psi[idx + n - 1];
            }
            if row + 1 < n && col + 1 < n {
                hop2 += psi[idx + n + 1];
            }

            let acc = linear * z - p.j * hop - p.j2 * hop2
                + p.g * z.norm_sqr() * z
                + pump[idx];
            // i dpsi/dt = acc  =>  dpsi/dt = -i * acc
            out[idx] = Complex64::new(acc.im, -acc.re);
        }
    }
}

/// Time derivative of the field under the given pump and parameters.
pub fn rhs(psi: &ComplexField, pump: &PumpPattern, p: &LatticeParams) -> Result<ComplexField> {
    if psi.n != p.n || pump.lattice_side() != p.n {
        return Err(Error::Parameter(format!(
            "shape mismatch: field {}x{}, pump {}x{}, params {}x{}",
            psi.n,
            psi.n,
            pump.lattice_side(),
            pump.lattice_side(),
            p.n,
            p.n
        )));
    }
    let mut out = ComplexField::zeros(p.n);
    rhs_into(&psi.data, pump.drive(), p, &mut out.data);
    Ok(out)
}

/// Scratch buffers for the classical RK4 stepper.
struct Rk4Workspace {
    k1: Vec<Complex64>,
    k2: Vec<Complex64>,
    k3: Vec<Complex64>,
    k4: Vec<Complex64>,
    tmp: Vec<Complex64>,
}

impl Rk4Workspace {
    fn new(nodes: usize) -> Self {
        let z = vec![Complex64::ZERO; nodes];
        Self {
            k1: z.clone(),
            k2: z.clone(),
            k3: z.clone(),
            k4: z.clone(),
            tmp: z,
        }
    }

    /// One RK4 step of size `dt`; `ws.k1` must already hold `rhs(psi)`.
    #[allow(clippy::needless_range_loop)] // lockstep over five buffers
    fn step_with_k1(
        &mut self,
        psi: &mut [Complex64],
        pump: &[Complex64],
        p: &LatticeParams,
        dt: f64,
    ) {
        let half = dt / 2.0;
        for i in 0..psi.len() {
            self.tmp[i] = psi[i] + half * self.k1[i];
        }
        rhs_into(&self.tmp, pump, p, &mut self.k2);
        for i in 0..psi.len() {
            self.tmp[i] = psi[i] + half * self.k2[i];
        }
        rhs_into(&self.tmp, pump, p, &mut self.k3);
        for i in 0..psi.len() {
            self.tmp[i] = psi[i] + dt * self.k3[i];
        }
        rhs_into(&self.tmp, pump, p, &mut self.k4);
        let w = dt / 6.0;
        for i in 0..psi.len() {
            psi[i] += w * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
        }
    }
}

/// One classical 4th-order Runge-Kutta step.
pub fn rk4_step(
    psi: &ComplexField,
    pump: &PumpPattern,
    p: &LatticeParams,
    dt: f64,
) -> Result<ComplexField> {
    if psi.n != p.n || pump.lattice_side() != p.n {
        return Err(Error::Parameter("shape mismatch in rk4_step".into()));
    }
    let rate = p.delta.abs().max(p.gamma.abs()).max(p.j.abs());
    if dt <= 0.0 || dt * rate >= 0.5 {
        return Err(Error::Parameter(format!(
            "dt {dt} outside the stability guard for rates up to {rate}"
        )));
    }
    let mut out = psi.clone();
    let mut ws = Rk4Workspace::new(p.nodes());
    rhs_into(&out.data, pump.drive(), p, &mut ws.k1);
    ws.step_with_k1(&mut out.data, pump.drive(), p, dt);
    if !out.is_finite() {
        return Err(Error::Divergence(
            "rk4 step produced a non-finite amplitude (dt too large?)".into(),
        ));
    }
    Ok(out)
}

/// Result of driving the lattice to its long-time state.
#[derive(Debug, Clone)]
pub struct SteadyOutcome {
    /// Field at the stopping time.
    pub field: ComplexField,
    /// True if the residual dropped below tolerance before `t_max`.
    pub converged: bool,
    /// Time at which integration stopped.
    pub t_elapsed: f64,
    /// Output intensities: `|psi|^2` of the fixed point when converged,
    /// otherwise the time-averaged intensity over the final 10% of `t_max`
    /// (the camera integrates over limit cycles).
    pub intensity: Vec<f64>,
}

/// Integrate from `psi0` until `max_n |dpsi_n/dt| < tol * max(1, max_n |psi_n|)`
/// or `t_max` is reached. Non-convergence is reported, not an error;
/// non-finite amplitudes abort with a divergence error.
pub fn evolve_to_steady(
    psi0: &ComplexField,
    pump: &PumpPattern,
    p: &LatticeParams,
) -> Result<SteadyOutcome> {
    p.validate()?;
    if psi0.n != p.n || pump.lattice_side() != p.n {
        return Err(Error::Parameter("shape mismatch in evolve_to_steady".into()));
    }
    if !psi0.is_finite() {
        return Err(Error::Parameter("initial field has non-finite entries".into()));
    }

    let nodes = p.nodes();
    let mut psi = psi0.clone();
    let mut ws = Rk4Workspace::new(nodes);
    let mut t = 0.0;

    // Averaging window for non-converged (limit-cycle) runs.
    let window_start = 0.9 * p.t_max;
    let mut avg = vec![0.0; nodes];
    let mut avg_count = 0u64;

    loop {
        // k1 = rhs(psi) doubles as the residual for the convergence test,
        // so the check adds no extra derivative evaluations.
        rhs_into(&psi.data, pump.drive(), p, &mut ws.k1);
        let mut res = 0.0f64;
        let mut amp = 0.0f64;
        let mut finite = true;
        for i in 0..nodes {
            let r = ws.k1[i].norm();
            let a = psi.data[i].norm();
            // f64::max would silently ignore NaN, so track finiteness
            // explicitly.
            finite &= r.is_finite() && a.is_finite();
            res = res.max(r);
            amp = amp.max(a);
        }
        if !finite {
            return Err(Error::Divergence(format!(
                "non-finite amplitude at t = {t:.3} (dt too large?)"
            )));
        }
        if res < p.tol * amp.max(1.0) {
            let intensity = psi.intensities();
            return Ok(SteadyOutcome {
                field: psi,
                converged: true,
                t_elapsed: t,
                intensity,
            });
        }
        if t >= p.t_max {
            let intensity = if avg_count > 0 {
                avg.iter().map(|&s| s / avg_count as f64).collect()
            } else {
                psi.intensities()
            };
            return Ok(SteadyOutcome {
                field: psi,
                converged: false,
                t_elapsed: t,
                intensity,
            });
        }

        ws.step_with_k1(&mut psi.data, pump.drive(), p, p.dt);
        t += p.dt;

        if t >= window_start {
            for (acc, z) in avg.iter_mut().zip(&psi.data) {
                *acc += z.norm_sqr();
            }
            avg_count += 1;
        }
    }
}
