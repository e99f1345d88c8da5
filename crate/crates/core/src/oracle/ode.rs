//! Direct integration of the two-channel radial equation
//! `psi'' = (V(r) - diag(E - Delta_i)) psi` with the tabulated potential.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Vector2};
use rayon::prelude::*;

use crate::error::{CoxError, Result};
use crate::params::TwoChannelParams;
use crate::potential::FactorizationState;

const RENORMALIZE_ABOVE: f64 = 1e100;
const R_MAX_CAP: f64 = 400.0;
const TAIL_RATIO: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationConfig {
    pub r_max: f64,
    pub n_steps: usize,
}

impl IntegrationConfig {
    pub const DEFAULT_STEPS: usize = 200_000;

    /// `r_max = max(30/kappa1, 30/kappa_closed, 50)`, capped at 400.
    pub fn for_energy(params: &TwoChannelParams, energy: f64) -> Self {
        let closed = (params.delta() - energy).max(0.0).sqrt();
        let mut r_max = (30.0 / params.kappa1()).max(50.0);
        if closed > 0.0 {
            r_max = r_max.max(30.0 / closed);
        }
        Self {
            r_max: r_max.min(R_MAX_CAP),
            n_steps: Self::DEFAULT_STEPS,
        }
    }

    /// Range set by the potential only; used below both thresholds.
    pub fn for_bound_states(params: &TwoChannelParams) -> Self {
        Self {
            r_max: (30.0 / params.kappa1()).clamp(50.0, R_MAX_CAP),
            n_steps: 20_000,
        }
    }

    pub fn with_steps(mut self, n_steps: usize) -> Self {
        self.n_steps = n_steps;
        self
    }

    pub fn step(&self) -> f64 {
        self.r_max / self.n_steps as f64
    }
}

/// Potential sampled on the half-step grid `r_j = j h / 2`.
#[derive(Debug, Clone)]
pub struct PotentialTable {
    params: TwoChannelParams,
    config: IntegrationConfig,
    v: Vec<Matrix2<f64>>,
}

impl PotentialTable {
    pub fn new(params: &TwoChannelParams, config: IntegrationConfig) -> Result<Self> {
        if config.n_steps < 2 || !(config.r_max > 0.0) {
            return Err(CoxError::Integration("need r_max > 0 and at least two steps".into()));
        }
        if !params.is_regular() {
            return Err(CoxError::Irregular {
                min_eigenvalue: params.regularity().min_eigenvalue,
            });
        }
        let state = FactorizationState::new(params.to_general())?;
        let half = 0.5 * config.step();
        let v = (0..=2 * config.n_steps)
            .into_par_iter()
            .map(|j| {
                let m = state.potential_at(j as f64 * half)?;
                Ok(Matrix2::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]))
            })
            .collect::<Result<Vec<_>>>()?;
        let peak = v.iter().map(|m| m.amax()).fold(0.0, f64::max);
        let tail = v.last().map(|m| m.amax()).unwrap_or(0.0);
        if tail > TAIL_RATIO * peak {
            return Err(CoxError::Integration(format!(
                "potential tail {tail:e} at r_max = {} is not negligible (peak {peak:e}); increase r_max",
                config.r_max
            )));
        }
        Ok(Self {
            params: *params,
            config,
            v,
        })
    }

    pub fn params(&self) -> &TwoChannelParams {
        &self.params
    }

    pub fn config(&self) -> &IntegrationConfig {
        &self.config
    }
}

/// Regular solution matrix at `r_max`: columns start with `psi(0) = 0`, `psi'(0) = I`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Solution {
    pub r: f64,
    pub psi: Matrix2<f64>,
    pub dpsi: Matrix2<f64>,
    /// Natural log of the total factor removed by renormalization.
    pub log_scale: f64,
}

pub fn integrate_regular(table: &PotentialTable, energy: f64) -> Result<Solution> {
    let h = table.config.step();
    let shift = Matrix2::from_diagonal(&Vector2::new(energy, energy - table.params.delta()));
    let m_at = |j: usize| table.v[j] - shift;
    let mut y = Matrix2::<f64>::zeros();
    let mut z = Matrix2::<f64>::identity();
    let mut log_scale = 0.0;
    for step in 0..table.config.n_steps {
        let (m0, mh, m1) = (m_at(2 * step), m_at(2 * step + 1), m_at(2 * step + 2));
        let k1y = z;
        let k1z = m0 * y;
        let k2y = z + k1z * (0.5 * h);
        let k2z = mh * (y + k1y * (0.5 * h));
        let k3y = z + k2z * (0.5 * h);
        let k3z = mh * (y + k2y * (0.5 * h));
        let k4y = z + k3z * h;
        let k4z = m1 * (y + k3y * h);
        y += (k1y + k2y * 2.0 + k3y * 2.0 + k4y) * (h / 6.0);
        z += (k1z + k2z * 2.0 + k3z * 2.0 + k4z) * (h / 6.0);
        let norm = y.amax().max(z.amax());
        if !norm.is_finite() {
            return Err(CoxError::Integration(format!(
                "solution blew up at r = {}; use a smaller step",
                (step + 1) as f64 * h
            )));
        }
        if norm > RENORMALIZE_ABOVE {
            y /= norm;
            z /= norm;
            log_scale += norm.ln();
        }
    }
    Ok(Solution {
        r: table.config.r_max,
        psi: y,
        dpsi: z,
        log_scale,
    })
}

/// Reduces an angle to `(-pi/2, pi/2]`.
pub fn wrap_half_pi(x: f64) -> f64 {
    let mut y = x.rem_euclid(PI);
    if y > 0.5 * PI {
        y -= PI;
    }
    y
}

/// Distance between two phases modulo `pi`.
pub fn phase_distance_mod_pi(a: f64, b: f64) -> f64 {
    wrap_half_pi(a - b).abs()
}

/// Phase shift for `0 < E < Delta`, in the convention `S = exp(-2 i delta)`,
/// returned modulo `pi` in `(-pi/2, pi/2]`.
pub fn numeric_phase_shift(table: &PotentialTable, energy: f64) -> Result<f64> {
    if !(energy > 0.0 && energy < table.params.delta()) {
        return Err(CoxError::EnergyOutOfRange {
            energy,
            reason: "the phase-shift oracle needs 0 < E < Delta",
        });
    }
    let sol = integrate_regular(table, energy)?;
    let k = energy.sqrt();
    let kc = (table.params.delta() - energy).sqrt();
    let growing = |j: usize| kc * sol.psi[(1, j)] + sol.dpsi[(1, j)];
    let (g1, g2) = (growing(0), growing(1));
    // c = (g2, -g1) removes exp(+kc r) from the closed channel
    let comb = |m: &Matrix2<f64>, row: usize| g2 * m[(row, 0)] - g1 * m[(row, 1)];
    let closed = comb(&sol.psi, 1).abs();
    let closed_scale = (g2 * sol.psi[(1, 0)]).abs() + (g1 * sol.psi[(1, 1)]).abs();
    if closed_scale > 0.0 && closed > 1e-8 * closed_scale {
        return Err(CoxError::Integration(format!(
            "closed-channel growth not suppressed (relative {:e}); increase r_max",
            closed / closed_scale
        )));
    }
    let u = comb(&sol.psi, 0);
    let du = comb(&sol.dpsi, 0);
    if u == 0.0 && du == 0.0 {
        return Err(CoxError::Integration("open-channel component vanished".into()));
    }
    let standard = (k * u).atan2(du) - k * sol.r;
    Ok(wrap_half_pi(-standard))
}

/// Scattering length from Richardson extrapolation of `tan(delta)/k` to `k = 0`.
pub fn numeric_scattering_length(table: &PotentialTable) -> Result<f64> {
    let sd = table.params.delta().sqrt();
    let ks = [1e-3 * sd, 5e-4 * sd, 2.5e-4 * sd];
    let f = ks
        .iter()
        .map(|&k| numeric_phase_shift(table, k * k).map(|d| d.tan() / k))
        .collect::<Result<Vec<_>>>()?;
    // error terms are even in k
    let r1 = (4.0 * f[1] - f[0]) / 3.0;
    let r2 = (4.0 * f[2] - f[1]) / 3.0;
    Ok((16.0 * r2 - r1) / 15.0)
}

/// Bound-state energies found in a window, with any warnings raised.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundStateScan {
    pub energies: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Normalized determinant of the growing coefficients of both closed channels.
fn growth_determinant(table: &PotentialTable, lambda: f64) -> Result<f64> {
    let energy = -lambda * lambda;
    let sol = integrate_regular(table, energy)?;
    let kc = [lambda, (table.params.delta() + lambda * lambda).sqrt()];
    let mut g = Matrix2::from_fn(|i, j| kc[i] * sol.psi[(i, j)] + sol.dpsi[(i, j)]);
    // positive row scalings keep the sign and put both channels on the same footing
    for i in 0..2 {
        let n = g.row(i).norm();
        if n == 0.0 || !n.is_normal() {
            return Err(CoxError::Integration(
                "growing coefficients underflowed; reduce r_max".into(),
            ));
        }
        g.row_mut(i).scale_mut(1.0 / n);
    }
    Ok(g.determinant() / (g.column(0).norm() * g.column(1).norm()))
}

/// Bound states with energies in `window = (e_lo, e_hi)`, both non-positive.
///
/// Scans `lambda = sqrt(-E)` uniformly with `n_scan` points and bisects each
/// sign change to `1e-10` relative in the energy.
pub fn numeric_bound_states(table: &PotentialTable, window: (f64, f64), n_scan: usize) -> Result<BoundStateScan> {
    let (mut e_lo, e_hi) = window;
    if !(e_lo < e_hi) || e_hi > 0.0 {
        return Err(CoxError::InvalidParameter(
            "bound-state window must satisfy e_lo < e_hi <= 0".into(),
        ));
    }
    let mut warnings = Vec::new();
    let limit = -table.params.kappa1().powi(2);
    if e_lo <= limit {
        e_lo = limit;
        warnings.push(format!(
            "window truncated at the regularity limit E = -kappa1^2 = {limit}"
        ));
    }
    let (l_lo, l_hi) = ((-e_hi).sqrt(), (-e_lo).sqrt());
    let n = n_scan.max(2);
    let grid: Vec<f64> = (0..n)
        .map(|i| l_lo + (l_hi - l_lo) * i as f64 / (n - 1) as f64)
        .collect();
    let dets = grid
        .par_iter()
        .map(|&l| growth_determinant(table, l))
        .collect::<Result<Vec<_>>>()?;

    let mut energies = Vec::new();
    if l_lo == 0.0 && dets[0].abs() < 1e-6 {
        energies.push(0.0);
    }
    for i in 0..n - 1 {
        let (mut a, mut b) = (grid[i], grid[i + 1]);
        let (mut da, db) = (dets[i], dets[i + 1]);
        if i == 0 && energies.first() == Some(&0.0) {
            continue;
        }
        if da == 0.0 {
            energies.push(-a * a);
            continue;
        }
        if da * db >= 0.0 {
            continue;
        }
        loop {
            let mid = 0.5 * (a + b);
            if (b * b - a * a) <= 1e-10 * mid * mid || mid == a || mid == b {
                break;
            }
            let dm = growth_determinant(table, mid)?;
            if dm == 0.0 {
                a = mid;
                b = mid;
                break;
            }
            if dm * da < 0.0 {
                b = mid;
            } else {
                a = mid;
                da = dm;
            }
        }
        let lam = 0.5 * (a + b);
        energies.push(-lam * lam);
    }
    energies.sort_by(|x, y| y.total_cmp(x));
    Ok(BoundStateScan { energies, warnings })
}
