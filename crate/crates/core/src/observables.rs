//! Open-channel observables for `0 < E < Delta`.
//!
//! Sign convention: `S = exp(-2 i delta)`, so that `delta ~ a k` at low energy
//! and `a = -A(0)` with `A = (S - 1) / (2 i k)`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::{CoxError, Result};
use crate::jost::C64;
use crate::params::TwoChannelParams;

const I: C64 = C64::new(0.0, 1.0);

/// Phase unwrapping anchor, as a fraction of `sqrt(Delta)`.
pub const ANCHOR_FRACTION: f64 = 1e-6;

/// One sample of the open-channel observables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObservableSample {
    pub energy: f64,
    pub k: f64,
    pub s: C64,
    pub delta: f64,
    pub sigma: f64,
}

fn check_k(params: &TwoChannelParams, k: f64) -> Result<f64> {
    let d = params.delta();
    if !(k > 0.0 && k * k < d) {
        return Err(CoxError::EnergyOutOfRange {
            energy: k * k,
            reason: "single open channel needs 0 < k < sqrt(Delta); use smatrix_full above the second threshold",
        });
    }
    Ok((d - k * k).sqrt())
}

/// `S_11(k)` below the second threshold.
pub fn open_channel_s(params: &TwoChannelParams, k: f64) -> Result<C64> {
    let q = check_k(params, k)?;
    let (a1, a2, b, k1) = (params.alpha1(), params.alpha2(), params.beta(), params.kappa1());
    let u = q + a2;
    let k = C64::from(k);
    let num = (k + I * k1) * (I * (k - I * a1) * u - b * b);
    let den = (k - I * k1) * (I * (k + I * a1) * u + b * b);
    Ok(num / den)
}

fn phase_parts(params: &TwoChannelParams, k: f64) -> (f64, f64, f64) {
    let q = (params.delta() - k * k).sqrt();
    let u = q + params.alpha2();
    let x = params.beta().powi(2) - params.alpha1() * u;
    (x, k * u, (k / params.kappa1()).atan())
}

fn principal_phase(params: &TwoChannelParams, k: f64) -> f64 {
    let (x, y, first) = phase_parts(params, k);
    first + (y / x).atan()
}

/// Phase shift on the continuous branch anchored at `k = 1e-6 sqrt(Delta)`.
///
/// The second arctangent can only jump where `x = beta^2 - alpha1 (q + alpha2)`
/// changes sign, and `x` is monotone in `k`, so at most one `pi` correction applies.
pub fn phase_shift(params: &TwoChannelParams, k: f64) -> Result<f64> {
    check_k(params, k)?;
    let pv = principal_phase(params, k);
    if params.beta() == 0.0 || params.alpha1() == 0.0 {
        return Ok(pv);
    }
    let anchor = ANCHOR_FRACTION * params.delta().sqrt();
    let (x0, _, _) = phase_parts(params, anchor);
    let (x, _, _) = phase_parts(params, k);
    // y at the crossing is k beta^2 / alpha1
    let s = params.alpha1().signum();
    let shift = if x0 > 0.0 && x < 0.0 {
        s * PI
    } else if x0 < 0.0 && x > 0.0 {
        -s * PI
    } else {
        0.0
    };
    Ok(pv + shift)
}

/// `1/kappa1 + (sqrt(Delta) + alpha2) / (beta^2 - alpha1 (sqrt(Delta) + alpha2))`.
///
/// Signed infinity on the threshold-state curve; see [`threshold_bound_state`].
pub fn scattering_length(params: &TwoChannelParams) -> f64 {
    let u = params.delta().sqrt() + params.alpha2();
    1.0 / params.kappa1() + u / (params.beta().powi(2) - params.alpha1() * u)
}

/// A zero sits exactly at `k = 0`, where the scattering length diverges.
pub fn threshold_bound_state(params: &TwoChannelParams) -> bool {
    let u = params.delta().sqrt() + params.alpha2();
    params.beta().powi(2) - params.alpha1() * u == 0.0
}

/// Closed-form scattering amplitude, equal to `(S - 1) / (2 i k)`.
pub fn amplitude(params: &TwoChannelParams, k: f64) -> Result<C64> {
    let q = check_k(params, k)?;
    let (a1, a2, b, k1) = (params.alpha1(), params.alpha2(), params.beta(), params.kappa1());
    let u = q + a2;
    let k = C64::from(k);
    let num = u * (a1 - k1) - b * b;
    let den = I * (k - I * k1) * (I * (k + I * a1) * u + b * b);
    Ok(num / den)
}

/// `a_beta(k) = alpha1 - beta^2 / (sqrt(Delta - k^2) + alpha2)`.
pub fn a_beta(params: &TwoChannelParams, k: f64) -> Result<f64> {
    let q = check_k(params, k)?;
    Ok(params.alpha1() - params.beta().powi(2) / (q + params.alpha2()))
}

/// `k cot(delta)` in closed form: `-(a_beta kappa1 + k^2) / (kappa1 - a_beta)`.
///
/// The minus sign goes with `S = exp(-2 i delta)`; the limit at `k -> 0` is `1/a`.
pub fn k_cot_delta(params: &TwoChannelParams, k: f64) -> Result<f64> {
    let ab = a_beta(params, k)?;
    let k1 = params.kappa1();
    if ab == k1 {
        return Err(CoxError::Degenerate(format!(
            "cot(delta) has a pole at k = {k} (a_beta = kappa1)"
        )));
    }
    Ok(-(ab * k1 + k * k) / (k1 - ab))
}

/// `4 pi sin^2(delta) / k^2`; the `E -> 0` limit `4 pi a^2` is returned at `E = 0`.
pub fn cross_section(params: &TwoChannelParams, energy: f64) -> Result<f64> {
    if energy == 0.0 {
        let a = scattering_length(params);
        return Ok(4.0 * PI * a * a);
    }
    if !(energy > 0.0) {
        return Err(CoxError::EnergyOutOfRange {
            energy,
            reason: "cross section needs E >= 0",
        });
    }
    let k = energy.sqrt();
    let d = phase_shift(params, k)?;
    Ok(4.0 * PI * d.sin().powi(2) / (k * k))
}

/// Observables at one energy.
pub fn sample(params: &TwoChannelParams, energy: f64) -> Result<ObservableSample> {
    let k = energy.sqrt();
    let s = open_channel_s(params, k)?;
    let delta = phase_shift(params, k)?;
    Ok(ObservableSample {
        energy,
        k,
        s,
        delta,
        sigma: 4.0 * PI * delta.sin().powi(2) / (k * k),
    })
}

/// `n` energies uniformly inside `(0, Delta)`, endpoints excluded.
pub fn energy_grid(params: &TwoChannelParams, n: usize) -> Vec<f64> {
    let d = params.delta();
    (1..=n).map(|i| d * i as f64 / (n + 1) as f64).collect()
}

/// Observables over an energy grid, in input order.
pub fn scan(params: &TwoChannelParams, energies: &[f64]) -> Result<Vec<ObservableSample>> {
    energies.iter().map(|&e| sample(params, e)).collect()
}

/// `delta(0+)`: `pi/2` with a state exactly at threshold, else `0`.
pub fn threshold_phase(params: &TwoChannelParams) -> f64 {
    if threshold_bound_state(params) {
        FRAC_PI_2
    } else {
        0.0
    }
}
