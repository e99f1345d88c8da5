//! Magnetic-field dependence: linear threshold `Delta(B)`, scattering length
//! near a Feshbach resonance, parameter fit, and continuation of the zeros in `B`.

use serde::{Deserialize, Serialize};

use crate::error::{CoxError, Result};
use crate::jost::{find_zeros, SpectralZero, ZeroKind, C64};
use crate::observables::scattering_length;
use crate::params::TwoChannelParams;

/// Physical constants (CODATA 2018) and the reduced energy unit.
pub mod units {
    pub const HBAR: f64 = 1.054_571_817e-34;
    pub const PLANCK: f64 = 6.626_070_15e-34;
    pub const BOHR_RADIUS: f64 = 5.291_772_109_03e-11;
    pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
    /// Mass of a rubidium-85 atom in atomic mass units.
    pub const RB85_MASS_U: f64 = 84.911_789_738;

    /// `hbar^2 / (2 mu a0^2)` in MHz for two identical atoms of mass `mass_u`
    /// (reduced mass `mu = m / 2`), i.e. the size of `1 a0^-2` with `hbar = 2 mu = 1`.
    pub fn energy_unit_mhz(mass_u: f64) -> f64 {
        let mu = 0.5 * mass_u * ATOMIC_MASS_UNIT;
        HBAR * HBAR / (2.0 * mu * BOHR_RADIUS * BOHR_RADIUS) / PLANCK * 1e-6
    }
}

/// `Delta(B) = delta0 + mu_mag (B - b0)` in reduced energy units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldModel {
    pub delta0: f64,
    pub mu_mag: f64,
    pub b0: f64,
    /// Size of one reduced energy unit in the external unit, when converted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit_conversion: Option<f64>,
}

impl FieldModel {
    pub fn new(delta0: f64, mu_mag: f64, b0: f64) -> Self {
        Self {
            delta0,
            mu_mag,
            b0,
            unit_conversion: None,
        }
    }

    /// From an external energy unit (e.g. MHz); `energy_unit` is one reduced unit expressed in it.
    pub fn from_external(delta0: f64, mu_mag: f64, b0: f64, energy_unit: f64) -> Self {
        Self {
            delta0: delta0 / energy_unit,
            mu_mag: mu_mag / energy_unit,
            b0,
            unit_conversion: Some(energy_unit),
        }
    }

    pub fn delta_unchecked(&self, b: f64) -> f64 {
        self.delta0 + self.mu_mag * (b - self.b0)
    }

    pub fn delta_of_b(&self, b: f64) -> Result<f64> {
        let delta = self.delta_unchecked(b);
        if !(delta > 0.0) {
            return Err(CoxError::OutOfWindow { b, delta });
        }
        Ok(delta)
    }

    /// Field at which `Delta(B) = delta`.
    pub fn field_at(&self, delta: f64) -> f64 {
        self.b0 + (delta - self.delta0) / self.mu_mag
    }

    /// `params` with the threshold moved to `Delta(B)`.
    pub fn params_at(&self, params: &TwoChannelParams, b: f64) -> Result<TwoChannelParams> {
        params.with_delta(self.delta_of_b(b)?)
    }
}

/// Threshold `Delta_0` at which the scattering length diverges:
/// `sqrt(Delta_0) = (beta^2 - alpha1 alpha2) / alpha1`.
pub fn resonance_field_threshold(params: &TwoChannelParams) -> Result<f64> {
    let a1 = params.alpha1();
    if a1 == 0.0 {
        return Err(CoxError::NoMagneticResonance("alpha1 = 0".into()));
    }
    let root = (params.beta().powi(2) - a1 * params.alpha2()) / a1;
    if !(root > 0.0) {
        return Err(CoxError::NoMagneticResonance(format!(
            "sqrt(Delta_0) = {root} is not positive"
        )));
    }
    Ok(root * root)
}

/// Resonance position `B_0` of `params` in `model`.
pub fn resonance_field(params: &TwoChannelParams, model: &FieldModel) -> Result<f64> {
    Ok(model.field_at(resonance_field_threshold(params)?))
}

/// Background scattering length `1/kappa1 - 1/alpha1` (infinite for `alpha1 = 0`).
pub fn abg(params: &TwoChannelParams) -> f64 {
    1.0 / params.kappa1() - 1.0 / params.alpha1()
}

/// Width `Gamma_B = 2 kappa1 sqrt(Delta_0) (sqrt(Delta_0) + alpha2) / (mu_mag (alpha1 - kappa1))`.
pub fn width_gamma_b(params: &TwoChannelParams, model: &FieldModel) -> Result<f64> {
    let s0 = resonance_field_threshold(params)?.sqrt();
    let den = model.mu_mag * (params.alpha1() - params.kappa1());
    if den == 0.0 {
        return Err(CoxError::Degenerate(
            "width undefined for mu_mag = 0 or alpha1 = kappa1".into(),
        ));
    }
    Ok(2.0 * params.kappa1() * s0 * (s0 + params.alpha2()) / den)
}

/// Exact scattering length at field `b`.
pub fn a_of_b(params: &TwoChannelParams, model: &FieldModel, b: f64) -> Result<f64> {
    Ok(scattering_length(&model.params_at(params, b)?))
}

/// `a_bg (1 - Gamma_B / (B - B_0))`.
pub fn approx_a_of_b(a_bg: f64, b0: f64, gamma_b: f64, b: f64) -> f64 {
    a_bg * (1.0 - gamma_b / (b - b0))
}

/// Measured resonance data, energies in reduced units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeshbachData {
    pub a_bg: f64,
    pub b0: f64,
    pub gamma_b: f64,
    /// `Delta(B)` with `b0` the resonance position.
    pub field: FieldModel,
    /// Free choice: `> 0` for a virtual state, `< 0` for a bound state near threshold.
    pub alpha1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeshbachFit {
    pub params: TwoChannelParams,
    pub field: FieldModel,
    pub warnings: Vec<String>,
}

/// Parameters reproducing `a_bg`, `B_0` and `Gamma_B`.
///
/// `kappa1 = alpha1 / (1 + a_bg alpha1)`, then `alpha2` from `a(B_0 + Gamma_B) = 0`,
/// then `beta^2 = alpha1 (alpha2 + sqrt(Delta_0))`.
pub fn fit_from_feshbach_data(data: &FeshbachData, window: Option<(f64, f64)>) -> Result<FeshbachFit> {
    let a1 = data.alpha1;
    if a1 == 0.0 || !a1.is_finite() {
        return Err(CoxError::InvalidParameter("alpha1 must be nonzero".into()));
    }
    let kappa1 = a1 / (1.0 + data.a_bg * a1);
    if !(kappa1 > 0.0) {
        return Err(CoxError::Infeasible(format!(
            "kappa1 = alpha1 / (1 + a_bg alpha1) = {kappa1} is not positive"
        )));
    }
    let field = FieldModel {
        b0: data.b0,
        ..data.field
    };
    let s0 = field.delta_of_b(data.b0)?.sqrt();
    let sg = field.delta_of_b(data.b0 + data.gamma_b)?.sqrt();
    let a2 = a1 * (sg - s0) / kappa1 - sg;
    let beta2 = a1 * (a2 + s0);
    if !(beta2 >= 0.0) {
        return Err(CoxError::Infeasible(format!(
            "beta^2 = alpha1 (alpha2 + sqrt(Delta_0)) = {beta2} is negative"
        )));
    }
    let params = TwoChannelParams::new(a1, a2, beta2.sqrt(), s0 * s0, kappa1)?;
    let mut warnings = Vec::new();
    if !params.is_regular() {
        return Err(CoxError::Irregular {
            min_eigenvalue: params.regularity().min_eigenvalue,
        });
    }
    if let Some((lo, hi)) = window {
        if let Some(limit) = regularity_limit(&params, &field, lo, hi)? {
            warnings.push(format!(
                "potential is singular beyond B = {limit}; shrink the window to [{lo}, {limit})"
            ));
        }
    }
    Ok(FeshbachFit {
        params,
        field,
        warnings,
    })
}

fn regular_at(params: &TwoChannelParams, model: &FieldModel, b: f64) -> bool {
    model.params_at(params, b).map(|p| p.is_regular()).unwrap_or(false)
}

/// First field in `[lo, hi]` where the potential stops being regular (bisected), if any.
pub fn regularity_limit(params: &TwoChannelParams, model: &FieldModel, lo: f64, hi: f64) -> Result<Option<f64>> {
    const SAMPLES: usize = 2000;
    if !regular_at(params, model, lo) {
        let p = model.params_at(params, lo)?;
        return Err(CoxError::Irregular {
            min_eigenvalue: p.regularity().min_eigenvalue,
        });
    }
    let h = (hi - lo) / SAMPLES as f64;
    for i in 1..=SAMPLES {
        let b = lo + h * i as f64;
        if !regular_at(params, model, b) {
            let (mut a, mut c) = (b - h, b);
            while c - a > 1e-12 * (1.0 + c.abs()) {
                let m = 0.5 * (a + c);
                if regular_at(params, model, m) {
                    a = m;
                } else {
                    c = m;
                }
            }
            return Ok(Some(0.5 * (a + c)));
        }
    }
    Ok(None)
}

/// Field scenario file: parameters, field model, window and step count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub params: TwoChannelParams,
    pub field: FieldSpec,
    pub window: [f64; 2],
    #[serde(default = "default_steps")]
    pub steps: usize,
}

fn default_steps() -> usize {
    DEFAULT_STEPS
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldUnits {
    /// `delta0`, `mu_mag` already in the reduced energy unit.
    Reduced,
    /// `delta0` in MHz and `mu_mag` in MHz per field unit; converted for rubidium-85
    /// unless `mass_u` is given.
    Mhz,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub delta0: f64,
    pub mu_mag: f64,
    pub b0: f64,
    pub units: FieldUnits,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass_u: Option<f64>,
}

impl FieldSpec {
    pub fn model(&self) -> FieldModel {
        match self.units {
            FieldUnits::Reduced => FieldModel::new(self.delta0, self.mu_mag, self.b0),
            FieldUnits::Mhz => FieldModel::from_external(
                self.delta0,
                self.mu_mag,
                self.b0,
                units::energy_unit_mhz(self.mass_u.unwrap_or(units::RB85_MASS_U)),
            ),
        }
    }
}

pub const DEFAULT_STEPS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    /// A complex pair meets on the imaginary axis (or splits off it).
    PoleCollision,
    /// A zero passes through `k = 0`: the scattering length diverges.
    ThresholdCrossing,
    /// Real part of a resonance energy changes sign.
    ResonanceErZero,
    /// End of the regular window; the continuation stops here.
    RegularityLimit,
}

impl EventKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EventKind::PoleCollision => "pole_collision",
            EventKind::ThresholdCrossing => "threshold_crossing",
            EventKind::ResonanceErZero => "resonance_er_zero",
            EventKind::RegularityLimit => "regularity_limit",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryEvent {
    pub b: f64,
    pub kind: EventKind,
    /// Zero energies at the grid points bracketing the event.
    pub zeros_before: Vec<C64>,
    pub zeros_after: Vec<C64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub b: f64,
    pub delta: f64,
    /// Zeros, matched step to step so that index `j` follows one trajectory.
    pub zeros: Vec<SpectralZero>,
    /// Uncoupled energies `-alpha1^2` and `-alpha2^2 + Delta(B)`.
    pub bare: (f64, f64),
    /// Events inside `(B_prev, B]`.
    pub events: Vec<EventKind>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Continuation {
    pub points: Vec<TrajectoryPoint>,
    pub events: Vec<TrajectoryEvent>,
    pub warnings: Vec<String>,
    pub truncated_at: Option<f64>,
}

impl Continuation {
    pub fn events_of(&self, kind: EventKind) -> Vec<f64> {
        self.events.iter().filter(|e| e.kind == kind).map(|e| e.b).collect()
    }

    /// Smallest `|E_i - E_j|` along the trajectories `i`, `j`.
    pub fn min_gap(&self, i: usize, j: usize) -> f64 {
        self.points
            .iter()
            .map(|p| (p.zeros[i].energy - p.zeros[j].energy).norm())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Permutation of `next` closest to `prev` in the k-plane (sum of distances).
fn match_zeros(prev: &[SpectralZero], next: Vec<SpectralZero>) -> Vec<SpectralZero> {
    let n = next.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = (f64::INFINITY, perm.clone());
    permute(&mut perm, 0, &mut |p| {
        let cost: f64 = p.iter().enumerate().map(|(j, &i)| (next[i].k - prev[j].k).norm()).sum();
        if cost < best.0 {
            best = (cost, p.to_vec());
        }
    });
    best.1.iter().map(|&i| next[i]).collect()
}

fn permute(p: &mut Vec<usize>, start: usize, visit: &mut dyn FnMut(&[usize])) {
    if start == p.len() {
        visit(p);
        return;
    }
    for i in start..p.len() {
        p.swap(start, i);
        permute(p, start + 1, visit);
        p.swap(start, i);
    }
}

fn n_resonant(zeros: &[SpectralZero]) -> usize {
    zeros.iter().filter(|z| z.kind == ZeroKind::Resonance).count()
}

/// `beta^2 - alpha1 (sqrt(Delta) + alpha2)`, zero when a state sits at `k = 0`.
fn threshold_function(params: &TwoChannelParams, delta: f64) -> f64 {
    params.beta().powi(2) - params.alpha1() * (delta.sqrt() + params.alpha2())
}

fn bisect(mut a: f64, mut b: f64, tol: f64, mut left_side: impl FnMut(f64) -> bool) -> f64 {
    while (b - a).abs() > tol {
        let m = 0.5 * (a + b);
        if left_side(m) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Follows the four zeros over `window` in `steps` uniform steps and brackets events
/// to `1e-4` of the step.
pub fn continue_spectrum_in_b(
    params: &TwoChannelParams,
    model: &FieldModel,
    window: (f64, f64),
    steps: usize,
) -> Result<Continuation> {
    let (lo, mut hi) = window;
    if !(hi > lo) || steps == 0 {
        return Err(CoxError::InvalidParameter(
            "window must satisfy lo < hi with steps > 0".into(),
        ));
    }
    let h = (hi - lo) / steps as f64;
    let tol = 1e-4 * h;
    let mut warnings = Vec::new();
    let mut events = Vec::new();
    let truncated_at = regularity_limit(params, model, lo, hi)?;
    if let Some(limit) = truncated_at {
        let kappa1 = params.kappa1();
        warnings.push(format!(
            "potential becomes singular at B = {limit}: bound-state energies of the model should be larger than -kappa1^2 = {}; trajectory truncated",
            -kappa1 * kappa1
        ));
        hi = limit;
    }
    let at = |b: f64| model.params_at(params, b);

    let mut points: Vec<TrajectoryPoint> = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        let b = lo + h * i as f64;
        if b > hi {
            break;
        }
        let p = at(b)?;
        let raw = find_zeros(&p);
        let zeros = match points.last() {
            Some(prev) => match_zeros(&prev.zeros, raw),
            None => raw,
        };
        points.push(TrajectoryPoint {
            b,
            delta: p.delta(),
            zeros,
            bare: (-params.alpha1().powi(2), -params.alpha2().powi(2) + p.delta()),
            events: Vec::new(),
        });
    }

    for i in 1..points.len() {
        let (b_prev, b_next) = (points[i - 1].b, points[i].b);
        let before: Vec<C64> = points[i - 1].zeros.iter().map(|z| z.energy).collect();
        let after: Vec<C64> = points[i].zeros.iter().map(|z| z.energy).collect();
        let mut found = Vec::new();

        let g0 = threshold_function(params, points[i - 1].delta);
        let g1 = threshold_function(params, points[i].delta);
        if g0 * g1 < 0.0 || (g1 == 0.0 && g0 != 0.0) {
            let b = bisect(b_prev, b_next, tol, |b| {
                threshold_function(params, model.delta_unchecked(b)) * g0 > 0.0
            });
            found.push((b, EventKind::ThresholdCrossing));
        }

        let r0 = n_resonant(&points[i - 1].zeros);
        if r0 != n_resonant(&points[i].zeros) {
            let b = bisect(b_prev, b_next, tol, |b| {
                at(b).map(|p| n_resonant(&find_zeros(&p)) == r0).unwrap_or(false)
            });
            found.push((b, EventKind::PoleCollision));
        }

        for j in 0..points[i].zeros.len() {
            let (z0, z1) = (points[i - 1].zeros[j], points[i].zeros[j]);
            let tracked = z0.kind == ZeroKind::Resonance && z1.kind == ZeroKind::Resonance && z0.k.re > 0.0;
            if !tracked || z0.energy.re * z1.energy.re >= 0.0 {
                continue;
            }
            let s0 = z0.energy.re.signum();
            let mut k_ref = z0.k;
            let b = bisect(b_prev, b_next, tol, |b| {
                let Ok(p) = at(b) else { return false };
                let z = find_zeros(&p)
                    .into_iter()
                    .min_by(|x, y| (x.k - k_ref).norm().total_cmp(&(y.k - k_ref).norm()))
                    .expect("four zeros");
                k_ref = z.k;
                z.energy.re * s0 > 0.0
            });
            found.push((b, EventKind::ResonanceErZero));
        }

        found.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (b, kind) in found {
            points[i].events.push(kind);
            events.push(TrajectoryEvent {
                b,
                kind,
                zeros_before: before.clone(),
                zeros_after: after.clone(),
            });
        }
    }

    if let Some(limit) = truncated_at {
        let last: Vec<C64> = points
            .last()
            .map(|p| p.zeros.iter().map(|z| z.energy).collect())
            .unwrap_or_default();
        if let Some(p) = points.last_mut() {
            p.events.push(EventKind::RegularityLimit);
        }
        events.push(TrajectoryEvent {
            b: limit,
            kind: EventKind::RegularityLimit,
            zeros_before: last,
            zeros_after: Vec::new(),
        });
    }

    Ok(Continuation {
        points,
        events,
        warnings,
        truncated_at,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cs() -> (TwoChannelParams, FieldModel) {
        (
            TwoChannelParams::new(-0.103, -0.5, 0.05, 0.35, 1.0).unwrap(),
            FieldModel::new(0.35, -1.0, 0.0),
        )
    }

    fn rb_data() -> FeshbachData {
        let c = units::energy_unit_mhz(units::RB85_MASS_U);
        FeshbachData {
            a_bg: -443.0,
            b0: 15.5041,
            gamma_b: 1.071,
            field: FieldModel::from_external(2471.386, -36.4, 15.5041, c),
            alpha1: 2.2e-3,
        }
    }

    #[test]
    fn energy_unit_for_rubidium() {
        let c = units::energy_unit_mhz(units::RB85_MASS_U);
        assert!((c - 4.25e4).abs() < 0.01e4, "{c}");
    }

    #[test]
    fn linear_threshold() {
        let (_, m) = cs();
        assert!((m.delta_of_b(0.1).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(m.delta_of_b(0.0).unwrap(), 0.35);
        assert!(matches!(m.delta_of_b(0.4), Err(CoxError::OutOfWindow { .. })));
    }

    #[test]
    fn uncoupled_resonance_threshold() {
        let p = TwoChannelParams::new(0.3, -0.6, 0.0, 1.0, 1.0).unwrap();
        assert!((resonance_field_threshold(&p).unwrap() - 0.36).abs() < 1e-15);
        let p = TwoChannelParams::new(0.3, 0.6, 0.0, 1.0, 1.0).unwrap();
        assert!(resonance_field_threshold(&p).is_err());
    }

    #[test]
    fn scattering_length_flips_at_resonance() {
        let (p, _) = cs();
        let d0 = resonance_field_threshold(&p).unwrap();
        let a = |d: f64| scattering_length(&p.with_delta(d).unwrap());
        assert!(a(d0 * (1.0 + 1e-8)) * a(d0 * (1.0 - 1e-8)) < 0.0);
        assert!(a(d0 * (1.0 + 1e-8)).abs() > 1e6);
    }

    #[test]
    fn background_limit() {
        let (p, _) = cs();
        let far = scattering_length(&p.with_delta(1e6).unwrap());
        assert!(((far - abg(&p)) / abg(&p)).abs() < 1e-3);
        assert!((abg(&p) - (1.0 + 1.0 / 0.103)).abs() < 1e-12);
    }

    #[test]
    fn rubidium_fit() {
        let fit = fit_from_feshbach_data(&rb_data(), None).unwrap();
        let p = fit.params;
        assert!((p.kappa1() - 0.0866).abs() < 1e-4);
        assert!(((p.alpha2() + 0.239343) / 0.239343).abs() < 5e-4);
        // the three inputs come back
        assert!((abg(&p) + 443.0).abs() < 1e-9);
        assert!((resonance_field(&p, &fit.field).unwrap() - 15.5041).abs() < 1e-9);
        let g = width_gamma_b(&p, &fit.field).unwrap();
        assert!(((g - 1.071) / 1.071).abs() < 0.02, "{g}");
        assert!(a_of_b(&p, &fit.field, 15.5041 + 1.071).unwrap().abs() < 1e-6);
    }

    #[test]
    fn width_closure_and_approximation() {
        let fit = fit_from_feshbach_data(&rb_data(), None).unwrap();
        let g = width_gamma_b(&fit.params, &fit.field).unwrap();
        assert!(approx_a_of_b(-443.0, 15.5041, g, 15.5041 + g).abs() < 1e-9);
        let exact = a_of_b(&fit.params, &fit.field, 14.5).unwrap();
        let approx = approx_a_of_b(abg(&fit.params), 15.5041, g, 14.5);
        assert!(((exact - approx) / approx).abs() < 0.02, "{exact} vs {approx}");
    }

    #[test]
    fn infeasible_fit() {
        let mut d = rb_data();
        d.alpha1 = -2.2e-3;
        assert!(matches!(fit_from_feshbach_data(&d, None), Err(CoxError::Infeasible(_))));
    }

    #[test]
    fn cesium_event_order() {
        let (p, m) = cs();
        let c = continue_spectrum_in_b(&p, &m, (0.0, 0.3), 2000).unwrap();
        let kinds: Vec<EventKind> = c.events.iter().map(|e| e.kind).collect();
        assert_eq!(
            kinds,
            vec![
                EventKind::ResonanceErZero,
                EventKind::PoleCollision,
                EventKind::ThresholdCrossing
            ]
        );
        let d0 = resonance_field_threshold(&p).unwrap();
        assert!((c.events[2].b - m.field_at(d0)).abs() < 1e-7);
        assert!(c.truncated_at.is_none());
    }

    #[test]
    fn avoided_crossing_closes_with_coupling() {
        let (p, m) = cs();
        let gap = |beta: f64| {
            let c = continue_spectrum_in_b(&p.with_beta(beta).unwrap(), &m, (0.0, 0.1), 400).unwrap();
            // the state starting near -alpha1^2 and the one near Delta - alpha2^2
            let first = &c.points[0].zeros;
            let near = |e: f64| {
                (0..4)
                    .min_by(|&i, &j| (first[i].energy - e).norm().total_cmp(&(first[j].energy - e).norm()))
                    .unwrap()
            };
            c.min_gap(near(-0.103f64.powi(2)), near(0.35 - 0.25))
        };
        let (wide, narrow) = (gap(0.05), gap(0.005));
        assert!(wide > 0.0 && narrow < wide, "{wide} {narrow}");
    }

    #[test]
    fn rubidium_window_truncates() {
        let fit = fit_from_feshbach_data(&rb_data(), Some((10.0, 30.0))).unwrap();
        assert_eq!(fit.warnings.len(), 1);
        let c = continue_spectrum_in_b(&fit.params, &fit.field, (10.0, 30.0), 2000).unwrap();
        let limit = c.truncated_at.unwrap();
        assert!(limit > 20.0 && limit < 30.0);
        assert!(!c.warnings.is_empty());
        assert_eq!(c.events.last().unwrap().kind, EventKind::RegularityLimit);
        let kinds: Vec<EventKind> = c.events.iter().map(|e| e.kind).collect();
        assert_eq!(
            &kinds[..3],
            &[
                EventKind::ThresholdCrossing,
                EventKind::ResonanceErZero,
                EventKind::PoleCollision
            ]
        );
    }
}
