//! Inverse problems: Cox parameters from prescribed zeros of the Jost determinant.

use serde::{Deserialize, Serialize};

use crate::error::{CoxError, Result};
use crate::jost::{find_zeros, SpectralZero, ZeroKind, C64};
use crate::params::TwoChannelParams;
use crate::spectrum::count_bound_states;

const I: C64 = C64::new(0.0, 1.0);

/// Tolerance on the imaginary part of a computed `alpha`.
const REALITY_TOL: f64 = 1e-9;

/// A prescribed zero must be reproduced by the forward solve to this accuracy.
pub const ROUND_TRIP_TOL: f64 = 1e-9;

/// Sign choice in the two-zero formulas for `alpha1`, `alpha2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Upper,
    Lower,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Upper => 1.0,
            Branch::Lower => -1.0,
        }
    }
}

/// Threshold and complex resonance energy `E_r - i E_i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonanceSpec {
    pub delta: f64,
    pub e_r: f64,
    pub e_i: f64,
}

impl ResonanceSpec {
    pub fn new(delta: f64, e_r: f64, e_i: f64) -> Result<Self> {
        if !(delta > 0.0) || !e_r.is_finite() {
            return Err(CoxError::InvalidParameter(
                "resonance spec needs Delta > 0 and finite E_r".into(),
            ));
        }
        if !(e_i > 0.0) || !e_i.is_finite() {
            return Err(CoxError::Degenerate(format!(
                "resonance half-width must be positive, got E_i = {e_i}"
            )));
        }
        Ok(Self { delta, e_r, e_i })
    }

    /// Width `Gamma = 2 E_i`.
    pub fn width(&self) -> f64 {
        2.0 * self.e_i
    }

    /// `0 < E_r < Delta` and `E_i < E_r`: the pole can show up in the open channel.
    pub fn visible(&self) -> bool {
        self.e_r > 0.0 && self.e_r < self.delta && self.e_i < self.e_r
    }
}

/// `k = k_r + i k_i`, `p = p_r + i p_i` of the resonance zero with `k^2 = E_r - i E_i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonanceWavenumbers {
    pub k_r: f64,
    pub k_i: f64,
    pub p_r: f64,
    pub p_i: f64,
}

impl ResonanceWavenumbers {
    pub fn k(&self) -> C64 {
        C64::new(self.k_r, self.k_i)
    }

    pub fn p(&self) -> C64 {
        C64::new(self.p_r, self.p_i)
    }

    /// Mirror zero `(-k*, -p*)`.
    pub fn k_mirror(&self) -> C64 {
        C64::new(-self.k_r, self.k_i)
    }

    pub fn p_mirror(&self) -> C64 {
        C64::new(-self.p_r, self.p_i)
    }

    /// `sqrt(-k_r p_r)`, the smallest coupling compatible with real `alpha`s.
    pub fn beta_min(&self) -> f64 {
        (-self.k_r * self.p_r).sqrt()
    }
}

/// `(sqrt(S + a), sqrt(S - a))` with `S = sqrt(a^2 + b^2)`, free of cancellation.
fn split_roots(a: f64, b: f64) -> (f64, f64) {
    let s = a.hypot(b);
    if a >= 0.0 {
        let plus = (s + a).sqrt();
        (plus, b / plus)
    } else {
        let minus = (s - a).sqrt();
        (b / minus, minus)
    }
}

/// Wave numbers of the visible resonance zero (lower signs: `k_i < 0 < p_i`).
///
/// `sqrt(S - E_r) sqrt(S + E_r) = E_i` is used to avoid the cancellation in
/// `S - E_r` when `E_i << E_r`.
pub fn resonance_wavenumbers(spec: &ResonanceSpec) -> ResonanceWavenumbers {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let (kp, km) = split_roots(spec.e_r, spec.e_i);
    let (pp, pm) = split_roots(spec.e_r - spec.delta, spec.e_i);
    ResonanceWavenumbers {
        k_r: r * kp,
        k_i: -r * km,
        p_r: -r * pp,
        p_i: r * pm,
    }
}

/// `(alpha1, alpha2)` such that `(k1, p1)` and `(k2, p2)` are zeros.
///
/// `alpha1` is the root of the quadratic selected by `branch`;
/// `alpha2` follows from the coupling relation at the better-conditioned zero.
pub fn from_two_zeros(k1: C64, p1: C64, k2: C64, p2: C64, beta: f64, branch: Branch) -> Result<(f64, f64)> {
    let t1 = k1 * k1 - p1 * p1;
    let t2 = k2 * k2 - p2 * p2;
    let scale = 1f64.max(t1.norm()).max(k1.norm_sqr()).max(k2.norm_sqr());
    if (t1 - t2).norm() > 1e-9 * scale {
        return Err(CoxError::InvalidParameter(format!(
            "zeros disagree on the threshold: k1^2 - p1^2 = {t1}, k2^2 - p2^2 = {t2}"
        )));
    }
    let dk = k2 - k1;
    let dp = p2 - p1;
    if dk.norm() == 0.0 || dp.norm() == 0.0 {
        return Err(CoxError::Degenerate("the two prescribed zeros coincide".into()));
    }
    let s = (-dk * dk - 4.0 * beta * beta * dk / dp).sqrt();
    let a1 = 0.5 * (I * (k1 + k2) + branch.sign() * s);
    let (kj, pj) = if (k1 + I * a1).norm() >= (k2 + I * a1).norm() {
        (k1, p1)
    } else {
        (k2, p2)
    };
    let a2 = I * (beta * beta / (kj + I * a1) + pj);
    for (name, a) in [("alpha1", a1), ("alpha2", a2)] {
        if a.im.abs() > REALITY_TOL * (1.0 + a.re.abs()) {
            return Err(CoxError::BranchInfeasible(format!(
                "{name} = {a} is not real on the {branch:?} branch"
            )));
        }
    }
    Ok((a1.re, a2.re))
}

/// The other two zeros `(k3, p3), (k4, p4)` once `(k1, p1)`, `(k2, p2)` are fixed.
///
/// `k3 + k4` is fixed by the branch; the `p` partners are picked among the sign
/// combinations by their threshold and coupling residuals.
pub fn remaining_zeros(k1: C64, p1: C64, k2: C64, p2: C64, beta: f64, branch: Branch) -> Result<[(C64, C64); 2]> {
    let (a1, a2) = from_two_zeros(k1, p1, k2, p2, beta, branch)?;
    let b2 = beta * beta;
    let dk = k2 - k1;
    let dp = p2 - p1;
    let sk = (-dk * dk - 4.0 * b2 * dk / dp).sqrt();
    let sp = (-dp * dp - 4.0 * b2 * dp / dk).sqrt();
    let dk_disc = (dk * dk + 4.0 * b2 * dp / dk + 4.0 * k1 * k2).sqrt();
    let dp_disc = (dp * dp + 4.0 * b2 * dk / dp + 4.0 * p1 * p2).sqrt();
    let sign = branch.sign();
    let k3 = 0.5 * (-I * sign * sk + dk_disc);
    let k4 = 0.5 * (-I * sign * sk - dk_disc);
    let delta = k1 * k1 - p1 * p1;

    let residual = |k: C64, p: C64| {
        let thr = (k * k - p * p - delta).norm();
        let cpl = ((k + I * a1) * (p + I * a2) + b2).norm();
        thr.max(cpl) / 1f64.max(k.norm_sqr()).max(p.norm_sqr())
    };
    let mut best: Option<(f64, [(C64, C64); 2])> = None;
    for s in [1.0, -1.0] {
        for swap in [false, true] {
            let mut p3 = 0.5 * (-I * s * sp - dp_disc);
            let mut p4 = 0.5 * (-I * s * sp + dp_disc);
            if swap {
                std::mem::swap(&mut p3, &mut p4);
            }
            let r = residual(k3, p3).max(residual(k4, p4));
            if best.map_or(true, |(b, _)| r < b) {
                best = Some((r, [(k3, p3), (k4, p4)]));
            }
        }
    }
    let (r, pairs) = best.expect("four candidates were evaluated");
    if r > 1e-8 {
        return Err(CoxError::BranchMismatch { residual: r });
    }
    Ok(pairs)
}

/// Parameters together with the forward-solved zeros and round-trip diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InversionResult {
    pub params: TwoChannelParams,
    pub zeros: Vec<SpectralZero>,
    pub branch: Branch,
    /// The prescribed `k` values.
    pub prescribed: Vec<C64>,
    /// Largest distance from a prescribed `k` to the nearest forward zero.
    pub max_mismatch: f64,
    /// Bound-state count from the sign invariants.
    pub n_b: u8,
    /// Every admissible coupling found, when the coupling was solved for.
    pub beta_candidates: Vec<f64>,
}

fn nearest(zeros: &[SpectralZero], k: C64) -> (usize, f64) {
    zeros
        .iter()
        .enumerate()
        .map(|(i, z)| (i, (z.k - k).norm()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("four zeros")
}

fn finish(params: TwoChannelParams, branch: Branch, prescribed: Vec<C64>) -> Result<InversionResult> {
    let report = params.regularity();
    if !report.is_regular() {
        return Err(CoxError::Irregular {
            min_eigenvalue: report.min_eigenvalue,
        });
    }
    let zeros = find_zeros(&params);
    let max_mismatch = prescribed
        .iter()
        .map(|&k| nearest(&zeros, k).1 / 1f64.max(k.norm()))
        .fold(0.0, f64::max);
    if max_mismatch > ROUND_TRIP_TOL {
        return Err(CoxError::BranchMismatch { residual: max_mismatch });
    }
    Ok(InversionResult {
        n_b: count_bound_states(&params).n_b,
        params,
        zeros,
        branch,
        prescribed,
        max_mismatch,
        beta_candidates: Vec::new(),
    })
}

/// One visible resonance and no bound state (upper branch).
pub fn from_resonance(spec: &ResonanceSpec, beta: f64, kappa1: f64) -> Result<InversionResult> {
    let w = resonance_wavenumbers(spec);
    let minimum = w.beta_min();
    if beta < minimum {
        return Err(CoxError::CouplingTooSmall { beta, minimum });
    }
    let x = (-1.0 - beta * beta / (w.k_r * w.p_r)).max(0.0).sqrt();
    let a1 = -w.k_i + w.k_r * x;
    let a2 = -w.p_i - w.p_r * x;
    let params = TwoChannelParams::new(a1, a2, beta, spec.delta, kappa1)?;
    finish(params, Branch::Upper, vec![w.k(), w.k_mirror()])
}

/// `lambda` of the two lower-branch remaining zeros as a function of the coupling.
fn lower_branch_lambdas(w: &ResonanceWavenumbers, beta: f64) -> Option<(f64, f64)> {
    let b2 = beta * beta;
    let a = -w.k_r * w.k_r - b2 * w.k_r / w.p_r;
    let b = w.k_i * w.k_i - b2 * w.p_r / w.k_r;
    if a < 0.0 || b < 0.0 {
        return None;
    }
    let (a, b) = (a.sqrt(), b.sqrt());
    Some((a + b, a - b))
}

/// Couplings at which a lower-branch remaining zero sits at `k = i lambda_b`.
pub fn bound_state_couplings(spec: &ResonanceSpec, lambda_b: f64) -> Vec<f64> {
    const SAMPLES: usize = 4000;
    let w = resonance_wavenumbers(spec);
    let lo = w.beta_min() * (1.0 + 1e-12);
    let hi = 10.0 * spec.delta.sqrt();
    if !(hi > lo) {
        return Vec::new();
    }
    let mut roots = Vec::new();
    for which in 0..2 {
        let g = |beta: f64| lower_branch_lambdas(&w, beta).map(|(p, m)| if which == 0 { p } else { m } - lambda_b);
        let grid: Vec<f64> = (0..=SAMPLES)
            .map(|i| lo + (hi - lo) * i as f64 / SAMPLES as f64)
            .collect();
        for pair in grid.windows(2) {
            let (Some(ga), Some(gb)) = (g(pair[0]), g(pair[1])) else {
                continue;
            };
            if ga == 0.0 {
                roots.push(pair[0]);
                continue;
            }
            if ga * gb >= 0.0 {
                continue;
            }
            let (mut a, mut b, mut fa) = (pair[0], pair[1], ga);
            while b - a > 1e-12 * b.max(1.0) {
                let mid = 0.5 * (a + b);
                let fm = g(mid).unwrap_or(fa);
                if fm * fa <= 0.0 {
                    b = mid;
                } else {
                    a = mid;
                    fa = fm;
                }
            }
            roots.push(0.5 * (a + b));
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-10);
    roots
}

/// One visible resonance plus a bound state at `E = -lambda_b^2` (lower branch);
/// the coupling is solved for.
pub fn from_resonance_with_bound(spec: &ResonanceSpec, lambda_b: f64, kappa1: f64) -> Result<InversionResult> {
    if !(lambda_b > 0.0) {
        return Err(CoxError::InvalidParameter(format!(
            "bound-state lambda must be positive, got {lambda_b}"
        )));
    }
    if !(kappa1 > lambda_b) {
        return Err(CoxError::Restriction(format!(
            "kappa1 > lambda_b is required (kappa1 = {kappa1}, lambda_b = {lambda_b})"
        )));
    }
    let w = resonance_wavenumbers(spec);
    let candidates = bound_state_couplings(spec, lambda_b);
    let target = I * lambda_b;
    let mut last_err = None;
    for &beta in &candidates {
        let attempt = from_two_zeros(w.k(), w.p(), w.k_mirror(), w.p_mirror(), beta, Branch::Lower)
            .and_then(|(a1, a2)| TwoChannelParams::new(a1, a2, beta, spec.delta, kappa1))
            .and_then(|params| finish(params, Branch::Lower, vec![w.k(), w.k_mirror(), target]));
        match attempt {
            Ok(mut result) => {
                let (i, _) = nearest(&result.zeros, target);
                if result.zeros[i].kind != ZeroKind::Bound {
                    last_err = Some(CoxError::Infeasible(format!(
                        "zero at i*{lambda_b} for beta = {beta} is not a bound state"
                    )));
                    continue;
                }
                result.beta_candidates = candidates.clone();
                return Ok(result);
            }
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or_else(|| {
        CoxError::Infeasible(format!(
            "no coupling in ({}, {}] puts a bound state at lambda = {lambda_b}",
            w.beta_min(),
            10.0 * spec.delta.sqrt()
        ))
    }))
}

/// Two bound states at `E_j = -lambda_j^2`.
pub fn from_two_bound(
    lambda1: f64,
    lambda2: f64,
    delta: f64,
    beta: f64,
    kappa1: f64,
    branch: Branch,
) -> Result<InversionResult> {
    if !(kappa1 > lambda2 && lambda2 > lambda1 && lambda1 > 0.0) {
        return Err(CoxError::Restriction(format!(
            "kappa1 > lambda2 > lambda1 > 0 is required (kappa1 = {kappa1}, lambda2 = {lambda2}, lambda1 = {lambda1})"
        )));
    }
    let k1 = I * lambda1;
    let k2 = I * lambda2;
    let p1 = I * (lambda1 * lambda1 + delta).sqrt();
    let p2 = I * (lambda2 * lambda2 + delta).sqrt();
    let (a1, a2) = from_two_zeros(k1, p1, k2, p2, beta, branch)?;
    let params = TwoChannelParams::new(a1, a2, beta, delta, kappa1)?;
    finish(params, branch, vec![k1, k2])
}

/// `alpha2 = beta^2 / (lambda_b + alpha1) - sqrt(Delta + lambda_b^2)`.
pub fn alpha2_from_one_bound(lambda_b: f64, alpha1: f64, beta: f64, delta: f64) -> Result<f64> {
    let s = lambda_b + alpha1;
    if s == 0.0 {
        return Err(CoxError::InvalidParameter(
            "lambda_b + alpha1 = 0 is a pole of the iso-energy curve".into(),
        ));
    }
    Ok(beta * beta / s - (delta + lambda_b * lambda_b).sqrt())
}

/// One bound state at `E = -lambda_b^2`; `alpha1`, `beta`, `kappa1` free.
pub fn from_one_bound(lambda_b: f64, alpha1: f64, beta: f64, delta: f64, kappa1: f64) -> Result<InversionResult> {
    if !(kappa1 > lambda_b) || !(lambda_b > 0.0) {
        return Err(CoxError::Restriction(format!(
            "kappa1 > lambda_b > 0 is required (kappa1 = {kappa1}, lambda_b = {lambda_b})"
        )));
    }
    let a2 = alpha2_from_one_bound(lambda_b, alpha1, beta, delta)?;
    let params = TwoChannelParams::new(alpha1, a2, beta, delta, kappa1)?;
    let mut result = finish(params, Branch::Upper, vec![I * lambda_b])?;
    let (i, _) = nearest(&result.zeros, I * lambda_b);
    if result.zeros[i].kind != ZeroKind::Bound {
        return Err(CoxError::Infeasible(format!(
            "the zero at i*{lambda_b} is not on the physical sheet for alpha1 = {alpha1}"
        )));
    }
    result.branch = Branch::Upper;
    Ok(result)
}
