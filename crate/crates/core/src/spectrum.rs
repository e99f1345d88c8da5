//! Counting bound states and resonances, and the boundary curves that separate
//! regions of the `(alpha1/beta, alpha2/beta)` plane.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CoxError, Result};
use crate::jost::{find_zeros, SpectralZero, ZeroKind};
use crate::params::TwoChannelParams;

/// Distance (in sign-argument units) below which a point counts as on a boundary.
pub const BOUNDARY_PROXIMITY: f64 = 1e-9;

fn sign_or_plus(x: f64) -> i8 {
    if x < 0.0 {
        -1
    } else {
        1
    }
}

fn nb_formula(i1: i8, i2: i8) -> u8 {
    (1 + (i1 as i32 - 1) * i2 as i32 / 2) as u8
}

/// Bound-state count from the sign invariants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BoundCount {
    pub n_b: u8,
    pub i1: i8,
    pub i2: i8,
    /// A sign argument is exactly zero: a bound state sits at threshold.
    pub degenerate: bool,
    /// Smallest and largest count over the adjacent regions when degenerate.
    pub adjacent: Option<(u8, u8)>,
}

/// The arguments of the two sign invariants,
/// `beta^2 - alpha1 sqrt(Delta) - alpha1 alpha2` and `alpha2 + sqrt(Delta)`.
pub fn invariant_arguments(alpha1: f64, alpha2: f64, beta: f64, delta: f64) -> (f64, f64) {
    let sd = delta.sqrt();
    (beta * beta - alpha1 * sd - alpha1 * alpha2, alpha2 + sd)
}

pub fn count_bound_states_raw(alpha1: f64, alpha2: f64, beta: f64, delta: f64) -> BoundCount {
    let (g1, g2) = invariant_arguments(alpha1, alpha2, beta, delta);
    let (i1, i2) = (sign_or_plus(g1), sign_or_plus(g2));
    let degenerate = g1 == 0.0 || g2 == 0.0;
    let adjacent = degenerate.then(|| {
        let c1: &[i8] = if g1 == 0.0 { &[-1, 1] } else { std::slice::from_ref(&i1) };
        let c2: &[i8] = if g2 == 0.0 { &[-1, 1] } else { std::slice::from_ref(&i2) };
        let counts: Vec<u8> = c1
            .iter()
            .flat_map(|&a| c2.iter().map(move |&b| nb_formula(a, b)))
            .collect();
        (*counts.iter().min().unwrap(), *counts.iter().max().unwrap())
    });
    BoundCount {
        n_b: nb_formula(i1, i2),
        i1,
        i2,
        degenerate,
        adjacent,
    }
}

/// `n_b = 1 + (I1 - 1) I2 / 2`.
pub fn count_bound_states(params: &TwoChannelParams) -> BoundCount {
    count_bound_states_raw(params.alpha1(), params.alpha2(), params.beta(), params.delta())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ResonanceCount {
    pub n_r: u8,
    /// Double root: the resonance pair is colliding on the imaginary axis.
    pub transition: bool,
}

pub fn count_resonances_from_zeros(zeros: &[SpectralZero]) -> ResonanceCount {
    let transition = zeros.iter().any(|z| z.degenerate && !z.uncoupled);
    let complex = zeros
        .iter()
        .filter(|z| z.kind == ZeroKind::Resonance && !z.degenerate)
        .count();
    ResonanceCount {
        n_r: (complex / 2) as u8,
        transition,
    }
}

/// 1 when the quartic has a complex-conjugate pair, else 0.
///
/// Uncoupled channels have no resonances: a real-`k` zero at `beta = 0` is a
/// closed-channel state that does not talk to the open channel.
pub fn count_resonances(params: &TwoChannelParams) -> ResonanceCount {
    resonances_for(params, &find_zeros(params))
}

fn resonances_for(params: &TwoChannelParams, zeros: &[SpectralZero]) -> ResonanceCount {
    if params.beta() == 0.0 {
        return ResonanceCount {
            n_r: 0,
            transition: false,
        };
    }
    count_resonances_from_zeros(zeros)
}

/// All four zeros with both counts and their consistency.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub zeros: Vec<SpectralZero>,
    pub n_b: u8,
    /// Number of zeros classified as bound.
    pub n_b_from_zeros: u8,
    pub n_r: u8,
    pub bound: BoundCount,
    pub transition: bool,
    /// Formula and root classification agree (or the point is on a boundary).
    pub consistent: bool,
    pub max_residual: f64,
}

pub fn spectrum_report(params: &TwoChannelParams) -> SpectrumReport {
    let zeros = find_zeros(params);
    let bound = count_bound_states(params);
    let res = resonances_for(params, &zeros);
    let n_b_from_zeros = zeros.iter().filter(|z| z.kind == ZeroKind::Bound).count() as u8;
    let consistent = match bound.adjacent {
        Some((lo, hi)) => (lo..=hi).contains(&n_b_from_zeros),
        None => bound.n_b == n_b_from_zeros,
    };
    let max_residual = zeros.iter().map(|z| z.residual).fold(0.0, f64::max);
    SpectrumReport {
        n_b: bound.n_b,
        n_b_from_zeros,
        n_r: res.n_r,
        bound,
        transition: res.transition,
        consistent,
        max_residual,
        zeros,
    }
}

/// One point of a resonance-boundary branch in the scaled plane.
pub fn resonance_boundary_point(delta_d: f64, lambda0: f64, upper: bool) -> Result<(f64, f64)> {
    if !(delta_d > 0.0) {
        return Err(CoxError::InvalidParameter(format!(
            "delta_d must be > 0, got {delta_d}"
        )));
    }
    if lambda0 == 0.0 || !lambda0.is_finite() {
        return Err(CoxError::InvalidParameter(
            "lambda0 = 0 is the asymptote and is excluded".into(),
        ));
    }
    let s = if upper { 1.0 } else { -1.0 };
    let root = (lambda0 * lambda0 + delta_d).sqrt();
    let quarter = root.sqrt();
    let a = lambda0.abs().sqrt();
    Ok((s * quarter / a - lambda0, s * a / quarter + lambda0.signum() * root))
}

/// Sampled boundary curves of the scaled plane.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryCurves {
    pub delta_d: f64,
    /// Resonance boundaries keyed by (upper sign, lambda0 > 0).
    pub resonance: Vec<BoundaryBranch>,
    /// The bound-state boundary `a1 (a2 + sqrt(Delta_d)) = 1`, both branches.
    pub bound: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryBranch {
    pub upper: bool,
    pub positive_lambda: bool,
    pub points: Vec<(f64, f64)>,
}

/// The four signed branches at the given `lambda0` magnitudes.
pub fn resonance_boundary(delta_d: f64, lambda_magnitudes: &[f64]) -> Result<Vec<BoundaryBranch>> {
    let mut out = Vec::with_capacity(4);
    for upper in [true, false] {
        for positive_lambda in [true, false] {
            let sgn = if positive_lambda { 1.0 } else { -1.0 };
            let points = lambda_magnitudes
                .iter()
                .map(|&l| resonance_boundary_point(delta_d, sgn * l.abs(), upper))
                .collect::<Result<Vec<_>>>()?;
            out.push(BoundaryBranch {
                upper,
                positive_lambda,
                points,
            });
        }
    }
    Ok(out)
}

/// `alpha1` on the bound-state boundary `alpha1 (alpha2 + sqrt(Delta)) = beta^2`.
pub fn bound_boundary_alpha1(alpha2: f64, beta: f64, delta: f64) -> Result<f64> {
    let s = alpha2 + delta.sqrt();
    if s == 0.0 {
        return Err(CoxError::InvalidParameter(
            "alpha2 = -sqrt(Delta) is the asymptote of the bound-state boundary".into(),
        ));
    }
    Ok(beta * beta / s)
}

/// Samples of the bound-state boundary as `(alpha1, alpha2)` pairs.
pub fn bound_boundary(beta: f64, delta: f64, alpha2_samples: &[f64]) -> Vec<(f64, f64)> {
    alpha2_samples
        .iter()
        .filter_map(|&a2| bound_boundary_alpha1(a2, beta, delta).ok().map(|a1| (a1, a2)))
        .collect()
}

/// Boundary curves for the atlas window, `n` samples per branch.
pub fn boundary_curves(delta_d: f64, n: usize) -> Result<BoundaryCurves> {
    let n = n.max(2);
    // logarithmic spacing from 1e-3 to 1e3
    let lambdas: Vec<f64> = (0..n)
        .map(|i| 10f64.powf(-3.0 + 6.0 * i as f64 / (n - 1) as f64))
        .collect();
    let resonance = resonance_boundary(delta_d, &lambdas)?;
    let sd = delta_d.sqrt();
    let mut a2s: Vec<f64> = Vec::with_capacity(2 * n);
    for i in 0..n {
        let t = 10f64.powf(-3.0 + 6.0 * i as f64 / (n - 1) as f64);
        a2s.push(-sd + t);
        a2s.push(-sd - t);
    }
    Ok(BoundaryCurves {
        delta_d,
        resonance,
        bound: bound_boundary(1.0, delta_d, &a2s),
    })
}

/// Region label of one point of the scaled plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionPoint {
    pub a1_over_beta: f64,
    pub a2_over_beta: f64,
    pub delta_d: f64,
    pub n_b: u8,
    pub n_r: u8,
    pub degenerate: bool,
}

/// `(n_b, n_r)` at `(alpha1, alpha2) = beta * (a1_over_beta, a2_over_beta)`, with `beta = 1`.
pub fn classify_region(a1_over_beta: f64, a2_over_beta: f64, delta_d: f64) -> Result<RegionPoint> {
    if !(delta_d > 0.0) {
        return Err(CoxError::InvalidParameter(format!(
            "delta_d must be > 0, got {delta_d}"
        )));
    }
    // kappa1 plays no part in the zeros
    let params = TwoChannelParams::new(a1_over_beta, a2_over_beta, 1.0, delta_d, 1.0)?;
    let report = spectrum_report(&params);
    let (g1, g2) = invariant_arguments(a1_over_beta, a2_over_beta, 1.0, delta_d);
    let near_bound_boundary = g1.abs() < BOUNDARY_PROXIMITY || g2.abs() < BOUNDARY_PROXIMITY;
    Ok(RegionPoint {
        a1_over_beta,
        a2_over_beta,
        delta_d,
        n_b: report.n_b,
        n_r: report.n_r,
        degenerate: near_bound_boundary || report.transition || report.bound.degenerate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AtlasConfig {
    pub delta_d: f64,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Default for AtlasConfig {
    fn default() -> Self {
        Self {
            delta_d: 1.2,
            lo: -4.0,
            hi: 4.0,
            n: 400,
        }
    }
}

/// Square grid of region labels, row-major with `a2_over_beta` as the slow index.
pub fn atlas(config: &AtlasConfig) -> Result<Vec<RegionPoint>> {
    if config.n < 2 || !(config.hi > config.lo) {
        return Err(CoxError::InvalidParameter("atlas needs n >= 2 and hi > lo".into()));
    }
    let n = config.n;
    let step = (config.hi - config.lo) / (n - 1) as f64;
    (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (row, col) = (idx / n, idx % n);
            classify_region(
                config.lo + col as f64 * step,
                config.lo + row as f64 * step,
                config.delta_d,
            )
        })
        .collect()
}

pub type RegionLabel = (u8, u8);

/// Connected components (4-neighbour) of equal labels on an `n x n` atlas grid.
pub fn region_components(grid: &[RegionPoint], n: usize) -> BTreeMap<RegionLabel, usize> {
    let mut seen = vec![false; grid.len()];
    let mut counts = BTreeMap::new();
    for start in 0..grid.len() {
        if seen[start] {
            continue;
        }
        let label = (grid[start].n_b, grid[start].n_r);
        *counts.entry(label).or_insert(0) += 1;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(i) = stack.pop() {
            let (row, col) = (i / n, i % n);
            let mut neighbours = Vec::with_capacity(4);
            if row > 0 {
                neighbours.push(i - n);
            }
            if row + 1 < n {
                neighbours.push(i + n);
            }
            if col > 0 {
                neighbours.push(i - 1);
            }
            if col + 1 < n {
                neighbours.push(i + 1);
            }
            for j in neighbours {
                if !seen[j] && (grid[j].n_b, grid[j].n_r) == label {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    counts
}

/// Unordered pairs of distinct labels that touch somewhere on the grid.
pub fn region_adjacency(grid: &[RegionPoint], n: usize) -> BTreeSet<(RegionLabel, RegionLabel)> {
    let mut out = BTreeSet::new();
    let label = |i: usize| (grid[i].n_b, grid[i].n_r);
    for i in 0..grid.len() {
        let (row, col) = (i / n, i % n);
        for j in [(col + 1 < n).then(|| i + 1), (row + 1 < n).then(|| i + n)]
            .into_iter()
            .flatten()
        {
            let (a, b) = (label(i), label(j));
            if a != b {
                out.insert((a.min(b), a.max(b)));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jost::quartic_coeffs;
    use crate::oracle::polyroots::quartic_discriminant;

    fn params(a1: f64, a2: f64, b: f64, d: f64) -> TwoChannelParams {
        TwoChannelParams::new(a1, a2, b, d, 5.0).unwrap()
    }

    #[test]
    fn bound_count_examples() {
        let c = count_bound_states(&params(1.0, 2.0, 0.1, 1.0));
        assert_eq!((c.i1, c.i2, c.n_b), (-1, 1, 0));
        let c = count_bound_states(&params(-1.0, -2.0, 0.1, 1.0));
        assert_eq!((c.i1, c.i2, c.n_b), (-1, -1, 2));
        let c = count_bound_states(&params(-1.0, 2.0, 0.1, 1.0));
        assert_eq!((c.i1, c.n_b), (1, 1));
        for p in [
            params(1.0, 2.0, 0.1, 1.0),
            params(-1.0, -2.0, 0.1, 1.0),
            params(-1.0, 2.0, 0.1, 1.0),
        ] {
            assert!(spectrum_report(&p).consistent);
        }
    }

    #[test]
    fn exact_zero_argument_is_degenerate() {
        // alpha1 (alpha2 + 1) = beta^2 with beta = 1, Delta = 1
        let c = count_bound_states_raw(1.0, 0.0, 1.0, 1.0);
        assert!(c.degenerate);
        assert_eq!(c.adjacent, Some((0, 1)));
    }

    #[test]
    fn resonance_counts() {
        assert_eq!(count_resonances(&params(0.4, -0.3, 0.0, 1.0)).n_r, 0);
        assert_eq!(count_resonances(&params(2.0, 1.0, 1.0, 1.2)).n_r, 1);
        assert_eq!(count_resonances(&params(5.0, 5.0, 1.0, 1.2)).n_r, 0);
        assert_eq!(count_resonances(&params(-5.0, -5.0, 1.0, 1.2)).n_r, 0);
    }

    #[test]
    fn region_examples() {
        let r = classify_region(-5.0, -5.0, 1.2).unwrap();
        assert_eq!((r.n_b, r.n_r), (2, 0));
        // far out in the first quadrant all four zeros are imaginary
        let r = classify_region(5.0, 5.0, 1.2).unwrap();
        assert_eq!((r.n_b, r.n_r), (0, 0));
        let r = classify_region(2.0, 1.0, 1.2).unwrap();
        assert_eq!((r.n_b, r.n_r), (0, 1));
        let r = classify_region(0.0, 0.0, 1.2).unwrap();
        assert_eq!(r.n_b, 1);
    }

    #[test]
    fn boundary_points_are_double_roots() {
        for l in [1.0, -1.0, 0.3, -2.5] {
            for upper in [true, false] {
                let (a1, a2) = resonance_boundary_point(1.2, l, upper).unwrap();
                let q = quartic_coeffs(&params(a1, a2, 1.0, 1.2));
                let d = quartic_discriminant(&q.lambda_coeffs());
                assert!(d.abs() <= 1e-8, "lambda0={l} upper={upper} D={d}");
            }
        }
        assert!(resonance_boundary_point(1.2, 0.0, true).is_err());
    }

    #[test]
    fn boundary_asymptotes() {
        let dd: f64 = 1.2;
        let (a1, a2) = resonance_boundary_point(dd, 1e3, true).unwrap();
        assert!((a2 + a1 - 2.0).abs() < 1e-3, "{a1} {a2}");
        let (a1, a2) = resonance_boundary_point(dd, -1e3, false).unwrap();
        assert!((a2 + a1 + 2.0).abs() < 1e-3, "{a1} {a2}");
        // lambda0 -> 0 from either side approaches a horizontal asymptote
        let (_, a2) = resonance_boundary_point(dd, -1e-8, true).unwrap();
        assert!((a2 + dd.sqrt()).abs() < 1e-3);
        let (_, a2) = resonance_boundary_point(dd, 1e-8, true).unwrap();
        assert!((a2 - dd.sqrt()).abs() < 1e-3);
    }

    #[test]
    fn bound_boundary_has_zero_root() {
        let a1 = bound_boundary_alpha1(0.0, 1.0, 1.0).unwrap();
        assert_eq!(a1, 1.0);
        let z = find_zeros(&params(a1, 0.0, 1.0, 1.0));
        assert!(z.iter().any(|z| z.k.norm() <= 1e-8));
        assert!(bound_boundary_alpha1(-1.0, 1.0, 1.0).is_err());
        // small beta collapses onto the axes
        assert!(bound_boundary_alpha1(0.5, 1e-8, 1.0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn two_bound_states_exclude_resonances() {
        let cfg = AtlasConfig {
            n: 60,
            ..AtlasConfig::default()
        };
        for p in atlas(&cfg).unwrap() {
            if p.n_b == 2 {
                assert_eq!(p.n_r, 0);
            }
        }
    }

    #[test]
    fn components_and_adjacency_on_toy_grid() {
        let mk = |n_b, n_r| RegionPoint {
            a1_over_beta: 0.0,
            a2_over_beta: 0.0,
            delta_d: 1.0,
            n_b,
            n_r,
            degenerate: false,
        };
        let grid = vec![mk(0, 1), mk(1, 0), mk(0, 1), mk(0, 1)];
        let comps = region_components(&grid, 2);
        assert_eq!(comps[&(0, 1)], 1);
        assert_eq!(comps[&(1, 0)], 1);
        let adj = region_adjacency(&grid, 2);
        assert_eq!(adj.len(), 1);
    }
}
