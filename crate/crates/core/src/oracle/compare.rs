//! Analytic vs integrated observables, row by row, with pass/fail per tolerance.

use serde::Serialize;

use crate::error::Result;
use crate::jost::{find_zeros, ZeroKind};
use crate::observables;
use crate::params::TwoChannelParams;

use super::ode::{self, IntegrationConfig, PotentialTable};

/// Fractions of `Delta` at which phase shifts are compared.
pub const PHASE_FRACTIONS: [f64; 4] = [0.15, 0.4, 0.65, 0.9];

/// Scattering lengths beyond this are too close to a threshold state to extrapolate.
pub const MAX_SCATTERING_LENGTH: f64 = 1e5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub phase_rad: f64,
    pub scattering_rel: f64,
    pub bound_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            phase_rad: 1e-4,
            scattering_rel: 1e-3,
            bound_rel: 1e-6,
        }
    }
}

impl Tolerances {
    /// The same tolerance for every quantity.
    pub fn uniform(tol: f64) -> Self {
        Self {
            phase_rad: tol,
            scattering_rel: tol,
            bound_rel: tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub quantity: String,
    pub analytic: f64,
    pub numeric: f64,
    pub error: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Comparison {
    fn new(quantity: String, analytic: f64, numeric: f64, error: f64, tol: f64) -> Self {
        Self {
            quantity,
            analytic,
            numeric,
            error,
            tol,
            pass: error <= tol,
        }
    }

    /// Error in units of the tolerance.
    pub fn severity(&self) -> f64 {
        if self.tol > 0.0 {
            self.error / self.tol
        } else if self.error > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub rows: Vec<Comparison>,
    pub skipped: Vec<String>,
    pub pass: bool,
}

impl OracleReport {
    pub fn worst(&self) -> Option<&Comparison> {
        self.rows.iter().max_by(|a, b| a.severity().total_cmp(&b.severity()))
    }
}

fn relative(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        ((a - b) / a).abs()
    }
}

/// Integrates the radial equation for `numeric` and compares with the closed forms
/// evaluated at `analytic` (normally the same parameters).
pub fn compare(numeric: &TwoChannelParams, analytic: &TwoChannelParams, tol: &Tolerances) -> Result<OracleReport> {
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    let delta = numeric.delta();

    let top = PHASE_FRACTIONS[PHASE_FRACTIONS.len() - 1] * delta;
    let table = PotentialTable::new(numeric, IntegrationConfig::for_energy(numeric, top))?;
    for f in PHASE_FRACTIONS {
        let e = f * delta;
        let num = ode::numeric_phase_shift(&table, e)?;
        let ana = observables::phase_shift(analytic, e.sqrt())?;
        rows.push(Comparison::new(
            format!("phase_shift(E={e})"),
            ana,
            num,
            ode::phase_distance_mod_pi(num, ana),
            tol.phase_rad,
        ));
    }

    let a = observables::scattering_length(analytic);
    if a.is_finite() && a.abs() <= MAX_SCATTERING_LENGTH {
        let num = ode::numeric_scattering_length(&table)?;
        // relative to the potential range when a itself is near zero
        let scale = a.abs().max(1.0 / numeric.kappa1());
        rows.push(Comparison::new(
            "scattering_length".into(),
            a,
            num,
            (a - num).abs() / scale,
            tol.scattering_rel,
        ));
    } else {
        skipped.push(format!("scattering_length: |a| = {} too large to extrapolate", a.abs()));
    }

    let floor = -numeric.kappa1().powi(2);
    let mut ana_e: Vec<f64> = find_zeros(analytic)
        .iter()
        .filter(|z| z.kind == ZeroKind::Bound && z.energy.re > floor)
        .map(|z| z.energy.re)
        .collect();
    ana_e.sort_by(f64::total_cmp);
    let bt = PotentialTable::new(numeric, IntegrationConfig::for_bound_states(numeric))?;
    let scan = ode::numeric_bound_states(&bt, (floor * (1.0 - 1e-9), 0.0), 400)?;
    skipped.extend(scan.warnings);
    let mut num_e = scan.energies;
    num_e.sort_by(f64::total_cmp);
    let (na, nn) = (ana_e.len() as f64, num_e.len() as f64);
    rows.push(Comparison::new(
        "bound_state_count".into(),
        na,
        nn,
        (na - nn).abs(),
        0.0,
    ));
    for (i, (&x, &y)) in ana_e.iter().zip(&num_e).enumerate() {
        rows.push(Comparison::new(
            format!("bound_energy[{i}]"),
            x,
            y,
            relative(x, y),
            tol.bound_rel,
        ));
    }

    let pass = rows.iter().all(|r| r.pass);
    Ok(OracleReport { rows, skipped, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_parameters_pass() {
        let p = TwoChannelParams::new(-0.103, -0.5, 0.05, 0.25, 1.0).unwrap();
        let r = compare(&p, &p, &Tolerances::default()).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(
            r.rows
                .iter()
                .find(|c| c.quantity == "bound_state_count")
                .unwrap()
                .analytic,
            1.0
        );
    }

    #[test]
    fn shifted_alpha1_fails() {
        let p = TwoChannelParams::new(-0.103, -0.5, 0.05, 0.25, 1.0).unwrap();
        let q = p.with_alphas(p.alpha1() + 1e-3, p.alpha2()).unwrap();
        let r = compare(&q, &p, &Tolerances::default()).unwrap();
        assert!(!r.pass);
        assert!(r.worst().unwrap().severity() > 1.0);
    }

    #[test]
    fn zero_potential_is_trivial() {
        // U0 = K gives X0 = 0
        let p = TwoChannelParams::new(1.0, 2.0, 0.0, 3.0, 1.0).unwrap();
        let r = compare(&p, &p, &Tolerances::default()).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r
            .rows
            .iter()
            .all(|c| c.analytic.abs() < 1e-12 || c.quantity.starts_with("bound")));
    }
}
