//! Evaluation of the Cox potential `V(r)` and its superpotential `U(r)`.

use nalgebra::{DMatrix, Matrix2};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CoxError, Result};
use crate::params::{checked_inverse, diag, symmetrize, CoxParamsN, TwoChannelParams};

/// Beyond `kappa_min * r` of this size the potential underflows and is returned as zero.
pub const FAR_FIELD: f64 = 350.0;

const BISECTION_STEPS: usize = 60;

/// Parameters together with the cached matrices needed to evaluate the potential.
#[derive(Debug, Clone)]
pub struct FactorizationState {
    params: CoxParamsN,
    x0: DMatrix<f64>,
    sqrt_k: DMatrix<f64>,
    /// `X0 K + K X0`
    anticomm: DMatrix<f64>,
    kappa_min: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSample {
    pub r: f64,
    pub v: DMatrix<f64>,
}

impl FactorizationState {
    pub fn new(params: CoxParamsN) -> Result<Self> {
        let x0 = params.x0()?;
        let k = params.kappa_matrix();
        let sqrt_k = diag(&params.kappa().iter().map(|x| x.sqrt()).collect::<Vec<_>>());
        let anticomm = &x0 * &k + &k * &x0;
        let kappa_min = params.kappa().iter().copied().fold(f64::INFINITY, f64::min);
        Ok(Self {
            params,
            x0,
            sqrt_k,
            anticomm,
            kappa_min,
        })
    }

    pub fn params(&self) -> &CoxParamsN {
        &self.params
    }

    pub fn x0(&self) -> &DMatrix<f64> {
        &self.x0
    }

    fn decay(&self, r: f64) -> DMatrix<f64> {
        diag(&self.params.kappa().iter().map(|k| (-k * r).exp()).collect::<Vec<_>>())
    }

    /// `X(r) = exp(-K r) X0 exp(-K r)`.
    pub fn x_at(&self, r: f64) -> DMatrix<f64> {
        let e = self.decay(r);
        &e * &self.x0 * &e
    }

    /// `sigma(r) = K^{-1/2} [exp(K r) + exp(-K r) X0]`, the factorization solution.
    ///
    /// Overflows for large `r`; intended for moderate distances and cross-checks.
    pub fn sigma_at(&self, r: f64) -> DMatrix<f64> {
        let kappa = self.params.kappa();
        let grow = diag(&kappa.iter().map(|k| (k * r).exp()).collect::<Vec<_>>());
        let inv_sqrt = diag(&kappa.iter().map(|k| 1.0 / k.sqrt()).collect::<Vec<_>>());
        inv_sqrt * (grow + self.decay(r) * &self.x0)
    }

    fn check_r(r: f64) -> Result<()> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(CoxError::InvalidParameter(format!(
                "radius must be finite and >= 0, got {r}"
            )));
        }
        Ok(())
    }

    fn inverse_at(&self, r: f64, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let n = x.nrows();
        let sum = DMatrix::<f64>::identity(n, n) + x;
        checked_inverse(&sum, "I + X(r)").map_err(|_| self.singular_error(r))
    }

    fn singular_error(&self, r: f64) -> CoxError {
        match self
            .singular_points()
            .into_iter()
            .min_by(|a, b| (a.r - r).abs().total_cmp(&(b.r - r).abs()))
        {
            Some(s) => CoxError::SingularPotential {
                r: s.r,
                lo: s.lo,
                hi: s.hi,
            },
            None => CoxError::SingularPotential { r, lo: r, hi: r },
        }
    }

    /// `U(r) = -K + 2 K^{1/2} [I + X(r)]^{-1} K^{1/2}`.
    pub fn superpotential_at(&self, r: f64) -> Result<DMatrix<f64>> {
        Self::check_r(r)?;
        let k = self.params.kappa_matrix();
        if self.kappa_min * r > FAR_FIELD {
            return Ok(k);
        }
        let x = self.x_at(r);
        let inv = self.inverse_at(r, &x)?;
        let u = &self.sqrt_k * inv * &self.sqrt_k * 2.0 - k;
        Ok(symmetrize(u))
    }

    /// `V(r) = -4 K^{1/2} [I+X]^{-1} (X K + K X) [I+X]^{-1} K^{1/2}`.
    ///
    /// This is the factored form of the expression with `exp(K r) + X0 exp(-K r)`;
    /// it never forms growing exponentials.
    pub fn potential_at(&self, r: f64) -> Result<DMatrix<f64>> {
        Self::check_r(r)?;
        let n = self.params.n_channels();
        if self.kappa_min * r > FAR_FIELD {
            return Ok(DMatrix::zeros(n, n));
        }
        let e = self.decay(r);
        let x = &e * &self.x0 * &e;
        let inv = self.inverse_at(r, &x)?;
        let middle = &e * &self.anticomm * &e;
        let v = &self.sqrt_k * &inv * middle * &inv * &self.sqrt_k * -4.0;
        Ok(symmetrize(v))
    }

    /// Number of non-positive eigenvalues of `I + X(r)`.
    ///
    /// `I + X(r)` is congruent to `exp(2Kr) + X0` but stays well scaled when the
    /// channel momenta are far apart, so its inertia is computed reliably.
    fn non_positive_count(&self, r: f64) -> usize {
        let n = self.params.n_channels();
        (DMatrix::<f64>::identity(n, n) + self.x_at(r))
            .symmetric_eigenvalues()
            .iter()
            .filter(|&&e| e <= 0.0)
            .count()
    }

    /// Points `r >= 0` where `I + X(r)` is singular, in increasing order.
    ///
    /// Each ordered eigenvalue of `exp(2Kr) + X0` is increasing in `r`, so each one
    /// that starts out non-positive crosses zero exactly once. The `j`-th one is
    /// non-positive exactly when `I + X(r)` has more than `j` non-positive
    /// eigenvalues. Empty for regular parameters.
    pub fn singular_points(&self) -> Vec<SingularPoint> {
        let lam_min = self
            .x0
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let mut out = Vec::new();
        for j in 0..self.non_positive_count(0.0) {
            let mut lo = 0.0;
            // past this radius exp(2 kappa_min r) > -lambda_min(X0)
            let mut hi = ((-lam_min).max(1.0).ln() / (2.0 * self.kappa_min)).max(0.0) * 1.0000001 + 1e-300;
            while self.non_positive_count(hi) > j {
                hi = hi * 2.0 + 1e-12;
            }
            for _ in 0..BISECTION_STEPS {
                let mid = 0.5 * (lo + hi);
                if self.non_positive_count(mid) > j {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push(SingularPoint {
                r: 0.5 * (lo + hi),
                lo,
                hi,
            });
        }
        out.sort_by(|a, b| a.r.total_cmp(&b.r));
        out
    }

    /// Smallest eigenvalue of `I + X(r)`.
    pub fn min_eigenvalue_at(&self, r: f64) -> f64 {
        let n = self.params.n_channels();
        (DMatrix::<f64>::identity(n, n) + self.x_at(r))
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Uniform grid on `[0, r_max]` including both endpoints.
    pub fn potential_grid(&self, r_max: f64, n_points: usize) -> Result<Vec<PotentialSample>> {
        if !(r_max > 0.0) || !r_max.is_finite() {
            return Err(CoxError::InvalidParameter(format!("r_max must be > 0, got {r_max}")));
        }
        if n_points < 2 {
            return Err(CoxError::InvalidParameter("n_points must be >= 2".into()));
        }
        if let Some(s) = self.singular_points().first() {
            return Err(CoxError::SingularPotential {
                r: s.r,
                lo: s.lo,
                hi: s.hi,
            });
        }
        let step = r_max / (n_points - 1) as f64;
        (0..n_points)
            .into_par_iter()
            .map(|i| {
                let r = if i == n_points - 1 { r_max } else { i as f64 * step };
                let v = self.potential_at(r)?;
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(CoxError::SingularPotential { r, lo: r, hi: r });
                }
                Ok(PotentialSample { r, v })
            })
            .collect()
    }
}

/// Location of a singularity of the potential with its bisection bracket.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SingularPoint {
    pub r: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Closed-form two-channel potential in terms of the entries of `X0`.
#[derive(Debug, Clone, Copy)]
pub struct TwoChannelPotential {
    k1: f64,
    k2: f64,
    x11: f64,
    x12: f64,
    x22: f64,
}

impl TwoChannelPotential {
    pub fn new(params: &TwoChannelParams) -> Result<Self> {
        let k1 = params.kappa1();
        let k2 = params.kappa2();
        let x0 = crate::params::u0_to_x0(&[k1, k2], &params.u0())?;
        Ok(Self {
            k1,
            k2,
            x11: x0[(0, 0)],
            x12: x0[(0, 1)],
            x22: x0[(1, 1)],
        })
    }

    pub fn x0(&self) -> Matrix2<f64> {
        Matrix2::new(self.x11, self.x12, self.x12, self.x22)
    }

    fn diagonal(k1: f64, k2: f64, x11: f64, x22: f64, det: f64, r: f64, denom: f64) -> f64 {
        let e1 = (-2.0 * k1 * r).exp();
        let e2 = (-2.0 * k2 * r).exp();
        let x12sq = x11 * x22 - det;
        let num = x11 * k1 + (2.0 * x11 * x22 * k1 - x12sq * (k1 + k2)) * e2 + x22 * det * k1 * e2 * e2;
        -8.0 * k1 * e1 * num / denom
    }

    pub fn at(&self, r: f64) -> Result<Matrix2<f64>> {
        FactorizationState::check_r(r)?;
        let (k1, k2) = (self.k1, self.k2);
        if k1.min(k2) * r > FAR_FIELD {
            return Ok(Matrix2::zeros());
        }
        let det = self.x11 * self.x22 - self.x12 * self.x12;
        let e1 = (-2.0 * k1 * r).exp();
        let e2 = (-2.0 * k2 * r).exp();
        // det(I + X(r))
        let bracket = 1.0 + self.x11 * e1 + self.x22 * e2 + det * e1 * e2;
        if !(bracket > 0.0) {
            return Err(CoxError::SingularPotential { r, lo: r, hi: r });
        }
        let denom = bracket * bracket;
        let v11 = Self::diagonal(k1, k2, self.x11, self.x22, det, r, denom);
        let v22 = Self::diagonal(k2, k1, self.x22, self.x11, det, r, denom);
        let v12 = -4.0
            * self.x12
            * (k1 * k2).sqrt()
            * (-(k1 + k2) * r).exp()
            * (k1 + k2 + self.x11 * (k2 - k1) * e1 + self.x22 * (k1 - k2) * e2 - det * (k1 + k2) * e1 * e2)
            / denom;
        Ok(Matrix2::new(v11, v12, v12, v22))
    }
}

/// Closed-form two-channel potential at one radius.
pub fn potential2x2_at(params: &TwoChannelParams, r: f64) -> Result<Matrix2<f64>> {
    TwoChannelPotential::new(params)?.at(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cs_params() -> TwoChannelParams {
        TwoChannelParams::new(-0.103, -0.5, 0.05, 0.25, 1.0).unwrap()
    }

    fn max_abs(m: &DMatrix<f64>) -> f64 {
        m.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    #[test]
    fn superpotential_limits() {
        let st = FactorizationState::new(cs_params().to_general()).unwrap();
        let u = st.superpotential_at(0.0).unwrap();
        assert!(max_abs(&(u - st.params().u0())) < 1e-13);
        let u = st.superpotential_at(45.0).unwrap();
        assert!(max_abs(&(u - st.params().kappa_matrix())) < 1e-12);
    }

    #[test]
    fn superpotential_is_log_derivative_of_sigma() {
        let p = CoxParamsN::new(&[0.0, 0.7], -0.6, &[0.3, 0.4, -0.2]).unwrap();
        let st = FactorizationState::new(p).unwrap();
        let r = 0.7;
        let h = 1e-5;
        let ds = (st.sigma_at(r + h) - st.sigma_at(r - h)) / (2.0 * h);
        let u_fd = ds * st.sigma_at(r).try_inverse().unwrap();
        let u = st.superpotential_at(r).unwrap();
        assert!(max_abs(&(u_fd - u)) < 1e-8);
    }

    #[test]
    fn zero_x0_gives_zero_potential() {
        let p = CoxParamsN::new(&[0.0, 1.0], -1.0, &[1.0, 0.0, 2f64.sqrt()]).unwrap();
        let st = FactorizationState::new(p).unwrap();
        for r in [0.0, 0.5, 3.0] {
            assert!(max_abs(&st.potential_at(r).unwrap()) < 1e-15);
        }
    }

    #[test]
    fn diagonal_x0_has_no_coupling() {
        let p = TwoChannelParams::new(0.3, -0.4, 0.0, 1.0, 1.0).unwrap();
        let st = FactorizationState::new(p.to_general()).unwrap();
        let cf = TwoChannelPotential::new(&p).unwrap();
        for r in [0.0, 0.2, 1.0, 4.0] {
            assert_eq!(st.potential_at(r).unwrap()[(0, 1)].abs(), 0.0);
            assert_eq!(cf.at(r).unwrap()[(0, 1)], 0.0);
        }
    }

    #[test]
    fn potential_is_minus_twice_du_dr() {
        let st = FactorizationState::new(cs_params().to_general()).unwrap();
        let h = 1e-5;
        for i in 0..100 {
            let r = 0.05 + 0.1 * i as f64;
            let du = (st.superpotential_at(r + h).unwrap() - st.superpotential_at(r - h).unwrap()) / (2.0 * h);
            let v = st.potential_at(r).unwrap();
            let err = max_abs(&(&v + du * 2.0));
            assert!(err <= 1e-6 * max_abs(&v).max(1e-3), "r={r} err={err}");
        }
    }

    #[test]
    fn closed_form_matches_matrix_form() {
        let p = cs_params();
        let st = FactorizationState::new(p.to_general()).unwrap();
        let cf = TwoChannelPotential::new(&p).unwrap();
        for i in 0..=200 {
            let r = 0.1 * i as f64;
            let a = st.potential_at(r).unwrap();
            let b = cf.at(r).unwrap();
            for (x, y) in a.iter().zip(b.iter()) {
                assert!((x - y).abs() <= 1e-12, "r={r}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn far_field_is_zero() {
        let st = FactorizationState::new(cs_params().to_general()).unwrap();
        assert!(st.potential_at(400.0).unwrap().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn grid_endpoints_and_errors() {
        let st = FactorizationState::new(cs_params().to_general()).unwrap();
        let g = st.potential_grid(10.0, 2).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g[0].r, 0.0);
        assert_eq!(g[1].r, 10.0);
        assert!(st.potential_grid(10.0, 1).is_err());
        assert!(st.potential_grid(0.0, 5).is_err());
    }

    #[test]
    fn irregular_parameters_locate_singularity() {
        let p = TwoChannelParams::new(-1.5, 0.3, 0.2, 1.0, 1.0).unwrap();
        let st = FactorizationState::new(p.to_general()).unwrap();
        let pts = st.singular_points();
        assert!(!pts.is_empty());
        let s = pts[0];
        assert!(s.hi - s.lo < 1e-6);
        assert!(st.min_eigenvalue_at(s.r - 1e-6) < 0.0 && st.min_eigenvalue_at(s.r + 1e-6) > 0.0);
        match st.potential_grid(20.0, 101) {
            Err(CoxError::SingularPotential { r, .. }) => assert!((r - s.r).abs() < 1e-12),
            other => panic!("expected singular potential error, got {other:?}"),
        }
    }

    #[test]
    fn two_negative_eigenvalues_both_found() {
        // det(I+X) keeps its sign at r = 0 here; ordered eigenvalues still detect both roots.
        let p = CoxParamsN::new(&[0.0, 0.5], -1.0, &[-3.0, 0.0, -3.0]).unwrap();
        let st = FactorizationState::new(p).unwrap();
        let pts = st.singular_points();
        assert_eq!(pts.len(), 2);
        assert!(pts[0].r < pts[1].r);
        for s in pts {
            let det = (DMatrix::<f64>::identity(2, 2) + st.x_at(s.r)).determinant();
            assert!(det.abs() < 1e-9, "det = {det}");
        }
    }
}
