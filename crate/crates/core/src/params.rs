//! Parameter sets for the Cox potential.
//!
//! The free parameters of the N-channel model are the channel thresholds, the
//! factorization energy (which fixes the factorization wave numbers
//! `kappa_i = sqrt(Delta_i - E_f)`) and a real symmetric matrix `U0`, the value
//! of the superpotential at the origin. Two other parameterizations are in use,
//! `X0` and `A`; the conversions between them live here together with the
//! regularity test (`K + U0` positive definite).

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{CoxError, Result};

/// Relative pivot tolerance used when deciding positive definiteness.
pub const PIVOT_TOLERANCE: f64 = 1e-12;

/// Matrices whose reciprocal condition number falls below this are treated as singular.
const RCOND_SINGULAR: f64 = 1e-14;

/// Factorization wave numbers `kappa_i = sqrt(Delta_i - E_f)`.
pub fn kappa_from_energy(thresholds: &[f64], factorization_energy: f64) -> Result<Vec<f64>> {
    let lowest = thresholds.iter().copied().fold(f64::INFINITY, f64::min);
    if thresholds.is_empty() || !(factorization_energy < lowest) {
        return Err(CoxError::FactorizationEnergyTooHigh {
            energy: factorization_energy,
            lowest,
        });
    }
    Ok(thresholds.iter().map(|&d| (d - factorization_energy).sqrt()).collect())
}

pub(crate) fn diag(values: &[f64]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(values))
}

pub(crate) fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

/// Inverse with a conditioning check; `what` names the matrix in the error.
pub(crate) fn checked_inverse(m: &DMatrix<f64>, what: &'static str) -> Result<DMatrix<f64>> {
    let inv = m
        .clone()
        .try_inverse()
        .ok_or(CoxError::ParameterizationBoundary(what))?;
    let norm1 = |a: &DMatrix<f64>| {
        a.column_iter()
            .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    };
    let rcond = 1.0 / (norm1(m) * norm1(&inv));
    if !rcond.is_finite() || rcond < RCOND_SINGULAR {
        return Err(CoxError::ParameterizationBoundary(what));
    }
    Ok(inv)
}

/// `X0 = K^{-1/2} (K - U0) (K + U0)^{-1} K^{1/2}`.
pub fn u0_to_x0(kappa: &[f64], u0: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let k = diag(kappa);
    let sqrt_k: Vec<f64> = kappa.iter().map(|x| x.sqrt()).collect();
    let inv_sqrt_k: Vec<f64> = sqrt_k.iter().map(|x| 1.0 / x).collect();
    let sum_inv = checked_inverse(&(&k + u0), "K + U0")?;
    let x0 = diag(&inv_sqrt_k) * (&k - u0) * sum_inv * diag(&sqrt_k);
    Ok(symmetrize(x0))
}

/// `U0 = K^{1/2} (I - X0) (I + X0)^{-1} K^{1/2}`.
pub fn x0_to_u0(kappa: &[f64], x0: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = kappa.len();
    let id = DMatrix::<f64>::identity(n, n);
    let sqrt_k = diag(&kappa.iter().map(|x| x.sqrt()).collect::<Vec<_>>());
    let sum_inv = checked_inverse(&(&id + x0), "I + X0")?;
    let u0 = &sqrt_k * (&id - x0) * sum_inv * &sqrt_k;
    Ok(symmetrize(u0))
}

/// `A = -2 (K - U0) (K + U0)^{-1} K`.
pub fn u0_to_a(kappa: &[f64], u0: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let k = diag(kappa);
    let sum_inv = checked_inverse(&(&k + u0), "K + U0")?;
    Ok((&k - u0) * sum_inv * &k * -2.0)
}

/// `A = -2 K^{1/2} X0 K^{1/2}`.
pub fn x0_to_a(kappa: &[f64], x0: &DMatrix<f64>) -> DMatrix<f64> {
    let sqrt_k = diag(&kappa.iter().map(|x| x.sqrt()).collect::<Vec<_>>());
    &sqrt_k * x0 * &sqrt_k * -2.0
}

/// Outcome of the positive-definiteness test on `K + U0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regularity {
    Regular,
    /// Smallest eigenvalue within tolerance of zero: a bound state sits at the
    /// factorization energy.
    Boundary,
    Indefinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub status: Regularity,
    pub min_eigenvalue: f64,
}

impl RegularityReport {
    pub fn is_regular(&self) -> bool {
        self.status == Regularity::Regular
    }
}

/// Symmetric matrix classification: LDL^T pivots decide, eigenvalues diagnose.
pub fn classify_symmetric(m: &DMatrix<f64>) -> RegularityReport {
    let n = m.nrows();
    let scale = (0..n)
        .map(|i| m[(i, i)].abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let tol = PIVOT_TOLERANCE * scale;

    let mut l = DMatrix::<f64>::identity(n, n);
    let mut d = vec![0.0; n];
    let mut all_positive = true;
    for j in 0..n {
        let mut dj = m[(j, j)];
        for k in 0..j {
            dj -= l[(j, k)] * l[(j, k)] * d[k];
        }
        d[j] = dj;
        if dj <= tol {
            all_positive = false;
            break;
        }
        for i in (j + 1)..n {
            let mut v = m[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)] * d[k];
            }
            l[(i, j)] = v / dj;
        }
    }

    let min_eigenvalue = m
        .clone()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let status = if all_positive {
        Regularity::Regular
    } else if min_eigenvalue >= -tol {
        Regularity::Boundary
    } else {
        Regularity::Indefinite
    };
    RegularityReport { status, min_eigenvalue }
}

/// N-channel parameter set: thresholds (first one shifted to zero), factorization
/// energy and the symmetric matrix `U0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoxParamsN {
    thresholds: Vec<f64>,
    factorization_energy: f64,
    u0_upper: Vec<f64>,
    u0: DMatrix<f64>,
    kappa: Vec<f64>,
    threshold_shift: f64,
}

fn upper_len(n: usize) -> usize {
    n * (n + 1) / 2
}

fn matrix_from_upper(n: usize, upper: &[f64]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    let mut idx = 0;
    for i in 0..n {
        for j in i..n {
            m[(i, j)] = upper[idx];
            m[(j, i)] = upper[idx];
            idx += 1;
        }
    }
    m
}

impl CoxParamsN {
    /// Builds a parameter set from thresholds, factorization energy and the
    /// row-major upper triangle of `U0`.
    ///
    /// Thresholds must be strictly increasing; they are shifted so that the
    /// first one is zero and the same shift is applied to the factorization
    /// energy.
    pub fn new(thresholds: &[f64], factorization_energy: f64, u0_upper: &[f64]) -> Result<Self> {
        let n = thresholds.len();
        if n < 2 {
            return Err(CoxError::InvalidParameter("at least two channels are required".into()));
        }
        if u0_upper.len() != upper_len(n) {
            return Err(CoxError::InvalidParameter(format!(
                "U0 upper triangle needs {} entries, got {}",
                upper_len(n),
                u0_upper.len()
            )));
        }
        if thresholds.iter().chain(u0_upper).any(|x| !x.is_finite()) || !factorization_energy.is_finite() {
            return Err(CoxError::InvalidParameter("non-finite parameter".into()));
        }
        if thresholds.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(CoxError::InvalidParameter(
                "thresholds must be strictly increasing".into(),
            ));
        }
        let shift = thresholds[0];
        let shifted: Vec<f64> = thresholds.iter().map(|d| d - shift).collect();
        let energy = factorization_energy - shift;
        let kappa = kappa_from_energy(&shifted, energy)?;
        Ok(Self {
            u0: matrix_from_upper(n, u0_upper),
            thresholds: shifted,
            factorization_energy: energy,
            u0_upper: u0_upper.to_vec(),
            kappa,
            threshold_shift: shift,
        })
    }

    /// Like [`CoxParamsN::new`] but takes the full matrix; only its upper triangle is read.
    pub fn from_matrix(thresholds: &[f64], factorization_energy: f64, u0: &DMatrix<f64>) -> Result<Self> {
        let n = thresholds.len();
        if u0.nrows() != n || u0.ncols() != n {
            return Err(CoxError::InvalidParameter("U0 has the wrong shape".into()));
        }
        let mut upper = Vec::with_capacity(upper_len(n));
        for i in 0..n {
            for j in i..n {
                upper.push(u0[(i, j)]);
            }
        }
        Self::new(thresholds, factorization_energy, &upper)
    }

    /// Builds the set from `X0` instead of `U0`.
    pub fn from_x0(thresholds: &[f64], factorization_energy: f64, x0: &DMatrix<f64>) -> Result<Self> {
        let shift = thresholds.first().copied().unwrap_or(0.0);
        let shifted: Vec<f64> = thresholds.iter().map(|d| d - shift).collect();
        let kappa = kappa_from_energy(&shifted, factorization_energy - shift)?;
        let u0 = x0_to_u0(&kappa, x0)?;
        Self::from_matrix(thresholds, factorization_energy, &u0)
    }

    /// Constructor that rejects parameter sets with a singular potential.
    pub fn new_regular(thresholds: &[f64], factorization_energy: f64, u0_upper: &[f64]) -> Result<Self> {
        let params = Self::new(thresholds, factorization_energy, u0_upper)?;
        let report = params.regularity();
        if !report.is_regular() {
            return Err(CoxError::Irregular {
                min_eigenvalue: report.min_eigenvalue,
            });
        }
        Ok(params)
    }

    pub fn n_channels(&self) -> usize {
        self.thresholds.len()
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    /// Amount subtracted from the supplied thresholds at construction.
    pub fn threshold_shift(&self) -> f64 {
        self.threshold_shift
    }

    pub fn factorization_energy(&self) -> f64 {
        self.factorization_energy
    }

    pub fn u0(&self) -> &DMatrix<f64> {
        &self.u0
    }

    pub fn u0_upper_triangle(&self) -> &[f64] {
        &self.u0_upper
    }

    pub fn kappa(&self) -> &[f64] {
        &self.kappa
    }

    pub fn kappa_matrix(&self) -> DMatrix<f64> {
        diag(&self.kappa)
    }

    pub fn x0(&self) -> Result<DMatrix<f64>> {
        u0_to_x0(&self.kappa, &self.u0)
    }

    pub fn a_matrix(&self) -> Result<DMatrix<f64>> {
        u0_to_a(&self.kappa, &self.u0)
    }

    /// Regularity of the potential: `K + U0` positive definite.
    pub fn regularity(&self) -> RegularityReport {
        classify_symmetric(&(self.kappa_matrix() + &self.u0))
    }

    /// Scale transformation `U0 -> g U0`, `Delta -> g^2 Delta`, `E_f -> g^2 E_f`.
    pub fn rescale(&self, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(CoxError::InvalidParameter(format!(
                "scale factor must be positive, got {gamma}"
            )));
        }
        let thresholds: Vec<f64> = self.thresholds.iter().map(|d| d * gamma * gamma).collect();
        let upper: Vec<f64> = self.u0_upper.iter().map(|u| u * gamma).collect();
        Self::new(&thresholds, self.factorization_energy * gamma * gamma, &upper)
    }
}

#[derive(Serialize, Deserialize)]
struct CoxParamsNRepr {
    thresholds: Vec<f64>,
    factorization_energy: f64,
    u0_upper_triangle: Vec<f64>,
}

impl Serialize for CoxParamsN {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CoxParamsNRepr {
            thresholds: self.thresholds.clone(),
            factorization_energy: self.factorization_energy,
            u0_upper_triangle: self.u0_upper.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CoxParamsN {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = CoxParamsNRepr::deserialize(d)?;
        CoxParamsN::new(&r.thresholds, r.factorization_energy, &r.u0_upper_triangle).map_err(serde::de::Error::custom)
    }
}

/// The two-channel parameter set `(alpha1, alpha2, beta, Delta, kappa1)`.
///
/// `U0 = [[alpha1, beta], [beta, alpha2]]`, thresholds `(0, Delta)` and
/// `kappa2 = sqrt(kappa1^2 + Delta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TwoChannelRepr", into = "TwoChannelRepr")]
pub struct TwoChannelParams {
    alpha1: f64,
    alpha2: f64,
    beta: f64,
    delta: f64,
    kappa1: f64,
}

#[derive(Serialize, Deserialize)]
struct TwoChannelRepr {
    alpha1: f64,
    alpha2: f64,
    beta: f64,
    delta: f64,
    kappa1: f64,
}

impl TryFrom<TwoChannelRepr> for TwoChannelParams {
    type Error = CoxError;
    fn try_from(r: TwoChannelRepr) -> Result<Self> {
        TwoChannelParams::new(r.alpha1, r.alpha2, r.beta, r.delta, r.kappa1)
    }
}

impl From<TwoChannelParams> for TwoChannelRepr {
    fn from(p: TwoChannelParams) -> Self {
        TwoChannelRepr {
            alpha1: p.alpha1,
            alpha2: p.alpha2,
            beta: p.beta,
            delta: p.delta,
            kappa1: p.kappa1,
        }
    }
}

impl TwoChannelParams {
    pub fn new(alpha1: f64, alpha2: f64, beta: f64, delta: f64, kappa1: f64) -> Result<Self> {
        if [alpha1, alpha2, beta, delta, kappa1].iter().any(|x| !x.is_finite()) {
            return Err(CoxError::InvalidParameter("non-finite parameter".into()));
        }
        if beta < 0.0 {
            return Err(CoxError::InvalidParameter(format!("beta must be >= 0, got {beta}")));
        }
        if !(delta > 0.0) {
            return Err(CoxError::InvalidParameter(format!("Delta must be > 0, got {delta}")));
        }
        if !(kappa1 > 0.0) {
            return Err(CoxError::InvalidParameter(format!("kappa1 must be > 0, got {kappa1}")));
        }
        Ok(Self {
            alpha1,
            alpha2,
            beta,
            delta,
            kappa1,
        })
    }

    pub fn alpha1(&self) -> f64 {
        self.alpha1
    }
    pub fn alpha2(&self) -> f64 {
        self.alpha2
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn kappa1(&self) -> f64 {
        self.kappa1
    }
    pub fn kappa2(&self) -> f64 {
        (self.kappa1 * self.kappa1 + self.delta).sqrt()
    }

    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        Self::new(self.alpha1, self.alpha2, self.beta, delta, self.kappa1)
    }

    pub fn with_kappa1(&self, kappa1: f64) -> Result<Self> {
        Self::new(self.alpha1, self.alpha2, self.beta, self.delta, kappa1)
    }

    pub fn with_alphas(&self, alpha1: f64, alpha2: f64) -> Result<Self> {
        Self::new(alpha1, alpha2, self.beta, self.delta, self.kappa1)
    }

    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        Self::new(self.alpha1, self.alpha2, beta, self.delta, self.kappa1)
    }

    pub fn u0(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[self.alpha1, self.beta, self.beta, self.alpha2])
    }

    /// The equivalent N-channel set (thresholds `(0, Delta)`, `E_f = -kappa1^2`).
    pub fn to_general(&self) -> CoxParamsN {
        CoxParamsN::new(
            &[0.0, self.delta],
            -self.kappa1 * self.kappa1,
            &[self.alpha1, self.beta, self.alpha2],
        )
        .expect("validated two-channel parameters are always a valid N-channel set")
    }

    /// `kappa1 > -alpha1` and `kappa2 > beta^2/(kappa1 + alpha1) - alpha2`.
    pub fn satisfies_regularity_inequalities(&self) -> bool {
        let s1 = self.kappa1 + self.alpha1;
        s1 > 0.0 && self.kappa2() > self.beta * self.beta / s1 - self.alpha2
    }

    pub fn regularity(&self) -> RegularityReport {
        self.to_general().regularity()
    }

    pub fn is_regular(&self) -> bool {
        self.regularity().is_regular()
    }

    /// Smallest `kappa1` above which the potential is regular.
    ///
    /// Both regularity inequalities are monotone in `kappa1`, so the set of
    /// admissible values is an open half line.
    pub fn regular_kappa1_threshold(alpha1: f64, alpha2: f64, beta: f64, delta: f64) -> f64 {
        let ok = |k1: f64| {
            let s1 = k1 + alpha1;
            s1 > 0.0 && ((k1 * k1 + delta).sqrt() + alpha2) * s1 > beta * beta
        };
        let mut lo = (-alpha1).max(0.0);
        if ok(lo) && lo > 0.0 {
            return lo;
        }
        let mut hi = lo.max(1e-3) * 2.0 + 1.0;
        while !ok(hi) {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if ok(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        hi
    }

    /// Scale transformation: alphas, beta, kappa scale by `gamma`, Delta by `gamma^2`.
    pub fn rescale(&self, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(CoxError::InvalidParameter(format!(
                "scale factor must be positive, got {gamma}"
            )));
        }
        Self::new(
            gamma * self.alpha1,
            gamma * self.alpha2,
            gamma * self.beta,
            gamma * gamma * self.delta,
            gamma * self.kappa1,
        )
    }

    /// Dimensionless threshold `Delta / beta^2`.
    pub fn delta_d(&self) -> f64 {
        self.delta / (self.beta * self.beta)
    }
}
