//! Jost matrix, Jost determinant, its zeros and the S-matrix.

use nalgebra::{DMatrix, Matrix2, Matrix4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CoxError, Result};
use crate::params::{CoxParamsN, TwoChannelParams};

pub type C64 = Complex64;

const I: C64 = C64::new(0.0, 1.0);

/// Tolerance on `|Re z| / (1 + |Im z|)` for a point to count as purely imaginary.
pub const AXIS_TOL: f64 = 1e-8;

/// Roots closer than this are flagged as a double root.
pub const DEGENERATE_SEPARATION: f64 = 1e-6;

fn is_pole(z: C64, kappa: f64) -> bool {
    (z + I * kappa).norm() <= 1e-14 * (z.norm() + kappa)
}

/// `F(k) = (K - i diag(k))^{-1} (U0 - i diag(k))` for an N-channel set.
pub fn jost_matrix_n(params: &CoxParamsN, k: &[C64]) -> Result<DMatrix<C64>> {
    let n = params.n_channels();
    if k.len() != n {
        return Err(CoxError::InvalidParameter(format!(
            "expected {n} wave numbers, got {}",
            k.len()
        )));
    }
    let kappa = params.kappa();
    if let Some(channel) = (0..n).find(|&i| is_pole(k[i], kappa[i])) {
        return Err(CoxError::JostPole { channel });
    }
    let u0 = params.u0();
    // the prefactor is diagonal, so each row is divided by kappa_i - i k_i
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let mut m = C64::from(u0[(i, j)]);
        if i == j {
            m -= I * k[i];
        }
        m / (kappa[i] - I * k[i])
    }))
}

/// Two-channel Jost matrix in terms of `(k, p)`.
pub fn jost_matrix_2(params: &TwoChannelParams, k: C64, p: C64) -> Result<Matrix2<C64>> {
    let (a1, a2, b) = (params.alpha1(), params.alpha2(), params.beta());
    let (k1, k2) = (params.kappa1(), params.kappa2());
    if is_pole(k, k1) {
        return Err(CoxError::JostPole { channel: 0 });
    }
    if is_pole(p, k2) {
        return Err(CoxError::JostPole { channel: 1 });
    }
    let d1 = k + I * k1;
    let d2 = p + I * k2;
    Ok(Matrix2::new(
        (k + I * a1) / d1,
        I * b / d1,
        I * b / d2,
        (p + I * a2) / d2,
    ))
}

/// Numerator of the Jost determinant, `(k + i a1)(p + i a2) + beta^2`.
pub fn coupling_residual(params: &TwoChannelParams, k: C64, p: C64) -> C64 {
    (k + I * params.alpha1()) * (p + I * params.alpha2()) + params.beta() * params.beta()
}

/// Jost determinant `f(k, p)`.
pub fn jost_det(params: &TwoChannelParams, k: C64, p: C64) -> Result<C64> {
    if is_pole(k, params.kappa1()) {
        return Err(CoxError::JostPole { channel: 0 });
    }
    if is_pole(p, params.kappa2()) {
        return Err(CoxError::JostPole { channel: 1 });
    }
    Ok(coupling_residual(params, k, p) / ((k + I * params.kappa1()) * (p + I * params.kappa2())))
}

/// Coefficients of `k^4 + i a1 k^3 + a2 k^2 + i a3 k + a4 = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuarticCoeffs {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
}

impl QuarticCoeffs {
    /// Real coefficients `[1, c1, c2, c3, c4]` of the same quartic in `lambda`, `k = i lambda`.
    pub fn lambda_coeffs(&self) -> [f64; 5] {
        [1.0, self.a1, -self.a2, -self.a3, self.a4]
    }

    pub fn eval(&self, k: C64) -> C64 {
        (((k + I * self.a1) * k + self.a2) * k + I * self.a3) * k + self.a4
    }

    pub fn derivative(&self, k: C64) -> C64 {
        ((k * 4.0 + I * (3.0 * self.a1)) * k + 2.0 * self.a2) * k + I * self.a3
    }
}

pub fn quartic_coeffs(params: &TwoChannelParams) -> QuarticCoeffs {
    let (a1, a2, b, d) = (params.alpha1(), params.alpha2(), params.beta(), params.delta());
    let b2 = b * b;
    QuarticCoeffs {
        a1: 2.0 * a1,
        a2: a2 * a2 - a1 * a1 - d,
        a3: 2.0 * (a1 * (a2 * a2 - d) - a2 * b2),
        a4: -a1 * a1 * (a2 * a2 - d) + 2.0 * a2 * b2 * a1 - b2 * b2,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroKind {
    Bound,
    Virtual,
    Resonance,
}

impl ZeroKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ZeroKind::Bound => "bound",
            ZeroKind::Virtual => "virtual",
            ZeroKind::Resonance => "resonance",
        }
    }
}

/// One zero of the two-channel Jost determinant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralZero {
    pub k: C64,
    pub p: C64,
    pub energy: C64,
    pub kind: ZeroKind,
    /// Signs of `(Im k, Im p)`; zero when the imaginary part vanishes exactly.
    pub sheet: (i8, i8),
    /// Larger of the threshold and coupling residuals.
    pub residual: f64,
    /// Part of a double root.
    pub degenerate: bool,
    /// `beta = 0` zero at `k = -i alpha1`, where the coupling relation does not fix `p`.
    pub uncoupled: bool,
}

fn on_axis(z: C64) -> bool {
    z.re.abs() <= AXIS_TOL * (1.0 + z.im.abs())
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Classification by position only; no residual check.
pub fn kind_of(k: C64, p: C64) -> (ZeroKind, (i8, i8)) {
    let sheet = (sign(k.im), sign(p.im));
    let kind = if on_axis(k) && on_axis(p) {
        if k.im > 0.0 && p.im > 0.0 {
            ZeroKind::Bound
        } else {
            ZeroKind::Virtual
        }
    } else {
        ZeroKind::Resonance
    };
    (kind, sheet)
}

fn residual_of(params: &TwoChannelParams, k: C64, p: C64) -> f64 {
    let threshold = (p * p - k * k + params.delta()).norm();
    threshold.max(coupling_residual(params, k, p).norm())
}

fn residual_scale(k: C64, p: C64) -> f64 {
    1f64.max(k.norm_sqr()).max(p.norm_sqr())
}

/// Classifies `(k, p)` after checking that it is a zero to within `tol`
/// (relative to `max(1, |k|^2, |p|^2)`).
pub fn classify_zero(params: &TwoChannelParams, k: C64, p: C64, tol: f64) -> Result<(ZeroKind, (i8, i8))> {
    let residual = residual_of(params, k, p);
    if residual > tol * residual_scale(k, p) {
        return Err(CoxError::NotAZero { residual });
    }
    Ok(kind_of(k, p))
}

/// Roots of the real quartic `c[0] x^4 + ... + c[4]` from its companion matrix.
fn companion_roots(c: &[f64; 5]) -> [C64; 4] {
    let mut m = Matrix4::<f64>::zeros();
    for j in 0..4 {
        m[(0, j)] = -c[j + 1] / c[0];
    }
    for i in 1..4 {
        m[(i, i - 1)] = 1.0;
    }
    let ev = m.complex_eigenvalues();
    [ev[0], ev[1], ev[2], ev[3]]
}

fn polish(q: &QuarticCoeffs, k: C64) -> C64 {
    let d = q.derivative(k);
    if d.norm() == 0.0 {
        return k;
    }
    let next = k - q.eval(k) / d;
    if next.is_finite() && q.eval(next).norm() < q.eval(k).norm() {
        next
    } else {
        k
    }
}

fn csqrt(z: C64) -> C64 {
    z.sqrt()
}

/// `p` partnered with the zero `k` through the coupling relation.
fn partner_p(params: &TwoChannelParams, k: C64) -> C64 {
    let (a1, a2, b) = (params.alpha1(), params.alpha2(), params.beta());
    let shifted = k + I * a1;
    let from_coupling = -I * a2 - b * b / shifted;
    let root = csqrt(k * k - params.delta());
    let from_threshold = if (root - from_coupling).norm() <= (-root - from_coupling).norm() {
        root
    } else {
        -root
    };
    // near k = -i alpha1 the coupling form loses all precision
    if shifted.norm() < 1e-4 * (1.0 + k.norm()) || !from_coupling.is_finite() {
        from_threshold
    } else {
        from_coupling
    }
}

fn make_zero(params: &TwoChannelParams, k: C64, p: C64, uncoupled: bool) -> SpectralZero {
    let (kind, sheet) = kind_of(k, p);
    SpectralZero {
        k,
        p,
        energy: k * k,
        kind,
        sheet,
        residual: residual_of(params, k, p),
        degenerate: false,
        uncoupled,
    }
}

/// The four zeros of the Jost determinant, sorted by kind then `Im k`.
pub fn find_zeros(params: &TwoChannelParams) -> Vec<SpectralZero> {
    let mut zeros: Vec<SpectralZero> = if params.beta() == 0.0 {
        let (a1, a2, d) = (params.alpha1(), params.alpha2(), params.delta());
        let k0 = -I * a1;
        let p0 = I * (a1 * a1 + d).sqrt();
        let s = csqrt(C64::from(a2 * a2 - d));
        vec![
            make_zero(params, k0, p0, true),
            make_zero(params, k0, -p0, true),
            make_zero(params, I * s, -I * a2, false),
            make_zero(params, -I * s, -I * a2, false),
        ]
    } else {
        let q = quartic_coeffs(params);
        companion_roots(&q.lambda_coeffs())
            .iter()
            .map(|&lam| {
                let k = polish(&q, I * lam);
                make_zero(params, k, partner_p(params, k), false)
            })
            .collect()
    };
    for i in 0..4 {
        for j in 0..4 {
            if i != j && (zeros[i].k - zeros[j].k).norm() < DEGENERATE_SEPARATION {
                zeros[i].degenerate = true;
            }
        }
    }
    zeros.sort_by(|a, b| a.kind.cmp(&b.kind).then(a.k.im.total_cmp(&b.k.im)));
    zeros
}

/// Full two-channel S-matrix for `E > Delta`.
pub fn smatrix_full(params: &TwoChannelParams, energy: f64) -> Result<Matrix2<C64>> {
    if !(energy > params.delta()) {
        return Err(CoxError::EnergyOutOfRange {
            energy,
            reason: "both channels must be open; use the open-channel S below the upper threshold",
        });
    }
    let k = C64::from(energy.sqrt());
    let p = C64::from((energy - params.delta()).sqrt());
    let f = jost_det(params, k, p)?;
    let b = params.beta();
    let off = -2.0 * I * b * (k * p).sqrt();
    let s12 = off / (k * k + params.kappa1() * params.kappa1());
    let s21 = off / (p * p + params.kappa2() * params.kappa2());
    Ok(Matrix2::new(jost_det(params, -k, p)?, s12, s21, jost_det(params, k, -p)?) / f)
}

/// `S = K^{-1/2} F(-k) F(k)^{-1} K^{1/2}` for real channel wave numbers.
pub fn smatrix_from_jost(params: &CoxParamsN, k: &[f64]) -> Result<DMatrix<C64>> {
    let kc: Vec<C64> = k.iter().map(|&x| C64::from(x)).collect();
    let minus: Vec<C64> = kc.iter().map(|&x| -x).collect();
    let f_plus = jost_matrix_n(params, &kc)?;
    let f_minus = jost_matrix_n(params, &minus)?;
    let inv = f_plus
        .try_inverse()
        .ok_or(CoxError::Degenerate("Jost matrix is singular at this energy".into()))?;
    let n = k.len();
    let m = f_minus * inv;
    Ok(DMatrix::from_fn(n, n, |i, j| m[(i, j)] * (k[j] / k[i]).sqrt()))
}
