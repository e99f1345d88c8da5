//! Polynomial roots from the companion matrix, with a self-contained
//! Hessenberg QR eigenvalue routine (no linear-algebra crate involved).

// index loops mirror the textbook Hessenberg QR steps
#![allow(clippy::needless_range_loop)]

use num_complex::Complex64;

/// Roots of `c[0] x^n + c[1] x^{n-1} + ... + c[n]`.
///
/// Panics if the leading coefficient is zero.
pub fn polyroots_companion(coeffs: &[f64]) -> Vec<Complex64> {
    assert!(coeffs.len() >= 2, "need a polynomial of degree >= 1");
    assert!(coeffs[0] != 0.0, "leading coefficient must be nonzero");
    let n = coeffs.len() - 1;
    let mut a = vec![vec![0.0; n]; n];
    for j in 0..n {
        a[0][j] = -coeffs[j + 1] / coeffs[0];
    }
    for i in 1..n {
        a[i][i - 1] = 1.0;
    }
    balance(&mut a);
    hqr(&mut a)
}

/// `|P(z)|` for a real-coefficient polynomial.
pub fn poly_residual(coeffs: &[f64], z: Complex64) -> f64 {
    coeffs
        .iter()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
        .norm()
}

/// Discriminant of `a x^4 + b x^3 + c x^2 + d x + e`.
pub fn quartic_discriminant(q: &[f64; 5]) -> f64 {
    let [a, b, c, d, e] = *q;
    256.0 * a.powi(3) * e.powi(3) - 192.0 * a * a * b * d * e * e - 128.0 * a * a * c * c * e * e
        + 144.0 * a * a * c * d * d * e
        - 27.0 * a * a * d.powi(4)
        + 144.0 * a * b * b * c * e * e
        - 6.0 * a * b * b * d * d * e
        - 80.0 * a * b * c * c * d * e
        + 18.0 * a * b * c * d.powi(3)
        + 16.0 * a * c.powi(4) * e
        - 4.0 * a * c.powi(3) * d * d
        - 27.0 * b.powi(4) * e * e
        + 18.0 * b.powi(3) * c * d * e
        - 4.0 * b.powi(3) * d.powi(3)
        - 4.0 * b * b * c.powi(3) * e
        + b * b * c * c * d * d
}

/// Diagonal similarity by powers of two so that row and column norms are comparable.
fn balance(a: &mut [Vec<f64>]) {
    const RADIX: f64 = 2.0;
    let n = a.len();
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[j][i].abs();
                    r += a[i][j].abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= RADIX;
                    c *= sqrdx;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 0..n {
                        a[i][j] *= g;
                    }
                    for row in a.iter_mut() {
                        row[i] *= f;
                    }
                }
            }
        }
    }
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Eigenvalues of an upper Hessenberg matrix by the shifted double-step QR iteration.
fn hqr(a: &mut [Vec<f64>]) -> Vec<Complex64> {
    let n = a.len();
    let mut wr = vec![0.0; n];
    let mut wi = vec![0.0; n];
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[i][j].abs();
        }
    }
    let mut nn = n as isize - 1;
    let mut t = 0.0;
    while nn >= 0 {
        let mut its = 0;
        loop {
            let nu = nn as usize;
            let mut l = nu;
            while l >= 1 {
                let mut s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[l][l - 1].abs() + s == s {
                    a[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[nu][nu];
            if l == nu {
                wr[nu] = x + t;
                wi[nu] = 0.0;
                nn -= 1;
                break;
            }
            let mut y = a[nu - 1][nu - 1];
            let mut w = a[nu][nu - 1] * a[nu - 1][nu];
            if l == nu - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let mut z = q.abs().sqrt();
                x += t;
                if q >= 0.0 {
                    z = p + sign(z, p);
                    wr[nu - 1] = x + z;
                    wr[nu] = x + z;
                    if z != 0.0 {
                        wr[nu] = x - w / z;
                    }
                    wi[nu - 1] = 0.0;
                    wi[nu] = 0.0;
                } else {
                    wr[nu - 1] = x + p;
                    wr[nu] = x + p;
                    wi[nu - 1] = -z;
                    wi[nu] = z;
                }
                nn -= 2;
                break;
            }
            assert!(its < 60, "QR iteration did not converge");
            if its == 10 || its == 20 {
                t += x;
                for i in 0..=nu {
                    a[i][i] -= x;
                }
                let s = a[nu][nu - 1].abs() + a[nu - 1][nu - 2].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            let (mut p, mut q, mut r);
            let mut m = nu - 2;
            loop {
                let z = a[m][m];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[m + 1][m] + a[m][m + 1];
                q = a[m + 1][m + 1] - z - rr - ss;
                r = a[m + 2][m + 1];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=nu {
                a[i][i - 2] = 0.0;
                if i != m + 2 {
                    a[i][i - 3] = 0.0;
                }
            }
            let mut xk = 0.0;
            for k in m..nu {
                if k != m {
                    p = a[k][k - 1];
                    q = a[k + 1][k - 1];
                    r = if k != nu - 1 { a[k + 2][k - 1] } else { 0.0 };
                    xk = p.abs() + q.abs() + r.abs();
                    if xk != 0.0 {
                        p /= xk;
                        q /= xk;
                        r /= xk;
                    }
                }
                let s = sign((p * p + q * q + r * r).sqrt(), p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[k][k - 1] = -a[k][k - 1];
                        }
                    } else {
                        a[k][k - 1] = -s * xk;
                    }
                    p += s;
                    let xx = p / s;
                    let yy = q / s;
                    let zz = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nu {
                        let mut pp = a[k][j] + q * a[k + 1][j];
                        if k != nu - 1 {
                            pp += r * a[k + 2][j];
                            a[k + 2][j] -= pp * zz;
                        }
                        a[k + 1][j] -= pp * yy;
                        a[k][j] -= pp * xx;
                    }
                    let mmin = if nu < k + 3 { nu } else { k + 3 };
                    for i in l..=mmin {
                        let mut pp = xx * a[i][k] + yy * a[i][k + 1];
                        if k != nu - 1 {
                            pp += zz * a[i][k + 2];
                            a[i][k + 2] -= pp * r;
                        }
                        a[i][k + 1] -= pp * q;
                        a[i][k] -= pp;
                    }
                }
            }
        }
    }
    wr.into_iter().zip(wi).map(|(re, im)| Complex64::new(re, im)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn fourth_roots_of_unity() {
        let r = sorted(polyroots_companion(&[1.0, 0.0, 0.0, 0.0, -1.0]));
        let want = [
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(1.0, 0.0),
        ];
        for (a, b) in r.iter().zip(want.iter()) {
            assert!((a - b).norm() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn double_roots_cluster() {
        // (x^2 - 1)^2
        let r = polyroots_companion(&[1.0, 0.0, -2.0, 0.0, 1.0]);
        assert_eq!(r.iter().filter(|z| (*z - 1.0).norm() < 1e-5).count(), 2);
        assert_eq!(r.iter().filter(|z| (*z + 1.0).norm() < 1e-5).count(), 2);
    }

    #[test]
    fn residuals_small_for_assorted_polynomials() {
        let polys: [&[f64]; 4] = [
            &[2.0, -3.0, 1.0],
            &[1.0, 1.53876, -0.3, 0.7, -0.01],
            &[1.0, -6.0, 11.0, -6.0],
            &[3.0, 0.5, -2.0, 7.0, 1.0, -4.0],
        ];
        for c in polys {
            let scale = c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let roots = polyroots_companion(c);
            assert_eq!(roots.len(), c.len() - 1);
            for z in roots {
                assert!(poly_residual(c, z) <= 1e-10 * scale, "{c:?} at {z}");
            }
        }
    }

    #[test]
    fn discriminant_vanishes_on_double_root() {
        assert!(quartic_discriminant(&[1.0, 0.0, -2.0, 0.0, 1.0]).abs() < 1e-12);
        // distinct real roots 1, 2, 3, 4: product of squared differences = 144
        let d = quartic_discriminant(&[1.0, -10.0, 35.0, -50.0, 24.0]);
        assert!((d - 144.0).abs() < 1e-9);
    }
}
