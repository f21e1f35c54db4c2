//! Cylinder functions of non-negative integer order and complex argument.
//!
//! `J_m`, `Y_m`, `H^(1)_m`, `H^(2)_m` and their first derivatives, valid for
//! `|z| <= 50` and `|Im z| <= 5`. Inside `|z| <= 12` the ascending series are
//! used; outside, `J_m` comes from Miller's backward recurrence and `Y_m`
//! from Hankel's large-argument expansion followed by forward recurrence.
//! Arguments outside the validated region are rejected, never extrapolated.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::error::{Error, Result};

/// Radius below which the ascending power series are used.
pub const SERIES_RADIUS: f64 = 12.0;
pub const MAX_MODULUS: f64 = 50.0;
pub const MAX_IMAG: f64 = 5.0;
/// Second-kind functions are refused below this modulus.
pub const MIN_MODULUS: f64 = 1e-12;
pub const MAX_ORDER: u32 = 200;
/// `J_m` uses its series only here; beyond it the backward recurrence is
/// more accurate than the cancelling series.
const J_SERIES_RADIUS: f64 = 8.0;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CylKind {
    J,
    Y,
    H1,
    H2,
}

fn check_region(m: u32, z: Complex64) -> Result<()> {
    let ok = z.re.is_finite()
        && z.im.is_finite()
        && z.norm() <= MAX_MODULUS
        && z.im.abs() <= MAX_IMAG
        && m <= MAX_ORDER;
    if ok {
        Ok(())
    } else {
        Err(Error::Domain {
            z,
            max_order: MAX_ORDER,
        })
    }
}

fn check_second_kind(m: u32, z: Complex64) -> Result<()> {
    check_region(m, z)?;
    if z.norm() < MIN_MODULUS {
        return Err(Error::SingularArgument { z });
    }
    Ok(())
}

fn finite(z: Complex64, v: Complex64) -> Result<Complex64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain {
            z,
            max_order: MAX_ORDER,
        })
    }
}

/// Bessel function of the first kind `J_m(z)`.
pub fn bessel_j(m: u32, z: Complex64) -> Result<Complex64> {
    check_region(m, z)?;
    let v = if z.norm() <= J_SERIES_RADIUS {
        j_series(m, z)
    } else {
        j_miller(m, z)
    };
    finite(z, v)
}

/// Bessel function of the second kind `Y_m(z)` (principal branch).
pub fn bessel_y(m: u32, z: Complex64) -> Result<Complex64> {
    check_second_kind(m, z)?;
    let (y0, y1) = if z.norm() <= SERIES_RADIUS {
        let s = small_series_01(z);
        (s.y0, s.y1)
    } else {
        y01_large(z)
    };
    finite(z, y_recur(m, z, y0, y1))
}

/// Hankel function of the first kind, `J_m + i Y_m`.
pub fn hankel1(m: u32, z: Complex64) -> Result<Complex64> {
    Ok(bessel_j(m, z)? + I * bessel_y(m, z)?)
}

/// Hankel function of the second kind, `J_m - i Y_m`.
pub fn hankel2(m: u32, z: Complex64) -> Result<Complex64> {
    Ok(bessel_j(m, z)? - I * bessel_y(m, z)?)
}

pub fn cyl(kind: CylKind, m: u32, z: Complex64) -> Result<Complex64> {
    match kind {
        CylKind::J => bessel_j(m, z),
        CylKind::Y => bessel_y(m, z),
        CylKind::H1 => hankel1(m, z),
        CylKind::H2 => hankel2(m, z),
    }
}

/// First derivative `C'_m(z)`, from `C'_m = (C_{m-1} - C_{m+1}) / 2` and
/// `C'_0 = -C_1`.
pub fn deriv(kind: CylKind, m: u32, z: Complex64) -> Result<Complex64> {
    Ok(cyl_with_deriv(kind, m, z)?.1)
}

/// `(C_m(z), C'_m(z))` in one call.
pub fn cyl_with_deriv(kind: CylKind, m: u32, z: Complex64) -> Result<(Complex64, Complex64)> {
    check_region(m + 1, z)?;
    let value = cyl(kind, m, z)?;
    let next = cyl(kind, m + 1, z)?;
    let d = if m == 0 {
        -next
    } else {
        (cyl(kind, m - 1, z)? - next) * 0.5
    };
    Ok((value, d))
}

/// `J_0, J_1, Y_0, Y_1` at one argument; the building block of the
/// Helmholtz layer kernels.
#[derive(Debug, Clone, Copy)]
pub struct Cyl01 {
    pub j0: Complex64,
    pub j1: Complex64,
    pub y0: Complex64,
    pub y1: Complex64,
}

impl Cyl01 {
    pub fn h0(&self) -> Complex64 {
        self.j0 + I * self.y0
    }

    pub fn h1(&self) -> Complex64 {
        self.j1 + I * self.y1
    }
}

pub fn cyl01(z: Complex64) -> Result<Cyl01> {
    check_second_kind(1, z)?;
    if z.norm() <= SERIES_RADIUS {
        Ok(small_series_01(z))
    } else {
        let (y0, y1) = y01_large(z);
        let (_, j0, j1) = miller(0, z);
        Ok(Cyl01 { j0, j1, y0, y1 })
    }
}

/// The `s`-th positive zero of `J_m`.
///
/// Zeros are bracketed by a sign-change scan that starts below the first
/// zero (`j_{m,1} > m`) and advances in steps much smaller than the zero
/// spacing, then polished by bisection and a final Newton step.
pub fn bessel_zero(m: u32, s: u32) -> Result<f64> {
    if s == 0 {
        return Err(Error::Config("zero index s must be >= 1".into()));
    }
    let f = |x: f64| -> Result<f64> { Ok(bessel_j(m, Complex64::new(x, 0.0))?.re) };
    let step = 0.1;
    let mut a = (m as f64).max(0.1);
    let mut fa = f(a)?;
    let mut found = 0;
    loop {
        let b = a + step;
        let fb = f(b)?;
        if fb == 0.0 || fa * fb < 0.0 {
            found += 1;
            if found == s {
                return polish_zero(m, a, b, fa);
            }
        }
        a = b;
        fa = fb;
    }
}

fn polish_zero(m: u32, mut a: f64, mut b: f64, mut fa: f64) -> Result<f64> {
    let f = |x: f64| -> Result<f64> { Ok(bessel_j(m, Complex64::new(x, 0.0))?.re) };
    for _ in 0..200 {
        let c = 0.5 * (a + b);
        if c <= a || c >= b {
            break;
        }
        let fc = f(c)?;
        if fc == 0.0 {
            return Ok(c);
        }
        if fa * fc < 0.0 {
            b = c;
        } else {
            a = c;
            fa = fc;
        }
    }
    let x = 0.5 * (a + b);
    let (v, d) = cyl_with_deriv(CylKind::J, m, Complex64::new(x, 0.0))?;
    let newton = x - v.re / d.re;
    Ok(if (newton - x).abs() <= (b - a).max(1e-15) {
        newton
    } else {
        x
    })
}

/// McMahon's large-zero expansion, used only as a rough estimate.
pub fn mcmahon_estimate(m: u32, s: u32) -> f64 {
    let beta = (s as f64 + 0.5 * m as f64 - 0.25) * PI;
    let mu = 4.0 * (m as f64).powi(2);
    let e = 8.0 * beta;
    beta - (mu - 1.0) / e - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * e.powi(3))
}

fn j_series(m: u32, z: Complex64) -> Complex64 {
    let half = z * 0.5;
    let mut lead = Complex64::new(1.0, 0.0);
    for i in 1..=m {
        lead *= half / i as f64;
    }
    let q = -half * half;
    let mut term = lead;
    let mut sum = lead;
    let mut biggest = lead.norm();
    for k in 1..500u32 {
        term *= q / (k as f64 * (m + k) as f64);
        sum += term;
        let t = term.norm();
        biggest = biggest.max(t);
        let decaying = (k as f64) * ((m + k) as f64) > q.norm();
        if decaying && (t <= 1e-17 * sum.norm() || t <= 1e-20 * biggest) {
            break;
        }
    }
    sum
}

/// Series for `J_0, J_1, Y_0, Y_1` sharing one loop.
fn small_series_01(z: Complex64) -> Cyl01 {
    let half = z * 0.5;
    let q = -half * half;
    let log_term = half.ln();

    // t0 = q^k/(k!)^2, t1 = q^k/(k!(k+1)!)
    let mut t0 = Complex64::new(1.0, 0.0);
    let mut t1 = Complex64::new(1.0, 0.0);
    let mut j0 = t0;
    let mut j1s = t1;
    let mut y0s = Complex64::new(0.0, 0.0);
    // psi(k+1) + psi(k+2) at k = 0: -2 gamma + 1
    let mut harmonic = 0.0;
    let mut y1s = t1 * (-2.0 * EULER_GAMMA + 1.0);
    for k in 1..500u32 {
        let kf = k as f64;
        t0 *= q / (kf * kf);
        t1 *= q / (kf * (kf + 1.0));
        harmonic += 1.0 / kf;
        j0 += t0;
        j1s += t1;
        y0s += t0 * harmonic;
        let psi_sum = -2.0 * EULER_GAMMA + 2.0 * harmonic + 1.0 / (kf + 1.0);
        y1s += t1 * psi_sum;
        if kf * kf > q.norm() {
            let tiny = t0.norm().max(t1.norm()) * (1.0 + harmonic);
            if tiny <= 1e-17 * (j0.norm() + j1s.norm()).max(1e-300) {
                break;
            }
        }
    }
    let (j0, j1) = if z.norm() > J_SERIES_RADIUS {
        let (_, j0, j1) = miller(0, z);
        (j0, j1)
    } else {
        (j0, half * j1s)
    };
    let y0 = (2.0 / PI) * (log_term + EULER_GAMMA) * j0 - (2.0 / PI) * y0s;
    let y1 = -2.0 / (PI * z) + (2.0 / PI) * log_term * j1 - (1.0 / PI) * half * y1s;
    Cyl01 { j0, j1, y0, y1 }
}

/// Hankel's expansion for `(H^(1)_nu, H^(2)_nu)` at `Re z > 0`, summed
/// to the smallest term.
fn hankel_expansion(nu: u32, z: Complex64) -> (Complex64, Complex64) {
    let mu = 4.0 * (nu as f64).powi(2);
    let mut term = Complex64::new(1.0, 0.0);
    let mut s1 = term;
    let mut s2 = term;
    let mut last = f64::INFINITY;
    let mut ik = Complex64::new(1.0, 0.0);
    for k in 1..200u32 {
        let odd = (2 * k - 1) as f64;
        let next = term * ((mu - odd * odd) / (8.0 * k as f64)) / z;
        let size = next.norm();
        if size >= last || size == 0.0 {
            break;
        }
        term = next;
        last = size;
        ik *= I;
        s1 += ik * term;
        s2 += ik.conj() * term;
        if size <= 1e-17 {
            break;
        }
    }
    let pref = (Complex64::new(2.0 / PI, 0.0) / z).sqrt();
    let omega = z - (nu as f64) * FRAC_PI_2 - FRAC_PI_4;
    let e = (I * omega).exp();
    (pref * e * s1, pref / e * s2)
}

/// `Y_0, Y_1` for `|z| > SERIES_RADIUS`.
fn y01_large(z: Complex64) -> (Complex64, Complex64) {
    if z.re >= 0.0 {
        let (a0, b0) = hankel_expansion(0, z);
        let (a1, b1) = hankel_expansion(1, z);
        ((a0 - b0) / (2.0 * I), (a1 - b1) / (2.0 * I))
    } else {
        // Y_n(w e^{+-i pi}) = (-1)^n [Y_n(w) +- 2i J_n(w)], w = -z.
        let w = -z;
        let (y0w, y1w) = y01_large(w);
        let sign = if z.im.is_sign_negative() { -1.0 } else { 1.0 };
        let (_, j0w, j1w) = miller(0, w);
        (
            y0w + sign * 2.0 * I * j0w,
            -(y1w + sign * 2.0 * I * j1w),
        )
    }
}

fn y_recur(m: u32, z: Complex64, y0: Complex64, y1: Complex64) -> Complex64 {
    match m {
        0 => y0,
        1 => y1,
        _ => {
            let (mut prev, mut cur) = (y0, y1);
            for k in 1..m {
                let next = (2.0 * k as f64) / z * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Miller's backward recurrence normalised by
/// `exp(+-iz) = J_0 + 2 sum_k (+-i)^k J_k`, choosing the sign whose
/// exponential has the larger modulus. Returns `(J_m, J_0, J_1)`.
fn miller(m: u32, z: Complex64) -> (Complex64, Complex64, Complex64) {
    let r = z.norm();
    let top = (m as f64).max(r);
    let start = (top + 20.0 + 4.0 * top.sqrt()).ceil() as u32 + 2;
    let sigma = if z.im >= 0.0 { -I } else { I };
    let pow = |k: u32| -> Complex64 {
        match k % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => sigma,
            2 => Complex64::new(-1.0, 0.0),
            _ => -sigma,
        }
    };
    let two_over_z = 2.0 / z;
    let mut above = Complex64::new(0.0, 0.0);
    let mut cur = Complex64::new(1e-30, 0.0);
    let mut norm = 2.0 * pow(start) * cur;
    let mut target = if start == m { cur } else { Complex64::new(0.0, 0.0) };
    let mut j1 = Complex64::new(0.0, 0.0);
    for k in (1..=start).rev() {
        let below = (k as f64) * two_over_z * cur - above;
        above = cur;
        cur = below;
        let idx = k - 1;
        norm += if idx == 0 { cur } else { 2.0 * pow(idx) * cur };
        if idx == m {
            target = cur;
        }
        if idx == 1 {
            j1 = cur;
        }
        if cur.norm_sqr() > 1e300 {
            let s = 1e-200;
            cur *= s;
            above *= s;
            norm *= s;
            target *= s;
            j1 *= s;
        }
    }
    let f = (sigma * z).exp() / norm;
    (target * f, cur * f, j1 * f)
}

fn j_miller(m: u32, z: Complex64) -> Complex64 {
    miller(m, z).0
}
