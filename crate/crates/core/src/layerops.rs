//! Collocation matrices of the single-layer operator `S_k` and the adjoint
//! double-layer operator `K'_k` on a quadratic-element mesh.
//!
//! Quadrature layout depends only on the mesh, so it is computed once by
//! [`LayerOps::new`] and reused for every wavenumber. On elements that
//! contain the collocation node the kernel is split as
//! `A(t) ln|t - t_i| + B(t)` in the curve parameter; the log part uses a
//! log-weighted Gauss rule and `B` a Gauss-Legendre rule. Elements next to
//! those are integrated with subdivided Gauss-Legendre.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{curve_diameter, BoundaryMesh};
use crate::quadrature::{gauss_legendre, gauss_log};
use crate::specfun;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const REGULAR_POINTS: usize = 8;
pub const NEAR_SUBDIVISIONS: usize = 4;
pub const SINGULAR_POINTS: usize = 10;
/// Single-layer matrices with a larger condition estimate are rejected.
pub const CONDITION_LIMIT: f64 = 1e12;

const I: Complex64 = Complex64::new(0.0, 1.0);
const INV_2PI: f64 = 0.5 / PI;

/// Helmholtz wavenumber or the Laplace (`k = 0`) case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Wavenumber {
    Helmholtz(Complex64),
    Laplace,
}

impl Wavenumber {
    pub fn value(&self) -> Complex64 {
        match self {
            Wavenumber::Helmholtz(k) => *k,
            Wavenumber::Laplace => Complex64::new(0.0, 0.0),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Mode {
    Full,
    /// Kernel minus `A ln(tau / L)`.
    Smooth { ln_tau: f64 },
    /// Only `A`; weights carry the log rule.
    Log,
}

#[derive(Debug, Clone, Copy)]
struct QPoint {
    cols: [usize; 3],
    weights: [f64; 3],
    r: f64,
    /// `(x - y) . nu_x / r`
    dn: f64,
    mode: Mode,
}

fn lagrange(s: f64) -> [f64; 3] {
    [
        2.0 * (s - 0.5) * (s - 1.0),
        -4.0 * s * (s - 1.0),
        2.0 * s * (s - 0.5),
    ]
}

/// Precomputed quadrature layout for one mesh.
#[derive(Debug, Clone)]
pub struct LayerOps {
    mesh: BoundaryMesh,
    rho: f64,
    rows: Vec<Vec<QPoint>>,
}

impl LayerOps {
    pub fn new(mesh: &BoundaryMesh) -> Self {
        let n = mesh.len();
        let ne = mesh.element_count();
        let (gx, gw) = gauss_legendre(REGULAR_POINTS);
        let (sx, sw) = gauss_legendre(SINGULAR_POINTS);
        let (lx, lw) = gauss_log(SINGULAR_POINTS);
        let curve = &mesh.curve;

        let rows = (0..n)
            .map(|i| {
                let xi = mesh.nodes[i].point;
                let nu = mesh.nodes[i].normal;
                let mut pts = Vec::new();
                let mut push = |e: usize, s: f64, w: f64, mode: Mode| {
                    let (t0, span) = mesh.spans[e];
                    let p = curve.eval(t0 + s * span);
                    let d = [xi[0] - p.x[0], xi[1] - p.x[1]];
                    let r = d[0].hypot(d[1]);
                    let l = lagrange(s);
                    let jw = w * span * p.speed();
                    pts.push(QPoint {
                        cols: mesh.elements[e],
                        weights: [jw * l[0], jw * l[1], jw * l[2]],
                        r,
                        dn: (d[0] * nu[0] + d[1] * nu[1]) / r,
                        mode,
                    });
                };

                // elements holding node i, with the local position of i
                let own: Vec<(usize, f64)> = if i % 2 == 1 {
                    vec![(i / 2, 0.5)]
                } else {
                    vec![(i / 2, 0.0), ((i / 2 + ne - 1) % ne, 1.0)]
                };
                let near: Vec<usize> = if i % 2 == 1 {
                    vec![(i / 2 + 1) % ne, (i / 2 + ne - 1) % ne]
                } else {
                    vec![(i / 2 + 1) % ne, (i / 2 + ne - 2) % ne]
                };

                for &(e, s0) in &own {
                    // pieces [s0, s0 + len] or [s0 - len, s0] in local coordinates
                    let pieces: Vec<(f64, f64)> = if s0 == 0.0 {
                        vec![(1.0, 1.0)]
                    } else if s0 == 1.0 {
                        vec![(1.0, -1.0)]
                    } else {
                        vec![(0.5, 1.0), (0.5, -1.0)]
                    };
                    for (len, dir) in pieces {
                        for (u, w) in sx.iter().zip(&sw) {
                            let s = s0 + dir * len * u;
                            push(e, s, w * len, Mode::Smooth { ln_tau: u.ln() });
                        }
                        for (u, w) in lx.iter().zip(&lw) {
                            let s = s0 + dir * len * u;
                            // int_0^L g ln(tau/L) dtau = -L sum w_log g
                            push(e, s, -w * len, Mode::Log);
                        }
                    }
                }
                for &e in &near {
                    if own.iter().any(|&(o, _)| o == e) {
                        continue;
                    }
                    let h = 1.0 / NEAR_SUBDIVISIONS as f64;
                    for sub in 0..NEAR_SUBDIVISIONS {
                        for (u, w) in gx.iter().zip(&gw) {
                            push(e, (sub as f64 + u) * h, w * h, Mode::Full);
                        }
                    }
                }
                for e in 0..ne {
                    if own.iter().any(|&(o, _)| o == e) || near.contains(&e) {
                        continue;
                    }
                    for (u, w) in gx.iter().zip(&gw) {
                        push(e, *u, *w, Mode::Full);
                    }
                }
                pts
            })
            .collect();

        LayerOps {
            mesh: mesh.clone(),
            rho: 2.0 * curve_diameter(&mesh.curve),
            rows,
        }
    }

    pub fn mesh(&self) -> &BoundaryMesh {
        &self.mesh
    }

    pub fn dim(&self) -> usize {
        self.mesh.len()
    }

    /// Scale `rho` of the Laplace kernel `-(1/2pi) ln(r / rho)`.
    pub fn laplace_scale(&self) -> f64 {
        self.rho
    }

    /// `(S, K')` assembled together; they share the Bessel evaluations.
    pub fn pair(&self, k: Wavenumber) -> Result<(CMatrix, CMatrix)> {
        let n = self.dim();
        let mut s = CMatrix::zeros(n, n);
        let mut kp = CMatrix::zeros(n, n);
        for (i, row) in self.rows.iter().enumerate() {
            for q in row {
                let (vs, vk) = match k {
                    Wavenumber::Helmholtz(k) => helmholtz_values(k, q)?,
                    Wavenumber::Laplace => laplace_values(self.rho, q),
                };
                for a in 0..3 {
                    let c = q.cols[a];
                    s[(i, c)] += vs * q.weights[a];
                    kp[(i, c)] += vk * q.weights[a];
                }
            }
        }
        Ok((s, kp))
    }

    pub fn single_layer(&self, k: Wavenumber) -> Result<CMatrix> {
        Ok(self.pair(k)?.0)
    }

    pub fn kprime(&self, k: Wavenumber) -> Result<CMatrix> {
        Ok(self.pair(k)?.1)
    }

    /// Dirichlet-to-Neumann matrix `(I/2 + K') S^{-1}`, from an LU solve
    /// with `S^T`.
    pub fn dtn_matrix(&self, k: Wavenumber) -> Result<CMatrix> {
        let (s, kp) = self.pair(k)?;
        let st = s.transpose();
        let lu = guarded_lu(&st, k)?;
        let mut rhs = kp.transpose();
        for i in 0..self.dim() {
            rhs[(i, i)] += 0.5;
        }
        if !lu.solve_mut(&mut rhs) {
            return Err(Error::NearInteriorEigenvalue {
                wavenumber: k.value(),
                condition: f64::INFINITY,
            });
        }
        Ok(rhs.transpose())
    }

    /// `(I/2 + K') S^{-1} trace` without forming the inverse.
    pub fn dtn_apply(&self, k: Wavenumber, trace: &CVector) -> Result<CVector> {
        if trace.len() != self.dim() {
            return Err(Error::Config(format!(
                "trace has length {}, mesh has {} nodes",
                trace.len(),
                self.dim()
            )));
        }
        let (s, kp) = self.pair(k)?;
        let lu = guarded_lu(&s, k)?;
        let phi = lu.solve(trace).ok_or(Error::NearInteriorEigenvalue {
            wavenumber: k.value(),
            condition: f64::INFINITY,
        })?;
        Ok(&kp * &phi + &phi * Complex64::new(0.5, 0.0))
    }
}

fn helmholtz_values(k: Complex64, q: &QPoint) -> Result<(Complex64, Complex64)> {
    let c = specfun::cyl01(k * q.r)?;
    let full_s = 0.25 * I * c.h0();
    let full_k = -0.25 * I * k * c.h1() * q.dn;
    Ok(match q.mode {
        Mode::Full => (full_s, full_k),
        Mode::Smooth { ln_tau } => {
            let a_s = -INV_2PI * c.j0;
            let a_k = INV_2PI * k * c.j1 * q.dn;
            (full_s - a_s * ln_tau, full_k - a_k * ln_tau)
        }
        Mode::Log => (-INV_2PI * c.j0, INV_2PI * k * c.j1 * q.dn),
    })
}

fn laplace_values(rho: f64, q: &QPoint) -> (Complex64, Complex64) {
    let full_k = Complex64::new(-INV_2PI * q.dn / q.r, 0.0);
    let s = match q.mode {
        Mode::Full => -INV_2PI * (q.r / rho).ln(),
        Mode::Smooth { ln_tau } => -INV_2PI * ((q.r / rho).ln() - ln_tau),
        Mode::Log => -INV_2PI,
    };
    let k = match q.mode {
        Mode::Log => Complex64::new(0.0, 0.0),
        _ => full_k,
    };
    (Complex64::new(s, 0.0), k)
}

/// Coincident-point value of the `K'` kernel on a curve of curvature `kappa`.
pub fn kprime_diagonal_limit(kappa: f64) -> f64 {
    -kappa / (4.0 * PI)
}

/// LU factorization that rejects numerically singular matrices.
pub fn guarded_lu(a: &CMatrix, k: Wavenumber) -> Result<nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>> {
    let lu = a.clone().lu();
    let cond = condition_estimate(a, &lu);
    if !(cond <= CONDITION_LIMIT) {
        return Err(Error::NearInteriorEigenvalue {
            wavenumber: k.value(),
            condition: cond,
        });
    }
    Ok(lu)
}

/// Ratio of extreme pivots, refined by one inverse-power step.
pub fn condition_estimate(a: &CMatrix, lu: &nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>) -> f64 {
    let u = lu.u();
    let n = a.nrows();
    let mut big: f64 = 0.0;
    let mut small = f64::INFINITY;
    for i in 0..n {
        let d = u[(i, i)].norm();
        big = big.max(d);
        small = small.min(d);
    }
    if small == 0.0 || !small.is_finite() {
        return f64::INFINITY;
    }
    let pivot_ratio = big / small;
    let b = CVector::from_fn(n, |i, _| Complex64::new(1.0, 0.0) / (1.0 + i as f64).sqrt());
    let x = match lu.solve(&b) {
        Some(x) => x,
        None => return f64::INFINITY,
    };
    let power = a.norm() * x.norm() / b.norm();
    if power.is_finite() {
        pivot_ratio.max(power)
    } else {
        f64::INFINITY
    }
}

fn helmholtz(k: Complex64) -> Result<Wavenumber> {
    if k.norm() == 0.0 {
        return Err(Error::Config(
            "k = 0 needs the Laplace assembly path".into(),
        ));
    }
    Ok(Wavenumber::Helmholtz(k))
}

pub fn assemble_single_layer(mesh: &BoundaryMesh, k: Complex64) -> Result<CMatrix> {
    LayerOps::new(mesh).single_layer(helmholtz(k)?)
}

pub fn assemble_kprime(mesh: &BoundaryMesh, k: Complex64) -> Result<CMatrix> {
    LayerOps::new(mesh).kprime(helmholtz(k)?)
}

pub fn assemble_single_layer_laplace(mesh: &BoundaryMesh) -> CMatrix {
    LayerOps::new(mesh)
        .single_layer(Wavenumber::Laplace)
        .expect("Laplace assembly has no failure modes")
}

pub fn assemble_kprime_laplace(mesh: &BoundaryMesh) -> CMatrix {
    LayerOps::new(mesh)
        .kprime(Wavenumber::Laplace)
        .expect("Laplace assembly has no failure modes")
}

pub fn dtn_apply(mesh: &BoundaryMesh, k: Wavenumber, trace: &CVector) -> Result<CVector> {
    if let Wavenumber::Helmholtz(v) = k {
        helmholtz(v)?;
    }
    LayerOps::new(mesh).dtn_apply(k, trace)
}
