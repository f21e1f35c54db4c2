//! The nonlinear eigenvalue matrix
//! `M(k) = D(k sqrt n) - D(k sqrt n~) - eta I`, with `D` the interior
//! Dirichlet-to-Neumann matrix, and Beyn's contour-integral solver.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SVD};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::BoundaryMesh;
use crate::layerops::{CMatrix, CVector, LayerOps, Wavenumber};

/// Eigenvalues closer than this are one cluster.
pub const CLUSTER_RADIUS: f64 = 1e-8;
/// Eigenvalues with `|Im k|` below this are reported as real.
pub const REAL_SNAP: f64 = 1e-6;
pub const SCAN_RADIUS: f64 = 0.5;
pub const SCAN_DEDUP: f64 = 1e-6;

/// `(n, n~, eta)`: `n~ = 1` is the classical exterior equation, `n~ = 0`
/// the zero-index one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediumParams {
    pub n: f64,
    pub n_tilde: f64,
    pub eta: f64,
}

impl MediumParams {
    pub fn new(n: f64, n_tilde: f64, eta: f64) -> Result<Self> {
        let p = MediumParams { n, n_tilde, eta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n.is_finite() && self.n > 0.0) {
            return Err(Error::Config(format!("n must be positive, got {}", self.n)));
        }
        if !(self.n_tilde.is_finite() && self.n_tilde >= 0.0) {
            return Err(Error::Config(format!("ntilde must be >= 0, got {}", self.n_tilde)));
        }
        if !(self.eta.is_finite() && self.eta >= 0.0) {
            return Err(Error::Config(format!("eta must be >= 0, got {}", self.eta)));
        }
        Ok(())
    }

    pub fn is_zero_index(&self) -> bool {
        self.n_tilde == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourConfig {
    pub center_mu: f64,
    pub radius: f64,
    pub quad_nodes: usize,
    /// `None` selects `min(16, dim)`.
    pub probe_cols: Option<usize>,
    pub rank_rel_tol: f64,
    pub residual_tol: f64,
    pub rng_seed: u64,
    /// Number of moment pairs; 1 is the standard method.
    pub moments: usize,
}

impl Default for ContourConfig {
    fn default() -> Self {
        ContourConfig {
            center_mu: 3.1,
            radius: 0.5,
            quad_nodes: 24,
            probe_cols: None,
            rank_rel_tol: 1e-4,
            residual_tol: 1e-4,
            rng_seed: 42,
            moments: 1,
        }
    }
}

impl ContourConfig {
    pub fn centered(center_mu: f64) -> Self {
        ContourConfig {
            center_mu,
            ..Default::default()
        }
    }

    pub fn probe_cols_for(&self, dim: usize) -> usize {
        self.probe_cols.unwrap_or_else(|| dim.min(16))
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if !(self.radius.is_finite() && self.radius > 0.0) || !self.center_mu.is_finite() {
            return Err(Error::Config("contour needs a finite center and positive radius".into()));
        }
        if self.quad_nodes < 8 {
            return Err(Error::Config(format!("quad_nodes must be >= 8, got {}", self.quad_nodes)));
        }
        let p = self.probe_cols_for(dim);
        if p == 0 || p > dim {
            return Err(Error::Config(format!("probe_cols must be in 1..={dim}, got {p}")));
        }
        if !(self.rank_rel_tol > 0.0 && self.residual_tol > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        if self.moments == 0 {
            return Err(Error::Config("moments must be >= 1".into()));
        }
        if self.center_mu.abs() <= self.radius {
            return Err(Error::Config("contour must not enclose k = 0".into()));
        }
        Ok(())
    }

    /// Quadrature node `j`, at angle `2 pi j / N`.
    pub fn node(&self, j: usize) -> Complex64 {
        let th = 2.0 * PI * j as f64 / self.quad_nodes as f64;
        self.center_mu + Complex64::from_polar(self.radius, th)
    }
}

#[derive(Debug, Clone)]
pub struct EigenRecord {
    pub k: Complex64,
    pub residual: f64,
    pub cluster_size: usize,
    /// Unit-norm discrete boundary trace.
    pub nullvector: CVector,
}

#[derive(Debug, Clone, Default)]
pub struct EigenResult {
    pub eigenvalues: Vec<EigenRecord>,
}

impl EigenResult {
    pub fn values(&self) -> Vec<Complex64> {
        self.eigenvalues.iter().map(|e| e.k).collect()
    }

    pub fn real_values(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|e| e.k.re).collect()
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

/// A holomorphic matrix-valued function of `k`.
pub trait NepOperator: Sync {
    fn dim(&self) -> usize;
    fn eval(&self, k: Complex64) -> Result<CMatrix>;
}

/// Wraps a closure as a [`NepOperator`].
pub struct FnNep<F> {
    pub dim: usize,
    pub f: F,
}

impl<F> NepOperator for FnNep<F>
where
    F: Fn(Complex64) -> Result<CMatrix> + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, k: Complex64) -> Result<CMatrix> {
        (self.f)(k)
    }
}

/// `M(k; n, n~, eta)` on a fixed mesh.
#[derive(Debug, Clone)]
pub struct TransmissionNep {
    pub ops: LayerOps,
    pub params: MediumParams,
}

impl TransmissionNep {
    pub fn new(mesh: &BoundaryMesh, params: MediumParams) -> Result<Self> {
        params.validate()?;
        Ok(TransmissionNep {
            ops: LayerOps::new(mesh),
            params,
        })
    }

    pub fn from_ops(ops: LayerOps, params: MediumParams) -> Result<Self> {
        params.validate()?;
        Ok(TransmissionNep { ops, params })
    }
}

impl NepOperator for TransmissionNep {
    fn dim(&self) -> usize {
        self.ops.dim()
    }

    fn eval(&self, k: Complex64) -> Result<CMatrix> {
        if k.norm() == 0.0 {
            return Err(Error::Config("M(k) is undefined at k = 0".into()));
        }
        let p = self.params;
        let d1 = self.ops.dtn_matrix(Wavenumber::Helmholtz(k * p.n.sqrt()))?;
        let d2 = if p.is_zero_index() {
            self.ops.dtn_matrix(Wavenumber::Laplace)?
        } else {
            self.ops.dtn_matrix(Wavenumber::Helmholtz(k * p.n_tilde.sqrt()))?
        };
        let mut m = d1 - d2;
        for i in 0..m.nrows() {
            m[(i, i)] -= p.eta;
        }
        Ok(m)
    }
}

pub fn build_m(mesh: &BoundaryMesh, params: MediumParams, k: Complex64) -> Result<CMatrix> {
    TransmissionNep::new(mesh, params)?.eval(k)
}

/// Seeded probe matrix with entries uniform in the unit square.
pub fn probe_matrix(dim: usize, cols: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DMatrix::from_fn(dim, cols, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

/// `(M(z)^{-1} V, ||M(z)||_F)`
fn solve_node<O: NepOperator + ?Sized>(op: &O, z: Complex64, v: &CMatrix, index: usize) -> Result<(CMatrix, f64)> {
    let m = op.eval(z).map_err(|e| e.at_node(index, z))?;
    let norm = m.norm();
    let lu = m.lu();
    let x = lu.solve(v).ok_or_else(|| {
        Error::LinearAlgebra("M(z) is singular at a contour node; shift the contour".into())
            .at_node(index, z)
    })?;
    Ok((x, norm))
}

/// Eigenvector of an upper triangular matrix for diagonal entry `p`.
fn triangular_eigvec(t: &CMatrix, p: usize) -> CVector {
    let r = t.nrows();
    let lam = t[(p, p)];
    let scale = t.norm().max(f64::MIN_POSITIVE);
    let mut y = CVector::zeros(r);
    y[p] = Complex64::new(1.0, 0.0);
    for i in (0..p).rev() {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in (i + 1)..=p {
            acc += t[(i, j)] * y[j];
        }
        let mut d = t[(i, i)] - lam;
        if d.norm() < 1e-14 * scale {
            d = Complex64::new(1e-14 * scale, 0.0);
        }
        y[i] = -acc / d;
    }
    y
}

/// Beyn's method for a general [`NepOperator`].
pub fn beyn_solve_operator<O: NepOperator + ?Sized>(op: &O, contour: &ContourConfig) -> Result<EigenResult> {
    let n = op.dim();
    contour.validate(n)?;
    let p = contour.probe_cols_for(n);
    let kmom = contour.moments;
    let nq = contour.quad_nodes;
    let v = probe_matrix(n, p, contour.rng_seed);

    let solves: Vec<Result<(CMatrix, f64)>> = (0..nq)
        .into_par_iter()
        .map(|j| solve_node(op, contour.node(j), &v, j))
        .collect();
    let solves: Vec<(CMatrix, f64)> = solves.into_iter().collect::<Result<_>>()?;
    let contour_scale = solves.iter().map(|s| s.1).sum::<f64>() / nq as f64;

    // moments of the scaled variable (z - mu) / R, summed in node order
    let mut moments = vec![CMatrix::zeros(n, p); 2 * kmom];
    for (j, (x, _)) in solves.iter().enumerate() {
        let e = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / nq as f64);
        let w = e * contour.radius / nq as f64;
        let mut zq = Complex64::new(1.0, 0.0);
        for a in moments.iter_mut() {
            *a += x * (w * zq);
            zq *= e;
        }
    }
    let mut h0 = CMatrix::zeros(kmom * n, kmom * p);
    let mut h1 = CMatrix::zeros(kmom * n, kmom * p);
    for i in 0..kmom {
        for j in 0..kmom {
            h0.view_mut((i * n, j * p), (n, p)).copy_from(&moments[i + j]);
            h1.view_mut((i * n, j * p), (n, p)).copy_from(&moments[i + j + 1]);
        }
    }

    let svd = SVD::try_new(h0, true, true, 1e-15, 0)
        .ok_or_else(|| Error::LinearAlgebra("SVD of the zeroth moment did not converge".into()))?;
    let (u, vt) = match (&svd.u, &svd.v_t) {
        (Some(u), Some(vt)) => (u, vt),
        _ => return Err(Error::LinearAlgebra("SVD returned no singular vectors".into())),
    };
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let s_max = order.first().map(|&i| svd.singular_values[i]).unwrap_or(0.0);
    if !(s_max > 0.0) {
        return Ok(EigenResult::default());
    }
    let keep: Vec<usize> = order
        .into_iter()
        .filter(|&i| svd.singular_values[i] > contour.rank_rel_tol * s_max)
        .collect();
    let rank = keep.len();
    if rank == kmom * p && kmom * p < kmom * n {
        return Err(Error::LinearAlgebra(format!(
            "numerical rank {rank} saturates the probe block; increase probe_cols"
        )));
    }

    let v0 = CMatrix::from_fn(kmom * n, rank, |i, c| u[(i, keep[c])]);
    let w0 = CMatrix::from_fn(kmom * p, rank, |i, c| vt[(keep[c], i)].conj());
    let sinv = CMatrix::from_fn(rank, rank, |i, j| {
        if i == j {
            Complex64::new(1.0 / svd.singular_values[keep[i]], 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let b = v0.adjoint() * h1 * w0 * sinv;
    let schur = b.schur();
    let (q, t) = schur.unpack();

    let candidates: Vec<(Complex64, CVector)> = (0..rank)
        .filter_map(|idx| {
            let beta = t[(idx, idx)];
            let lam = contour.center_mu + contour.radius * beta;
            if (lam - contour.center_mu).norm() > contour.radius * (1.0 + 1e-6) {
                return None;
            }
            let s = &q * triangular_eigvec(&t, idx);
            let full = &v0 * s;
            let mut w: CVector = full.rows(0, n).into_owned();
            let nrm = w.norm();
            if nrm == 0.0 {
                return None;
            }
            w /= Complex64::new(nrm, 0.0);
            Some((lam, w))
        })
        .collect();

    let checked: Vec<Option<EigenRecord>> = candidates
        .into_par_iter()
        .map(|(lam, w)| -> Result<Option<EigenRecord>> {
            let m = op.eval(lam)?;
            let residual = (&m * &w).norm() / m.norm().max(contour_scale);
            if residual <= contour.residual_tol {
                let k = if lam.im.abs() <= REAL_SNAP {
                    Complex64::new(lam.re, 0.0)
                } else {
                    lam
                };
                Ok(Some(EigenRecord {
                    k,
                    residual,
                    cluster_size: 1,
                    nullvector: w,
                }))
            } else {
                Ok(None)
            }
        })
        .collect::<Result<_>>()?;

    let mut records: Vec<EigenRecord> = checked.into_iter().flatten().collect();
    records.sort_by(|a, b| a.k.re.total_cmp(&b.k.re).then(a.k.im.total_cmp(&b.k.im)));
    assign_clusters(&mut records);
    Ok(EigenResult { eigenvalues: records })
}

/// Sets `cluster_size` from single-linkage groups within [`CLUSTER_RADIUS`].
fn assign_clusters(records: &mut [EigenRecord]) {
    let n = records.len();
    let mut label: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            if (records[i].k - records[j].k).norm() <= CLUSTER_RADIUS {
                let (a, b) = (label[i], label[j]);
                for l in label.iter_mut() {
                    if *l == b {
                        *l = a;
                    }
                }
            }
        }
    }
    for i in 0..n {
        records[i].cluster_size = label.iter().filter(|&&l| l == label[i]).count();
    }
}

/// Beyn's method for `M(k; n, n~, eta)` on `mesh`.
pub fn beyn_solve(mesh: &BoundaryMesh, params: MediumParams, contour: &ContourConfig) -> Result<EigenResult> {
    let nep = TransmissionNep::new(mesh, params)?;
    check_nondegenerate(&params)?;
    beyn_solve_operator(&nep, contour)
}

fn check_nondegenerate(params: &MediumParams) -> Result<()> {
    if params.n == params.n_tilde {
        return Err(Error::Config(
            "n equals ntilde: the two DtN terms cancel and M(k) = -eta I".into(),
        ));
    }
    Ok(())
}

/// Centers and radii of the contours tiling `[k_min, k_max]`.
pub fn scan_contours(k_min: f64, k_max: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut c = k_min + 0.5 * SCAN_RADIUS;
    loop {
        out.push((c, SCAN_RADIUS.min(0.9 * c)));
        if c + 0.5 * SCAN_RADIUS >= k_max {
            break;
        }
        c += SCAN_RADIUS;
    }
    out
}

/// Tiles `[k_min, k_max]` with overlapping contours and merges the results.
pub fn scan_eigenvalues(mesh: &BoundaryMesh, params: MediumParams, k_min: f64, k_max: f64) -> Result<EigenResult> {
    scan_eigenvalues_with(mesh, params, k_min, k_max, &ContourConfig::default())
}

/// As [`scan_eigenvalues`] with quadrature, probe and tolerance settings from `base`.
pub fn scan_eigenvalues_with(
    mesh: &BoundaryMesh,
    params: MediumParams,
    k_min: f64,
    k_max: f64,
    base: &ContourConfig,
) -> Result<EigenResult> {
    let nep = TransmissionNep::new(mesh, params)?;
    check_nondegenerate(&params)?;
    scan_operator(&nep, k_min, k_max, base)
}

/// As [`scan_eigenvalues`] for any operator; center and radius of `base`
/// are replaced per tile.
pub fn scan_operator<O: NepOperator + ?Sized>(
    op: &O,
    k_min: f64,
    k_max: f64,
    base: &ContourConfig,
) -> Result<EigenResult> {
    if !(k_min > 0.0 && k_max > k_min && k_max.is_finite()) {
        return Err(Error::Config(format!(
            "scan range must satisfy 0 < k_min < k_max, got [{k_min}, {k_max}]"
        )));
    }
    // (contour index, relative depth inside its contour, record)
    let mut found: Vec<(usize, f64, EigenRecord)> = Vec::new();
    for (ci, (c, r)) in scan_contours(k_min, k_max).into_iter().enumerate() {
        let cfg = ContourConfig {
            center_mu: c,
            radius: r,
            ..*base
        };
        for rec in beyn_solve_operator(op, &cfg)?.eigenvalues {
            let depth = (rec.k - c).norm() / r;
            found.push((ci, depth, rec));
        }
    }
    let mut kept: Vec<EigenRecord> = Vec::new();
    for (ci, depth, rec) in &found {
        let shadowed = found.iter().any(|(cj, dj, other)| {
            cj != ci
                && (other.k - rec.k).norm() <= SCAN_DEDUP
                && (*dj < *depth || (*dj == *depth && cj < ci))
        });
        if !shadowed && rec.k.re >= k_min && rec.k.re <= k_max {
            kept.push(rec.clone());
        }
    }
    kept.sort_by(|a, b| a.k.re.total_cmp(&b.k.re).then(a.k.im.total_cmp(&b.k.im)));
    Ok(EigenResult { eigenvalues: kept })
}
