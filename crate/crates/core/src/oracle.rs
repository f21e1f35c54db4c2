//! Analytic references on disks: Bessel determinants and their real roots,
//! Dirichlet and modified Dirichlet eigenvalues, and a boundary-integral
//! Dirichlet solver for general domains.

use nalgebra::Matrix4;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::BoundaryMesh;
use crate::layerops::{LayerOps, Wavenumber};
use crate::nep::{scan_operator, ContourConfig, NepOperator};
use crate::specfun::{bessel_zero, cyl_with_deriv, CylKind};
use crate::layerops::CMatrix;

pub const GRID_STEP: f64 = 1e-3;
pub const DEFAULT_M_MAX: u32 = 20;
const ACCEPT_IM: f64 = 1e-9;
const ACCEPT_DEFECT: f64 = 1e-10;
/// `|det| / scale` below this at a grid minimum triggers polishing.
const PROMOTE: f64 = 1e-2;
const MERGE_TOL: f64 = 1e-10;
const VERTEX_REL: f64 = 1e-2;
const POLISH_REACH: f64 = 10.0 * GRID_STEP;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DiskVariant {
    Classical { n: f64 },
    Conductive { n: f64, eta: f64 },
    ZeroIndex { n: f64, eta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskProblem {
    pub variant: DiskVariant,
    pub radius: f64,
}

impl DiskProblem {
    pub fn classical(n: f64) -> Self {
        DiskProblem {
            variant: DiskVariant::Classical { n },
            radius: 1.0,
        }
    }

    pub fn conductive(n: f64, eta: f64) -> Self {
        DiskProblem {
            variant: DiskVariant::Conductive { n, eta },
            radius: 1.0,
        }
    }

    pub fn zero_index(n: f64, eta: f64) -> Self {
        DiskProblem {
            variant: DiskVariant::ZeroIndex { n, eta },
            radius: 1.0,
        }
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = radius;
        self
    }

    pub fn n(&self) -> f64 {
        match self.variant {
            DiskVariant::Classical { n } | DiskVariant::Conductive { n, .. } | DiskVariant::ZeroIndex { n, .. } => n,
        }
    }

    pub fn eta(&self) -> f64 {
        match self.variant {
            DiskVariant::Classical { .. } => 0.0,
            DiskVariant::Conductive { eta, .. } | DiskVariant::ZeroIndex { eta, .. } => eta,
        }
    }

    /// Same variant with a different conductivity; classical stays classical.
    pub fn with_eta(&self, eta: f64) -> Self {
        let variant = match self.variant {
            DiskVariant::Classical { n } => DiskVariant::Classical { n },
            DiskVariant::Conductive { n, .. } => DiskVariant::Conductive { n, eta },
            DiskVariant::ZeroIndex { n, .. } => DiskVariant::ZeroIndex { n, eta },
        };
        DiskProblem { variant, ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        let eta = self.eta();
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(Error::Config(format!("disk radius must be positive, got {}", self.radius)));
        }
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::Config(format!("n must be positive, got {n}")));
        }
        if !(eta.is_finite() && eta >= 0.0) {
            return Err(Error::Config(format!("eta must be >= 0, got {eta}")));
        }
        if n == 1.0 && !matches!(self.variant, DiskVariant::ZeroIndex { .. }) {
            return Err(Error::Config("n = 1 makes the classical and conductive problems degenerate".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerVariant {
    Conductive,
    ZeroIndex,
}

/// Concentric two-material disk: index `n1` for radius below `r`, `n2`
/// between `r` and `big_r`, conductive condition on the outer circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleLayerDisk {
    pub big_r: f64,
    pub r: f64,
    pub n1: f64,
    pub n2: f64,
    pub eta: f64,
    pub variant: LayerVariant,
}

impl DoubleLayerDisk {
    pub fn validate(&self) -> Result<()> {
        if !(self.r > 0.0 && self.r < self.big_r && self.big_r.is_finite()) {
            return Err(Error::Config(format!("need 0 < r < R, got r={}, R={}", self.r, self.big_r)));
        }
        if !(self.n1 > 0.0 && self.n2 > 0.0 && self.n1.is_finite() && self.n2.is_finite()) {
            return Err(Error::Config("n1 and n2 must be positive".into()));
        }
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return Err(Error::Config(format!("eta must be >= 0, got {}", self.eta)));
        }
        Ok(())
    }

    pub fn with_eta(&self, eta: f64) -> Self {
        DoubleLayerDisk { eta, ..*self }
    }
}

/// Determinant value and the product-of-norms scale it is judged against.
#[derive(Debug, Clone, Copy)]
pub struct DetValue {
    pub det: Complex64,
    pub scale: f64,
}

fn jd(m: u32, z: Complex64) -> Result<(Complex64, Complex64)> {
    cyl_with_deriv(CylKind::J, m, z)
}

fn col_product(mag: [[f64; 2]; 2]) -> f64 {
    mag[0][0].hypot(mag[1][0]) * mag[0][1].hypot(mag[1][1])
}

/// The 2x2 disk determinant with its scale, at complex `k`.
///
/// The scale is the product of column norms of the matrix of term
/// magnitudes, `|k sqrt(n) J'| + eta |J|` for a conductive entry.
pub fn disk_det(problem: &DiskProblem, m: u32, k: Complex64) -> Result<DetValue> {
    let big_r = problem.radius;
    let n = problem.n();
    let sn = n.sqrt();
    let (ji, jdi) = jd(m, k * sn * big_r)?;
    let (a, mag) = match problem.variant {
        DiskVariant::Classical { .. } => {
            let (jo, jdo) = jd(m, k * big_r)?;
            let a = [[ji, -jo], [sn * jdi, -jdo]];
            (a, a.map(|r| r.map(|v| v.norm())))
        }
        DiskVariant::Conductive { eta, .. } => {
            let (jo, jdo) = jd(m, k * big_r)?;
            let d = k * sn * jdi;
            (
                [[ji, -jo], [d - eta * ji, -k * jdo]],
                [[ji.norm(), jo.norm()], [d.norm() + eta * ji.norm(), (k * jdo).norm()]],
            )
        }
        DiskVariant::ZeroIndex { eta, .. } => {
            let mf = m as f64;
            let harm = big_r.powi(m as i32);
            let dharm = if m == 0 { 0.0 } else { mf * big_r.powi(m as i32 - 1) };
            let d = k * sn * jdi;
            (
                [
                    [ji, Complex64::new(-harm, 0.0)],
                    [d - eta * ji, Complex64::new(-dharm, 0.0)],
                ],
                [[ji.norm(), harm], [d.norm() + eta * ji.norm(), dharm]],
            )
        }
    };
    Ok(DetValue {
        det: a[0][0] * a[1][1] - a[0][1] * a[1][0],
        scale: col_product(mag),
    })
}

pub fn disk_determinant(problem: &DiskProblem, m: u32, k: f64) -> Result<Complex64> {
    Ok(disk_det(problem, m, Complex64::new(k, 0.0))?.det)
}

/// The 4x4 double-layer determinant with Hankel columns, at complex `k`.
///
/// Evaluated with `J_m`/`Y_m` columns in place of `H1_m`/`H2_m` and scaled
/// by `-2i`, the determinant of the column change. The Hankel pair cancels
/// to `J_m` at high order, the `J`/`Y` pair does not.
pub fn double_layer_det(problem: &DoubleLayerDisk, m: u32, k: Complex64) -> Result<DetValue> {
    let p = problem;
    let s1 = p.n1.sqrt();
    let s2 = p.n2.sqrt();
    let zero = Complex64::new(0.0, 0.0);
    let (jo2, jdo2) = jd(m, k * p.big_r * s2)?;
    let (yo2, ydo2) = cyl_with_deriv(CylKind::Y, m, k * p.big_r * s2)?;
    let (ji2, jdi2) = jd(m, k * p.r * s2)?;
    let (yi2, ydi2) = cyl_with_deriv(CylKind::Y, m, k * p.r * s2)?;
    let (j1, j1d) = jd(m, k * p.r * s1)?;
    let (c0, c1) = match p.variant {
        LayerVariant::Conductive => {
            let (jo, jdo) = jd(m, k * p.big_r)?;
            (-jo, -k * jdo)
        }
        LayerVariant::ZeroIndex => {
            let harm = p.big_r.powi(m as i32);
            let dharm = if m == 0 { 0.0 } else { m as f64 * p.big_r.powi(m as i32 - 1) };
            (Complex64::new(-harm, 0.0), Complex64::new(-dharm, 0.0))
        }
    };
    let ks2 = k * s2;
    #[rustfmt::skip]
    let mut a = Matrix4::new(
        c0,   jo2,                      yo2,                      zero,
        c1,   ks2 * jdo2 - p.eta * jo2, ks2 * ydo2 - p.eta * yo2, zero,
        zero, ji2,                      yi2,                      -j1,
        zero, ks2 * jdi2,               ks2 * ydi2,               -k * s1 * j1d,
    );
    let mut mag = a.map(|v| v.norm());
    mag[(1, 1)] = (ks2 * jdo2).norm() + p.eta * jo2.norm();
    mag[(1, 2)] = (ks2 * ydo2).norm() + p.eta * yo2.norm();
    let scale: f64 = 2.0 * mag.column_iter().map(|c| c.norm()).product::<f64>();
    let mut factor = 1.0;
    for mut col in a.column_iter_mut() {
        let nrm = col.norm();
        col /= Complex64::new(nrm, 0.0);
        factor *= nrm;
    }
    Ok(DetValue {
        det: a.determinant() * Complex64::new(0.0, -2.0 * factor),
        scale,
    })
}

pub fn double_layer_determinant(problem: &DoubleLayerDisk, m: u32, k: f64) -> Result<Complex64> {
    Ok(double_layer_det(problem, m, Complex64::new(k, 0.0))?.det)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub k: f64,
    pub m: u32,
    /// `|det|` at the root.
    pub defect: f64,
    /// 1 for `m = 0`, 2 for `m >= 1` (cosine and sine modes).
    pub multiplicity: usize,
}

/// A grid minimum whose polishing failed.
#[derive(Debug, Clone, PartialEq)]
pub struct RootDiagnostic {
    pub m: u32,
    pub k_start: f64,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct RootList {
    /// Strictly increasing in `k`.
    pub roots: Vec<Root>,
    pub diagnostics: Vec<RootDiagnostic>,
}

impl RootList {
    pub fn values(&self) -> Vec<f64> {
        self.roots.iter().map(|r| r.k).collect()
    }

    /// Roots repeated by multiplicity, as eigenvalue listings show them.
    pub fn expanded(&self) -> Vec<f64> {
        self.roots
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.k, r.multiplicity))
            .collect()
    }

    pub fn first(&self) -> Option<f64> {
        self.roots.first().map(|r| r.k)
    }

    pub fn nearest(&self, k: f64) -> Option<&Root> {
        self.roots
            .iter()
            .min_by(|a, b| (a.k - k).abs().total_cmp(&(b.k - k).abs()))
    }
}

fn polish<F>(det_fn: &F, m: u32, start: f64) -> std::result::Result<(f64, f64), String>
where
    F: Fn(u32, Complex64) -> Result<DetValue>,
{
    let mut k = Complex64::new(start, 0.0);
    let h = 1e-6;
    for _ in 0..60 {
        let f = det_fn(m, k).map_err(|e| e.to_string())?.det;
        let fp = det_fn(m, k + h).map_err(|e| e.to_string())?.det;
        let fm = det_fn(m, k - h).map_err(|e| e.to_string())?.det;
        let d = (fp - fm) / (2.0 * h);
        if d.norm() == 0.0 {
            return Err("zero derivative".into());
        }
        let step = f / d;
        let step = if step.norm() > 0.05 { step * (0.05 / step.norm()) } else { step };
        k -= step;
        if step.norm() <= 1e-15 * k.norm().max(1.0) {
            break;
        }
        if (k.re - start).abs() > POLISH_REACH {
            return Err(format!("Newton left the neighbourhood of {start:.6}"));
        }
    }
    if k.im.abs() > ACCEPT_IM {
        return Err(format!("converged off the real axis (Im k = {:.3e})", k.im));
    }
    let v = det_fn(m, Complex64::new(k.re, 0.0)).map_err(|e| e.to_string())?;
    if v.det.norm() > ACCEPT_DEFECT * v.scale {
        return Err(format!(
            "defect {:.3e} exceeds {:.0e} x scale {:.3e}",
            v.det.norm(),
            ACCEPT_DEFECT,
            v.scale
        ));
    }
    Ok((k.re, v.det.norm()))
}

/// Whether the parabola through `|det|` at `i - 1, i, i + 1` reaches zero,
/// as it does at a double root and does not at a positive minimum.
fn touches_zero(vals: &[DetValue], i: usize) -> bool {
    if i == 0 || i + 1 == vals.len() {
        return true;
    }
    let (a, b, c) = (vals[i - 1].det.norm(), vals[i].det.norm(), vals[i + 1].det.norm());
    let curv = a - 2.0 * b + c;
    if curv <= 0.0 {
        return false;
    }
    let vertex = b - (c - a).powi(2) / (8.0 * curv);
    vertex <= VERTEX_REL * b
}

struct Candidate {
    start: f64,
    at_edge: bool,
}

/// Starting points for polishing on one order: sign changes of the
/// determinant projected onto its dominant phase, and small minima of
/// `|det| / scale` (double roots touch zero without changing sign).
fn candidates(grid: &[f64], vals: &[DetValue]) -> Vec<Candidate> {
    let sq: Complex64 = vals.iter().map(|v| v.det / v.scale.max(f64::MIN_POSITIVE)).map(|d| d * d).sum();
    let rot = Complex64::from_polar(1.0, -0.5 * sq.arg());
    let g: Vec<f64> = vals.iter().map(|v| (v.det * rot).re).collect();
    let rel: Vec<f64> = vals
        .iter()
        .map(|v| if v.scale > 0.0 { v.det.norm() / v.scale } else { 0.0 })
        .collect();
    let last = grid.len() - 1;
    let mut out = Vec::new();
    for i in 0..grid.len() {
        if i < last && g[i] != 0.0 && g[i].signum() != g[i + 1].signum() {
            let t = g[i] / (g[i] - g[i + 1]);
            out.push(Candidate {
                start: grid[i] + t * (grid[i + 1] - grid[i]),
                at_edge: false,
            });
            continue;
        }
        let left = if i == 0 { f64::INFINITY } else { rel[i - 1] };
        let right = if i == last { f64::INFINITY } else { rel[i + 1] };
        let bracketed = (i > 0 && g[i - 1].signum() != g[i].signum()) || g[i] == 0.0;
        if rel[i] <= left && rel[i] < right && rel[i] < PROMOTE && !bracketed && touches_zero(vals, i) {
            out.push(Candidate {
                start: grid[i],
                at_edge: i == 0 || i == last,
            });
        }
    }
    out
}

fn uniform_grid(k_min: f64, k_max: f64) -> Vec<f64> {
    let steps = ((k_max - k_min) / GRID_STEP).ceil().max(1.0) as usize;
    (0..=steps)
        .map(|i| (k_min + i as f64 * GRID_STEP).min(k_max))
        .collect()
}

/// Roots of one order on a grid, with failed candidates.
fn order_roots<F>(det_fn: &F, m: u32, grid: &[f64]) -> Result<(Vec<Root>, Vec<RootDiagnostic>)>
where
    F: Fn(u32, Complex64) -> Result<DetValue>,
{
    let (k_min, k_max) = (grid[0], grid[grid.len() - 1]);
    let vals: Vec<DetValue> = grid
        .iter()
        .map(|&k| det_fn(m, Complex64::new(k, 0.0)))
        .collect::<Result<_>>()?;
    let mut found: Vec<Root> = Vec::new();
    let mut diagnostics = Vec::new();
    for c in candidates(grid, &vals) {
        match polish(det_fn, m, c.start) {
            Ok((k, defect)) => {
                // roots outside the range belong to a neighbouring scan
                if k < k_min - 1e-12 || k > k_max + 1e-12 {
                    continue;
                }
                if found.iter().any(|r| (r.k - k).abs() <= 1e-9) {
                    continue;
                }
                found.push(Root {
                    k,
                    m,
                    defect,
                    multiplicity: if m == 0 { 1 } else { 2 },
                });
            }
            // an edge minimum of a function that keeps falling outside the
            // range is not a candidate
            Err(_) if c.at_edge => {}
            Err(reason) => diagnostics.push(RootDiagnostic {
                m,
                k_start: c.start,
                reason,
            }),
        }
    }
    found.sort_by(|a, b| a.k.total_cmp(&b.k));
    Ok((found, diagnostics))
}

fn check_range(k_min: f64, k_max: f64) -> Result<()> {
    if !(k_min > 0.0 && k_max > k_min && k_max.is_finite()) {
        return Err(Error::Config(format!(
            "root range must satisfy 0 < k_min < k_max, got [{k_min}, {k_max}]"
        )));
    }
    Ok(())
}

/// Real roots of `det_fn(m, k)` for `m <= m_max` in `[k_min, k_max]`.
///
/// The determinant is sampled on a grid of step [`GRID_STEP`]; sign changes
/// and small local minima of `|det| / scale` are polished by Newton's method
/// on the complex determinant with a central-difference derivative. Orders
/// are scanned in parallel and merged in order.
pub fn find_roots<F>(det_fn: F, k_min: f64, k_max: f64, m_max: u32) -> Result<RootList>
where
    F: Fn(u32, Complex64) -> Result<DetValue> + Sync,
{
    check_range(k_min, k_max)?;
    let grid = uniform_grid(k_min, k_max);
    let per_order: Vec<(Vec<Root>, Vec<RootDiagnostic>)> = (0..=m_max)
        .into_par_iter()
        .map(|m| order_roots(&det_fn, m, &grid))
        .collect::<Result<_>>()?;
    let mut found: Vec<Root> = Vec::new();
    let mut diagnostics = Vec::new();
    for (f, d) in per_order {
        found.extend(f);
        diagnostics.extend(d);
    }
    found.sort_by(|a, b| a.k.total_cmp(&b.k));
    let mut roots: Vec<Root> = Vec::new();
    for r in found {
        match roots.last_mut() {
            Some(last) if (r.k - last.k).abs() <= MERGE_TOL => {
                last.multiplicity += r.multiplicity;
            }
            _ => roots.push(r),
        }
    }
    Ok(RootList { roots, diagnostics })
}

const LOWEST_CHUNK: f64 = 0.25;

/// Smallest real root in `[k_min, k_max]` over `m <= m_max`, scanning each
/// order upward only as far as the best root found so far.
pub fn lowest_root<F>(det_fn: F, k_min: f64, k_max: f64, m_max: u32) -> Result<Option<Root>>
where
    F: Fn(u32, Complex64) -> Result<DetValue>,
{
    check_range(k_min, k_max)?;
    let mut best: Option<Root> = None;
    for m in 0..=m_max {
        let mut lo = k_min;
        loop {
            let cap = best.map_or(k_max, |b| b.k.min(k_max));
            if lo >= cap {
                break;
            }
            let hi = (lo + LOWEST_CHUNK).min(cap);
            if hi - lo < 0.5 * GRID_STEP {
                break;
            }
            let (roots, _) = order_roots(&det_fn, m, &uniform_grid(lo, hi))?;
            if let Some(r) = roots.first() {
                if best.is_none_or(|b| r.k < b.k) {
                    best = Some(*r);
                }
                break;
            }
            lo = hi;
        }
    }
    Ok(best)
}

pub fn disk_roots(problem: &DiskProblem, k_min: f64, k_max: f64, m_max: u32) -> Result<RootList> {
    problem.validate()?;
    find_roots(|m, k| disk_det(problem, m, k), k_min, k_max, m_max)
}

pub fn disk_lowest_root(problem: &DiskProblem, k_min: f64, k_max: f64) -> Result<Option<Root>> {
    problem.validate()?;
    lowest_root(|m, k| disk_det(problem, m, k), k_min, k_max, DEFAULT_M_MAX)
}

pub fn double_layer_roots(problem: &DoubleLayerDisk, k_min: f64, k_max: f64, m_max: u32) -> Result<RootList> {
    problem.validate()?;
    find_roots(|m, k| double_layer_det(problem, m, k), k_min, k_max, m_max)
}

/// `j_{m,s} / radius`
pub fn dirichlet_eig(radius: f64, s: u32, m: u32) -> Result<f64> {
    if !(radius > 0.0) {
        return Err(Error::Config(format!("radius must be positive, got {radius}")));
    }
    Ok(bessel_zero(m, s)? / radius)
}

/// `j_{m,s} / (radius sqrt n)`
pub fn modified_dirichlet_eig(radius: f64, n: f64, s: u32, m: u32) -> Result<f64> {
    if !(n > 0.0) {
        return Err(Error::Config(format!("n must be positive, got {n}")));
    }
    Ok(dirichlet_eig(radius, s, m)? / n.sqrt())
}

/// `k -> S_k` on a mesh; its eigenvalues are the Dirichlet eigenvalues.
pub struct SingleLayerNep {
    pub ops: LayerOps,
}

impl NepOperator for SingleLayerNep {
    fn dim(&self) -> usize {
        self.ops.dim()
    }

    fn eval(&self, k: Complex64) -> Result<CMatrix> {
        self.ops.single_layer(Wavenumber::Helmholtz(k))
    }
}

/// Dirichlet eigenvalues of the domain bounded by `mesh`, as the real
/// wavenumbers in `[k_min, k_max]` where `S_k` is singular.
pub fn dirichlet_eigs_bie(mesh: &BoundaryMesh, k_min: f64, k_max: f64) -> Result<RootList> {
    let op = SingleLayerNep {
        ops: LayerOps::new(mesh),
    };
    let res = scan_operator(&op, k_min, k_max, &ContourConfig::default())?;
    let mut roots: Vec<Root> = Vec::new();
    for rec in res.eigenvalues.iter().filter(|e| e.k.im == 0.0) {
        match roots.last_mut() {
            Some(last) if (rec.k.re - last.k).abs() <= crate::nep::CLUSTER_RADIUS => last.multiplicity += 1,
            _ => roots.push(Root {
                k: rec.k.re,
                m: 0,
                defect: rec.residual,
                multiplicity: 1,
            }),
        }
    }
    Ok(RootList {
        roots,
        diagnostics: Vec::new(),
    })
}
