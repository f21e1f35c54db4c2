//! Conductivity sweeps with convergence orders, limit classification and
//! refractive-index estimation.

use crate::error::{Error, Result};
use crate::geometry::BoundaryMesh;
use crate::layerops::LayerOps;
use crate::nep::{beyn_solve_operator, ContourConfig, MediumParams, TransmissionNep};
use crate::oracle::{
    disk_lowest_root, disk_roots, double_layer_roots, DiskProblem, DoubleLayerDisk, DEFAULT_M_MAX,
};
use crate::specfun::bessel_zero;

/// Tolerance of [`classify_limit`].
pub const LIMIT_TOL: f64 = 1e-3;
/// Candidates closer than this to each other are indistinguishable.
pub const TRACKING_TIE: f64 = 1e-8;
pub const DEFAULT_WINDOW: f64 = 0.05;
const SEED_WINDOW: f64 = 0.1;
const N_RANGE: (f64, f64) = (1.05, 100.0);

/// Real eigenvalues of a problem family parametrized by `eta`.
pub trait EtaFamily: Sync {
    /// Distinct real eigenvalues in `[lo, hi]` at conductivity `eta`, ascending.
    fn eigenvalues(&self, eta: f64, lo: f64, hi: f64) -> Result<Vec<f64>>;
}

impl EtaFamily for DiskProblem {
    fn eigenvalues(&self, eta: f64, lo: f64, hi: f64) -> Result<Vec<f64>> {
        Ok(disk_roots(&self.with_eta(eta), lo.max(1e-3), hi, DEFAULT_M_MAX)?.values())
    }
}

impl EtaFamily for DoubleLayerDisk {
    fn eigenvalues(&self, eta: f64, lo: f64, hi: f64) -> Result<Vec<f64>> {
        Ok(double_layer_roots(&self.with_eta(eta), lo.max(1e-3), hi, DEFAULT_M_MAX)?.values())
    }
}

/// The boundary-integral solver as an eta family: one contour covering the
/// query window.
pub struct BieFamily {
    pub ops: LayerOps,
    pub n: f64,
    pub n_tilde: f64,
    pub contour: ContourConfig,
}

impl BieFamily {
    pub fn new(mesh: &BoundaryMesh, n: f64, n_tilde: f64, contour: ContourConfig) -> Self {
        BieFamily {
            ops: LayerOps::new(mesh),
            n,
            n_tilde,
            contour,
        }
    }
}

impl EtaFamily for BieFamily {
    fn eigenvalues(&self, eta: f64, lo: f64, hi: f64) -> Result<Vec<f64>> {
        let params = MediumParams::new(self.n, self.n_tilde, eta)?;
        let nep = TransmissionNep::from_ops(self.ops.clone(), params)?;
        let contour = ContourConfig {
            center_mu: 0.5 * (lo + hi),
            radius: 0.5 * (hi - lo),
            ..self.contour
        };
        let res = beyn_solve_operator(&nep, &contour)?;
        let mut out: Vec<f64> = Vec::new();
        for k in res.real_values() {
            if out.last().is_none_or(|&l| (k - l).abs() > crate::nep::CLUSTER_RADIUS) {
                out.push(k);
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// eta halves each row
    ToZero,
    /// eta doubles each row
    ToInfinity,
}

impl Direction {
    pub fn eta(&self, eta0: f64, row: usize) -> f64 {
        match self {
            Direction::ToZero => eta0 / 2f64.powi(row as i32),
            Direction::ToInfinity => eta0 * 2f64.powi(row as i32),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Reference {
    None,
    /// The same family at `eta = 0`, nearest to the last tracked value.
    EtaZero,
    /// Nearest Dirichlet or modified Dirichlet value of a disk.
    DirichletFamily { radius: f64, n: f64 },
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Start {
    /// Eigenvalues at the first eta nearest to these values.
    Seeds(Vec<f64>),
    /// The lowest `count` eigenvalues above `k_min` at the first eta.
    Lowest { k_min: f64, count: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub direction: Direction,
    pub eta0: f64,
    pub steps: usize,
    pub reference: Reference,
    pub start: Start,
    /// Minimum half-width of the search window around each prediction.
    pub window: f64,
}

impl SweepSpec {
    pub fn new(direction: Direction, eta0: f64, steps: usize, start: Start) -> Self {
        SweepSpec {
            direction,
            eta0,
            steps,
            reference: Reference::None,
            start,
            window: DEFAULT_WINDOW,
        }
    }

    pub fn with_reference(mut self, reference: Reference) -> Self {
        self.reference = reference;
        self
    }

    pub fn etas(&self) -> Vec<f64> {
        (0..self.steps).map(|i| self.direction.eta(self.eta0, i)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps < 3 {
            return Err(Error::Config(format!("a sweep needs at least 3 steps, got {}", self.steps)));
        }
        if !(self.eta0.is_finite() && self.eta0 > 0.0) {
            return Err(Error::Config(format!("eta0 must be positive, got {}", self.eta0)));
        }
        if !(self.window.is_finite() && self.window > 0.0) {
            return Err(Error::Config(format!("window must be positive, got {}", self.window)));
        }
        match &self.start {
            Start::Seeds(s) if s.is_empty() || s.iter().any(|k| !(*k > 0.0)) => {
                Err(Error::Config("seeds must be a non-empty list of positive values".into()))
            }
            Start::Lowest { k_min, count } if !(*k_min > 0.0) || *count == 0 => {
                Err(Error::Config("lowest start needs k_min > 0 and count >= 1".into()))
            }
            _ => Ok(()),
        }
    }
}

/// One eta of a sweep. Per tracked eigenvalue: the value, the increment
/// `eps = |k(eta) - k(previous eta)|`, the distance to the reference and
/// `EOC = log2(eps_previous / eps)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub eta: f64,
    pub k_values: Vec<f64>,
    pub eps: Vec<Option<f64>>,
    pub ref_error: Vec<Option<f64>>,
    pub eoc: Vec<Option<f64>>,
}

pub fn eoc(eps_prev: Option<f64>, eps: Option<f64>) -> Option<f64> {
    match (eps_prev, eps) {
        (Some(a), Some(b)) if a > 0.0 && b > 0.0 => Some((a / b).log2()),
        _ => None,
    }
}

fn nearest(candidates: &[f64], target: f64, eta: f64) -> Result<f64> {
    let mut sorted: Vec<f64> = candidates.to_vec();
    sorted.sort_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()));
    match sorted.as_slice() {
        [] => Err(Error::TrackingLost { eta, from: target }),
        [a, b, ..] if ((a - target).abs() - (b - target).abs()).abs() <= TRACKING_TIE && (a - b).abs() > TRACKING_TIE => {
            Err(Error::Tracking {
                eta,
                from: target,
                a: *a,
                b: *b,
            })
        }
        [a, ..] => Ok(*a),
    }
}

fn initial_values(family: &dyn EtaFamily, spec: &SweepSpec, eta: f64) -> Result<Vec<f64>> {
    match &spec.start {
        Start::Seeds(seeds) => seeds
            .iter()
            .map(|&s| nearest(&family.eigenvalues(eta, s - SEED_WINDOW, s + SEED_WINDOW)?, s, eta))
            .collect(),
        Start::Lowest { k_min, count } => {
            let mut lo = *k_min;
            let mut found = Vec::new();
            while found.len() < *count {
                if lo > k_min + 40.0 {
                    return Err(Error::TrackingLost { eta, from: lo });
                }
                found.extend(family.eigenvalues(eta, lo, lo + 1.0)?.into_iter().filter(|&k| k > lo));
                lo += 1.0;
            }
            found.truncate(*count);
            Ok(found)
        }
    }
}

fn reference_values(family: &dyn EtaFamily, spec: &SweepSpec, last: &[f64]) -> Result<Vec<Option<f64>>> {
    match &spec.reference {
        Reference::None => Ok(vec![None; last.len()]),
        Reference::Explicit(v) => {
            if v.len() != last.len() {
                return Err(Error::Config(format!(
                    "{} reference values for {} tracked eigenvalues",
                    v.len(),
                    last.len()
                )));
            }
            Ok(v.iter().map(|&x| Some(x)).collect())
        }
        Reference::EtaZero => last
            .iter()
            .map(|&k| {
                let cands = family.eigenvalues(0.0, k - SEED_WINDOW, k + SEED_WINDOW)?;
                nearest(&cands, k, 0.0).map(Some)
            })
            .collect(),
        Reference::DirichletFamily { radius, n } => Ok(last
            .iter()
            .map(|&k| classify_limit(k, *radius, *n).value())
            .collect()),
    }
}

/// Tracks eigenvalues across the sweep's etas by nearest continuation from a
/// linear predictor.
pub fn run_sweep(family: &dyn EtaFamily, spec: &SweepSpec) -> Result<Vec<ConvergenceRow>> {
    spec.validate()?;
    let etas = spec.etas();
    let mut history: Vec<Vec<f64>> = vec![initial_values(family, spec, etas[0])?];
    for &eta in &etas[1..] {
        let prev = &history[history.len() - 1];
        let before = history.len().checked_sub(2).map(|i| &history[i]);
        let mut row = Vec::with_capacity(prev.len());
        for (j, &k) in prev.iter().enumerate() {
            let (pred, w) = match before {
                Some(b) => {
                    let d = k - b[j];
                    (k + 0.5 * d, spec.window.max(4.0 * d.abs()))
                }
                None => (k, spec.window),
            };
            let cands = family.eigenvalues(eta, pred - w, pred + w)?;
            row.push(nearest(&cands, pred, eta)?);
        }
        history.push(row);
    }
    let refs = reference_values(family, spec, history.last().unwrap())?;
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(etas.len());
    for (i, ks) in history.iter().enumerate() {
        let eps: Vec<Option<f64>> = match i {
            0 => vec![None; ks.len()],
            _ => ks.iter().zip(&history[i - 1]).map(|(a, b)| Some((a - b).abs())).collect(),
        };
        let eoc_row = match rows.last() {
            Some(p) => p.eps.iter().zip(&eps).map(|(a, b)| eoc(*a, *b)).collect(),
            None => vec![None; ks.len()],
        };
        rows.push(ConvergenceRow {
            eta: etas[i],
            k_values: ks.clone(),
            ref_error: ks.iter().zip(&refs).map(|(k, r)| r.map(|r| (k - r).abs())).collect(),
            eps,
            eoc: eoc_row,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitClass {
    /// `j_{m,s} / radius`
    Dirichlet { m: u32, s: u32, value: f64 },
    /// `j_{m,s} / (radius sqrt n)`
    Modified { m: u32, s: u32, value: f64 },
    Unresolved,
}

impl LimitClass {
    pub fn value(&self) -> Option<f64> {
        match self {
            LimitClass::Dirichlet { value, .. } | LimitClass::Modified { value, .. } => Some(*value),
            LimitClass::Unresolved => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            LimitClass::Dirichlet { m, s, .. } => format!("dirichlet({m},{s})"),
            LimitClass::Modified { m, s, .. } => format!("modified({m},{s})"),
            LimitClass::Unresolved => "unresolved".into(),
        }
    }
}

/// Bessel zeros `j_{m,s} <= bound` as `(m, s, j)`.
fn zeros_below(bound: f64) -> Vec<(u32, u32, f64)> {
    let mut out = Vec::new();
    for m in 0.. {
        let mut s = 1;
        loop {
            let j = match bessel_zero(m, s) {
                Ok(j) => j,
                Err(_) => return out,
            };
            if j > bound {
                break;
            }
            out.push((m, s, j));
            s += 1;
        }
        if s == 1 {
            break;
        }
    }
    out
}

/// Nearest Dirichlet or modified Dirichlet eigenvalue of the disk within
/// [`LIMIT_TOL`].
pub fn classify_limit(k_limit: f64, radius: f64, n: f64) -> LimitClass {
    if !(k_limit > 0.0 && radius > 0.0 && n > 0.0) {
        return LimitClass::Unresolved;
    }
    let sn = n.sqrt();
    let mut best_d: Option<(f64, LimitClass)> = None;
    let mut best_m: Option<(f64, LimitClass)> = None;
    for (m, s, j) in zeros_below((k_limit + LIMIT_TOL) * radius * sn.max(1.0)) {
        let vd = j / radius;
        let vm = j / (radius * sn);
        let dd = (vd - k_limit).abs();
        let dm = (vm - k_limit).abs();
        if dd <= LIMIT_TOL && best_d.is_none_or(|(d, _)| dd < d) {
            best_d = Some((dd, LimitClass::Dirichlet { m, s, value: vd }));
        }
        if dm <= LIMIT_TOL && best_m.is_none_or(|(d, _)| dm < d) {
            best_m = Some((dm, LimitClass::Modified { m, s, value: vm }));
        }
    }
    match (best_d, best_m) {
        (None, None) => LimitClass::Unresolved,
        (Some((_, c)), None) | (None, Some((_, c))) => c,
        (Some((a, ca)), Some((b, cb))) => {
            if (a - b).abs() <= 1e-12 {
                LimitClass::Unresolved
            } else if a < b {
                ca
            } else {
                cb
            }
        }
    }
}

/// First conductive eigenvalue of the disk, `k_1(n; eta)`.
pub fn first_eigenvalue(problem: &DiskProblem) -> Result<f64> {
    let k_cap = 0.95 * crate::specfun::MAX_MODULUS / (problem.n().sqrt().max(1.0) * problem.radius);
    disk_lowest_root(problem, 0.05, k_cap)?
        .map(|r| r.k)
        .ok_or_else(|| Error::Estimation(format!("no eigenvalue below {k_cap:.3} for n = {}", problem.n())))
}

/// Solves `k_1(n; model_eta) = k1_measured` for `n` on the disk by bisection
/// to `|dn| <= 1e-12`; `model_eta = 0` is the classical problem.
pub fn estimate_n_small_eta(k1_measured: f64, radius: f64, model_eta: f64) -> Result<f64> {
    if !(k1_measured > 0.0 && k1_measured.is_finite()) {
        return Err(Error::Estimation(format!("measured eigenvalue must be positive, got {k1_measured}")));
    }
    let k1 = |n: f64| -> Result<f64> {
        let p = if model_eta == 0.0 {
            DiskProblem::classical(n)
        } else {
            DiskProblem::conductive(n, model_eta)
        };
        first_eigenvalue(&p.with_radius(radius))
    };
    // bracket from the top of the range: k_1 decreases in n
    let (n_min, n_max) = N_RANGE;
    let mut hi = n_max;
    let mut k_hi = k1(hi)?;
    if k1_measured < k_hi {
        return Err(Error::Estimation(format!(
            "measured {k1_measured} is below k_1({n_max}) = {k_hi}"
        )));
    }
    let mut lo = hi;
    let mut k_lo = k_hi;
    while k_lo < k1_measured {
        hi = lo;
        k_hi = k_lo;
        lo = (lo * 0.8).max(n_min);
        k_lo = match k1(lo) {
            Ok(k) => k,
            Err(_) if lo == n_min => f64::INFINITY,
            Err(e) => return Err(e),
        };
        if k_lo < k_hi {
            return Err(Error::Estimation(format!(
                "k_1 is not decreasing in n between {lo} and {hi}"
            )));
        }
        if lo == n_min && k_lo < k1_measured {
            return Err(Error::Estimation(format!(
                "measured {k1_measured} exceeds k_1({n_min}) = {k_lo}"
            )));
        }
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if k1(mid)? > k1_measured {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `n` with `j_{1,1} / (radius sqrt n) = k1_measured`.
pub fn estimate_n_large_eta(k1_measured: f64, radius: f64) -> Result<f64> {
    if !(k1_measured > 0.0 && radius > 0.0) {
        return Err(Error::Estimation(format!(
            "need positive measurement and radius, got {k1_measured}, {radius}"
        )));
    }
    let j11 = bessel_zero(1, 1)?;
    Ok((j11 / (radius * k1_measured)).powi(2))
}

/// `n = lambda_1 / k1_measured^2` for a domain with first Dirichlet
/// eigenvalue `lambda_1` (a squared wavenumber).
pub fn estimate_n_large_eta_lambda(k1_measured: f64, lambda1: f64) -> Result<f64> {
    if !(k1_measured > 0.0 && lambda1 > 0.0) {
        return Err(Error::Estimation(format!(
            "need positive measurement and lambda_1, got {k1_measured}, {lambda1}"
        )));
    }
    Ok(lambda1 / (k1_measured * k1_measured))
}

/// Lower bound `sqrt(lambda_1 / n_max)` on real transmission eigenvalues.
pub fn faber_krahn_bound(n_max: f64, lambda1: f64) -> Result<f64> {
    if !(n_max > 1.0) {
        return Err(Error::Unsupported(format!(
            "the bound for n_max <= 1 needs a trace constant that is not available (n_max = {n_max})"
        )));
    }
    if !(lambda1 > 0.0) {
        return Err(Error::Config(format!("lambda_1 must be positive, got {lambda1}")));
    }
    Ok((lambda1 / n_max).sqrt())
}

/// Residual of `k_1(n; eta) = target`, used to report inversion quality.
pub fn small_eta_residual(n: f64, radius: f64, model_eta: f64, target: f64) -> Result<f64> {
    let p = if model_eta == 0.0 {
        DiskProblem::classical(n)
    } else {
        DiskProblem::conductive(n, model_eta)
    };
    Ok(first_eigenvalue(&p.with_radius(radius))? - target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    struct Synthetic {
        limit: f64,
        c: f64,
    }

    impl EtaFamily for Synthetic {
        fn eigenvalues(&self, eta: f64, lo: f64, hi: f64) -> Result<Vec<f64>> {
            let k = self.limit + self.c / eta;
            Ok(if k >= lo && k <= hi { vec![k] } else { vec![] })
        }
    }

    #[test]
    fn exact_halving_gives_unit_eoc() {
        let fam = Synthetic { limit: 2.0, c: 0.03 };
        let spec = SweepSpec::new(Direction::ToInfinity, 1.0, 8, Start::Seeds(vec![2.03]))
            .with_reference(Reference::Explicit(vec![2.0]));
        let rows = run_sweep(&fam, &spec).unwrap();
        assert_eq!(rows.len(), 8);
        assert!(rows[0].eoc[0].is_none() && rows[1].eoc[0].is_none());
        for r in &rows[2..] {
            assert!((r.eoc[0].unwrap() - 1.0).abs() < 1e-9);
        }
        assert!((rows[7].ref_error[0].unwrap() - 0.03 / 128.0).abs() < 1e-12);
    }

    #[test]
    fn three_rows_have_one_eoc() {
        let fam = Synthetic { limit: 2.0, c: 0.03 };
        let spec = SweepSpec::new(Direction::ToInfinity, 1.0, 3, Start::Seeds(vec![2.03]));
        let rows = run_sweep(&fam, &spec).unwrap();
        assert_eq!(rows.iter().filter(|r| r.eoc[0].is_some()).count(), 1);
    }

    #[test]
    fn too_few_steps_rejected() {
        let fam = Synthetic { limit: 2.0, c: 0.3 };
        let spec = SweepSpec::new(Direction::ToZero, 1.0, 2, Start::Seeds(vec![2.3]));
        assert!(matches!(run_sweep(&fam, &spec), Err(Error::Config(_))));
    }

    struct Twin;

    impl EtaFamily for Twin {
        fn eigenvalues(&self, eta: f64, _lo: f64, _hi: f64) -> Result<Vec<f64>> {
            Ok(if eta == 1.0 { vec![2.0] } else { vec![1.99, 2.01] })
        }
    }

    #[test]
    fn equidistant_candidates_are_ambiguous() {
        let spec = SweepSpec::new(Direction::ToInfinity, 1.0, 3, Start::Seeds(vec![2.0]));
        match run_sweep(&Twin, &spec) {
            Err(Error::Tracking { eta, .. }) => assert_eq!(eta, 2.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn lost_eigenvalue_reported() {
        let fam = Synthetic { limit: 2.0, c: 5.0 };
        let spec = SweepSpec::new(Direction::ToInfinity, 10.0, 4, Start::Seeds(vec![2.5]));
        assert!(matches!(run_sweep(&fam, &spec), Err(Error::TrackingLost { .. })));
    }

    #[test]
    fn disk_sweep_to_zero() {
        let spec = SweepSpec::new(Direction::ToZero, 0.5, 4, Start::Lowest { k_min: 2.0, count: 1 })
            .with_reference(Reference::EtaZero);
        let rows = run_sweep(&DiskProblem::conductive(4.0, 0.5), &spec).unwrap();
        assert!((rows[0].k_values[0] - 2.8416).abs() < 5e-5);
        assert!((rows[3].k_values[0] - 2.8954).abs() < 5e-5);
        let r = rows[3].ref_error[0].unwrap();
        assert!((r - (2.902608055212766 - rows[3].k_values[0])).abs() < 1e-9);
    }

    #[test]
    fn classification() {
        assert!(matches!(classify_limit(2.5679, 1.0, 4.0), LimitClass::Modified { m: 2, s: 1, .. }));
        assert!(matches!(classify_limit(3.8315, 1.0, 4.0), LimitClass::Dirichlet { m: 1, s: 1, .. }));
        assert_eq!(classify_limit(0.1, 1.0, 4.0), LimitClass::Unresolved);
        assert!(matches!(classify_limit(2.4048, 1.0, 4.0), LimitClass::Dirichlet { m: 0, s: 1, .. }));
    }

    #[test]
    fn large_eta_inversion() {
        let j11 = bessel_zero(1, 1).unwrap();
        assert!((estimate_n_large_eta(j11 / 2.0, 1.0).unwrap() - 4.0).abs() < 1e-12);
        assert!((estimate_n_large_eta_lambda(2.0, 16.0).unwrap() - 4.0).abs() < 1e-15);
        assert!(estimate_n_large_eta(-1.0, 1.0).is_err());
    }

    #[test]
    fn small_eta_fixed_point() {
        let k = first_eigenvalue(&DiskProblem::classical(4.0)).unwrap();
        assert!((k - 2.902608055212766).abs() < 1e-10);
        assert!((estimate_n_small_eta(k, 1.0, 0.0).unwrap() - 4.0).abs() < 1e-10);
    }

    #[test]
    fn small_eta_out_of_range() {
        assert!(matches!(estimate_n_small_eta(0.01, 1.0, 0.0), Err(Error::Estimation(_))));
    }

    #[test]
    fn faber_krahn() {
        let j01 = bessel_zero(0, 1).unwrap();
        assert!((faber_krahn_bound(4.0, j01 * j01).unwrap() - j01 / 2.0).abs() < 1e-14);
        assert_eq!(faber_krahn_bound(2.0, 8.0).unwrap(), 2.0);
        assert!(matches!(faber_krahn_bound(0.5, 8.0), Err(Error::Unsupported(_))));
        for k in [2.7741, 3.2908, 3.3122, 2.9026, 3.3842, 3.4121] {
            assert!(k > faber_krahn_bound(4.0, j01 * j01).unwrap());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn eoc_matches_stored_eps(a in 1e-8f64..1.0, b in 1e-8f64..1.0) {
            let e = eoc(Some(a), Some(b)).unwrap();
            prop_assert_eq!(e, (a / b).log2());
        }

        #[test]
        fn geometric_decay_has_constant_eoc(c in 0.01f64..2.0, limit in 0.5f64..4.0, rate in 1.0f64..3.0) {
            struct Pow { limit: f64, c: f64, rate: f64 }
            impl EtaFamily for Pow {
                fn eigenvalues(&self, eta: f64, _lo: f64, _hi: f64) -> Result<Vec<f64>> {
                    Ok(vec![self.limit + self.c * eta.powf(-self.rate)])
                }
            }
            let spec = SweepSpec::new(Direction::ToInfinity, 4.0, 6, Start::Seeds(vec![limit]));
            let rows = run_sweep(&Pow { limit, c, rate }, &spec).unwrap();
            for r in &rows[2..] {
                prop_assert!((r.eoc[0].unwrap() - rate).abs() < 1e-6);
            }
        }

        #[test]
        fn large_eta_round_trip(n in 1.1f64..50.0, radius in 0.3f64..3.0) {
            let k = bessel_zero(1, 1).unwrap() / (radius * n.sqrt());
            prop_assert!((estimate_n_large_eta(k, radius).unwrap() - n).abs() <= 1e-12 * n);
        }
    }
}
