//! Subcommand implementations. Each returns a table or an error.

use teig_core::analysis::{
    classify_limit, estimate_n_large_eta, estimate_n_small_eta, first_eigenvalue, run_sweep, small_eta_residual,
    BieFamily, ConvergenceRow, Direction, EtaFamily, Reference, Start, SweepSpec, DEFAULT_WINDOW,
};
use teig_core::geometry::{build_mesh, BoundaryCurve, BoundaryMesh};
use teig_core::nep::{beyn_solve, scan_eigenvalues_with, ContourConfig, EigenResult, MediumParams};
use teig_core::oracle::{
    dirichlet_eig, disk_determinant, disk_roots, double_layer_roots, modified_dirichlet_eig, DiskProblem,
    DoubleLayerDisk, LayerVariant, RootList, DEFAULT_M_MAX,
};
use teig_core::specfun::bessel_zero;
use teig_core::{Error, Result};

use crate::config::{parse_number, Settings};
use crate::output::{Cell, Table};

/// Keys accepted by every subcommand, as config keys and as `--key` flags.
pub const KEYS: &[(&str, &str)] = &[
    ("curve", "boundary: circle | ellipse | trigpoly, optionally with inline key=value parameters"),
    ("radius", "disk / circle radius (outer radius for the double layer)"),
    ("a", "ellipse semi-axis along x"),
    ("b", "ellipse semi-axis along y"),
    ("cx", "trigpoly cosine coefficients of x, comma separated"),
    ("sx", "trigpoly sine coefficients of x"),
    ("cy", "trigpoly cosine coefficients of y"),
    ("sy", "trigpoly sine coefficients of y"),
    ("nodes", "collocation points (even, >= 6)"),
    ("n", "refractive index"),
    ("ntilde", "background index inside the layer (0 for zero index)"),
    ("eta", "conductivity (fractions such as 1/10 allowed)"),
    ("mu", "contour center"),
    ("contour-radius", "contour radius"),
    ("quad-nodes", "trapezoidal nodes on the contour"),
    ("probe-cols", "probe columns (default min(16, dim))"),
    ("rank-tol", "relative singular value cut"),
    ("residual-tol", "residual acceptance threshold"),
    ("moments", "moment pairs"),
    ("seed", "probe RNG seed"),
    ("range", "search interval lo:hi (tiles contours for the BIE solver)"),
    ("m-max", "highest Fourier order for oracle scans"),
    ("oracle", "disk | double-layer"),
    ("variant", "classical | conductive | zero-index"),
    ("r-inner", "double layer inner radius"),
    ("n1", "double layer index inside the inner disk"),
    ("n2", "double layer index in the annulus"),
    ("solver", "sweep family: oracle | bie"),
    ("direction", "to-zero | to-infinity"),
    ("eta0", "first conductivity of a sweep"),
    ("steps", "number of sweep rows"),
    ("seeds", "eigenvalues to track at eta0, comma separated"),
    ("k-min", "lower end for tracking the lowest eigenvalues"),
    ("count", "number of lowest eigenvalues to track"),
    ("reference", "none | eta-zero | dirichlet | comma separated values"),
    ("window", "minimum tracking window half-width"),
    ("mode", "inversion: small | large"),
    ("measured", "measured first eigenvalue"),
    ("source", "small-eta measurement when none is given: classical | conductive"),
    ("model-eta", "conductivity of the small-eta model"),
    ("n-true", "index used to synthesize the measurement"),
    ("tol", "validation tolerance on |k_bie - k_oracle|"),
    ("kind", "oracle query: bessel-zero | dirichlet | modified | disk-roots | double-layer-roots | classify | first | det"),
    ("k", "wavenumber for classify / det"),
    ("m", "Bessel order / Fourier mode"),
    ("s", "zero index (1-based)"),
];

pub fn is_known(key: &str) -> bool {
    KEYS.iter().any(|(k, _)| *k == key)
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

/// Inline `curve` parameters (e.g. `ellipse a=1 b=0.8`) are moved into
/// separate keys unless the same key was given explicitly.
pub fn expand_curve(s: &mut Settings) -> Result<()> {
    let Some(spec) = s.opt_str("curve") else {
        return Ok(());
    };
    let mut parts = spec.split_whitespace();
    let kind = parts.next().unwrap_or_default().to_string();
    let mut inline = Vec::new();
    for p in parts {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| config_err(format!("curve parameter `{p}` is not key=value")))?;
        if !matches!(k, "radius" | "a" | "b" | "cx" | "sx" | "cy" | "sy") {
            return Err(config_err(format!("unknown curve parameter `{k}`")));
        }
        inline.push((k.to_string(), v.to_string()));
    }
    for (k, v) in inline {
        if !s.has(&k) {
            s.set(&k, v);
        }
    }
    s.set("curve", kind);
    Ok(())
}

fn curve(s: &Settings) -> Result<BoundaryCurve> {
    let kind = s.str_or("curve", "circle");
    match kind.as_str() {
        "circle" => BoundaryCurve::circle(s.number("radius", 1.0)?),
        "ellipse" => BoundaryCurve::ellipse(s.number("a", 1.0)?, s.number("b", 0.8)?),
        "trigpoly" => {
            let get = |k: &str| -> Result<Vec<f64>> { Ok(s.list(k)?.unwrap_or_default()) };
            BoundaryCurve::trig_poly(get("cx")?, get("sx")?, get("cy")?, get("sy")?)
        }
        other => Err(config_err(format!("unknown curve `{other}` (circle | ellipse | trigpoly)"))),
    }
}

fn mesh(s: &Settings) -> Result<BoundaryMesh> {
    let c = curve(s)?;
    build_mesh(&c, s.get("nodes", 40usize)?)
}

fn params(s: &Settings) -> Result<MediumParams> {
    MediumParams::new(s.number("n", 4.0)?, s.number("ntilde", 1.0)?, s.number("eta", 1.0)?)
}

fn contour(s: &Settings) -> Result<ContourConfig> {
    let d = ContourConfig::default();
    Ok(ContourConfig {
        center_mu: s.number("mu", d.center_mu)?,
        radius: s.number("contour-radius", d.radius)?,
        quad_nodes: s.get("quad-nodes", d.quad_nodes)?,
        probe_cols: match s.str_or("probe-cols", "auto").as_str() {
            "auto" => None,
            _ => s.opt("probe-cols")?,
        },
        rank_rel_tol: s.number("rank-tol", d.rank_rel_tol)?,
        residual_tol: s.number("residual-tol", d.residual_tol)?,
        rng_seed: s.get("seed", d.rng_seed)?,
        moments: s.get("moments", d.moments)?,
    })
}

fn disk_problem(s: &Settings, default_variant: &str) -> Result<DiskProblem> {
    let n = s.number("n", 4.0)?;
    let variant = s.str_or("variant", default_variant);
    let p = match variant.as_str() {
        "classical" => DiskProblem::classical(n),
        "conductive" => DiskProblem::conductive(n, s.number("eta", 1.0)?),
        "zero-index" => DiskProblem::zero_index(n, s.number("eta", 1.0)?),
        other => return Err(config_err(format!("unknown variant `{other}` (classical | conductive | zero-index)"))),
    }
    .with_radius(s.number("radius", 1.0)?);
    p.validate()?;
    Ok(p)
}

fn double_layer(s: &Settings) -> Result<DoubleLayerDisk> {
    let variant = match s.str_or("variant", "conductive").as_str() {
        "conductive" => LayerVariant::Conductive,
        "zero-index" => LayerVariant::ZeroIndex,
        other => return Err(config_err(format!("unknown double-layer variant `{other}` (conductive | zero-index)"))),
    };
    let p = DoubleLayerDisk {
        big_r: s.number("radius", 1.0)?,
        r: s.number("r-inner", 0.5)?,
        n1: s.number("n1", 0.5)?,
        n2: s.number("n2", 4.0)?,
        eta: s.number("eta", 80.0)?,
        variant,
    };
    p.validate()?;
    Ok(p)
}

fn range(s: &Settings, default: (f64, f64)) -> Result<(f64, f64)> {
    match s.range("range")? {
        Some(r) => Ok(r),
        None => {
            s.str_or("range", &format!("{}:{}", default.0, default.1));
            Ok(default)
        }
    }
}

fn oracle_roots(s: &Settings) -> Result<RootList> {
    let (lo, hi) = range(s, (0.5, 4.0))?;
    let m_max = s.get("m-max", DEFAULT_M_MAX)?;
    match s.str_or("oracle", "disk").as_str() {
        "disk" => disk_roots(&disk_problem(s, "conductive")?, lo, hi, m_max),
        "double-layer" => double_layer_roots(&double_layer(s)?, lo, hi, m_max),
        other => Err(config_err(format!("unknown oracle `{other}` (disk | double-layer)"))),
    }
}

fn root_table(roots: &RootList) -> Table {
    let mut t = Table::new(["k_re", "k_im", "residual", "cluster", "method"]);
    for r in &roots.roots {
        for _ in 0..r.multiplicity {
            t.push(vec![
                Cell::Eig(r.k),
                Cell::Num(0.0),
                Cell::Num(r.defect),
                Cell::Int(r.multiplicity as i64),
                Cell::Text("oracle".into()),
            ]);
        }
    }
    t
}

fn bie_eigs(s: &Settings) -> Result<EigenResult> {
    let mesh = mesh(s)?;
    let p = params(s)?;
    let c = contour(s)?;
    match s.range("range")? {
        Some((lo, hi)) => scan_eigenvalues_with(&mesh, p, lo, hi, &c),
        None => beyn_solve(&mesh, p, &c),
    }
}

pub fn eig(s: &Settings) -> Result<Table> {
    if s.has("oracle") {
        return Ok(root_table(&oracle_roots(s)?));
    }
    let res = bie_eigs(s)?;
    let mut t = Table::new(["k_re", "k_im", "residual", "cluster", "method"]);
    for e in &res.eigenvalues {
        t.push(vec![
            Cell::Eig(e.k.re),
            Cell::Num(e.k.im),
            Cell::Num(e.residual),
            Cell::Int(e.cluster_size as i64),
            Cell::Text("bie".into()),
        ]);
    }
    Ok(t)
}

fn sweep_family(s: &Settings) -> Result<Box<dyn EtaFamily>> {
    match s.str_or("solver", "oracle").as_str() {
        "oracle" => match s.str_or("oracle", "disk").as_str() {
            "disk" => Ok(Box::new(disk_problem(s, "conductive")?)),
            "double-layer" => Ok(Box::new(double_layer(s)?)),
            other => Err(config_err(format!("unknown oracle `{other}` (disk | double-layer)"))),
        },
        "bie" => {
            let mesh = mesh(s)?;
            let c = contour(s)?;
            Ok(Box::new(BieFamily::new(&mesh, s.number("n", 4.0)?, s.number("ntilde", 1.0)?, c)))
        }
        other => Err(config_err(format!("unknown solver `{other}` (oracle | bie)"))),
    }
}

fn sweep_spec(s: &Settings) -> Result<SweepSpec> {
    let direction = match s.str_or("direction", "to-zero").as_str() {
        "to-zero" => Direction::ToZero,
        "to-infinity" => Direction::ToInfinity,
        other => return Err(config_err(format!("unknown direction `{other}` (to-zero | to-infinity)"))),
    };
    let start = match s.list("seeds")? {
        Some(seeds) => Start::Seeds(seeds),
        None => Start::Lowest {
            k_min: s.number("k-min", 0.5)?,
            count: s.get("count", 1usize)?,
        },
    };
    let reference = match s.str_or("reference", "none").as_str() {
        "none" => Reference::None,
        "eta-zero" => Reference::EtaZero,
        "dirichlet" => Reference::DirichletFamily {
            radius: s.number("radius", 1.0)?,
            n: s.number("n", 4.0)?,
        },
        list => Reference::Explicit(
            list.split(',')
                .map(|v| parse_number(v.trim()).ok_or_else(|| config_err(format!("cannot parse reference `{v}`"))))
                .collect::<Result<_>>()?,
        ),
    };
    let mut spec = SweepSpec::new(direction, s.number("eta0", 0.5)?, s.get("steps", 10usize)?, start)
        .with_reference(reference);
    spec.window = s.number("window", DEFAULT_WINDOW)?;
    spec.validate()?;
    Ok(spec)
}

pub fn sweep_table(rows: &[ConvergenceRow], with_reference: bool) -> Table {
    let count = rows.first().map_or(0, |r| r.k_values.len());
    let mut cols = vec!["eta".to_string()];
    for j in 1..=count {
        cols.push(format!("k{j}"));
        cols.push(format!("eoc{j}"));
        if with_reference {
            cols.push(format!("ref_err{j}"));
        }
    }
    let mut t = Table::new(cols);
    for r in rows {
        let mut cells = vec![Cell::Eta(r.eta)];
        for j in 0..count {
            cells.push(Cell::Eig(r.k_values[j]));
            cells.push(Cell::opt_eig(r.eoc[j]));
            if with_reference {
                cells.push(Cell::opt_num(r.ref_error[j]));
            }
        }
        t.push(cells);
    }
    t
}

pub fn sweep(s: &Settings) -> Result<Table> {
    let family = sweep_family(s)?;
    let spec = sweep_spec(s)?;
    let rows = run_sweep(family.as_ref(), &spec)?;
    Ok(sweep_table(&rows, !matches!(spec.reference, Reference::None)))
}

pub fn invert(s: &Settings) -> Result<Table> {
    let radius = s.number("radius", 1.0)?;
    let mode = s.str_or("mode", "small");
    let mut t = Table::new(["mode", "k1_measured", "n_approx", "residual"]);
    match mode.as_str() {
        "small" => {
            let model_eta = s.number("model-eta", s.number("eta", 0.1)?)?;
            let measured = match s.opt::<f64>("measured")? {
                Some(k) => k,
                None => {
                    let n_true = s.number("n-true", 4.0)?;
                    let p = match s.str_or("source", "classical").as_str() {
                        "classical" => DiskProblem::classical(n_true),
                        "conductive" => DiskProblem::conductive(n_true, model_eta),
                        other => return Err(config_err(format!("unknown source `{other}` (classical | conductive)"))),
                    };
                    first_eigenvalue(&p.with_radius(radius))?
                }
            };
            let n = estimate_n_small_eta(measured, radius, model_eta)?;
            let res = small_eta_residual(n, radius, model_eta, measured)?;
            t.push(vec![Cell::Text(mode), Cell::Num(measured), Cell::Num(n), Cell::Num(res)]);
        }
        "large" => {
            let j11 = bessel_zero(1, 1)?;
            let measured = match s.opt::<f64>("measured")? {
                Some(k) => k,
                None => {
                    let n_true = s.number("n-true", 4.0)?;
                    let p = DiskProblem::zero_index(n_true, s.number("eta", 200.0)?).with_radius(radius);
                    let p = if s.str_or("variant", "zero-index") == "conductive" {
                        DiskProblem::conductive(n_true, p.eta()).with_radius(radius)
                    } else {
                        p
                    };
                    // the branch converging to j11 / (R sqrt(n))
                    let target = j11 / (radius * n_true.sqrt());
                    disk_roots(&p, (target - 0.2).max(0.01), target + 0.2, DEFAULT_M_MAX)?
                        .roots
                        .iter()
                        .filter(|r| r.m == 1)
                        .map(|r| r.k)
                        .min_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()))
                        .ok_or_else(|| Error::Estimation(format!("no m = 1 eigenvalue near {target}")))?
                }
            };
            let n = estimate_n_large_eta(measured, radius)?;
            let res = j11 / (radius * n.sqrt()) - measured;
            t.push(vec![Cell::Text(mode), Cell::Num(measured), Cell::Num(n), Cell::Num(res)]);
        }
        other => return Err(config_err(format!("unknown mode `{other}` (small | large)"))),
    }
    Ok(t)
}

/// Outcome of `validate`: the comparison table and whether it passed.
pub fn validate(s: &Settings) -> Result<(Table, bool, String)> {
    if s.str_or("curve", "circle") != "circle" {
        return Err(config_err("validate needs curve = circle (the oracle is a disk)"));
    }
    let p = params(s)?;
    let variant = if p.is_zero_index() {
        "zero-index"
    } else if p.n_tilde == 1.0 && p.eta == 0.0 {
        "classical"
    } else if p.n_tilde == 1.0 {
        "conductive"
    } else {
        return Err(config_err("validate supports ntilde = 1 or ntilde = 0 only"));
    };
    let problem = match variant {
        "classical" => DiskProblem::classical(p.n),
        "conductive" => DiskProblem::conductive(p.n, p.eta),
        _ => DiskProblem::zero_index(p.n, p.eta),
    }
    .with_radius(s.number("radius", 1.0)?);
    let tol = s.number("tol", 5e-4)?;
    let c = contour(s)?;
    let (lo, hi) = match s.range("range")? {
        Some(r) => r,
        None => (c.center_mu - c.radius, c.center_mu + c.radius),
    };
    let mut bie = bie_eigs(s)?.real_values();
    bie.sort_by(f64::total_cmp);
    let oracle = disk_roots(&problem, lo, hi, s.get("m-max", DEFAULT_M_MAX)?)?.expanded();

    let mut t = Table::new(["k_bie", "k_oracle", "delta"]);
    let mut worst: f64 = 0.0;
    for i in 0..bie.len().max(oracle.len()) {
        let (a, b) = (bie.get(i).copied(), oracle.get(i).copied());
        let d = a.zip(b).map(|(a, b)| (a - b).abs());
        if let Some(d) = d {
            worst = worst.max(d);
        }
        t.push(vec![Cell::opt_eig(a), Cell::opt_eig(b), Cell::opt_num(d)]);
    }
    let ok = bie.len() == oracle.len() && worst <= tol;
    let msg = if bie.len() != oracle.len() {
        format!("validation failed: {} BIE eigenvalues vs {} oracle eigenvalues", bie.len(), oracle.len())
    } else {
        format!("max |k_bie - k_oracle| = {worst:.3e} (tol {tol:.3e})")
    };
    Ok((t, ok, msg))
}

pub fn oracle(s: &Settings) -> Result<Table> {
    let kind = s.str_or("kind", "disk-roots");
    let radius = || s.number("radius", 1.0);
    let m = || s.require::<u32>("m");
    let sidx = || s.get("s", 1u32);
    let scalar = |name: &str, v: f64| {
        let mut t = Table::new(["quantity", "value"]);
        t.push(vec![Cell::Text(name.into()), Cell::Eig(v)]);
        t
    };
    match kind.as_str() {
        "bessel-zero" => Ok(scalar("bessel_zero", bessel_zero(m()?, sidx()?)?)),
        "dirichlet" => Ok(scalar("dirichlet", dirichlet_eig(radius()?, sidx()?, m()?)?)),
        "modified" => Ok(scalar("modified_dirichlet", modified_dirichlet_eig(radius()?, s.number("n", 4.0)?, sidx()?, m()?)?)),
        "first" => Ok(scalar("k1", first_eigenvalue(&disk_problem(s, "conductive")?)?)),
        "disk-roots" => {
            let (lo, hi) = range(s, (0.5, 4.0))?;
            Ok(root_table(&disk_roots(&disk_problem(s, "conductive")?, lo, hi, s.get("m-max", DEFAULT_M_MAX)?)?))
        }
        "double-layer-roots" => {
            let (lo, hi) = range(s, (0.5, 4.0))?;
            Ok(root_table(&double_layer_roots(&double_layer(s)?, lo, hi, s.get("m-max", DEFAULT_M_MAX)?)?))
        }
        "classify" => {
            let k = s.require::<f64>("k")?;
            let c = classify_limit(k, radius()?, s.number("n", 4.0)?);
            let mut t = Table::new(["k", "limit", "value"]);
            t.push(vec![Cell::Eig(k), Cell::Text(c.label()), Cell::opt_eig(c.value())]);
            Ok(t)
        }
        "det" => {
            let k = s.require::<f64>("k")?;
            let d = disk_determinant(&disk_problem(s, "conductive")?, m()?, k)?;
            let mut t = Table::new(["k", "m", "det_re", "det_im"]);
            t.push(vec![Cell::Num(k), Cell::Int(m()? as i64), Cell::Num(d.re), Cell::Num(d.im)]);
            Ok(t)
        }
        other => Err(config_err(format!(
            "unknown oracle query `{other}` (bessel-zero | dirichlet | modified | disk-roots | double-layer-roots | classify | first | det)"
        ))),
    }
}
