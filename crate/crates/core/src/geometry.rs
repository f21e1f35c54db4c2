//! Closed parametrized boundary curves and their quadratic-element meshes.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const TWO_PI: f64 = 2.0 * PI;
const REGULARITY_SAMPLES: usize = 4096;
const DIAMETER_SAMPLES: usize = 512;

/// A closed curve `x(t)`, `t in [0, 2pi)`, positively oriented.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryCurve {
    Circle { radius: f64 },
    Ellipse { a: f64, b: f64 },
    /// `x(t) = sum cx[j] cos(jt) + sum sx[j] sin((j+1)t)`, likewise for `y`.
    /// Cosine lists start at the constant term, sine lists at order 1.
    TrigPoly {
        cx: Vec<f64>,
        sx: Vec<f64>,
        cy: Vec<f64>,
        sy: Vec<f64>,
    },
}

/// Position, first and second derivatives at one parameter value.
#[derive(Debug, Clone, Copy)]
pub struct CurvePoint {
    pub x: [f64; 2],
    pub dx: [f64; 2],
    pub ddx: [f64; 2],
}

impl CurvePoint {
    pub fn speed(&self) -> f64 {
        self.dx[0].hypot(self.dx[1])
    }

    /// Outward unit normal for a positively oriented curve.
    pub fn normal(&self) -> [f64; 2] {
        let s = self.speed();
        [self.dx[1] / s, -self.dx[0] / s]
    }

    pub fn curvature(&self) -> f64 {
        let s = self.speed();
        (self.dx[0] * self.ddx[1] - self.dx[1] * self.ddx[0]) / (s * s * s)
    }
}

fn trig_series(cos: &[f64], sin: &[f64], t: f64) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (j, &c) in cos.iter().enumerate() {
        let w = j as f64;
        let (s_, c_) = (w * t).sin_cos();
        out[0] += c * c_;
        out[1] -= c * w * s_;
        out[2] -= c * w * w * c_;
    }
    for (j, &s) in sin.iter().enumerate() {
        let w = (j + 1) as f64;
        let (s_, c_) = (w * t).sin_cos();
        out[0] += s * s_;
        out[1] += s * w * c_;
        out[2] -= s * w * w * s_;
    }
    out
}

impl BoundaryCurve {
    pub fn circle(radius: f64) -> Result<Self> {
        let c = BoundaryCurve::Circle { radius };
        c.validate()?;
        Ok(c)
    }

    pub fn ellipse(a: f64, b: f64) -> Result<Self> {
        let c = BoundaryCurve::Ellipse { a, b };
        c.validate()?;
        Ok(c)
    }

    pub fn trig_poly(cx: Vec<f64>, sx: Vec<f64>, cy: Vec<f64>, sy: Vec<f64>) -> Result<Self> {
        let c = BoundaryCurve::TrigPoly { cx, sx, cy, sy };
        c.validate()?;
        Ok(c)
    }

    pub fn eval(&self, t: f64) -> CurvePoint {
        match self {
            BoundaryCurve::Circle { radius } => {
                let (s, c) = t.sin_cos();
                CurvePoint {
                    x: [radius * c, radius * s],
                    dx: [-radius * s, radius * c],
                    ddx: [-radius * c, -radius * s],
                }
            }
            BoundaryCurve::Ellipse { a, b } => {
                let (s, c) = t.sin_cos();
                CurvePoint {
                    x: [a * c, b * s],
                    dx: [-a * s, b * c],
                    ddx: [-a * c, -b * s],
                }
            }
            BoundaryCurve::TrigPoly { cx, sx, cy, sy } => {
                let px = trig_series(cx, sx, t);
                let py = trig_series(cy, sy, t);
                CurvePoint {
                    x: [px[0], py[0]],
                    dx: [px[1], py[1]],
                    ddx: [px[2], py[2]],
                }
            }
        }
    }

    /// Checks parameters, regularity and orientation on a dense sample.
    pub fn validate(&self) -> Result<()> {
        match self {
            BoundaryCurve::Circle { radius } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::Geometry(format!("circle radius must be positive, got {radius}")));
                }
            }
            BoundaryCurve::Ellipse { a, b } => {
                if !(a.is_finite() && b.is_finite() && *a > 0.0 && *b > 0.0) {
                    return Err(Error::Geometry(format!("ellipse semi-axes must be positive, got a={a}, b={b}")));
                }
            }
            BoundaryCurve::TrigPoly { cx, sx, cy, sy } => {
                if [cx, sx, cy, sy].iter().any(|v| v.iter().any(|c| !c.is_finite())) {
                    return Err(Error::Geometry("trigpoly coefficients must be finite".into()));
                }
            }
        }
        let mut area = 0.0;
        let mut max_speed: f64 = 0.0;
        let mut min_speed = f64::INFINITY;
        for j in 0..REGULARITY_SAMPLES {
            let p = self.eval(TWO_PI * j as f64 / REGULARITY_SAMPLES as f64);
            let s = p.speed();
            max_speed = max_speed.max(s);
            min_speed = min_speed.min(s);
            area += 0.5 * (p.x[0] * p.dx[1] - p.x[1] * p.dx[0]);
        }
        area *= TWO_PI / REGULARITY_SAMPLES as f64;
        if !(max_speed > 0.0) || min_speed <= 1e-8 * max_speed {
            return Err(Error::Geometry("curve is not regular (|x'(t)| vanishes)".into()));
        }
        if area <= 0.0 {
            return Err(Error::Geometry("curve must be positively oriented (counter-clockwise)".into()));
        }
        Ok(())
    }

    /// Arithmetic mean of a dense boundary sample.
    pub fn centroid(&self) -> [f64; 2] {
        let mut c = [0.0; 2];
        for j in 0..REGULARITY_SAMPLES {
            let p = self.eval(TWO_PI * j as f64 / REGULARITY_SAMPLES as f64);
            c[0] += p.x[0];
            c[1] += p.x[1];
        }
        [c[0] / REGULARITY_SAMPLES as f64, c[1] / REGULARITY_SAMPLES as f64]
    }
}

impl fmt::Display for BoundaryCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[f64]| v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",");
        match self {
            BoundaryCurve::Circle { radius } => write!(f, "circle radius={radius}"),
            BoundaryCurve::Ellipse { a, b } => write!(f, "ellipse a={a} b={b}"),
            BoundaryCurve::TrigPoly { cx, sx, cy, sy } => write!(
                f,
                "trigpoly cx={} sx={} cy={} sy={}",
                list(cx),
                list(sx),
                list(cy),
                list(sy)
            ),
        }
    }
}

/// Parses `circle radius=1.0`, `ellipse a=1.0 b=0.8` or
/// `trigpoly cx=0,1 sx= cy=0 sy=1`.
impl FromStr for BoundaryCurve {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut words = s.split_whitespace();
        let kind = words
            .next()
            .ok_or_else(|| Error::Config("empty curve specification".into()))?;
        let mut fields = Vec::new();
        for w in words {
            let (k, v) = w
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("curve field `{w}` is not key=value")))?;
            fields.push((k, v));
        }
        let scalar = |name: &str| -> Result<f64> {
            let v = fields
                .iter()
                .find(|(k, _)| *k == name)
                .ok_or_else(|| Error::Config(format!("{kind} requires {name}=")))?
                .1;
            v.parse()
                .map_err(|_| Error::Config(format!("cannot parse {name}={v}")))
        };
        let list = |name: &str| -> Result<Vec<f64>> {
            match fields.iter().find(|(k, _)| *k == name) {
                None => Ok(Vec::new()),
                Some((_, v)) => v
                    .split(',')
                    .filter(|p| !p.is_empty())
                    .map(|p| {
                        p.parse()
                            .map_err(|_| Error::Config(format!("cannot parse {name} entry `{p}`")))
                    })
                    .collect(),
            }
        };
        let known: &[&str] = match kind {
            "circle" => &["radius"],
            "ellipse" => &["a", "b"],
            "trigpoly" => &["cx", "sx", "cy", "sy"],
            other => return Err(Error::Config(format!("unknown curve kind `{other}`"))),
        };
        if let Some((k, _)) = fields.iter().find(|(k, _)| !known.contains(k)) {
            return Err(Error::Config(format!("unknown {kind} field `{k}`")));
        }
        match kind {
            "circle" => BoundaryCurve::circle(scalar("radius")?),
            "ellipse" => BoundaryCurve::ellipse(scalar("a")?, scalar("b")?),
            _ => BoundaryCurve::trig_poly(list("cx")?, list("sx")?, list("cy")?, list("sy")?),
        }
    }
}

/// Geometric data at one collocation node.
#[derive(Debug, Clone, Copy)]
pub struct MeshNode {
    pub point: [f64; 2],
    pub normal: [f64; 2],
    pub curvature: f64,
    pub speed: f64,
    pub t: f64,
}

/// Closed chain of quadratic elements; node `2e` and `2e+2` are the ends of
/// element `e` and node `2e+1` its midpoint (indices mod node count).
#[derive(Debug, Clone)]
pub struct BoundaryMesh {
    pub curve: BoundaryCurve,
    pub nodes: Vec<MeshNode>,
    pub elements: Vec<[usize; 3]>,
    /// Parameter interval `[t0, t0 + span]` of each element.
    pub spans: Vec<(f64, f64)>,
}

impl BoundaryMesh {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn element_count(&self) -> usize {
        self.elements.len()
    }
}

pub fn build_mesh(curve: &BoundaryCurve, collocation_points: usize) -> Result<BoundaryMesh> {
    if collocation_points < 6 || !collocation_points.is_multiple_of(2) {
        return Err(Error::Config(format!(
            "collocation point count must be even and >= 6, got {collocation_points}"
        )));
    }
    curve.validate()?;
    let h = TWO_PI / collocation_points as f64;
    let nodes = (0..collocation_points)
        .map(|j| {
            let t = TWO_PI * j as f64 / collocation_points as f64;
            let p = curve.eval(t);
            MeshNode {
                point: p.x,
                normal: p.normal(),
                curvature: p.curvature(),
                speed: p.speed(),
                t,
            }
        })
        .collect();
    let ne = collocation_points / 2;
    let elements = (0..ne)
        .map(|e| [2 * e, 2 * e + 1, (2 * e + 2) % collocation_points])
        .collect();
    let spans = (0..ne).map(|e| (2.0 * h * e as f64, 2.0 * h)).collect();
    Ok(BoundaryMesh {
        curve: curve.clone(),
        nodes,
        elements,
        spans,
    })
}

/// Largest distance between two points of a dense boundary sample.
pub fn curve_diameter(curve: &BoundaryCurve) -> f64 {
    let pts: Vec<[f64; 2]> = (0..DIAMETER_SAMPLES)
        .map(|j| curve.eval(TWO_PI * j as f64 / DIAMETER_SAMPLES as f64).x)
        .collect();
    let mut d: f64 = 0.0;
    for (i, p) in pts.iter().enumerate() {
        for q in &pts[i + 1..] {
            d = d.max((p[0] - q[0]).hypot(p[1] - q[1]));
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gauss_legendre;

    #[test]
    fn unit_circle_mesh() {
        let m = build_mesh(&BoundaryCurve::circle(1.0).unwrap(), 40).unwrap();
        assert_eq!(m.element_count(), 20);
        assert_eq!(m.len(), 40);
        for n in &m.nodes {
            assert!((n.curvature - 1.0).abs() < 1e-12);
            assert!((n.normal[0].hypot(n.normal[1]) - 1.0).abs() < 1e-14);
        }
        let total: f64 = m.spans.iter().map(|s| s.1).sum();
        assert!((total - TWO_PI).abs() < 1e-12);
    }

    #[test]
    fn every_node_in_two_elements_or_midpoint() {
        let m = build_mesh(&BoundaryCurve::ellipse(1.0, 0.8).unwrap(), 24).unwrap();
        let mut count = vec![0; m.len()];
        for el in &m.elements {
            for &i in el {
                count[i] += 1;
            }
        }
        for (i, c) in count.iter().enumerate() {
            assert_eq!(*c, if i % 2 == 0 { 2 } else { 1 });
        }
    }

    #[test]
    fn ellipse_vertex_curvature() {
        let m = build_mesh(&BoundaryCurve::ellipse(1.0, 0.8).unwrap(), 40).unwrap();
        assert!((m.nodes[0].curvature - 1.0 / 0.64).abs() < 1e-10);
    }

    #[test]
    fn circle_perimeter_from_jacobian() {
        let curve = BoundaryCurve::circle(2.0).unwrap();
        for n in [6, 20, 64] {
            let m = build_mesh(&curve, n).unwrap();
            let (x, w) = gauss_legendre(8);
            let mut len = 0.0;
            for &(t0, span) in &m.spans {
                for (xi, wi) in x.iter().zip(&w) {
                    len += wi * span * curve.eval(t0 + span * xi).speed();
                }
            }
            assert!((len - 4.0 * PI).abs() < 1e-10);
        }
    }

    #[test]
    fn bad_counts_rejected() {
        let c = BoundaryCurve::circle(1.0).unwrap();
        assert!(matches!(build_mesh(&c, 7), Err(Error::Config(_))));
        assert!(matches!(build_mesh(&c, 4), Err(Error::Config(_))));
    }

    #[test]
    fn irregular_and_clockwise_curves_rejected() {
        assert!(BoundaryCurve::trig_poly(vec![0.0], vec![], vec![0.0], vec![]).is_err());
        assert!(BoundaryCurve::trig_poly(vec![0.0, 1.0], vec![], vec![0.0], vec![-1.0]).is_err());
        assert!(BoundaryCurve::circle(-1.0).is_err());
    }

    #[test]
    fn diameters() {
        assert!((curve_diameter(&BoundaryCurve::circle(1.0).unwrap()) - 2.0).abs() < 0.02);
        assert!((curve_diameter(&BoundaryCurve::ellipse(1.0, 0.8).unwrap()) - 2.0).abs() < 0.02);
        assert!((curve_diameter(&BoundaryCurve::circle(0.5).unwrap()) - 1.0).abs() < 0.01);
    }

    #[test]
    fn refinement_keeps_shared_nodes() {
        let c = BoundaryCurve::ellipse(1.0, 0.8).unwrap();
        let a = build_mesh(&c, 40).unwrap();
        let b = build_mesh(&c, 80).unwrap();
        for (i, n) in a.nodes.iter().enumerate() {
            let m = &b.nodes[2 * i];
            assert!((n.point[0] - m.point[0]).abs() <= 1e-14);
            assert!((n.point[1] - m.point[1]).abs() <= 1e-14);
        }
    }

    #[test]
    fn normals_point_outward() {
        for c in [
            BoundaryCurve::circle(1.0).unwrap(),
            BoundaryCurve::ellipse(1.0, 0.8).unwrap(),
            "trigpoly cx=0.1,1,0.1 cy=0 sy=0.9".parse().unwrap(),
        ] {
            let cen = c.centroid();
            let m = build_mesh(&c, 30).unwrap();
            for n in &m.nodes {
                let d = (n.point[0] - cen[0]) * n.normal[0] + (n.point[1] - cen[1]) * n.normal[1];
                assert!(d > 0.0);
            }
        }
    }

    #[test]
    fn quadratic_interpolation_order() {
        let c = BoundaryCurve::ellipse(1.0, 0.8).unwrap();
        let err = |n: usize| {
            let m = build_mesh(&c, n).unwrap();
            let mut worst: f64 = 0.0;
            for (el, &(t0, span)) in m.elements.iter().zip(&m.spans) {
                for s in [0.13, 0.37, 0.71, 0.9] {
                    let l = [2.0 * (s - 0.5) * (s - 1.0), -4.0 * s * (s - 1.0), 2.0 * s * (s - 0.5)];
                    let mut p = [0.0; 2];
                    for (a, &i) in el.iter().enumerate() {
                        p[0] += l[a] * m.nodes[i].point[0];
                        p[1] += l[a] * m.nodes[i].point[1];
                    }
                    let x = c.eval(t0 + s * span).x;
                    worst = worst.max((p[0] - x[0]).hypot(p[1] - x[1]));
                }
            }
            worst
        };
        let ratio = err(40) / err(80);
        assert!(ratio > 7.0 && ratio < 9.0, "ratio {ratio}");
    }

    #[test]
    fn parse_round_trip() {
        for s in ["circle radius=1.5", "ellipse a=1 b=0.8", "trigpoly cx=0,1 sx= cy=0 sy=0.9,0.05"] {
            let c: BoundaryCurve = s.parse().unwrap();
            let again: BoundaryCurve = c.to_string().parse().unwrap();
            assert_eq!(c, again);
        }
        assert!("square side=1".parse::<BoundaryCurve>().is_err());
        assert!("circle r=1".parse::<BoundaryCurve>().is_err());
        assert!("ellipse a=1".parse::<BoundaryCurve>().is_err());
    }
}
