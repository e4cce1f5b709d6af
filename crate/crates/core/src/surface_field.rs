//! Potentials and fields of planar electrode patches in the gapless-plane
//! approximation.
//!
//! The electrode plane is `z = 0`. A patch at voltage `V` produces the
//! potential `V Ω(r) / 2π`, where `Ω` is the solid angle the patch subtends at
//! `r`, and the field is a Biot–Savart integral along the counterclockwise
//! boundary. Points below the plane are handled by mirror symmetry.

use std::f64::consts::PI;
use std::path::Path;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::quad::{integrate, QuadOptions};
use crate::{Error, Result};

pub type Vec3 = Vector3<f64>;

/// Evaluation closer than this fraction of the local length scale to an
/// electrode edge is rejected.
pub const SINGULARITY_GUARD: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Shape {
    /// Simple polygon, counterclockwise seen from `z > 0`.
    Polygon {
        vertices: Vec<[f64; 2]>,
    },
    Disk {
        center: [f64; 2],
        radius: f64,
    },
    Annulus {
        center: [f64; 2],
        r_inner: f64,
        r_outer: f64,
    },
    /// Infinite along `x`, occupying `y1 < y < y2`. One bound may be infinite.
    Strip {
        y1: f64,
        y2: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarRegion {
    pub shape: Shape,
    pub voltage: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub position: Vec3,
    pub potential: f64,
    pub field: Vec3,
}

fn cross2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn sub2(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

pub(crate) fn polygon_signed_area(v: &[[f64; 2]]) -> f64 {
    let n = v.len();
    (0..n).map(|i| cross2(v[i], v[(i + 1) % n])).sum::<f64>() * 0.5
}

fn segments_cross(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let o = |p: [f64; 2], q: [f64; 2], r: [f64; 2]| cross2(sub2(q, p), sub2(r, p));
    let (d1, d2, d3, d4) = (o(c, d, a), o(c, d, b), o(a, b, c), o(a, b, d));
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    let on = |p: [f64; 2], q: [f64; 2], r: [f64; 2]| {
        r[0] >= p[0].min(q[0]) && r[0] <= p[0].max(q[0]) && r[1] >= p[1].min(q[1]) && r[1] <= p[1].max(q[1])
    };
    (d1 == 0.0 && on(c, d, a)) || (d2 == 0.0 && on(c, d, b)) || (d3 == 0.0 && on(a, b, c)) || (d4 == 0.0 && on(a, b, d))
}

fn point_segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = sub2(b, a);
    let ap = sub2(p, a);
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 > 0.0 { ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0) } else { 0.0 };
    let dx = ap[0] - t * ab[0];
    let dy = ap[1] - t * ab[1];
    dx.hypot(dy)
}

fn point_in_polygon(p: [f64; 2], v: &[[f64; 2]]) -> bool {
    let n = v.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (v[i], v[j]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if p[0] < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

impl Shape {
    pub fn validate(&self) -> Result<()> {
        match self {
            Shape::Polygon { vertices } => {
                if vertices.len() < 3 {
                    return Err(Error::Geometry("polygon needs at least 3 vertices".into()));
                }
                if vertices.iter().flatten().any(|c| !c.is_finite()) {
                    return Err(Error::Geometry("polygon vertices must be finite".into()));
                }
                if polygon_signed_area(vertices) <= 0.0 {
                    return Err(Error::Geometry("polygon must be counterclockwise with positive area".into()));
                }
                let n = vertices.len();
                for i in 0..n {
                    for j in i + 1..n {
                        let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                        if adjacent {
                            continue;
                        }
                        if segments_cross(vertices[i], vertices[(i + 1) % n], vertices[j], vertices[(j + 1) % n]) {
                            return Err(Error::Geometry(format!("polygon edges {i} and {j} intersect")));
                        }
                    }
                }
                Ok(())
            }
            Shape::Disk { center, radius } => {
                if !(center.iter().all(|c| c.is_finite()) && radius.is_finite() && *radius > 0.0) {
                    return Err(Error::Geometry("disk needs finite center and positive radius".into()));
                }
                Ok(())
            }
            Shape::Annulus { center, r_inner, r_outer } => {
                if !(center.iter().all(|c| c.is_finite()) && r_outer.is_finite() && 0.0 < *r_inner && r_inner < r_outer)
                {
                    return Err(Error::Geometry("annulus needs 0 < r_inner < r_outer".into()));
                }
                Ok(())
            }
            Shape::Strip { y1, y2 } => {
                if y1.is_nan() || y2.is_nan() || y1 >= y2 || (y1.is_infinite() && y2.is_infinite()) {
                    return Err(Error::Geometry("strip needs y1 < y2 with at most one infinite bound".into()));
                }
                Ok(())
            }
        }
    }

    /// Characteristic size used to scale the singularity guard.
    pub fn length_scale(&self) -> f64 {
        match self {
            Shape::Polygon { vertices } => {
                let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
                for v in vertices {
                    for k in 0..2 {
                        lo[k] = lo[k].min(v[k]);
                        hi[k] = hi[k].max(v[k]);
                    }
                }
                (hi[0] - lo[0]).hypot(hi[1] - lo[1])
            }
            Shape::Disk { radius, .. } => *radius,
            Shape::Annulus { r_outer, .. } => *r_outer,
            Shape::Strip { y1, y2 } => {
                if y1.is_finite() && y2.is_finite() {
                    y2 - y1
                } else if y1.is_finite() {
                    y1.abs()
                } else {
                    y2.abs()
                }
            }
        }
    }

    /// Distance from `r` to the nearest boundary curve, in 3-D.
    pub fn boundary_distance(&self, r: &Vec3) -> f64 {
        let p = [r.x, r.y];
        let z = r.z;
        let in_plane = match self {
            Shape::Polygon { vertices } => {
                let n = vertices.len();
                (0..n)
                    .map(|i| point_segment_distance(p, vertices[i], vertices[(i + 1) % n]))
                    .fold(f64::INFINITY, f64::min)
            }
            Shape::Disk { center, radius } => ((p[0] - center[0]).hypot(p[1] - center[1]) - radius).abs(),
            Shape::Annulus { center, r_inner, r_outer } => {
                let rho = (p[0] - center[0]).hypot(p[1] - center[1]);
                (rho - r_inner).abs().min((rho - r_outer).abs())
            }
            Shape::Strip { y1, y2 } => (p[1] - y1).abs().min((p[1] - y2).abs()),
        };
        in_plane.hypot(z)
    }

    /// Strict interior test in the plane.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        match self {
            Shape::Polygon { vertices } => point_in_polygon([x, y], vertices),
            Shape::Disk { center, radius } => (x - center[0]).hypot(y - center[1]) < *radius,
            Shape::Annulus { center, r_inner, r_outer } => {
                let rho = (x - center[0]).hypot(y - center[1]);
                rho > *r_inner && rho < *r_outer
            }
            Shape::Strip { y1, y2 } => y > *y1 && y < *y2,
        }
    }

    fn y_range(&self) -> (f64, f64) {
        match self {
            Shape::Polygon { vertices } => {
                vertices.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v[1]), hi.max(v[1])))
            }
            Shape::Disk { center, radius } => (center[1] - radius, center[1] + radius),
            Shape::Annulus { center, r_outer, .. } => (center[1] - r_outer, center[1] + r_outer),
            Shape::Strip { y1, y2 } => (*y1, *y2),
        }
    }

    /// Points on the boundary and in the interior used by the overlap test.
    fn probe_points(&self) -> Vec<[f64; 2]> {
        const N: usize = 256;
        let circle = |c: [f64; 2], r: f64, out: &mut Vec<[f64; 2]>| {
            for k in 0..N {
                let t = 2.0 * PI * k as f64 / N as f64;
                out.push([c[0] + r * t.cos(), c[1] + r * t.sin()]);
            }
        };
        let mut pts = Vec::new();
        match self {
            Shape::Polygon { vertices } => {
                let n = vertices.len();
                for i in 0..n {
                    let (a, b) = (vertices[i], vertices[(i + 1) % n]);
                    for k in 0..16 {
                        let t = k as f64 / 16.0;
                        pts.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
                    }
                }
                for i in 1..n - 1 {
                    let (a, b, c) = (vertices[0], vertices[i], vertices[i + 1]);
                    let g = [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0];
                    if point_in_polygon(g, vertices) {
                        pts.push(g);
                    }
                }
            }
            Shape::Disk { center, radius } => {
                circle(*center, *radius, &mut pts);
                pts.push(*center);
            }
            Shape::Annulus { center, r_inner, r_outer } => {
                circle(*center, *r_inner, &mut pts);
                circle(*center, *r_outer, &mut pts);
                circle(*center, 0.5 * (r_inner + r_outer), &mut pts);
            }
            Shape::Strip { .. } => {}
        }
        pts
    }

    /// Sampled overlap test between two interiors. Shared edges do not count.
    pub fn overlaps(&self, other: &Shape) -> bool {
        let eps = 1e-9 * self.length_scale().max(other.length_scale());
        match (self, other) {
            (Shape::Strip { .. }, _) | (_, Shape::Strip { .. }) => {
                let (a0, a1) = self.y_range();
                let (b0, b1) = other.y_range();
                a0 < b1 - eps && b0 < a1 - eps
            }
            _ => {
                let inside = |s: &Shape, p: [f64; 2]| {
                    s.contains(p[0], p[1]) && s.boundary_distance(&Vec3::new(p[0], p[1], 0.0)) > eps
                };
                self.probe_points().into_iter().any(|p| inside(other, p))
                    || other.probe_points().into_iter().any(|p| inside(self, p))
            }
        }
    }
}

/// Signed solid angle of a planar triangle seen from `r` (Van Oosterom–Strackee).
/// Positive for a counterclockwise triangle seen from `z > 0`.
pub fn triangle_solid_angle(a: [f64; 2], b: [f64; 2], c: [f64; 2], r: &Vec3) -> f64 {
    let ra = Vec3::new(a[0] - r.x, a[1] - r.y, -r.z);
    let rb = Vec3::new(b[0] - r.x, b[1] - r.y, -r.z);
    let rc = Vec3::new(c[0] - r.x, c[1] - r.y, -r.z);
    let num = ra.dot(&rb.cross(&rc));
    if num == 0.0 {
        return 0.0;
    }
    let (la, lb, lc) = (ra.norm(), rb.norm(), rc.norm());
    let den = la * lb * lc + ra.dot(&rb) * lc + ra.dot(&rc) * lb + rb.dot(&rc) * la;
    -2.0 * num.atan2(den)
}

fn polygon_solid_angle(vertices: &[[f64; 2]], r: &Vec3) -> f64 {
    (1..vertices.len() - 1).map(|i| triangle_solid_angle(vertices[0], vertices[i], vertices[i + 1], r)).sum()
}

const CIRCLE_OPTS: QuadOptions = QuadOptions { abs_tol: 1e-14, rel_tol: 1e-13, max_intervals: 4000 };

/// Solid angle of a disk seen from a point at height `h > 0`, via the contour
/// form `Ω = ∮ (1 − h/√(ρ²+h²)) dφ` around the foot point.
fn disk_solid_angle(center: [f64; 2], radius: f64, r: &Vec3) -> f64 {
    let h = r.z;
    let f = [r.x - center[0], r.y - center[1]];
    let inside = f[0].hypot(f[1]) < radius;
    let res = integrate(
        |t: f64| {
            let (s, c) = t.sin_cos();
            let w = [radius * c - f[0], radius * s - f[1]];
            let db = [-radius * s, radius * c];
            let rho2 = w[0] * w[0] + w[1] * w[1];
            let dphi = if rho2 > 0.0 { cross2(w, db) / rho2 } else { 0.5 };
            [h / (rho2 + h * h).sqrt() * dphi]
        },
        0.0,
        2.0 * PI,
        CIRCLE_OPTS,
    );
    let base = if inside { 2.0 * PI } else { 0.0 };
    base - res.value[0]
}

/// Biot–Savart integral `∮ dr' × (r − r') / |r − r'|³` around a circle.
fn circle_edge_integral(center: [f64; 2], radius: f64, r: &Vec3) -> Vec3 {
    let res = integrate(
        |t: f64| {
            let (s, c) = t.sin_cos();
            let dl = [-radius * s, radius * c];
            let rr = Vec3::new(r.x - center[0] - radius * c, r.y - center[1] - radius * s, r.z);
            let inv3 = rr.norm().powi(-3);
            [dl[1] * rr.z * inv3, -dl[0] * rr.z * inv3, (dl[0] * rr.y - dl[1] * rr.x) * inv3]
        },
        0.0,
        2.0 * PI,
        QuadOptions { abs_tol: 1e-13 / radius, rel_tol: 1e-13, max_intervals: 4000 },
    );
    Vec3::new(res.value[0], res.value[1], res.value[2])
}

/// Closed-form `∫ dl × (r − r') / |r − r'|³` along the straight segment a → b.
pub fn segment_edge_integral(a: [f64; 2], b: [f64; 2], r: &Vec3) -> Vec3 {
    let ab = Vec3::new(b[0] - a[0], b[1] - a[1], 0.0);
    let len = ab.norm();
    if len == 0.0 {
        return Vec3::zeros();
    }
    let u = ab / len;
    let ra = Vec3::new(r.x - a[0], r.y - a[1], r.z);
    let rb = Vec3::new(r.x - b[0], r.y - b[1], r.z);
    let perp = u.cross(&ra);
    let rho2 = perp.norm_squared();
    if rho2 == 0.0 {
        return Vec3::zeros();
    }
    perp * ((ra.dot(&u) / ra.norm() - rb.dot(&u) / rb.norm()) / rho2)
}

impl PlanarRegion {
    pub fn new(shape: Shape, voltage: f64) -> Result<Self> {
        shape.validate()?;
        if !voltage.is_finite() {
            return Err(Error::Geometry("voltage must be finite".into()));
        }
        Ok(PlanarRegion { shape, voltage })
    }

    pub fn disk(center: [f64; 2], radius: f64, voltage: f64) -> Result<Self> {
        Self::new(Shape::Disk { center, radius }, voltage)
    }

    pub fn polygon(vertices: Vec<[f64; 2]>, voltage: f64) -> Result<Self> {
        Self::new(Shape::Polygon { vertices }, voltage)
    }

    pub fn strip(y1: f64, y2: f64, voltage: f64) -> Result<Self> {
        Self::new(Shape::Strip { y1, y2 }, voltage)
    }

    pub fn annulus(center: [f64; 2], r_inner: f64, r_outer: f64, voltage: f64) -> Result<Self> {
        Self::new(Shape::Annulus { center, r_inner, r_outer }, voltage)
    }

    fn check_point(&self, r: &Vec3) -> Result<()> {
        if !(r.x.is_finite() && r.y.is_finite() && r.z.is_finite()) {
            return Err(Error::domain("evaluation point must be finite"));
        }
        if r.z == 0.0 {
            return Err(Error::OnPlane);
        }
        let guard = SINGULARITY_GUARD * self.shape.length_scale().max(r.z.abs());
        let dist = self.shape.boundary_distance(r);
        if dist < guard {
            return Err(Error::Singularity { distance: dist });
        }
        Ok(())
    }

    /// Signed solid angle subtended by the region at `r` (mirrored for `z < 0`,
    /// so the result lies in `[0, 2π]` for non-negative shapes on either side).
    pub fn solid_angle(&self, r: &Vec3) -> Result<f64> {
        self.check_point(r)?;
        let up = Vec3::new(r.x, r.y, r.z.abs());
        Ok(match &self.shape {
            Shape::Polygon { vertices } => polygon_solid_angle(vertices, &up),
            Shape::Disk { center, radius } => disk_solid_angle(*center, *radius, &up),
            Shape::Annulus { center, r_inner, r_outer } => {
                disk_solid_angle(*center, *r_outer, &up) - disk_solid_angle(*center, *r_inner, &up)
            }
            Shape::Strip { y1, y2 } => 2.0 * (((y2 - up.y) / up.z).atan() - ((y1 - up.y) / up.z).atan()),
        })
    }

    /// Potential `V Ω / 2π` at a point off the electrode plane.
    pub fn potential(&self, r: &Vec3) -> Result<f64> {
        Ok(self.voltage * self.solid_angle(r)? / (2.0 * PI))
    }

    /// Limit of the potential on the plane itself: `V` inside, `0` outside.
    pub fn surface_potential(&self, x: f64, y: f64) -> Result<f64> {
        let dist = self.shape.boundary_distance(&Vec3::new(x, y, 0.0));
        if dist < SINGULARITY_GUARD * self.shape.length_scale() {
            return Err(Error::Singularity { distance: dist });
        }
        Ok(if self.shape.contains(x, y) { self.voltage } else { 0.0 })
    }

    /// Field from the Biot–Savart boundary integral.
    pub fn field(&self, r: &Vec3) -> Result<Vec3> {
        self.check_point(r)?;
        let up = Vec3::new(r.x, r.y, r.z.abs());
        let integral = match &self.shape {
            Shape::Polygon { vertices } => {
                let n = vertices.len();
                (0..n).map(|i| segment_edge_integral(vertices[i], vertices[(i + 1) % n], &up)).sum::<Vec3>()
            }
            Shape::Disk { center, radius } => circle_edge_integral(*center, *radius, &up),
            Shape::Annulus { center, r_inner, r_outer } => {
                circle_edge_integral(*center, *r_outer, &up) - circle_edge_integral(*center, *r_inner, &up)
            }
            Shape::Strip { y1, y2 } => {
                // two infinite edges; result already carries the 2π of the line integral
                let h = up.z;
                let term = |yi: f64| -> (f64, f64) {
                    if yi.is_infinite() {
                        (0.0, 0.0)
                    } else {
                        let dy = yi - up.y;
                        let d2 = dy * dy + h * h;
                        (h / d2, dy / d2)
                    }
                };
                let (a2, b2) = term(*y2);
                let (a1, b1) = term(*y1);
                // E = (V/π)(0, h(1/D2 − 1/D1), Δy2/D2 − Δy1/D1); rescale to the 2π convention below
                Vec3::new(0.0, 2.0 * (a2 - a1), 2.0 * (b2 - b1))
            }
        };
        let mut e = integral * (self.voltage / (2.0 * PI));
        if r.z < 0.0 {
            e.z = -e.z;
        }
        Ok(e)
    }

    pub fn sample(&self, r: &Vec3) -> Result<FieldSample> {
        Ok(FieldSample { position: *r, potential: self.potential(r)?, field: self.field(r)? })
    }

    /// Same shape at a different voltage.
    pub fn with_voltage(&self, voltage: f64) -> Self {
        PlanarRegion { shape: self.shape.clone(), voltage }
    }
}

/// On-axis field of a disk at voltage `V`: `V R² / (R² + z²)^{3/2}`.
pub fn disk_axial_field(radius: f64, z: f64, voltage: f64) -> f64 {
    let r2 = radius * radius;
    voltage * r2 / (r2 + z * z).powf(1.5)
}

/// Linear superposition over regions at one point.
pub fn superpose(regions: &[PlanarRegion], r: &Vec3) -> Result<FieldSample> {
    let mut out = FieldSample { position: *r, potential: 0.0, field: Vec3::zeros() };
    for region in regions {
        let s = region.sample(r)?;
        out.potential += s.potential;
        out.field += s.field;
    }
    Ok(out)
}

/// A validated set of non-overlapping electrodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    pub regions: Vec<PlanarRegion>,
}

impl Geometry {
    pub fn new(regions: Vec<PlanarRegion>) -> Result<Self> {
        for r in &regions {
            r.shape.validate()?;
        }
        for i in 0..regions.len() {
            for j in i + 1..regions.len() {
                if regions[i].shape.overlaps(&regions[j].shape) {
                    return Err(Error::Geometry(format!("regions {i} and {j} overlap")));
                }
            }
        }
        Ok(Geometry { regions })
    }

    pub fn sample(&self, r: &Vec3) -> Result<FieldSample> {
        superpose(&self.regions, r)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let spec: GeometrySpec = serde_json::from_str(s)?;
        spec.into_geometry()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_spec(&self) -> GeometrySpec {
        GeometrySpec { regions: self.regions.iter().map(RegionSpec::from_region).collect() }
    }
}

/// Electrode geometry file: lengths in µm, voltages in volt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometrySpec {
    pub regions: Vec<RegionSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum RegionSpec {
    Polygon {
        vertices_um: Vec<[f64; 2]>,
        voltage_v: f64,
    },
    Disk {
        center_um: [f64; 2],
        radius_um: f64,
        voltage_v: f64,
    },
    Annulus {
        center_um: [f64; 2],
        r1_um: f64,
        r2_um: f64,
        voltage_v: f64,
    },
    /// A missing bound means the strip extends to infinity on that side.
    Strip {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        y1_um: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        y2_um: Option<f64>,
        voltage_v: f64,
    },
}

const UM: f64 = 1e-6;

impl RegionSpec {
    pub fn into_region(&self) -> Result<PlanarRegion> {
        match self {
            RegionSpec::Polygon { vertices_um, voltage_v } => {
                PlanarRegion::polygon(vertices_um.iter().map(|v| [v[0] * UM, v[1] * UM]).collect(), *voltage_v)
            }
            RegionSpec::Disk { center_um, radius_um, voltage_v } => {
                PlanarRegion::disk([center_um[0] * UM, center_um[1] * UM], radius_um * UM, *voltage_v)
            }
            RegionSpec::Annulus { center_um, r1_um, r2_um, voltage_v } => {
                PlanarRegion::annulus([center_um[0] * UM, center_um[1] * UM], r1_um * UM, r2_um * UM, *voltage_v)
            }
            RegionSpec::Strip { y1_um, y2_um, voltage_v } => PlanarRegion::strip(
                y1_um.map_or(f64::NEG_INFINITY, |y| y * UM),
                y2_um.map_or(f64::INFINITY, |y| y * UM),
                *voltage_v,
            ),
        }
    }

    pub fn from_region(r: &PlanarRegion) -> Self {
        let um = |x: f64| x / UM;
        match &r.shape {
            Shape::Polygon { vertices } => RegionSpec::Polygon {
                vertices_um: vertices.iter().map(|v| [um(v[0]), um(v[1])]).collect(),
                voltage_v: r.voltage,
            },
            Shape::Disk { center, radius } => RegionSpec::Disk {
                center_um: [um(center[0]), um(center[1])],
                radius_um: um(*radius),
                voltage_v: r.voltage,
            },
            Shape::Annulus { center, r_inner, r_outer } => RegionSpec::Annulus {
                center_um: [um(center[0]), um(center[1])],
                r1_um: um(*r_inner),
                r2_um: um(*r_outer),
                voltage_v: r.voltage,
            },
            Shape::Strip { y1, y2 } => RegionSpec::Strip {
                y1_um: y1.is_finite().then(|| um(*y1)),
                y2_um: y2.is_finite().then(|| um(*y2)),
                voltage_v: r.voltage,
            },
        }
    }
}

impl GeometrySpec {
    pub fn into_geometry(self) -> Result<Geometry> {
        let regions = self.regions.iter().map(RegionSpec::into_region).collect::<Result<Vec<_>>>()?;
        Geometry::new(regions)
    }
}
