//! Fourier-space description of surface-electrode potentials.
//!
//! With `Ṽ(k, z) = ∫ e^{−ik·r} V(x, y, z) dx dy`, every surface component is
//! carried to height `z` by the factor `e^{−k|z|}`. For a patch at uniform
//! voltage the surface transform reduces to a path integral along its edge,
//! which is evaluated here in closed form segment by segment.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::quad::{integrate, QuadOptions};
use crate::surface_field::{polygon_signed_area, PlanarRegion, Shape};
use crate::{Error, Result};

/// Below this phase the per-segment integral switches to its Taylor series.
const SERIES_PHASE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpatialFrequency {
    pub kx: f64,
    pub ky: f64,
}

impl SpatialFrequency {
    pub fn new(kx: f64, ky: f64) -> Self {
        SpatialFrequency { kx, ky }
    }

    pub fn magnitude(&self) -> f64 {
        self.kx.hypot(self.ky)
    }
}

/// `e^{−k|z|} Ṽ_surf(k)`.
pub fn propagate(surface_value: Complex64, k: SpatialFrequency, z: f64) -> Complex64 {
    surface_value * (-k.magnitude() * z.abs()).exp()
}

/// `(1 − e^{−iφ}) / (iφ)`, i.e. `∫₀¹ e^{−iφs} ds`.
fn phase_integral(phi: f64) -> Complex64 {
    if phi.abs() < SERIES_PHASE {
        let p2 = phi * phi;
        Complex64::new(1.0 - p2 / 6.0, -phi / 2.0 + phi * p2 / 24.0)
    } else {
        (Complex64::new(1.0, 0.0) - Complex64::new(0.0, -phi).exp()) / Complex64::new(0.0, phi)
    }
}

/// `∫_T e^{−iℓ} dA / (2A)` over a triangle on which the linear phase `ℓ`
/// takes the values `0, a, b` at the vertices: `Σ (−i)ᵐ hₘ(a, b)/(m + 2)!`
/// with `hₘ` the complete homogeneous symmetric polynomial.
fn triangle_phase_series(a: f64, b: f64) -> Complex64 {
    // |hₘ| ≤ (m + 1)·max(|a|, |b|)ᵐ; with the phase spread below
    // SERIES_SPREAD the tail after 24 terms is far below rounding
    let mut sum = Complex64::new(0.0, 0.0);
    let mut h = 1.0;
    let mut a_pow = 1.0;
    let mut fact = 2.0;
    let mut phase = Complex64::new(1.0, 0.0);
    for m in 0..24 {
        if m > 0 {
            a_pow *= a;
            h = b * h + a_pow;
            fact *= (m + 2) as f64;
            phase *= Complex64::new(0.0, -1.0);
        }
        sum += phase * (h / fact);
    }
    sum
}

/// Small-`k` form: a triangle fan from the first vertex with each triangle
/// expanded in powers of the phase, free of the `1/k²` cancellation of the
/// edge formula.
fn polygon_transform_series(vertices: &[[f64; 2]], voltage: f64, k: SpatialFrequency) -> Complex64 {
    let v0 = vertices[0];
    let phase = |v: [f64; 2]| k.kx * (v[0] - v0[0]) + k.ky * (v[1] - v0[1]);
    let mut sum = Complex64::new(0.0, 0.0);
    for w in vertices[1..].windows(2) {
        let (a, b) = (w[0], w[1]);
        let area2 = (a[0] - v0[0]) * (b[1] - v0[1]) - (a[1] - v0[1]) * (b[0] - v0[0]);
        sum += area2 * triangle_phase_series(phase(a), phase(b));
    }
    voltage * Complex64::new(0.0, -(k.kx * v0[0] + k.ky * v0[1])).exp() * sum
}

/// Largest phase across the polygon below which the series form is used.
const SERIES_SPREAD: f64 = 0.5;

fn polygon_transform(vertices: &[[f64; 2]], voltage: f64, k: SpatialFrequency) -> Complex64 {
    let k2 = k.kx * k.kx + k.ky * k.ky;
    if k2 == 0.0 {
        return Complex64::new(voltage * polygon_signed_area(vertices), 0.0);
    }
    let v0 = vertices[0];
    let spread = vertices.iter().map(|v| (k.kx * (v[0] - v0[0]) + k.ky * (v[1] - v0[1])).abs()).fold(0.0, f64::max);
    if spread < SERIES_SPREAD {
        return polygon_transform_series(vertices, voltage, k);
    }
    let n = vertices.len();
    let mut sum = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        // ẑ·(k × dr) along the segment
        let c = k.kx * dy - k.ky * dx;
        if c == 0.0 {
            continue;
        }
        let start = Complex64::new(0.0, -(k.kx * a[0] + k.ky * a[1])).exp();
        sum += c * start * phase_integral(k.kx * dx + k.ky * dy);
    }
    Complex64::new(0.0, voltage / k2) * sum
}

/// Surface transform of a uniform-voltage polygon. At `k = 0` the limit
/// `V · Area` is returned.
pub fn surface_transform_polygon(region: &PlanarRegion, k: SpatialFrequency) -> Result<Complex64> {
    match &region.shape {
        Shape::Polygon { vertices } => Ok(polygon_transform(vertices, region.voltage, k)),
        _ => Err(Error::Unsupported("surface transform is implemented for polygons only".into())),
    }
}

/// One-dimensional transform across a translationally symmetric strip,
/// `V ∫_{y1}^{y2} e^{−iky} dy`.
pub fn surface_transform_strip(y1: f64, y2: f64, voltage: f64, ky: f64) -> Result<Complex64> {
    if !(y1.is_finite() && y2.is_finite() && y1 < y2) {
        return Err(Error::domain("strip transform needs finite y1 < y2"));
    }
    let width = y2 - y1;
    let start = Complex64::new(0.0, -ky * y1).exp();
    Ok(voltage * width * start * phase_integral(ky * width))
}

/// Potential above a strip at lateral position `y` and height `z`, obtained by
/// propagating its spectrum to `z` and inverting the 1-D transform numerically.
pub fn strip_potential_from_spectrum(y1: f64, y2: f64, voltage: f64, y: f64, z: f64) -> Result<f64> {
    if z == 0.0 {
        return Err(Error::OnPlane);
    }
    surface_transform_strip(y1, y2, voltage, 0.0)?;
    let h = z.abs();
    // e^{−k h} < 1e-17 beyond this
    let k_max = 40.0 / h;
    let width = y2 - y1;
    let opts = QuadOptions { abs_tol: 1e-14 * voltage.abs() * width, rel_tol: 1e-12, max_intervals: 20_000 };
    // Ṽ(−k) = Ṽ(k)*, so the inverse transform folds onto k ≥ 0
    let res = integrate(
        |k: f64| {
            let spec = surface_transform_strip(y1, y2, voltage, k).unwrap();
            let val = propagate(spec, SpatialFrequency::new(0.0, k), h) * Complex64::new(0.0, k * y).exp();
            [val.re]
        },
        0.0,
        k_max,
        opts,
    );
    Ok(res.value[0] / PI)
}

/// Evaluates the polygon transform on a rectangular `nx × ny` grid, row-major
/// in `ky` then `kx`.
pub fn transform_grid(
    region: &PlanarRegion,
    kx_range: (f64, f64),
    ky_range: (f64, f64),
    nx: usize,
    ny: usize,
) -> Result<Vec<(SpatialFrequency, Complex64)>> {
    if nx == 0 || ny == 0 {
        return Err(Error::domain("grid needs at least one point per axis"));
    }
    surface_transform_polygon(region, SpatialFrequency::new(0.0, 0.0))?;
    let lin = |(lo, hi): (f64, f64), n: usize, i: usize| {
        if n == 1 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        }
    };
    Ok((0..nx * ny)
        .into_par_iter()
        .map(|idx| {
            let (j, i) = (idx / nx, idx % nx);
            let k = SpatialFrequency::new(lin(kx_range, nx, i), lin(ky_range, ny, j));
            (k, surface_transform_polygon(region, k).unwrap())
        })
        .collect())
}
