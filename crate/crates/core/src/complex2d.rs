//! Two-dimensional electrostatics for translationally symmetric electrodes.
//!
//! Positions are complex numbers `p = x + iy` with the trap centre at the
//! origin and the electrode plane on the line `Re p = d`; the height above the
//! plane is `d − Re p`. A source-free field `E = (E_x, E_y)` is represented by
//! the analytic function `Ē*(z) = E_x − iE_y` (its Pólya field), and by a
//! complex potential `Φ` with `Ē* = −∂Φ/∂z`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub type ComplexPoint = Complex64;

/// Relative distance below which an evaluation point counts as on an edge.
const EDGE_GUARD: f64 = 1e-12;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// An electrode edge: position and orientation `q = ±1`. Going along the
/// electrode line in the direction of increasing `Im`, `q = +1` marks where a
/// strip starts and `q = −1` where it ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StripEdge {
    pub position: Complex64,
    pub orientation: i8,
}

impl StripEdge {
    pub fn new(position: Complex64, orientation: i8) -> Result<Self> {
        if orientation != 1 && orientation != -1 {
            return Err(Error::Geometry("edge orientation must be +1 or −1".into()));
        }
        if !(position.re.is_finite() && position.im.is_finite()) {
            return Err(Error::Geometry("edge position must be finite".into()));
        }
        Ok(StripEdge { position, orientation })
    }

    /// The two edges of a strip `y ∈ [y1, y2]` on the line `Re p = d`.
    pub fn strip(d: f64, y1: f64, y2: f64) -> Result<[StripEdge; 2]> {
        // also rejects NaN
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(y1 < y2) {
            return Err(Error::Geometry("strip needs y1 < y2".into()));
        }
        Ok([StripEdge::new(Complex64::new(d, y1), 1)?, StripEdge::new(Complex64::new(d, y2), -1)?])
    }
}

fn length_scale(z: Complex64, edges: &[StripEdge]) -> f64 {
    edges.iter().fold(z.norm(), |m, e| m.max(e.position.norm())).max(f64::MIN_POSITIVE)
}

fn check_edges(z: Complex64, edges: &[StripEdge]) -> Result<()> {
    let guard = EDGE_GUARD * length_scale(z, edges);
    for e in edges {
        let dist = (z - e.position).norm();
        if dist < guard {
            return Err(Error::Singularity { distance: dist });
        }
    }
    Ok(())
}

/// `Ē*(z) = (V/iπ) Σ q_i / (z − z_i)`, the analytic representation.
pub fn strip_field_conj(z: ComplexPoint, edges: &[StripEdge], voltage: f64) -> Result<Complex64> {
    check_edges(z, edges)?;
    let sum: Complex64 = edges.iter().map(|e| f64::from(e.orientation) / (z - e.position)).sum();
    Ok(sum * voltage / (I * PI))
}

/// Field vector `E_x + iE_y` of a set of strips at voltage `V`.
pub fn strip_field(z: ComplexPoint, edges: &[StripEdge], voltage: f64) -> Result<Complex64> {
    Ok(strip_field_conj(z, edges, voltage)?.conj())
}

fn pairs(edges: &[StripEdge]) -> Result<impl Iterator<Item = (Complex64, Complex64)> + '_> {
    if !edges.len().is_multiple_of(2) {
        return Err(Error::Geometry("edges must come in ± pairs".into()));
    }
    for pair in edges.chunks(2) {
        if pair[0].orientation + pair[1].orientation != 0 {
            return Err(Error::Geometry("each edge pair needs one + and one − edge".into()));
        }
    }
    Ok(edges.chunks(2).map(|pair| {
        if pair[0].orientation > 0 {
            (pair[0].position, pair[1].position)
        } else {
            (pair[1].position, pair[0].position)
        }
    }))
}

/// Complex potential `Φ = (Vi/π) Σ_pairs ln((z − z₊)/(z − z₋))`.
///
/// Edges are taken pairwise in the given order. Each logarithm uses the
/// principal branch, whose cut is the segment between the two edges, so `Φ`
/// is continuous away from the electrodes and vanishes at infinity. For
/// strips on a line and `z` on the trap side, `Re Φ` is the physical
/// potential `V Δφ/π`.
pub fn strip_potential(z: ComplexPoint, edges: &[StripEdge], voltage: f64) -> Result<Complex64> {
    check_edges(z, edges)?;
    let sum: Complex64 = pairs(edges)?.map(|(zp, zm)| ((z - zp) / (z - zm)).ln()).sum();
    Ok(sum * I * voltage / PI)
}

/// Physical potential inside a grounded cylinder `|c| = d` carrying strips
/// whose edges are given in the cylinder picture.
///
/// Each pair contributes `Re Φ − V θ_arc/(2π)`, with `θ_arc` the
/// counterclockwise angle from `c₊` to `c₋`. The principal-branch cut now
/// runs along the chord inside the disk; the jump of `2V` across it is
/// removed by [`wrap_potential`].
pub fn cylinder_potential(c: ComplexPoint, edges: &[StripEdge], voltage: f64) -> Result<f64> {
    check_edges(c, edges)?;
    let mut total = 0.0;
    for (cp, cm) in pairs(edges)? {
        let raw = (I * ((c - cp) / (c - cm)).ln()).re * voltage / PI;
        let arc = (cm / cp).arg().rem_euclid(2.0 * PI);
        total += wrap_potential(raw - voltage * arc / (2.0 * PI), voltage);
    }
    Ok(total)
}

/// Reduces `x` modulo `2V` into `[−|V|/2, 3|V|/2)` (for `V ≥ 0`; mirrored
/// otherwise), removing branch jumps from a potential that lies in `[0, V]`.
pub fn wrap_potential(x: f64, voltage: f64) -> f64 {
    let v = voltage.abs();
    if v == 0.0 {
        return 0.0;
    }
    let s = voltage.signum();
    s * ((s * x + 0.5 * v).rem_euclid(2.0 * v) - 0.5 * v)
}

/// Residual of the analyticity test on sampled `Ē*` values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolyaResidual {
    /// `max |∂g/∂z̄| / max(|∂g/∂z| + |∂g/∂z̄|)` over interior nodes.
    pub relative: f64,
    /// Largest `|∇·E|` of the associated vector field.
    pub max_divergence: f64,
    /// Largest `|∇×E|`.
    pub max_curl: f64,
}

/// Samples of a complex function on a uniform grid, row-major in `y`.
#[derive(Debug, Clone)]
pub struct SampledField {
    pub origin: Complex64,
    pub step: f64,
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<Complex64>,
}

impl SampledField {
    pub fn sample<F: Fn(Complex64) -> Complex64>(f: F, origin: Complex64, step: f64, nx: usize, ny: usize) -> Self {
        let values = (0..ny)
            .flat_map(|j| (0..nx).map(move |i| (i, j)))
            .map(|(i, j)| f(origin + Complex64::new(i as f64 * step, j as f64 * step)))
            .collect();
        SampledField { origin, step, nx, ny, values }
    }

    fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[j * self.nx + i]
    }
}

/// Tests whether sampled values `g ≈ Ē*` form an analytic function, i.e.
/// whether the vector field `E = conj(g)` is divergence- and curl-free.
pub fn polya_consistency(samples: &SampledField) -> PolyaResidual {
    let h = samples.step;
    let mut max_dzbar: f64 = 0.0;
    let mut scale: f64 = 0.0;
    let mut max_div: f64 = 0.0;
    let mut max_curl: f64 = 0.0;
    for j in 1..samples.ny.saturating_sub(1) {
        for i in 1..samples.nx.saturating_sub(1) {
            let gx = (samples.at(i + 1, j) - samples.at(i - 1, j)) / (2.0 * h);
            let gy = (samples.at(i, j + 1) - samples.at(i, j - 1)) / (2.0 * h);
            let dzbar = 0.5 * (gx + I * gy);
            let dz = 0.5 * (gx - I * gy);
            // g = E_x − iE_y
            let (exx, eyx) = (gx.re, -gx.im);
            let (exy, eyy) = (gy.re, -gy.im);
            max_div = max_div.max((exx + eyy).abs());
            max_curl = max_curl.max((eyx - exy).abs());
            max_dzbar = max_dzbar.max(dzbar.norm());
            scale = scale.max(dz.norm() + dzbar.norm());
        }
    }
    PolyaResidual { relative: if scale > 0.0 { max_dzbar / scale } else { 0.0 }, max_divergence: max_div, max_curl }
}

/// `p = 2dc/(d + c)`: maps the disk `|c| < d` onto the half-plane `Re p < d`.
pub fn mobius_to_plane(c: ComplexPoint, d: f64) -> Result<Complex64> {
    let den = d + c;
    if den.norm() <= 1e-15 * d {
        return Err(Error::domain("c = −d is the pole of the map"));
    }
    Ok(2.0 * d * c / den)
}

/// Inverse map `c = dp/(2d − p)`.
pub fn mobius_to_cylinder(p: ComplexPoint, d: f64) -> Result<Complex64> {
    let den = 2.0 * d - p;
    if den.norm() <= 1e-15 * d {
        return Err(Error::domain("p = 2d is the pole of the inverse map"));
    }
    Ok(d * p / den)
}

/// `dp/dc = 2d²/(d + c)²`.
pub fn mobius_derivative(c: ComplexPoint, d: f64) -> Complex64 {
    2.0 * d * d / ((d + c) * (d + c))
}

/// Image of the cylinder point `d e^{iφ}` on the electrode plane,
/// `(d, d tan(φ/2))`.
pub fn edge_map(phi: f64, d: f64) -> Result<[f64; 2]> {
    let half = (0.5 * phi).rem_euclid(PI);
    if (half - 0.5 * PI).abs() < 1e-12 {
        return Err(Error::domain("φ = π maps to infinity"));
    }
    Ok([d, d * (0.5 * phi).tan()])
}

/// Lowest nonvanishing multipole `α⁽ⁿ⁾` of `Φ(z) = Σ α⁽ᵏ⁾ zᵏ`, with optional
/// higher terms `α⁽ⁿ⁺¹⁾, …`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultipoleCoefficients {
    pub order: usize,
    pub alpha: Complex64,
    pub higher: Vec<Complex64>,
}

/// Leading coefficient after a conformal change of variables `z = z(w)` with
/// `z(0) = 0`: `α_w = α (∂z/∂w)ⁿ`. Higher terms mix under the map and are
/// dropped.
pub fn multipole_transport(coeffs: &MultipoleCoefficients, dz_dw: Complex64) -> Result<MultipoleCoefficients> {
    if dz_dw.norm() == 0.0 || !dz_dw.is_finite() {
        return Err(Error::domain("map derivative at the origin must be finite and nonzero"));
    }
    Ok(MultipoleCoefficients {
        order: coeffs.order,
        alpha: coeffs.alpha * dz_dw.powu(coeffs.order as u32),
        higher: Vec::new(),
    })
}

/// Taylor coefficients `a_0..=a_max` of an analytic `f` about `center`, from
/// the trapezoidal Cauchy integral on a circle of radius `r` with `m` nodes.
pub fn taylor_coefficients<F: Fn(Complex64) -> Complex64>(
    f: F,
    center: Complex64,
    r: f64,
    m: usize,
    max_order: usize,
) -> Vec<Complex64> {
    let samples: Vec<Complex64> =
        (0..m).map(|k| f(center + Complex64::from_polar(r, 2.0 * PI * k as f64 / m as f64))).collect();
    (0..=max_order)
        .map(|n| {
            let s: Complex64 = samples
                .iter()
                .enumerate()
                .map(|(k, v)| v * Complex64::from_polar(1.0, -2.0 * PI * (n * k) as f64 / m as f64))
                .sum();
            s / (m as f64 * r.powi(n as i32))
        })
        .collect()
}
