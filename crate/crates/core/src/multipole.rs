//! Surface-electrode multipole guides.
//!
//! `n` rf strips of angular width `θ_w` sit equidistantly on a grounded
//! cylinder `|c| = d`, the first centred at `θ₀`. The Möbius map
//! `p = 2dc/(d + c)` carries the cylinder onto the electrode plane
//! `Re p = d`, so the same potential describes a planar trap whose rf null
//! lies at `p = 0`, a height `d` above the electrodes.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complex2d::{edge_map, mobius_to_cylinder, wrap_potential, StripEdge};
use crate::surface_field::{GeometrySpec, RegionSpec};
use crate::units::TrapParams;
use crate::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Relative distance to an edge below which evaluation is rejected.
const EDGE_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultipoleSpec {
    pub n: u32,
    pub theta0: f64,
    pub theta_w: f64,
    /// Ion height in meter.
    pub d: f64,
    /// rf amplitude in volt.
    pub voltage: f64,
}

impl MultipoleSpec {
    pub fn new(n: u32, theta0: f64, theta_w: f64, d: f64, voltage: f64) -> Result<Self> {
        let s = MultipoleSpec { n, theta0, theta_w, d, voltage };
        s.validate()?;
        Ok(s)
    }

    /// Uses the height and rf amplitude of `params`.
    pub fn with_params(n: u32, theta0: f64, theta_w: f64, params: &TrapParams) -> Result<Self> {
        Self::new(n, theta0, theta_w, params.ion_plane_distance, params.rf_peak_voltage)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::domain("multipole order must be at least 1"));
        }
        if !self.theta0.is_finite() {
            return Err(Error::domain("θ₀ must be finite"));
        }
        if !(self.theta_w > 0.0 && self.theta_w < 2.0 * PI / self.n as f64) {
            return Err(Error::domain(format!(
                "θ_w must lie in (0, 2π/n) so strips do not overlap, got {}",
                self.theta_w
            )));
        }
        if !(self.d.is_finite() && self.d > 0.0) {
            return Err(Error::domain("height must be positive"));
        }
        if !self.voltage.is_finite() {
            return Err(Error::domain("voltage must be finite"));
        }
        Ok(())
    }

    /// Non-fatal remarks about the configuration.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.n == 1 {
            w.push("n = 1: the field does not vanish at the centre; saddle analysis assumes n ≥ 2".into());
        }
        w
    }

    pub fn nf(&self) -> f64 {
        self.n as f64
    }

    /// `β = nθ_w/2`.
    pub fn half_width_phase(&self) -> f64 {
        0.5 * self.nf() * self.theta_w
    }

    /// Cylinder angles `(φ₊, φ₋)` of strip `k`, with `φ₋ − φ₊ = θ_w`.
    pub fn arc(&self, k: u32) -> (f64, f64) {
        let centre = self.theta0 + 2.0 * PI * k as f64 / self.nf();
        (centre - 0.5 * self.theta_w, centre + 0.5 * self.theta_w)
    }

    /// Strip edges on the cylinder, paired `(+, −)` per strip.
    pub fn cylinder_edges(&self) -> Vec<StripEdge> {
        (0..self.n)
            .flat_map(|k| {
                let (a, b) = self.arc(k);
                [
                    StripEdge { position: Complex64::from_polar(self.d, a), orientation: 1 },
                    StripEdge { position: Complex64::from_polar(self.d, b), orientation: -1 },
                ]
            })
            .collect()
    }
}

/// A strip of the planar layout; `None` marks an edge at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneStrip {
    /// Index of the cylinder arc it came from.
    pub arc: u32,
    pub y_lo: Option<f64>,
    pub y_hi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    /// Cylinder arcs `[φ₊, φ₋]` with `φ₊` reduced to `(−π, π]`.
    pub arcs: Vec<[f64; 2]>,
    pub strips: Vec<PlaneStrip>,
}

impl Layout {
    /// Strips as electrode-geometry regions in µm.
    pub fn to_geometry(&self, voltage: f64) -> GeometrySpec {
        GeometrySpec {
            regions: self
                .strips
                .iter()
                .map(|s| RegionSpec::Strip {
                    y1_um: s.y_lo.map(|y| y * 1e6),
                    y2_um: s.y_hi.map(|y| y * 1e6),
                    voltage_v: voltage,
                })
                .collect(),
        }
    }

    /// Edges of the finite strips in the plane picture.
    pub fn finite_edges(&self, d: f64) -> Vec<StripEdge> {
        self.strips
            .iter()
            .filter_map(|s| match (s.y_lo, s.y_hi) {
                (Some(a), Some(b)) => StripEdge::strip(d, a, b).ok(),
                _ => None,
            })
            .flatten()
            .collect()
    }
}

fn reduce_angle(phi: f64) -> f64 {
    // into (−π, π]
    let r = (phi + PI).rem_euclid(2.0 * PI) - PI;
    if r == -PI {
        PI
    } else {
        r
    }
}

/// Maps each cylinder arc onto the electrode plane. An arc that passes
/// through `φ = π` becomes two semi-infinite strips.
pub fn electrode_layout(spec: &MultipoleSpec) -> Result<Layout> {
    spec.validate()?;
    let d = spec.d;
    let mut arcs = Vec::new();
    let mut strips = Vec::new();
    for k in 0..spec.n {
        let (a, _) = spec.arc(k);
        let a = reduce_angle(a);
        let b = a + spec.theta_w;
        arcs.push([a, b]);
        let ya = edge_map(a, d).map_err(|_| Error::domain(format!("edge of strip {k} lies at φ = π")))?[1];
        let yb = edge_map(b, d).map_err(|_| Error::domain(format!("edge of strip {k} lies at φ = π")))?[1];
        if b > PI {
            strips.push(PlaneStrip { arc: k, y_lo: Some(ya), y_hi: None });
            strips.push(PlaneStrip { arc: k, y_lo: None, y_hi: Some(yb) });
        } else {
            strips.push(PlaneStrip { arc: k, y_lo: Some(ya), y_hi: Some(yb) });
        }
    }
    strips.sort_by(|x, y| {
        let key = |s: &PlaneStrip| s.y_lo.unwrap_or(f64::NEG_INFINITY);
        key(x).total_cmp(&key(y))
    });
    Ok(Layout { arcs, strips })
}

fn check_edges(c: Complex64, spec: &MultipoleSpec) -> Result<()> {
    for e in spec.cylinder_edges() {
        let dist = (c - e.position).norm();
        if dist < EDGE_GUARD * spec.d {
            return Err(Error::Singularity { distance: dist });
        }
    }
    Ok(())
}

/// `Φₙ(c) = (iV/π) ln[((e^{−iφ₊}c)ⁿ − dⁿ)/((e^{−iφ₋}c)ⁿ − dⁿ)]`, principal
/// branch, as a function of the cylinder coordinate.
pub fn phi_n(c: Complex64, spec: &MultipoleSpec) -> Result<Complex64> {
    check_edges(c, spec)?;
    let (a, b) = spec.arc(0);
    let n = spec.n;
    let s = c / spec.d;
    let num = (Complex64::from_polar(1.0, -a) * s).powu(n) - 1.0;
    let den = (Complex64::from_polar(1.0, -b) * s).powu(n) - 1.0;
    Ok(I * spec.voltage / PI * (num / den).ln())
}

/// Physical potential at cylinder coordinate `c`: `Re Φₙ + V nθ_w/(2π)`,
/// reduced modulo `2V` to remove the branch jump of the logarithm.
///
/// The constant is fixed by the mean-value property: the potential at the
/// centre of the grounded cylinder is the covered fraction of its boundary.
pub fn physical_potential(c: Complex64, spec: &MultipoleSpec) -> Result<f64> {
    let raw = phi_n(c, spec)?.re + spec.voltage * spec.nf() * spec.theta_w / (2.0 * PI);
    Ok(wrap_potential(raw, spec.voltage))
}

/// Physical potential at plane coordinate `p`.
pub fn physical_potential_p(p: Complex64, spec: &MultipoleSpec) -> Result<f64> {
    physical_potential(mobius_to_cylinder(p, spec.d)?, spec)
}

/// `P(u) = P₊ + iP₋` evaluated directly.
pub fn p_of_u(u: Complex64, spec: &MultipoleSpec) -> Complex64 {
    let n = spec.n;
    let a = (1.0 - u).powu(2 * n);
    let b = (1.0 + u).powu(2 * n);
    let g = (1.0 - u * u).powu(n);
    let nt = spec.nf() * spec.theta0;
    let plus = nt.cos() * (a + b) - 2.0 * g * spec.half_width_phase().cos();
    let minus = nt.sin() * (a - b);
    plus + I * minus
}

/// `∂Φₙ/∂p` in units of `V/d` at `u = p/d − 1`:
/// `(4n/π) sin(nθ_w/2) (1 − u²)^{n−1} / P(u)`.
pub fn phi_n_prime_u(u: Complex64, spec: &MultipoleSpec) -> Result<Complex64> {
    let p = p_of_u(u, spec);
    let num = 4.0 * spec.nf() / PI * spec.half_width_phase().sin() * (1.0 - u * u).powu(spec.n - 1);
    if p.norm() <= 1e-300 || !p.is_finite() {
        return Err(Error::Singularity { distance: 0.0 });
    }
    Ok(num / p)
}

/// `∂Φₙ/∂p` in V/m at plane coordinate `p`; the field is `Ē* = −∂Φₙ/∂p`.
pub fn phi_n_prime_p(p: Complex64, spec: &MultipoleSpec) -> Result<Complex64> {
    check_edges(mobius_to_cylinder(p, spec.d)?, spec)?;
    Ok(phi_n_prime_u(p / spec.d - 1.0, spec)? * (spec.voltage / spec.d))
}

/// Field vector `E_x + iE_y` at plane coordinate `p`.
pub fn field_p(p: Complex64, spec: &MultipoleSpec) -> Result<Complex64> {
    Ok(-phi_n_prime_p(p, spec)?.conj())
}

/// Leading multipole coefficient in the plane picture,
/// `α_p = 2⁻ⁿ (2/π) sin(nθ_w/2) (V/dⁿ) e^{−inθ₀}`.
pub fn strength(spec: &MultipoleSpec) -> Complex64 {
    let n = spec.nf();
    let mag = 2f64.powf(-n) * 2.0 / PI * spec.half_width_phase().sin() * spec.voltage / spec.d.powf(n);
    Complex64::from_polar(mag, -n * spec.theta0)
}

/// `2V/(π(2d)ⁿ)`, reached at `θ_w = π/n`.
pub fn max_strength(n: u32, d: f64, voltage: f64) -> f64 {
    2.0 * voltage / (PI * (2.0 * d).powi(n as i32))
}

/// Dimensionless drive parameter `q = |α_p⁽²⁾| 4Q/(MΩ²)` of a quadrupole.
pub fn q_parameter(spec: &MultipoleSpec, params: &TrapParams) -> Result<f64> {
    if spec.n != 2 {
        return Err(Error::Unsupported(format!("q is defined for quadrupoles only, got n = {}", spec.n)));
    }
    params.validate()?;
    let m_omega2 = params.ion_mass * params.rf_angular_frequency.powi(2);
    Ok(strength(spec).norm() * 4.0 * params.ion_charge / m_omega2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Comparison3d {
    /// `V/(2dⁿ)` of the strongest conventional guide.
    pub alpha_3d: f64,
    pub alpha_se_max: f64,
    pub alpha_se: f64,
    /// `α_3D / |α_SE,max| = 2ⁿπ/4`.
    pub ratio_max: f64,
    /// `α_3D / |α_SE|` for this configuration.
    pub ratio: f64,
}

pub fn compare_3d(spec: &MultipoleSpec) -> Comparison3d {
    let alpha_3d = 0.5 * spec.voltage / spec.d.powi(spec.n as i32);
    let alpha_se_max = max_strength(spec.n, spec.d, spec.voltage);
    let alpha_se = strength(spec).norm();
    Comparison3d { alpha_3d, alpha_se_max, alpha_se, ratio_max: alpha_3d / alpha_se_max, ratio: alpha_3d / alpha_se }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex2d::{cylinder_potential, mobius_to_plane, strip_potential};
    use crate::units::scale_factors;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn quad(theta0: f64, theta_w: f64) -> MultipoleSpec {
        MultipoleSpec::new(2, theta0, theta_w, 1.0, 1.0).unwrap()
    }

    #[test]
    fn validation() {
        assert!(MultipoleSpec::new(2, 0.0, PI, 1.0, 1.0).is_err());
        assert!(MultipoleSpec::new(0, 0.0, 0.1, 1.0, 1.0).is_err());
        assert!(!MultipoleSpec::new(1, 0.0, 0.1, 1.0, 1.0).unwrap().warnings().is_empty());
        assert!(quad(0.3, 0.5).warnings().is_empty());
    }

    #[test]
    fn centre_potential_is_covered_fraction() {
        for (n, t0, tw) in [(2, 0.3, 0.9), (3, PI / 16.0, PI / 8.0), (5, 1.0, 0.2)] {
            let s = MultipoleSpec::new(n, t0, tw, 1.0, 2.0).unwrap();
            let v = physical_potential(Complex64::new(0.0, 0.0), &s).unwrap();
            assert_relative_eq!(v, 2.0 * n as f64 * tw / (2.0 * PI), max_relative = 1e-14);
        }
    }

    #[test]
    fn boundary_values() {
        let s = MultipoleSpec::new(3, 0.4, 0.7, 1.0, 1.0).unwrap();
        let (a, b) = s.arc(0);
        for k in 0..200 {
            let phi = -PI + 2.0 * PI * (k as f64 + 0.5) / 200.0;
            // angular offset from the start of the nearest arc
            let rel = (0..3)
                .map(|j| (phi - a - 2.0 * PI * j as f64 / 3.0).rem_euclid(2.0 * PI))
                .fold(f64::INFINITY, f64::min);
            let inside = rel < b - a;
            let edge_gap = rel.min((rel - (b - a)).abs()).min(2.0 * PI / 3.0 - rel);
            let expect = if inside { 1.0 } else { 0.0 };
            let on = physical_potential(Complex64::from_polar(1.0, phi), &s).unwrap();
            assert!((on - expect).abs() < 1e-12, "φ={phi} v={on}");
            // just inside, the deviation is of order δ/(π·edge distance)
            if edge_gap > 0.3 {
                let v = physical_potential(Complex64::from_polar(1.0 - 1e-9, phi), &s).unwrap();
                assert!((v - expect).abs() < 1e-8, "φ={phi} v={v}");
            }
        }
    }

    #[test]
    fn matches_sum_of_plane_strips() {
        let s = MultipoleSpec::new(3, PI / 16.0, PI / 8.0, 1.0, 1.0).unwrap();
        let layout = electrode_layout(&s).unwrap();
        assert_eq!(layout.strips.len(), 3);
        let edges = layout.finite_edges(1.0);
        for p in [Complex64::new(0.0, 0.0), Complex64::new(-0.7, 0.4), Complex64::new(0.5, -2.0)] {
            let direct = strip_potential(p, &edges, 1.0).unwrap().re;
            assert!((physical_potential_p(p, &s).unwrap() - direct).abs() < 1e-12);
            let c = mobius_to_cylinder(p, 1.0).unwrap();
            assert!((cylinder_potential(c, &s.cylinder_edges(), 1.0).unwrap() - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn layout_with_ray() {
        // arc centred on φ = π
        let s = quad(PI, PI / 2.0);
        let l = electrode_layout(&s).unwrap();
        assert_eq!(l.strips.len(), 3);
        assert!(l.strips.iter().any(|st| st.y_hi.is_none()));
        assert!(l.strips.iter().any(|st| st.y_lo.is_none()));
        let g = l.to_geometry(1.0).into_geometry().unwrap();
        assert_eq!(g.regions.len(), 3);
        assert!(electrode_layout(&quad(PI - PI / 4.0, PI / 2.0)).is_err());
    }

    #[test]
    fn octupole_layout_ordered() {
        let s = MultipoleSpec::new(3, PI / 16.0, PI / 8.0, 1.0, 1.0).unwrap();
        let l = electrode_layout(&s).unwrap();
        let ys: Vec<f64> = l.strips.iter().flat_map(|st| [st.y_lo.unwrap(), st.y_hi.unwrap()]).collect();
        assert!(ys.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn derivative_zero_at_centre() {
        for n in 2..6 {
            let s = MultipoleSpec::new(n, 0.2, 0.5, 1.0, 1.0).unwrap();
            assert!(phi_n_prime_p(Complex64::new(0.0, 0.0), &s).unwrap().norm() < 1e-10);
        }
    }

    #[test]
    fn strength_values() {
        for n in 1..6 {
            let s = MultipoleSpec::new(n, 0.3, PI / n as f64, 2e-4, 7.0).unwrap();
            let got = strength(&s).norm();
            assert!((got - max_strength(n, 2e-4, 7.0)).abs() <= 1e-12 * got);
            let c = compare_3d(&s);
            assert_relative_eq!(c.ratio_max, 2f64.powi(n as i32) * PI / 4.0, max_relative = 1e-14);
        }
        let tiny = MultipoleSpec::new(2, 0.0, 1e-12, 1.0, 1.0).unwrap();
        assert!(strength(&tiny).norm() < 1e-12);
    }

    #[test]
    fn q_value() {
        let p = TrapParams::reference();
        let s = MultipoleSpec::with_params(2, PI / 2.0, PI / 2.0, &p).unwrap();
        let q0 = scale_factors(&p).unwrap().q0;
        assert_relative_eq!(q_parameter(&s, &p).unwrap(), q0 / (2.0 * PI), max_relative = 1e-12);
        assert!((q_parameter(&s, &p).unwrap() - 0.1556).abs() < 5e-4);
        let s3 = MultipoleSpec::with_params(3, 0.0, 0.3, &p).unwrap();
        assert!(matches!(q_parameter(&s3, &p), Err(Error::Unsupported(_))));
    }

    proptest! {
        #[test]
        fn derivative_by_differences(n in 2u32..6, t0 in -3.0f64..3.0, frac in 0.05f64..0.95, r in 0.0f64..0.9, a in -3.1f64..3.1) {
            let s = MultipoleSpec::new(n, t0, frac * 2.0 * PI / n as f64, 1.0, 1.0).unwrap();
            let p = mobius_to_plane(Complex64::from_polar(r, a), 1.0).unwrap();
            let h = 1e-5;
            let f = |p: Complex64| phi_n(mobius_to_cylinder(p, 1.0).unwrap(), &s).unwrap();
            let fd = (f(p + h) - f(p - h)) / (2.0 * h);
            let exact = phi_n_prime_p(p, &s).unwrap();
            prop_assert!((fd - exact).norm() <= 1e-7 * exact.norm().max(1e-3));
        }

        #[test]
        fn rotation_covariance(n in 2u32..6, t0 in -3.0f64..3.0, delta in -1.0f64..1.0) {
            let a = strength(&MultipoleSpec::new(n, t0, 0.4, 1.0, 1.0).unwrap());
            let b = strength(&MultipoleSpec::new(n, t0 + delta, 0.4, 1.0, 1.0).unwrap());
            let expect = a * Complex64::from_polar(1.0, -(n as f64) * delta);
            prop_assert!((b - expect).norm() < 1e-13 * a.norm());
        }
    }
}
