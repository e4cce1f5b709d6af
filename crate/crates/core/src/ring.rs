//! Surface-electrode ring traps.
//!
//! An annulus `R1 < ρ < R2` at rf voltage `V` surrounded by grounded plane
//! has a field null on its axis at height `d` when
//! `R_{1,2} = d √(¾ sin⁻²(π/6 ± θ) − 1)` for some `θ ∈ (0, π/6)`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::landscape::{golden_max, refine_stationary, GridLandscape, Stationary, StationaryKind};
use crate::surface_field::{disk_axial_field, PlanarRegion, Vec3};
use crate::units::{scale_factors, secular_frequency, SecularFrequency, TrapParams, ELEMENTARY_CHARGE};
use crate::{Error, Result};

pub const THETA_MAX: f64 = PI / 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingDesign {
    pub theta: f64,
    /// Null height in meter.
    pub d: f64,
    pub r_inner: f64,
    pub r_outer: f64,
}

fn check_theta(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta < THETA_MAX) {
        return Err(Error::domain(format!("ring parameter θ must lie in (0, π/6), got {theta}")));
    }
    Ok(())
}

/// `(R1, R2)` for a null at height `d`.
pub fn ring_radii(theta: f64, d: f64) -> Result<(f64, f64)> {
    check_theta(theta)?;
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::domain("height must be positive"));
    }
    let r = |s: f64| d * (0.75 / (s * s) - 1.0).max(0.0).sqrt();
    Ok((r((THETA_MAX + theta).sin()), r((THETA_MAX - theta).sin())))
}

impl RingDesign {
    pub fn new(theta: f64, d: f64) -> Result<Self> {
        let (r_inner, r_outer) = ring_radii(theta, d)?;
        Ok(RingDesign { theta, d, r_inner, r_outer })
    }

    /// Inverts the radius relation for the outer radius, `R2 > d√2`.
    pub fn from_outer_radius(r_outer: f64, d: f64) -> Result<Self> {
        if !(d > 0.0 && r_outer > d * 2f64.sqrt() && r_outer.is_finite()) {
            return Err(Error::domain("outer radius must exceed d·√2"));
        }
        // R2(θ) increases monotonically from d√2 to ∞ on (0, π/6)
        let (mut lo, mut hi) = (0.0, THETA_MAX);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let s = (THETA_MAX - mid).sin();
            let r2 = d * (0.75 / (s * s) - 1.0).sqrt();
            if r2 < r_outer {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Self::new(0.5 * (lo + hi), d)
    }

    /// The electrode as a planar region centred at the origin.
    pub fn region(&self, voltage: f64) -> Result<PlanarRegion> {
        if self.r_inner > 0.0 {
            PlanarRegion::annulus([0.0, 0.0], self.r_inner, self.r_outer, voltage)
        } else {
            PlanarRegion::disk([0.0, 0.0], self.r_outer, voltage)
        }
    }
}

/// On-axis field `E_z(z)` of the annulus as the difference of two disks.
pub fn ring_axial_field(design: &RingDesign, z: f64, voltage: f64) -> f64 {
    disk_axial_field(design.r_outer, z, voltage) - disk_axial_field(design.r_inner, z, voltage)
}

/// `∂E_z/∂z` on the axis.
pub fn ring_axial_gradient(design: &RingDesign, z: f64, voltage: f64) -> f64 {
    let g = |r: f64| {
        let r2 = r * r;
        -3.0 * voltage * r2 * z / (r2 + z * z).powf(2.5)
    };
    g(design.r_outer) - g(design.r_inner)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingStrength {
    pub qz: f64,
    pub secular: SecularFrequency,
}

/// `q_z = (q0/3)(sin 5θ − sin θ)` and the adiabatic axial frequency.
pub fn ring_strength(theta: f64, params: &TrapParams) -> Result<RingStrength> {
    check_theta(theta)?;
    let q0 = scale_factors(params)?.q0;
    let qz = q0 / 3.0 * ((5.0 * theta).sin() - theta.sin());
    Ok(RingStrength { qz, secular: secular_frequency(qz, params.rf_angular_frequency)? })
}

/// The θ maximizing the strength, `cos²θ = (25 + √145)/40`.
pub fn optimal_theta() -> f64 {
    ((25.0 + 145f64.sqrt()) / 40.0).sqrt().acos()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingDepthOptions {
    /// Radial × angular resolution of the off-axis grid; `0` skips it.
    pub grid: usize,
    /// Outer search radius in units of `d`.
    pub max_height: f64,
}

impl Default for RingDepthOptions {
    fn default() -> Self {
        RingDepthOptions { grid: 200, max_height: 50.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingDepth {
    /// Height of the axial |E_z| maximum above the plane, meter.
    pub axial_saddle_z: f64,
    /// Barrier along the axis in joule.
    pub axial_depth: f64,
    /// Refined stationary point of the off-axis search, `(ρ, z)` in meter.
    pub planar_saddle: Option<[f64; 2]>,
    pub planar_depth: Option<f64>,
    /// The lower of the two barriers, joule.
    pub depth: f64,
    /// Set when the off-axis barrier undercuts the axial one by more than 0.1 %.
    pub off_axis_escape: bool,
}

impl RingDepth {
    pub fn depth_mev(&self) -> f64 {
        self.depth / ELEMENTARY_CHARGE * 1e3
    }
}

/// Axial barrier: maximum of `|E_z|` for `z ∈ (d, max_height·d]`, in units of
/// `(z/d, |E_z|/(V/d))`.
fn axial_maximum(design: &RingDesign, max_height: f64) -> Result<(f64, f64)> {
    let d = design.d;
    let f = |t: f64| ring_axial_field(design, t * d, 1.0).abs() * d;
    let n = 2000;
    let ln_hi = max_height.ln();
    let ts: Vec<f64> = (1..=n).map(|i| (ln_hi * i as f64 / n as f64).exp()).collect();
    let (imax, _) = ts.iter().map(|&t| f(t)).enumerate().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
    if imax == 0 || imax == n - 1 {
        return Err(Error::Search("no interior maximum of the axial field above the null".into()));
    }
    let (t, e) = golden_max(f, ts[imax - 1], ts[imax + 1], 1e-10);
    Ok((t, e))
}

/// Barrier height of the ponderomotive well above the ring.
pub fn ring_depth(design: &RingDesign, params: &TrapParams, opts: RingDepthOptions) -> Result<RingDepth> {
    check_theta(design.theta)?;
    let u0 = scale_factors(params)?.u0;
    let d = design.d;
    let (t_ax, e_ax) = axial_maximum(design, opts.max_height)?;
    let axial_depth = u0 * e_ax * e_ax;

    let (planar_saddle, planar_depth) = if opts.grid >= 8 {
        match planar_barrier(design, opts)? {
            Some(s) => (Some([s.point[0].abs() * d, s.point[1] * d]), Some(u0 * s.value)),
            None => (None, None),
        }
    } else {
        (None, None)
    };
    let depth = planar_depth.map_or(axial_depth, |p| p.min(axial_depth));
    Ok(RingDepth {
        axial_saddle_z: t_ax * d,
        axial_depth,
        planar_saddle,
        planar_depth,
        depth,
        off_axis_escape: planar_depth.is_some_and(|p| p < axial_depth * (1.0 - 1e-3)),
    })
}

/// Off-axis search on a log-polar grid about the null; coordinates in units of
/// `d`, value `|E/(V/d)|²`.
fn planar_barrier(design: &RingDesign, opts: RingDepthOptions) -> Result<Option<Stationary>> {
    let d = design.d;
    let region = design.region(1.0)?;
    let u = |rho: f64, z: f64| -> f64 {
        match region.field(&Vec3::new(rho * d, 0.0, z * d)) {
            Ok(e) => (e * d).norm_squared(),
            Err(_) => f64::INFINITY,
        }
    };
    let n = opts.grid;
    let r_min: f64 = 1e-3;
    let ln_span = (opts.max_height / r_min).ln();
    let radius = |j: usize| r_min * (ln_span * j as f64 / (n - 1) as f64).exp();
    let angle = |i: usize| PI * i as f64 / (n - 1) as f64;
    let cells: Vec<(f64, bool)> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            let (r, psi) = (radius(j), angle(i));
            let (rho, z) = (r * psi.sin(), 1.0 + r * psi.cos());
            if z <= 0.0 {
                (0.0, true)
            } else {
                (u(rho, z), j == n - 1)
            }
        })
        .collect();
    let (values, escape) = cells.into_iter().unzip();
    let grid = GridLandscape::new(n, n, values, escape);
    let seeds: Vec<(usize, usize)> = (0..n).map(|i| (i, 0)).collect();
    let Some(pass) = grid.lowest_pass(&seeds) else {
        return Ok(None);
    };
    let (i, j) = pass.cell;
    let (r, psi) = (radius(j), angle(i));
    let start = [r * psi.sin(), 1.0 + r * psi.cos()];
    let s = refine_stationary(&u, start, 1e-5 * r.max(0.05), 1e-9, 0.1 * r.max(0.05), 60);
    if s.converged && s.kind == StationaryKind::Saddle && s.value.is_finite() {
        Ok(Some(s))
    } else {
        // keep the grid estimate when refinement wanders off
        Ok(Some(Stationary { point: start, value: pass.level, converged: false, ..s }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingSweepRow {
    pub theta: f64,
    pub r_inner: f64,
    pub r_outer: f64,
    pub qz: f64,
    pub secular_hz: f64,
    pub depth: f64,
}

/// `steps` designs with θ evenly spaced strictly inside `(0, π/6)`.
pub fn ring_sweep(steps: usize, params: &TrapParams, opts: RingDepthOptions) -> Result<Vec<RingSweepRow>> {
    (1..=steps)
        .into_par_iter()
        .map(|k| {
            let theta = THETA_MAX * k as f64 / (steps + 1) as f64;
            let design = RingDesign::new(theta, params.ion_plane_distance)?;
            let strength = ring_strength(theta, params)?;
            let depth = ring_depth(&design, params, opts)?;
            Ok(RingSweepRow {
                theta,
                r_inner: design.r_inner,
                r_outer: design.r_outer,
                qz: strength.qz,
                secular_hz: strength.secular.frequency_hz,
                depth: depth.depth,
            })
        })
        .collect()
}
