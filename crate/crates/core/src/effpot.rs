//! Effective potential of an ion in rf plus static fields, the rf-bias
//! enhancement of multipole depth, and quadrupole stability.
//!
//! With a static bias `V_c` on the rf electrodes the effective potential of
//! a multipole guide is `U_eff = U0 (v_c β_rf + d²|∇β_rf|²)`, where `β_rf`
//! is the rf basis function and `v_c = Q V_c/U0`. The landscape is searched
//! in the cylinder coordinate `c`, which maps the whole half-space above
//! the electrodes onto the unit disk.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex2d::mobius_to_plane;
use crate::depth::max_quadrupole_depth;
use crate::landscape::{
    classify, golden_max, gradient_hessian, refine_stationary, symmetric_eigenvalues, GridLandscape, StationaryKind,
};
use crate::multipole::{phi_n_prime_p, physical_potential, MultipoleSpec};
use crate::surface_field::{Geometry, Vec3};
use crate::units::{bias_voltage, scale_factors, TrapParams};
use crate::{Error, Result};

/// `U_p = Q²|E|²/(4MΩ²)` for an rf field amplitude `|E|` in V/m.
pub fn ponderomotive(e_amplitude: f64, params: &TrapParams) -> Result<f64> {
    params.validate()?;
    let q = params.ion_charge;
    Ok(q * q * e_amplitude * e_amplitude / (4.0 * params.ion_mass * params.rf_angular_frequency.powi(2)))
}

/// `U_p + Q(V_c,rf β_rf + Σ Vᵢβᵢ)` at `r` (meter) for electrodes in the
/// plane `z = 0`.
///
/// `rf` carries the rf amplitudes, `rf_bias` is the static voltage added to
/// every rf electrode (the rf geometry is assumed to be driven by a single
/// amplitude `params.rf_peak_voltage`), and `controls` carries the static
/// electrodes at their voltages.
pub fn u_eff_general(
    r: &Vec3,
    rf: &Geometry,
    rf_bias: f64,
    controls: Option<&Geometry>,
    params: &TrapParams,
) -> Result<f64> {
    let s = rf.sample(r)?;
    let mut u = ponderomotive(s.field.norm(), params)?;
    u += params.ion_charge * rf_bias * s.potential / params.rf_peak_voltage;
    if let Some(c) = controls {
        u += params.ion_charge * c.sample(r)?.potential;
    }
    Ok(u)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasedConfig {
    pub spec: MultipoleSpec,
    pub v_c: f64,
    pub params: TrapParams,
}

impl BiasedConfig {
    /// Uses the height and rf amplitude of `params` for the guide.
    pub fn new(n: u32, theta0: f64, theta_w: f64, v_c: f64, params: TrapParams) -> Result<Self> {
        if !v_c.is_finite() {
            return Err(Error::domain("v_c must be finite"));
        }
        Ok(BiasedConfig { spec: MultipoleSpec::with_params(n, theta0, theta_w, &params)?, v_c, params })
    }

    fn unit_spec(&self) -> MultipoleSpec {
        MultipoleSpec { d: 1.0, voltage: 1.0, ..self.spec }
    }

    /// Static bias on the rf electrodes in volt.
    pub fn bias_voltage(&self) -> Result<f64> {
        bias_voltage(self.v_c, &self.params)
    }
}

/// `(β_rf, d²|∇β_rf|²)` at cylinder coordinate `c` in units of `d`.
fn bias_terms(c: Complex64, unit: &MultipoleSpec) -> Result<(f64, f64)> {
    let beta = physical_potential(c, unit)?;
    let p = mobius_to_plane(c, 1.0)?;
    let grad = phi_n_prime_p(p, unit)?.norm_sqr();
    Ok((beta, grad))
}

/// `U_eff/U0` at cylinder coordinate `c/d`.
pub fn u_eff_bias_c(c: Complex64, v_c: f64, spec: &MultipoleSpec) -> Result<f64> {
    let unit = MultipoleSpec { d: 1.0, voltage: 1.0, ..*spec };
    let (beta, grad) = bias_terms(c, &unit)?;
    Ok(v_c * beta + grad)
}

/// `U_eff` in joule at plane coordinate `p` (meter; ion-height origin,
/// electrodes on `Re p = d`).
pub fn u_eff_bias(p: Complex64, config: &BiasedConfig) -> Result<f64> {
    let u0 = scale_factors(&config.params)?.u0;
    let d = config.spec.d;
    let c = crate::complex2d::mobius_to_cylinder(p / d, 1.0)?;
    Ok(u0 * u_eff_bias_c(c, config.v_c, &config.unit_spec())?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasSearchOptions {
    /// Grid points per side over `|c| ≤ max_radius`.
    pub grid: usize,
    pub max_radius: f64,
    /// Coarse `v_c` samples in `[v_lo, v_hi]`.
    pub coarse: usize,
    pub v_lo: f64,
    pub v_hi: f64,
    pub tol: f64,
}

impl Default for BiasSearchOptions {
    fn default() -> Self {
        BiasSearchOptions { grid: 256, max_radius: 0.999, coarse: 41, v_lo: -1.0, v_hi: 1.0, tol: 1e-6 }
    }
}

/// Both bias-independent terms sampled on the `c` grid.
#[derive(Debug, Clone)]
pub struct BiasGrid {
    n: usize,
    max_radius: f64,
    beta: Vec<f64>,
    grad: Vec<f64>,
    escape: Vec<bool>,
    unit: MultipoleSpec,
}

impl BiasGrid {
    pub fn new(spec: &MultipoleSpec, grid: usize, max_radius: f64) -> Result<Self> {
        if grid < 8 {
            return Err(Error::domain("bias grid needs at least 8 points per side"));
        }
        if !(max_radius > 0.0 && max_radius < 1.0) {
            return Err(Error::domain("search radius must lie in (0, 1)"));
        }
        let unit = MultipoleSpec { d: 1.0, voltage: 1.0, ..*spec };
        let n = grid;
        let cells: Vec<(f64, f64, bool)> = (0..n * n)
            .into_par_iter()
            .map(|idx| {
                let c = Self::coord(n, max_radius, idx / n, idx % n);
                let r = c.norm();
                let escape = r > max_radius;
                // escape cells carry the values on the search boundary
                let at = if escape { c * (max_radius / r) } else { c };
                match bias_terms(at, &unit) {
                    Ok((b, g)) => (b, g, escape),
                    Err(_) => (f64::NAN, f64::NAN, escape),
                }
            })
            .collect();
        let mut beta = Vec::with_capacity(n * n);
        let mut grad = Vec::with_capacity(n * n);
        let mut escape = Vec::with_capacity(n * n);
        for (b, g, e) in cells {
            beta.push(b);
            grad.push(g);
            escape.push(e);
        }
        Ok(BiasGrid { n, max_radius, beta, grad, escape, unit })
    }

    fn coord(n: usize, max_radius: f64, i: usize, j: usize) -> Complex64 {
        let s = |k: usize| -max_radius + 2.0 * max_radius * k as f64 / (n - 1) as f64;
        Complex64::new(s(i), s(j))
    }

    fn nearest(&self, c: Complex64) -> (usize, usize) {
        let k = |x: f64| {
            let t = (x + self.max_radius) / (2.0 * self.max_radius) * (self.n - 1) as f64;
            (t.round().max(0.0) as usize).min(self.n - 1)
        };
        (k(c.re), k(c.im))
    }

    /// Barrier of `U_eff/U0` around the rf null at bias `v_c`.
    pub fn barrier(&self, v_c: f64) -> BiasedDepth {
        let f = |x: f64, y: f64| u_eff_bias_c(Complex64::new(x, y), v_c, &self.unit).unwrap_or(f64::NAN);
        let centre_value = f(0.0, 0.0);
        let (_, hess) = gradient_hessian(&f, 0.0, 0.0, 1e-4);
        let centre_eig = symmetric_eigenvalues(hess);
        let untrapped = BiasedDepth {
            v_c,
            trapped: false,
            minimum: [0.0, 0.0],
            minimum_value: centre_value,
            saddle: None,
            saddle_value: f64::NAN,
            depth_over_u0: 0.0,
            saddle_kind: None,
        };
        let centre_is_min = match classify(centre_eig, 1e-9) {
            StationaryKind::Minimum => true,
            // higher-order null (n ≥ 3): test a small ring directly
            StationaryKind::Degenerate => (0..64).all(|k| {
                let c = Complex64::from_polar(1e-3, 2.0 * PI * k as f64 / 64.0);
                f(c.re, c.im) > centre_value
            }),
            _ => false,
        };
        if !centre_is_min {
            return untrapped;
        }
        let values: Vec<f64> = self.beta.iter().zip(&self.grad).map(|(b, g)| v_c * b + g).collect();
        let land = GridLandscape::new(self.n, self.n, values, self.escape.clone());
        let seed = self.nearest(Complex64::new(0.0, 0.0));
        let Some(pass) = land.lowest_pass(&[seed]) else {
            return untrapped;
        };
        let (i, j) = pass.cell;
        let start = Self::coord(self.n, self.max_radius, i, j);
        let step = 2.0 * self.max_radius / (self.n - 1) as f64;
        let s = refine_stationary(&f, [start.re, start.im], 1e-5, 1e-11, step, 80);
        let refined = s.converged
            && s.kind == StationaryKind::Saddle
            && Complex64::new(s.point[0], s.point[1]).norm() < self.max_radius
            && (Complex64::new(s.point[0], s.point[1]) - start).norm() < 3.0 * step;
        let (saddle, saddle_value, kind) = if refined {
            (Some(s.point), s.value, Some(s.kind))
        } else {
            (Some([start.re, start.im]), pass.level, None)
        };
        BiasedDepth {
            v_c,
            trapped: true,
            minimum: [0.0, 0.0],
            minimum_value: centre_value,
            saddle,
            saddle_value,
            depth_over_u0: (saddle_value - centre_value).max(0.0),
            saddle_kind: kind,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasedDepth {
    pub v_c: f64,
    /// The rf null is a minimum of `U_eff`.
    pub trapped: bool,
    /// Trap centre in the cylinder coordinate `c/d`.
    pub minimum: [f64; 2],
    pub minimum_value: f64,
    /// Lowest escape saddle in `c/d`.
    pub saddle: Option<[f64; 2]>,
    pub saddle_value: f64,
    pub depth_over_u0: f64,
    /// Hessian classification after Newton refinement; `None` when the grid
    /// estimate was kept.
    pub saddle_kind: Option<StationaryKind>,
}

impl BiasedDepth {
    /// Saddle in the plane picture `p/d`.
    pub fn saddle_p(&self) -> Option<Complex64> {
        self.saddle.and_then(|s| mobius_to_plane(Complex64::new(s[0], s[1]), 1.0).ok())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasOptimum {
    pub v_c_opt: f64,
    /// Optimal depth over the unbiased depth of the same configuration.
    pub depth_ratio: f64,
    /// Optimal depth over the maximal quadrupole depth `D̄₂`.
    pub depth_over_max_quadrupole: f64,
    pub intrinsic: BiasedDepth,
    pub optimum: BiasedDepth,
    /// `v_c/(8|ᾱ⁽²⁾|)`; quadrupoles only.
    pub a_over_q2: Option<f64>,
    pub bias_voltage_v: f64,
    pub stability: Option<Stability>,
    /// Coarse scan `(v_c, depth/U0)`.
    pub scan: Vec<[f64; 2]>,
}

/// Scans `v_c` for the deepest trap: a coarse scan, then golden-section
/// refinement around the best sample.
pub fn optimize_bias(spec: &MultipoleSpec, params: &TrapParams, opts: BiasSearchOptions) -> Result<BiasOptimum> {
    spec.validate()?;
    if !(opts.coarse >= 3 && opts.v_lo < opts.v_hi) {
        return Err(Error::domain("bias scan needs at least 3 samples on a non-empty interval"));
    }
    let grid = BiasGrid::new(spec, opts.grid, opts.max_radius)?;
    let vs: Vec<f64> =
        (0..opts.coarse).map(|k| opts.v_lo + (opts.v_hi - opts.v_lo) * k as f64 / (opts.coarse - 1) as f64).collect();
    let scan: Vec<[f64; 2]> = vs.par_iter().map(|&v| [v, grid.barrier(v).depth_over_u0]).collect();
    let best = (0..scan.len()).max_by(|&a, &b| scan[a][1].total_cmp(&scan[b][1])).expect("non-empty scan");
    let lo = vs[best.saturating_sub(1)];
    let hi = vs[(best + 1).min(vs.len() - 1)];
    let (v_golden, _) = golden_max(|v| grid.barrier(v).depth_over_u0, lo, hi, opts.tol);
    let intrinsic = grid.barrier(0.0);
    // the golden search may land a rounding error below a sample it bracketed
    let mut optimum = grid.barrier(v_golden);
    let mut candidates = vec![grid.barrier(vs[best])];
    if (opts.v_lo..=opts.v_hi).contains(&0.0) {
        candidates.push(intrinsic);
    }
    for c in candidates {
        if c.depth_over_u0 > optimum.depth_over_u0 {
            optimum = c;
        }
    }
    let v_opt = optimum.v_c;
    let stability = if spec.n == 2 { Some(stability(spec, v_opt, params)?) } else { None };
    Ok(BiasOptimum {
        v_c_opt: v_opt,
        depth_ratio: optimum.depth_over_u0 / intrinsic.depth_over_u0,
        depth_over_max_quadrupole: optimum.depth_over_u0 / max_quadrupole_depth(),
        a_over_q2: stability.map(|s| s.a_over_q2),
        bias_voltage_v: bias_voltage(v_opt, params)?,
        stability,
        intrinsic,
        optimum,
        scan,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stability {
    pub q: f64,
    pub a: f64,
    pub a_over_q2: f64,
    /// `|v_c|` limit from `|a/q²| < 0.5`: `4|ᾱ⁽²⁾| = (2/π) sin θ_w`.
    pub v_c_bound: f64,
    pub stable: bool,
}

pub const Q_MAX: f64 = 0.7;
pub const A_OVER_Q2_MAX: f64 = 0.5;

/// Mathieu stability of a biased quadrupole guide: `q < 0.7` and
/// `|a/q²| < 0.5`.
pub fn stability(spec: &MultipoleSpec, v_c: f64, params: &TrapParams) -> Result<Stability> {
    if spec.n != 2 {
        return Err(Error::Unsupported(format!("stability is defined for quadrupoles only, got n = {}", spec.n)));
    }
    let s = scale_factors(params)?;
    let alpha_bar = spec.theta_w.sin() / (2.0 * PI);
    let q = alpha_bar * s.q0;
    let a_over_q2 = v_c / (8.0 * alpha_bar);
    Ok(Stability {
        q,
        a: a_over_q2 * q * q,
        a_over_q2,
        v_c_bound: 4.0 * alpha_bar,
        stable: q < Q_MAX && a_over_q2.abs() < A_OVER_Q2_MAX,
    })
}

/// `U_eff/U0` on a square grid over `|c| ≤ max_radius`; cells outside are
/// omitted. Rows are `(Re c, Im c, U_eff/U0)` in row-major order.
pub fn ueff_contours(spec: &MultipoleSpec, v_c: f64, grid: usize, max_radius: f64) -> Result<Vec<[f64; 3]>> {
    spec.validate()?;
    if grid < 2 {
        return Err(Error::domain("contour grid needs at least 2 points per side"));
    }
    let rows: Vec<Option<[f64; 3]>> = (0..grid * grid)
        .into_par_iter()
        .map(|idx| {
            let c = BiasGrid::coord(grid, max_radius, idx / grid, idx % grid);
            if c.norm() > max_radius {
                return None;
            }
            let v = u_eff_bias_c(c, v_c, spec).unwrap_or(f64::NAN);
            Some([c.re, c.im, v])
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}
