//! Exact saddle points and intrinsic depth of surface-electrode multipoles.
//!
//! In the coordinate `u = p/d − 1` (electrode plane on the imaginary axis,
//! trap centre at `u = −1`) the field of a multipole is
//! `Φ'ₙ ∝ (1 − u²)^{n−1}/P(u)`. Its stationary points other than the
//! centre and its mirror image are the roots of
//! `S = 2u(n − 1)P + (1 − u²)P'`, a polynomial of degree `2n + 1`. All but
//! two lie on the electrode plane between consecutive edges; the one with
//! `Re u < 0` is the escape saddle.

use std::f64::consts::{E, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use rayon::prelude::*;

use crate::landscape::{classify, gradient_hessian, symmetric_eigenvalues, StationaryKind};
use crate::multipole::{phi_n_prime_u, MultipoleSpec};
use crate::poly::{CPoly, Poly};
use crate::units::{scale_factors, TrapParams};
use crate::{Error, Result};

/// `|Re u|/(1 + |u|)` below which a root counts as on the electrode plane.
const AXIS_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct SaddlePolynomials {
    pub n: u32,
    pub theta0: f64,
    pub theta_w: f64,
    pub p_plus: Poly,
    pub p_minus: Poly,
    pub s_plus: Poly,
    pub s_minus: Poly,
}

fn s_of(p: &Poly, n: u32) -> Poly {
    // 2u(n − 1)P + (1 − u²)P'
    let two_u = Poly::new(vec![0.0, 2.0 * (n as f64 - 1.0)]);
    let one_minus_u2 = Poly::new(vec![1.0, 0.0, -1.0]);
    &(&two_u * p) + &(&one_minus_u2 * &p.derivative())
}

fn check_order(n: u32) -> Result<()> {
    if n < 2 {
        return Err(Error::Unsupported(format!("saddle analysis needs n ≥ 2, got {n}")));
    }
    Ok(())
}

pub fn build_polynomials(n: u32, theta0: f64, theta_w: f64) -> Result<SaddlePolynomials> {
    check_order(n)?;
    MultipoleSpec::new(n, theta0, theta_w, 1.0, 1.0)?;
    let m = 2 * n as usize;
    let lo = Poly::binomial(-1.0, m);
    let hi = Poly::binomial(1.0, m);
    let even = &lo + &hi;
    let odd = &lo - &hi;
    let mut g = vec![0.0; m + 1];
    for (k, c) in Poly::binomial(-1.0, n as usize).coeffs.into_iter().enumerate() {
        g[2 * k] = c;
    }
    let g = Poly::new(g);
    let nt = n as f64 * theta0;
    let beta = 0.5 * n as f64 * theta_w;
    let p_plus = &even.scale(nt.cos()) - &g.scale(2.0 * beta.cos());
    let p_minus = odd.scale(nt.sin());
    Ok(SaddlePolynomials { n, theta0, theta_w, s_plus: s_of(&p_plus, n), s_minus: s_of(&p_minus, n), p_plus, p_minus })
}

impl SaddlePolynomials {
    pub fn p(&self) -> CPoly {
        CPoly::from_parts(&self.p_plus, &self.p_minus)
    }

    pub fn s(&self) -> CPoly {
        CPoly::from_parts(&self.s_plus, &self.s_minus)
    }

    fn s_residual(&self, u: Complex64) -> f64 {
        let s = self.s();
        s.eval(u).norm() / s.norm_inf()
    }
}

/// Electrode edges and roots of `S`, sorted along the electrode plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootStructure {
    /// `Im u` of the finite edges.
    pub edges: Vec<f64>,
    /// `Im u` of the roots of `S` on the electrode plane.
    pub plane_roots: Vec<f64>,
    pub off_plane_roots: Vec<Complex64>,
    /// Exactly one plane root between each pair of consecutive edges and
    /// none outside.
    pub interleaved: bool,
    /// Effective degree of `S`.
    pub degree: usize,
}

pub fn root_structure(polys: &SaddlePolynomials) -> RootStructure {
    let s = polys.s();
    let on_axis = |z: &Complex64| z.re.abs() <= AXIS_TOL * (1.0 + z.norm());
    let mut edges: Vec<f64> = polys.p().roots().iter().map(|z| z.im).collect();
    edges.sort_by(f64::total_cmp);
    let roots = s.roots();
    let mut plane_roots: Vec<f64> = roots.iter().filter(|z| on_axis(z)).map(|z| z.im).collect();
    plane_roots.sort_by(f64::total_cmp);
    let off_plane_roots: Vec<Complex64> = roots.iter().filter(|z| !on_axis(z)).copied().collect();
    let interleaved = !edges.is_empty()
        && plane_roots.len() + 1 == edges.len()
        && plane_roots.iter().zip(edges.windows(2)).all(|(r, w)| w[0] < *r && *r < w[1]);
    RootStructure { edges, plane_roots, off_plane_roots, interleaved, degree: s.effective_degree(1e-14) }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaddleReport {
    pub n: u32,
    pub theta0: f64,
    pub theta_w: f64,
    /// Saddle in `u = p/d − 1`; `Re u < 0`.
    pub u_saddle: Complex64,
    /// Saddle position `p/d`.
    pub p_saddle_over_d: Complex64,
    /// `|Φ'ₙ(p_s)/(V/d)|²`, the depth in units of `U0`.
    pub depth_over_u0: f64,
    /// `|S(u_s)|/‖S‖∞`.
    pub residual: f64,
    /// Iterates `u⁽⁰⁾, u⁽¹⁾, …` of the heuristic update.
    pub estimate_chain: Vec<Complex64>,
    pub is_special: bool,
    pub u_bar: f64,
    pub a_n: f64,
}

/// Locates the escape saddle as the unique root of `S` with `Re u < 0`.
pub fn find_saddle(n: u32, theta0: f64, theta_w: f64) -> Result<SaddleReport> {
    let polys = build_polynomials(n, theta0, theta_w)?;
    let rs = root_structure(&polys);
    let left: Vec<Complex64> = rs.off_plane_roots.iter().filter(|z| z.re < 0.0).copied().collect();
    let right = rs.off_plane_roots.len() - left.len();
    if left.len() != 1 || right != 1 || rs.plane_roots.len() + 2 != rs.degree {
        let residuals = rs.off_plane_roots.iter().map(|z| polys.s_residual(*z)).collect();
        return Err(Error::RootStructure {
            message: format!(
                "expected {} roots on the electrode plane and one on each side, found {} / {} left / {right} right",
                rs.degree.saturating_sub(2),
                rs.plane_roots.len(),
                left.len()
            ),
            residuals,
        });
    }
    let u = left[0];
    let spec = MultipoleSpec::new(n, theta0, theta_w, 1.0, 1.0)?;
    let fp = phi_n_prime_u(u, &spec)?;
    let special = special_saddle(n)?;
    let chain = iterate_saddle(n, theta0, theta_w, 2)?;
    Ok(SaddleReport {
        n,
        theta0,
        theta_w,
        u_saddle: u,
        p_saddle_over_d: u + 1.0,
        depth_over_u0: fp.norm_sqr(),
        residual: polys.s_residual(u),
        estimate_chain: chain.estimates,
        is_special: (u - special.u_bar).norm() < 1e-9 * n as f64,
        u_bar: special.u_bar,
        a_n: special.a_n,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaddleChain {
    pub estimates: Vec<Complex64>,
    /// `|S(u⁽ᵏ⁾)|/‖S‖∞` per iterate.
    pub residuals: Vec<f64>,
    /// Set when `P` vanished at an iterate and the chain stopped early.
    pub failed: bool,
}

/// `u⁽⁰⁾ = −n`, `u⁽ᵏ⁺¹⁾ = n u⁽ᵏ⁾ + (1 − u²) P'(u)/(2P(u))`. A root of `S` is a
/// fixed point of the update.
pub fn iterate_saddle(n: u32, theta0: f64, theta_w: f64, k_max: usize) -> Result<SaddleChain> {
    let polys = build_polynomials(n, theta0, theta_w)?;
    let p = polys.p();
    let dp = p.derivative();
    let mut u = Complex64::new(-(n as f64), 0.0);
    Ok(iterate_from(&polys, &p, &dp, u, k_max, &mut u))
}

fn iterate_from(
    polys: &SaddlePolynomials,
    p: &CPoly,
    dp: &CPoly,
    start: Complex64,
    k_max: usize,
    last: &mut Complex64,
) -> SaddleChain {
    let n = polys.n as f64;
    let mut u = start;
    let mut estimates = vec![u];
    let mut residuals = vec![polys.s_residual(u)];
    let mut failed = false;
    for _ in 0..k_max {
        let pv = p.eval(u);
        if pv.norm() == 0.0 || !pv.is_finite() {
            failed = true;
            break;
        }
        u = n * u + (1.0 - u * u) * dp.eval(u) / (2.0 * pv);
        estimates.push(u);
        residuals.push(polys.s_residual(u));
    }
    *last = u;
    SaddleChain { estimates, residuals, failed }
}

/// One update step from an arbitrary point.
pub fn iterate_step(n: u32, theta0: f64, theta_w: f64, u: Complex64) -> Result<Complex64> {
    let polys = build_polynomials(n, theta0, theta_w)?;
    let p = polys.p();
    let mut out = u;
    let chain = iterate_from(&polys, &p, &p.derivative(), u, 1, &mut out);
    if chain.failed {
        return Err(Error::Search("P vanishes at the iterate".into()));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpecialSaddle {
    pub n: u32,
    /// Negative real root `ūₙ` of `S₋`.
    pub u_bar: f64,
    /// `cos(nθ_w/2) = Aₙ cos(nθ₀)` places the saddle at `ūₙ`.
    pub a_n: f64,
}

/// `ūₙ` and `Aₙ` by bisection in `[−1.1n, −n]`.
///
/// Every term is divided by `(u − 1)^{2n}` and written through
/// `r = ((u + 1)/(u − 1))^{2n} ∈ (0, 1)`, which keeps the evaluation finite
/// and well-conditioned for any `n`:
/// `S₋ ∝ u(1 − r) + n(1 + r)`.
pub fn special_saddle(n: u32) -> Result<SpecialSaddle> {
    check_order(n)?;
    let nf = n as f64;
    let ratio = |u: f64| (2.0 * nf * (2.0 / (u - 1.0)).ln_1p()).exp();
    let f = |u: f64| {
        let r = ratio(u);
        u * (1.0 - r) + nf * (1.0 + r)
    };
    let (mut lo, mut hi) = (-1.1 * nf, -nf);
    if !(f(lo) < 0.0 && f(hi) > 0.0) {
        return Err(Error::Search(format!("no sign change of S₋ in [−1.1n, −n] for n = {n}")));
    }
    while hi - lo > 1e-15 * nf {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let u = 0.5 * (lo + hi);
    let r = ratio(u);
    // S₊ = cos(nθ₀)·S_E − 2cos(nθ_w/2)·S_G with S_G = −2u(1 − u²)ⁿ
    let e = 1.0 + r;
    let de = 2.0 * nf / (u - 1.0) + 2.0 * nf * r / (1.0 + u);
    let s_e = 2.0 * u * (nf - 1.0) * e + (1.0 - u * u) * de;
    let g = if n.is_multiple_of(2) { r.sqrt() } else { -r.sqrt() };
    let s_g = -2.0 * u * g;
    Ok(SpecialSaddle { n, u_bar: u, a_n: s_e / (2.0 * s_g) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntrinsicDepth {
    /// Barrier height in joule.
    pub depth: f64,
    /// `[(1/n) sin(nθ_w/2) 4/(e²π)]² U0` in joule.
    pub crude: f64,
    /// Depth evaluated at each iterate of the heuristic chain, joule.
    pub estimate_depths: Vec<f64>,
    pub saddle: SaddleReport,
}

pub fn intrinsic_depth(n: u32, theta0: f64, theta_w: f64, params: &TrapParams) -> Result<IntrinsicDepth> {
    let u0 = scale_factors(params)?.u0;
    let saddle = find_saddle(n, theta0, theta_w)?;
    let spec = MultipoleSpec::new(n, theta0, theta_w, 1.0, 1.0)?;
    let estimate_depths = saddle
        .estimate_chain
        .iter()
        .map(|u| phi_n_prime_u(*u, &spec).map(|f| u0 * f.norm_sqr()).unwrap_or(f64::NAN))
        .collect();
    Ok(IntrinsicDepth {
        depth: u0 * saddle.depth_over_u0,
        crude: crude_depth(n, theta_w) * u0,
        estimate_depths,
        saddle,
    })
}

/// Crude estimate in units of `U0`.
pub fn crude_depth(n: u32, theta_w: f64) -> f64 {
    let nf = n as f64;
    ((0.5 * nf * theta_w).sin() / nf * 4.0 / (E * E * PI)).powi(2)
}

/// Maximal quadrupole depth `(5√5 − 11)/(2π²)` in units of `U0`.
pub fn max_quadrupole_depth() -> f64 {
    (5.0 * 5f64.sqrt() - 11.0) / (2.0 * PI * PI)
}

/// Depth at the special saddle in units of `U0` (configuration independent).
pub fn special_depth(n: u32) -> Result<f64> {
    let s = special_saddle(n)?;
    // any configuration on the optimal line, e.g. θ₀ = 0 with cos(nθ_w/2) = Aₙ
    let theta_w = 2.0 * s.a_n.acos() / n as f64;
    let spec = MultipoleSpec::new(n, 0.0, theta_w, 1.0, 1.0)?;
    Ok(phi_n_prime_u(Complex64::new(s.u_bar, 0.0), &spec)?.norm_sqr())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalCondition {
    /// `cos(nθ_w/2)`.
    pub lhs: f64,
    /// `Aₙ cos(nθ₀)`.
    pub rhs: f64,
    /// `|lhs − rhs| < 1e-9`.
    pub satisfied: bool,
    /// The exact saddle coincides with `ūₙ` within `1e-9·n`.
    pub saddle_is_special: bool,
    pub u_saddle: Complex64,
    pub u_bar: f64,
}

/// Compares both sides of `cos(nθ_w/2) = Aₙ cos(nθ₀)` and checks the saddle
/// position directly. The equivalence of the two is established for `n = 2`
/// only; for larger `n` both results are reported independently.
pub fn optimal_condition(n: u32, theta0: f64, theta_w: f64) -> Result<OptimalCondition> {
    let s = special_saddle(n)?;
    let report = find_saddle(n, theta0, theta_w)?;
    let lhs = (0.5 * n as f64 * theta_w).cos();
    let rhs = s.a_n * (n as f64 * theta0).cos();
    Ok(OptimalCondition {
        lhs,
        rhs,
        satisfied: (lhs - rhs).abs() < 1e-9,
        saddle_is_special: report.is_special,
        u_saddle: report.u_saddle,
        u_bar: s.u_bar,
    })
}

/// Local check of a reported saddle of `U_p/U0 = |Φ'ₙ/(V/d)|²` in plane
/// coordinates scaled by `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaddleCheck {
    /// `|∇U_p|` in units of `U0/d`, from `2|Φ'||Φ''|`.
    pub gradient: f64,
    /// Finite-difference Hessian eigenvalues in units of `U0/d²`, ascending.
    pub hessian_eigenvalues: [f64; 2],
    pub kind: StationaryKind,
}

pub fn verify_saddle(n: u32, theta0: f64, theta_w: f64, u: Complex64) -> Result<SaddleCheck> {
    let polys = build_polynomials(n, theta0, theta_w)?;
    let spec = MultipoleSpec::new(n, theta0, theta_w, 1.0, 1.0)?;
    let p = polys.p();
    let f = phi_n_prime_u(u, &spec)?;
    // Φ'' = −c(1 − u²)^{n−2} S/P² with c = (4n/π) sin(nθ_w/2)
    let c = 4.0 * n as f64 / PI * spec.half_width_phase().sin();
    let pv = p.eval(u);
    let df = -c * (1.0 - u * u).powi(n as i32 - 2) * polys.s().eval(u) / (pv * pv);
    let up = |x: f64, y: f64| phi_n_prime_u(Complex64::new(x, y), &spec).map(|v| v.norm_sqr()).unwrap_or(f64::NAN);
    let (_, hess) = gradient_hessian(&up, u.re, u.im, 1e-4);
    let eig = symmetric_eigenvalues(hess);
    let scale = eig[0].abs().max(eig[1].abs());
    Ok(SaddleCheck {
        gradient: 2.0 * f.norm() * df.norm(),
        hessian_eigenvalues: eig,
        kind: classify(eig, 1e-6 * scale),
    })
}

/// Depth in units of `U0` on a `(θ₀, θ_w)` grid. `θ₀` spans one period
/// `[0, 2π/n)` and `θ_w` the open interval `(0, 2π/n)`; entry `[i][j]`
/// belongs to `(θ₀ᵢ, θ_wⱼ)`. Failed saddle searches give NaN.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthMap {
    pub n: u32,
    pub theta0: Vec<f64>,
    pub theta_w: Vec<f64>,
    pub depth_over_u0: Vec<Vec<f64>>,
}

pub fn depth_map(n: u32, n_theta0: usize, n_theta_w: usize) -> Result<DepthMap> {
    check_order(n)?;
    let period = 2.0 * PI / n as f64;
    let theta0: Vec<f64> = (0..n_theta0).map(|i| period * i as f64 / n_theta0 as f64).collect();
    let theta_w: Vec<f64> = (1..=n_theta_w).map(|j| period * j as f64 / (n_theta_w + 1) as f64).collect();
    let depth_over_u0 = theta0
        .par_iter()
        .map(|&t0| {
            theta_w.iter().map(|&tw| find_saddle(n, t0, tw).map(|r| r.depth_over_u0).unwrap_or(f64::NAN)).collect()
        })
        .collect();
    Ok(DepthMap { n, theta0, theta_w, depth_over_u0 })
}
