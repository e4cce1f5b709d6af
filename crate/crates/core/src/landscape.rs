//! Barrier search on sampled 2-D potential landscapes and Newton refinement
//! of stationary points.
//!
//! The depth of a trap is the height of the lowest pass separating its
//! minimum from an escape region. On a grid this is found by a priority
//! flood from the minimum: cells are visited in increasing order of value
//! and the running maximum at the first escape cell is the barrier.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

/// Scalar samples on an `n0 × n1` grid; index `(i, j)` maps to `i * n1 + j`.
#[derive(Debug, Clone)]
pub struct GridLandscape {
    pub n0: usize,
    pub n1: usize,
    pub values: Vec<f64>,
    pub escape: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pass {
    /// Barrier height (running maximum along the lowest escape path).
    pub level: f64,
    /// Cell where the running maximum was last raised.
    pub cell: (usize, usize),
    /// First escape cell reached.
    pub exit: (usize, usize),
}

#[derive(PartialEq)]
struct Item(f64, usize);

impl Eq for Item {}

impl Ord for Item {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl GridLandscape {
    pub fn new(n0: usize, n1: usize, values: Vec<f64>, escape: Vec<bool>) -> Self {
        assert_eq!(values.len(), n0 * n1);
        assert_eq!(escape.len(), n0 * n1);
        GridLandscape { n0, n1, values, escape }
    }

    fn neighbours(&self, idx: usize) -> impl Iterator<Item = usize> + '_ {
        let (i, j) = (idx / self.n1, idx % self.n1);
        let (n0, n1) = (self.n0 as isize, self.n1 as isize);
        [(-1isize, 0isize), (1, 0), (0, -1), (0, 1), (-1, -1), (-1, 1), (1, -1), (1, 1)].into_iter().filter_map(
            move |(di, dj)| {
                let (a, b) = (i as isize + di, j as isize + dj);
                (a >= 0 && a < n0 && b >= 0 && b < n1).then(|| (a * n1 + b) as usize)
            },
        )
    }

    /// Floods from `seeds` and returns the lowest pass to any escape cell.
    /// Non-finite values are treated as walls.
    pub fn lowest_pass(&self, seeds: &[(usize, usize)]) -> Option<Pass> {
        let mut seen = vec![false; self.values.len()];
        let mut heap = BinaryHeap::new();
        for &(i, j) in seeds {
            let idx = i * self.n1 + j;
            if !seen[idx] && self.values[idx].is_finite() {
                seen[idx] = true;
                heap.push(Item(self.values[idx], idx));
            }
        }
        let mut level = f64::NEG_INFINITY;
        let mut cell = 0;
        while let Some(Item(v, idx)) = heap.pop() {
            if v > level {
                level = v;
                cell = idx;
            }
            if self.escape[idx] {
                return Some(Pass {
                    level,
                    cell: (cell / self.n1, cell % self.n1),
                    exit: (idx / self.n1, idx % self.n1),
                });
            }
            for nb in self.neighbours(idx) {
                if !seen[nb] && self.values[nb].is_finite() {
                    seen[nb] = true;
                    heap.push(Item(self.values[nb], nb));
                }
            }
        }
        None
    }

    /// Index of the smallest finite non-escape value.
    pub fn argmin(&self) -> Option<(usize, usize)> {
        self.values
            .iter()
            .enumerate()
            .filter(|(i, v)| v.is_finite() && !self.escape[*i])
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| (i / self.n1, i % self.n1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StationaryKind {
    Minimum,
    Maximum,
    Saddle,
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stationary {
    pub point: [f64; 2],
    pub value: f64,
    pub gradient_norm: f64,
    /// Hessian eigenvalues, ascending.
    pub hessian_eigenvalues: [f64; 2],
    pub kind: StationaryKind,
    pub converged: bool,
}

/// Central-difference gradient and Hessian with step `h`.
pub fn gradient_hessian<F: Fn(f64, f64) -> f64>(f: &F, x: f64, y: f64, h: f64) -> ([f64; 2], [[f64; 2]; 2]) {
    let f0 = f(x, y);
    let (fxp, fxm) = (f(x + h, y), f(x - h, y));
    let (fyp, fym) = (f(x, y + h), f(x, y - h));
    let fpp = f(x + h, y + h);
    let fpm = f(x + h, y - h);
    let fmp = f(x - h, y + h);
    let fmm = f(x - h, y - h);
    let g = [(fxp - fxm) / (2.0 * h), (fyp - fym) / (2.0 * h)];
    let hxx = (fxp - 2.0 * f0 + fxm) / (h * h);
    let hyy = (fyp - 2.0 * f0 + fym) / (h * h);
    let hxy = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
    (g, [[hxx, hxy], [hxy, hyy]])
}

pub fn symmetric_eigenvalues(m: [[f64; 2]; 2]) -> [f64; 2] {
    let tr = m[0][0] + m[1][1];
    let diff = m[0][0] - m[1][1];
    let disc = (0.25 * diff * diff + m[0][1] * m[0][1]).sqrt();
    [0.5 * tr - disc, 0.5 * tr + disc]
}

pub fn classify(eig: [f64; 2], tol: f64) -> StationaryKind {
    if eig[0] < -tol && eig[1] > tol {
        StationaryKind::Saddle
    } else if eig[0] > tol {
        StationaryKind::Minimum
    } else if eig[1] < -tol {
        StationaryKind::Maximum
    } else {
        StationaryKind::Degenerate
    }
}

/// Damped Newton iteration on `∇f = 0` with finite-difference derivatives.
///
/// `h` is the difference step, `grad_tol` the absolute gradient tolerance and
/// `max_step` caps each update. The search fails softly: the best point is
/// returned with `converged == false`.
pub fn refine_stationary<F: Fn(f64, f64) -> f64>(
    f: &F,
    start: [f64; 2],
    h: f64,
    grad_tol: f64,
    max_step: f64,
    max_iter: usize,
) -> Stationary {
    let [mut x, mut y] = start;
    let mut converged = false;
    for _ in 0..max_iter {
        let (g, hess) = gradient_hessian(f, x, y, h);
        let gn = g[0].hypot(g[1]);
        if !gn.is_finite() {
            break;
        }
        if gn < grad_tol {
            converged = true;
            break;
        }
        let det = hess[0][0] * hess[1][1] - hess[0][1] * hess[1][0];
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let mut dx = -(hess[1][1] * g[0] - hess[0][1] * g[1]) / det;
        let mut dy = -(-hess[1][0] * g[0] + hess[0][0] * g[1]) / det;
        let len = dx.hypot(dy);
        if len > max_step {
            dx *= max_step / len;
            dy *= max_step / len;
        }
        x += dx;
        y += dy;
        if len < 1e-3 * h {
            let (g2, _) = gradient_hessian(f, x, y, h);
            converged = g2[0].hypot(g2[1]) < grad_tol;
            break;
        }
    }
    let (g, hess) = gradient_hessian(f, x, y, h);
    let eig = symmetric_eigenvalues(hess);
    let scale = eig[0].abs().max(eig[1].abs());
    Stationary {
        point: [x, y],
        value: f(x, y),
        gradient_norm: g[0].hypot(g[1]),
        hessian_eigenvalues: eig,
        kind: classify(eig, 1e-6 * scale),
        converged,
    }
}

/// Golden-section search for the maximum of a unimodal function on `[a, b]`.
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
