//! Dense real polynomials in ascending-coefficient order and their complex
//! roots.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    /// `coeffs[k]` multiplies `uᵏ`.
    pub coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![0.0] }
    }

    pub fn constant(c: f64) -> Self {
        Poly { coeffs: vec![c] }
    }

    /// `(1 + s·u)^m` for `s = ±1`.
    pub fn binomial(s: f64, m: usize) -> Self {
        let mut coeffs = Vec::with_capacity(m + 1);
        let mut c = 1.0;
        for k in 0..=m {
            coeffs.push(c * s.powi(k as i32));
            c = c * (m - k) as f64 / (k + 1) as f64;
        }
        Poly { coeffs }
    }

    /// Index of the highest nonzero coefficient (0 for the zero polynomial).
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0)
    }

    /// Largest coefficient magnitude.
    pub fn norm_inf(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Drops leading coefficients below `rel_tol · ‖p‖∞`.
    pub fn trimmed(&self, rel_tol: f64) -> Self {
        let cut = rel_tol * self.norm_inf();
        let last = self.coeffs.iter().rposition(|c| c.abs() > cut).unwrap_or(0);
        Poly { coeffs: self.coeffs[..=last].to_vec() }
    }

    pub fn eval(&self, u: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * u + c)
    }

    pub fn eval_complex(&self, u: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * u + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly { coeffs: self.coeffs.iter().enumerate().skip(1).map(|(k, &c)| k as f64 * c).collect() }
    }

    pub fn scale(&self, s: f64) -> Self {
        Poly { coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    /// Roots from the eigenvalues of the companion matrix, each polished by a
    /// few Newton steps. Leading coefficients below `1e-14·‖p‖∞` are dropped
    /// first, so the returned count is the effective degree.
    pub fn roots(&self) -> Vec<Complex64> {
        let p = self.trimmed(1e-14);
        let deg = p.degree();
        if deg == 0 {
            return Vec::new();
        }
        let lead = p.coeffs[deg];
        let mut m = DMatrix::<f64>::zeros(deg, deg);
        for i in 1..deg {
            m[(i, i - 1)] = 1.0;
        }
        for i in 0..deg {
            m[(i, deg - 1)] = -p.coeffs[i] / lead;
        }
        let dp = p.derivative();
        m.complex_eigenvalues().iter().map(|&z| polish(&p, &dp, z)).collect()
    }
}

fn polish(p: &Poly, dp: &Poly, z: Complex64) -> Complex64 {
    newton(|z| p.eval_complex(z), |z| dp.eval_complex(z), z)
}

/// A few Newton steps, each accepted only if it lowers the residual.
fn newton<F, G>(f: F, df: G, mut z: Complex64) -> Complex64
where
    F: Fn(Complex64) -> Complex64,
    G: Fn(Complex64) -> Complex64,
{
    let mut best = f(z).norm();
    for _ in 0..3 {
        let d = df(z);
        if d.norm() == 0.0 {
            break;
        }
        let next = z - f(z) / d;
        let r = f(next).norm();
        // NaN residuals stop the polish too
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(r < best) {
            break;
        }
        best = r;
        z = next;
    }
    z
}

/// Polynomial with complex coefficients, ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct CPoly {
    pub coeffs: Vec<Complex64>,
}

impl CPoly {
    /// `re + i·im`.
    pub fn from_parts(re: &Poly, im: &Poly) -> Self {
        let n = re.coeffs.len().max(im.coeffs.len());
        CPoly {
            coeffs: (0..n)
                .map(|k| {
                    Complex64::new(re.coeffs.get(k).copied().unwrap_or(0.0), im.coeffs.get(k).copied().unwrap_or(0.0))
                })
                .collect(),
        }
    }

    pub fn norm_inf(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    pub fn eval(&self, u: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * u + c)
    }

    pub fn derivative(&self) -> Self {
        CPoly { coeffs: self.coeffs.iter().enumerate().skip(1).map(|(k, &c)| c * k as f64).collect() }
    }

    /// Degree after dropping leading coefficients below `rel_tol · ‖p‖∞`.
    pub fn effective_degree(&self, rel_tol: f64) -> usize {
        let cut = rel_tol * self.norm_inf();
        self.coeffs.iter().rposition(|c| c.norm() > cut).unwrap_or(0)
    }

    /// Roots via the complex Schur form of the companion matrix, polished by
    /// Newton steps.
    pub fn roots(&self) -> Vec<Complex64> {
        let deg = self.effective_degree(1e-14);
        if deg == 0 {
            return Vec::new();
        }
        let lead = self.coeffs[deg];
        let mut m = DMatrix::<Complex64>::zeros(deg, deg);
        for i in 1..deg {
            m[(i, i - 1)] = Complex64::new(1.0, 0.0);
        }
        for i in 0..deg {
            m[(i, deg - 1)] = -self.coeffs[i] / lead;
        }
        let (_, t) = Schur::new(m).unpack();
        let trimmed = CPoly { coeffs: self.coeffs[..=deg].to_vec() };
        let dp = trimmed.derivative();
        (0..deg).map(|i| newton(|z| trimmed.eval(z), |z| dp.eval(z), t[(i, i)])).collect()
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly {
            coeffs: (0..n)
                .map(|k| self.coeffs.get(k).copied().unwrap_or(0.0) + rhs.coeffs.get(k).copied().unwrap_or(0.0))
                .collect(),
        }
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-1.0)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut coeffs = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Poly { coeffs }
    }
}
