//! Certified Riemann theta constants and gradients with characteristics.

mod certified;
mod jacobi;
mod lattice;
mod modular;
mod table;

pub use certified::*;
pub use jacobi::*;
pub use modular::*;
pub use table::*;

use crate::chars::Characteristic;
use crate::error::{Error, Result};
use lattice::{cholesky_upper, for_each_in_ellipsoid, gradient_tail_factor, radius_sq_for, theta_tail_factor};
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::f64::consts::PI;

/// Truncation policy shared by all evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaOptions {
    /// Target absolute error.
    pub tol: f64,
    /// Largest Euclidean extent ρ/√λ_min of the summation ellipsoid.
    pub max_radius: f64,
}

impl Default for ThetaOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_radius: 40.0 }
    }
}

impl ThetaOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

/// A point of the Siegel upper half-space, with the data the lattice sums need.
#[derive(Debug, Clone)]
pub struct PeriodMatrix {
    g: usize,
    entries: Vec<Complex64>,
    chol: Vec<f64>,
    lambda_min: f64,
    im_inv: Vec<f64>,
}

/// Smallest eigenvalue margin accepted for Im τ.
pub const SIEGEL_MARGIN: f64 = 1e-12;

impl PeriodMatrix {
    /// Symmetrizes `entries` (row-major g×g) and checks Im τ > 0.
    pub fn new(g: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != g * g || g == 0 {
            return Err(Error::Domain(format!("expected {}×{} entries", g, g)));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("non-finite entry".into()));
        }
        let mut e = entries;
        for i in 0..g {
            for j in i + 1..g {
                let s = (e[i * g + j] + e[j * g + i]) * 0.5;
                e[i * g + j] = s;
                e[j * g + i] = s;
            }
        }
        let y: Vec<f64> = e.iter().map(|z| z.im).collect();
        let eig = SymmetricEigen::new(DMatrix::from_row_slice(g, g, &y));
        let lambda_min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(lambda_min > SIEGEL_MARGIN) {
            return Err(Error::Domain(format!("Im τ not positive definite (λ_min = {lambda_min:e})")));
        }
        let chol = cholesky_upper(&y, g).ok_or_else(|| Error::Domain("Cholesky of Im τ failed".into()))?;
        let inv = DMatrix::from_row_slice(g, g, &y)
            .try_inverse()
            .ok_or_else(|| Error::Domain("Im τ singular".into()))?;
        let im_inv = (0..g * g).map(|k| inv[(k / g, k % g)]).collect();
        Ok(Self { g, entries: e, chol, lambda_min, im_inv })
    }

    pub fn from_parts(g: usize, re: &[f64], im: &[f64]) -> Result<Self> {
        if re.len() != g * g || im.len() != g * g {
            return Err(Error::Domain("real and imaginary parts must be g×g".into()));
        }
        Self::new(g, re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect())
    }

    /// i·I_g.
    pub fn identity_i(g: usize) -> Self {
        let mut e = vec![Complex64::new(0.0, 0.0); g * g];
        for i in 0..g {
            e[i * g + i] = Complex64::new(0.0, 1.0);
        }
        Self::new(g, e).expect("i·I is in Siegel space")
    }

    pub fn diagonal(taus: &[Complex64]) -> Result<Self> {
        let g = taus.len();
        let mut e = vec![Complex64::new(0.0, 0.0); g * g];
        for i in 0..g {
            e[i * g + i] = taus[i];
        }
        Self::new(g, e)
    }

    pub fn genus(&self) -> usize {
        self.g
    }
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.g + j]
    }
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }
    pub fn lambda_min(&self) -> f64 {
        self.lambda_min
    }
    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.g, self.g, &self.entries)
    }

    /// nᵀτn for a real vector n.
    fn quad(&self, n: &[f64]) -> Complex64 {
        let g = self.g;
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..g {
            let mut row = Complex64::new(0.0, 0.0);
            for j in 0..g {
                row += self.entries[i * g + j] * n[j];
            }
            s += row * n[i];
        }
        s
    }
}

#[derive(Serialize, Deserialize)]
struct TauRepr {
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl Serialize for PeriodMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let g = self.g;
        let rows = |f: fn(&Complex64) -> f64| {
            (0..g).map(|i| (0..g).map(|j| f(&self.entries[i * g + j])).collect()).collect()
        };
        TauRepr { re: rows(|z| z.re), im: rows(|z| z.im) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PeriodMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = TauRepr::deserialize(d)?;
        let g = r.re.len();
        if r.im.len() != g || r.re.iter().chain(&r.im).any(|row| row.len() != g) {
            return Err(D::Error::custom("τ must be square with matching re/im shapes"));
        }
        let re: Vec<f64> = r.re.concat();
        let im: Vec<f64> = r.im.concat();
        PeriodMatrix::from_parts(g, &re, &im).map_err(D::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientVector {
    pub components: Vec<CertifiedComplex>,
}

impl GradientVector {
    pub fn values(&self) -> Vec<Complex64> {
        self.components.iter().map(|c| c.value).collect()
    }
    pub fn max_err(&self) -> f64 {
        self.components.iter().map(|c| c.err).fold(0.0, f64::max)
    }
}

struct CosetSum {
    value: Complex64,
    grad: Vec<Complex64>,
    abs_sum: f64,
    plain_abs: f64,
    grad_abs_sum: f64,
    grad_plain_abs: f64,
    count: usize,
}

/// Σ over n ∈ Z^g + ε/2 inside the ellipsoid of exp(πi nᵀτn + 2πi nᵀ(z+δ/2)).
fn coset_sum(m: &Characteristic, tau: &PeriodMatrix, z: &[Complex64], rho2: f64, center: &[f64], with_grad: bool) -> CosetSum {
    let g = tau.g;
    let offset: Vec<f64> = (0..g).map(|i| m.eps_bit(i) as f64 * 0.5).collect();
    let shift: Vec<Complex64> = (0..g).map(|i| z[i] + m.delta_bit(i) as f64 * 0.5).collect();
    let mut out = CosetSum {
        value: Complex64::new(0.0, 0.0),
        grad: vec![Complex64::new(0.0, 0.0); g],
        abs_sum: 0.0,
        plain_abs: 0.0,
        grad_abs_sum: 0.0,
        grad_plain_abs: 0.0,
        count: 0,
    };
    let ipi = Complex64::new(0.0, PI);
    for_each_in_ellipsoid(&tau.chol, g, rho2, &offset, 1.0, center, &mut |n| {
        let mut lin = Complex64::new(0.0, 0.0);
        for i in 0..g {
            lin += shift[i] * n[i];
        }
        let arg = ipi * (tau.quad(n) + lin * 2.0);
        let t = arg.exp();
        let w = t.norm() * (arg.norm() + 4.0);
        out.value += t;
        out.abs_sum += w;
        out.plain_abs += t.norm();
        if with_grad {
            let mut nmax: f64 = 0.0;
            for i in 0..g {
                out.grad[i] += t * Complex64::new(0.0, 2.0 * PI * n[i]);
                nmax = nmax.max(n[i].abs());
            }
            out.grad_abs_sum += w * 2.0 * PI * nmax;
            out.grad_plain_abs += t.norm() * 2.0 * PI * nmax;
        }
        out.count += 1;
    });
    out
}

/// ε·(Σ|t|(|arg|+4) + N·Σ|t|): exp() of a large argument loses ~|arg|·ε
/// relative, naive summation of N terms adds at most N·ε·Σ|t|.
fn rounding_bound(weighted_abs: f64, plain_abs: f64, count: usize) -> f64 {
    f64::EPSILON * (weighted_abs + count as f64 * plain_abs)
}

/// θ[ε;δ](τ, z) with a certified absolute error.
pub fn theta_value(m: &Characteristic, tau: &PeriodMatrix, z: &[Complex64], opts: &ThetaOptions) -> Result<CertifiedComplex> {
    check_inputs(m, tau, opts)?;
    if z.len() != tau.g {
        return Err(Error::Domain("z has the wrong length".into()));
    }
    let g = tau.g;
    // Complete the square: the modulus is centred at c = −Y⁻¹ Im z.
    let w: Vec<f64> = z.iter().map(|v| v.im).collect();
    let mut center = vec![0.0; g];
    let mut growth = 0.0;
    for i in 0..g {
        for j in 0..g {
            center[i] -= tau.im_inv[i * g + j] * w[j];
            growth += w[i] * tau.im_inv[i * g + j] * w[j];
        }
    }
    let factor = theta_tail_factor(tau.lambda_min, g) * (PI * growth).exp();
    let rho2 = radius_sq_for(factor, opts.tol / 2.0);
    check_radius(rho2, tau, opts)?;
    let s = coset_sum(m, tau, z, rho2, &center, false);
    let tail = factor * (-PI * rho2 / 2.0).exp();
    let err = tail + rounding_bound(s.abs_sum, s.plain_abs, s.count);
    if err > opts.tol {
        return Err(Error::PrecisionExhausted(format!("rounding floor {err:e} exceeds tol {:e}", opts.tol)));
    }
    Ok(CertifiedComplex::new(s.value, err))
}

/// grad_z θ[ε;δ](τ, z) at z = 0.
pub fn theta_gradient(m: &Characteristic, tau: &PeriodMatrix, opts: &ThetaOptions) -> Result<GradientVector> {
    check_inputs(m, tau, opts)?;
    let g = tau.g;
    let factor = gradient_tail_factor(tau.lambda_min, g);
    let rho2 = radius_sq_for(factor, opts.tol / 2.0);
    check_radius(rho2, tau, opts)?;
    let zero = vec![Complex64::new(0.0, 0.0); g];
    let s = coset_sum(m, tau, &zero, rho2, &vec![0.0; g], true);
    let tail = factor * (-PI * rho2 / 2.0).exp();
    let err = tail + rounding_bound(s.grad_abs_sum, s.grad_plain_abs, s.count);
    if err > opts.tol {
        return Err(Error::PrecisionExhausted(format!("rounding floor {err:e} exceeds tol {:e}", opts.tol)));
    }
    Ok(GradientVector { components: s.grad.into_iter().map(|v| CertifiedComplex::new(v, err)).collect() })
}

/// θ[m](τ, 0).
pub fn theta_constant(m: &Characteristic, tau: &PeriodMatrix, opts: &ThetaOptions) -> Result<CertifiedComplex> {
    theta_value(m, tau, &vec![Complex64::new(0.0, 0.0); tau.g], opts)
}

fn check_inputs(m: &Characteristic, tau: &PeriodMatrix, opts: &ThetaOptions) -> Result<()> {
    if m.genus() as usize != tau.g {
        return Err(Error::Domain("characteristic and τ have different genus".into()));
    }
    if !(opts.tol > 0.0) || !(opts.max_radius > 0.0) {
        return Err(Error::Precondition("tol and max_radius must be positive".into()));
    }
    Ok(())
}

fn check_radius(rho2: f64, tau: &PeriodMatrix, opts: &ThetaOptions) -> Result<()> {
    let extent = (rho2 / tau.lambda_min).sqrt();
    if extent > opts.max_radius {
        return Err(Error::PrecisionExhausted(format!(
            "needs radius {extent:.1} > cap {}",
            opts.max_radius
        )));
    }
    Ok(())
}
