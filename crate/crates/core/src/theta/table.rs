use super::lattice::{for_each_in_ellipsoid, gradient_tail_factor, radius_sq_for, theta_tail_factor};
use super::{CertifiedComplex, GradientVector, PeriodMatrix, ThetaOptions};
use crate::chars::Characteristic;
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// Default threshold of the hyperelliptic proximity guard.
pub const HYPERELLIPTIC_GUARD: f64 = 1e-6;

/// All 4^g theta constants and gradients at one τ, from a single pass over the
/// half-integer lattice.
///
/// The truncation tail is bounded by `tol`; rounding is bounded per ε-coset, so
/// entries that are small because their whole coset is small keep their
/// relative accuracy. This is what the degeneration fits rely on.
#[derive(Debug, Clone, Serialize)]
pub struct ThetaTable {
    pub genus: usize,
    pub thetas: Vec<CertifiedComplex>,
    pub grads: Vec<Vec<CertifiedComplex>>,
    /// Squared radius of the summation ellipsoid in the Im τ metric.
    pub radius_sq: f64,
    pub points: usize,
}

impl ThetaTable {
    pub fn compute(tau: &PeriodMatrix, opts: &ThetaOptions) -> Result<Self> {
        if !(opts.tol > 0.0) {
            return Err(Error::Precondition("tol must be positive".into()));
        }
        let g = tau.g;
        let lam = tau.lambda_min;
        let f_theta = theta_tail_factor(lam, g);
        let f_grad = gradient_tail_factor(lam, g);
        let rho2 = radius_sq_for(f_theta.max(f_grad), opts.tol / 2.0);
        let extent = (rho2 / lam).sqrt();
        if extent > opts.max_radius {
            return Err(Error::PrecisionExhausted(format!(
                "needs radius {extent:.1} > cap {}",
                opts.max_radius
            )));
        }
        let nchar = 1usize << (2 * g);
        let ndelta = 1usize << g;
        let mut val = vec![Complex64::new(0.0, 0.0); nchar];
        let mut grad = vec![Complex64::new(0.0, 0.0); nchar * g];
        let mut weighted = vec![0.0f64; ndelta];
        let mut plain = vec![0.0f64; ndelta];
        let mut gweighted = vec![0.0f64; ndelta];
        let mut gplain = vec![0.0f64; ndelta];
        let mut count = vec![0usize; ndelta];
        let ipi = Complex64::new(0.0, PI);
        let powers = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, -1.0),
        ];
        let zero = vec![0.0; g];
        let mut k = vec![0i64; g];
        let mut points = 0usize;
        for_each_in_ellipsoid(&tau.chol, g, rho2, &zero, 0.5, &zero, &mut |n| {
            let mut eps = 0usize;
            let mut nmax: f64 = 0.0;
            for i in 0..g {
                k[i] = (2.0 * n[i]).round() as i64;
                eps |= (k[i].rem_euclid(2) as usize) << i;
                nmax = nmax.max(n[i].abs());
            }
            let arg = ipi * tau.quad(n);
            let base = arg.exp();
            let a = base.norm();
            weighted[eps] += a * (arg.norm() + 4.0);
            plain[eps] += a;
            gweighted[eps] += a * (arg.norm() + 4.0) * 2.0 * PI * nmax;
            gplain[eps] += a * 2.0 * PI * nmax;
            count[eps] += 1;
            points += 1;
            for delta in 0..ndelta {
                let mut dot = 0i64;
                for i in 0..g {
                    if delta >> i & 1 == 1 {
                        dot += k[i];
                    }
                }
                let t = base * powers[dot.rem_euclid(4) as usize];
                let idx = (eps << g) | delta;
                val[idx] += t;
                let it = t * Complex64::new(0.0, 2.0 * PI);
                for i in 0..g {
                    grad[idx * g + i] += it * n[i];
                }
            }
        });
        let decay = (-PI * rho2 / 2.0).exp();
        let mut thetas = Vec::with_capacity(nchar);
        let mut grads = Vec::with_capacity(nchar);
        for idx in 0..nchar {
            let eps = idx >> g;
            let e_t = f_theta * decay + f64::EPSILON * (weighted[eps] + count[eps] as f64 * plain[eps]);
            let e_g = f_grad * decay + f64::EPSILON * (gweighted[eps] + count[eps] as f64 * gplain[eps]);
            thetas.push(CertifiedComplex::new(val[idx], e_t));
            grads.push((0..g).map(|i| CertifiedComplex::new(grad[idx * g + i], e_g)).collect());
        }
        Ok(Self { genus: g, thetas, grads, radius_sq: rho2, points })
    }

    pub fn theta(&self, m: &Characteristic) -> CertifiedComplex {
        self.thetas[m.index()]
    }

    pub fn gradient(&self, m: &Characteristic) -> GradientVector {
        GradientVector { components: self.grads[m.index()].clone() }
    }

    pub fn grad_component(&self, m: &Characteristic, axis: usize) -> CertifiedComplex {
        self.grads[m.index()][axis]
    }

    /// Gradient as a row of three certified values (genus 3).
    pub fn grad_row(&self, m: &Characteristic) -> [CertifiedComplex; 3] {
        let r = &self.grads[m.index()];
        [r[0], r[1], r[2]]
    }

    /// Rejects τ when some even theta constant is below `threshold`.
    pub fn check_guard(&self, threshold: f64) -> Result<()> {
        for (idx, t) in self.thetas.iter().enumerate() {
            let m = Characteristic::from_index(self.genus as u8, idx);
            if m.is_even() && t.value.norm() < threshold {
                return Err(Error::HyperellipticProximity(format!(
                    "|θ{}| = {:e} < {threshold:e}",
                    m,
                    t.value.norm()
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::super::{theta_constant, theta_gradient};
    use super::*;
    use crate::chars::ch;

    fn sample_tau() -> PeriodMatrix {
        PeriodMatrix::new(
            3,
            vec![
                Complex64::new(0.1, 1.1), Complex64::new(0.2, 0.1), Complex64::new(-0.1, 0.05),
                Complex64::new(0.2, 0.1), Complex64::new(0.3, 0.9), Complex64::new(0.0, -0.1),
                Complex64::new(-0.1, 0.05), Complex64::new(0.0, -0.1), Complex64::new(-0.2, 1.3),
            ],
        )
        .unwrap()
    }

    #[test]
    fn bulk_matches_single_evaluations() {
        let tau = sample_tau();
        let o = ThetaOptions::with_tol(1e-12);
        let t = ThetaTable::compute(&tau, &o).unwrap();
        for m in Characteristic::all(3) {
            let a = theta_constant(&m, &tau, &o).unwrap();
            assert!((a.value - t.theta(&m).value).norm() <= a.err + t.theta(&m).err);
            let gr = theta_gradient(&m, &tau, &o).unwrap();
            for i in 0..3 {
                let b = t.grad_component(&m, i);
                assert!((gr.components[i].value - b.value).norm() <= gr.components[i].err + b.err);
            }
        }
    }

    #[test]
    fn guard_trips_near_theta_null() {
        let t = ThetaTable::compute(&sample_tau(), &ThetaOptions::default()).unwrap();
        assert!(t.check_guard(HYPERELLIPTIC_GUARD).is_ok());
        assert!(matches!(t.check_guard(1e3), Err(Error::HyperellipticProximity(_))));
        let _ = ch("00");
    }
}
