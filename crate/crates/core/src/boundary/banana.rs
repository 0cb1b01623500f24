use super::expr::expand_symbolic_omega;
use crate::chars::ch;
use crate::error::{Error, Result};
use crate::theta::{CertifiedComplex, PeriodMatrix, ThetaOptions, ThetaTable};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::thread;

/// Period matrices of a genus-3 curve with two pinched cycles homologous to
/// the same class (a "banana" curve), near the corner s₁ = s₂ = 0.
///
/// 2πi·τ₁₁ = ln s₁ + ln s₂ + f₁₁; the other entries are constants except
/// τ₂₃ = α₁s₁ + α₂s₂, which vanishes at the corner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BananaFamilyParams {
    pub f11: Complex64,
    pub tau12: Complex64,
    pub tau13: Complex64,
    pub tau22: Complex64,
    pub tau33: Complex64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub s_max: f64,
}

impl Default for BananaFamilyParams {
    fn default() -> Self {
        let c = Complex64::new;
        Self {
            f11: c(-3.0, 0.2),
            tau12: c(0.12, 0.08),
            tau13: c(0.09, 0.05),
            tau22: c(0.1, 1.05),
            tau33: c(-0.07, 1.15),
            alpha1: 1.0,
            alpha2: 1.0,
            s_max: 0.05,
        }
    }
}

impl BananaFamilyParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.f11, self.tau12, self.tau13, self.tau22, self.tau33].iter().all(|z| z.re.is_finite() && z.im.is_finite());
        if !finite || !self.alpha1.is_finite() || !self.alpha2.is_finite() {
            return Err(Error::ParameterRange("non-finite family constant".into()));
        }
        if !(self.s_max > 0.0 && self.s_max < 1.0) {
            return Err(Error::ParameterRange(format!("s_max = {} must lie in (0, 1)", self.s_max)));
        }
        Ok(())
    }

    /// τ₂₃ as a function of the pinching parameters; zero at the corner.
    pub fn c23(&self, s1: f64, s2: f64) -> Complex64 {
        Complex64::new(self.alpha1 * s1 + self.alpha2 * s2, 0.0)
    }
}

pub fn banana_period_matrix(s1: f64, s2: f64, p: &BananaFamilyParams) -> Result<PeriodMatrix> {
    p.validate()?;
    for s in [s1, s2] {
        if !(s > 0.0 && s <= p.s_max) {
            return Err(Error::ParameterRange(format!("s = {s} outside (0, {}]", p.s_max)));
        }
    }
    let t11 = (Complex64::new(s1.ln() + s2.ln(), 0.0) + p.f11) / Complex64::new(0.0, 2.0 * PI);
    let c = p.c23(s1, s2);
    let e = vec![t11, p.tau12, p.tau13, p.tau12, p.tau22, c, p.tau13, c, p.tau33];
    PeriodMatrix::new(3, e).map_err(|e| Error::ParameterRange(format!("(s₁, s₂) = ({s1}, {s2}): {e}")))
}

/// q = exp(πiτ₁₁).
pub fn banana_q(s1: f64, s2: f64, p: &BananaFamilyParams) -> Result<Complex64> {
    let t = banana_period_matrix(s1, s2, p)?;
    Ok((Complex64::new(0.0, PI) * t.get(0, 0)).exp())
}

/// One log-log regression.
#[derive(Debug, Clone, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub expected: f64,
    /// Root-mean-square deviation of the samples from the fitted line.
    pub residual: f64,
    pub points: Vec<(f64, f64)>,
}

impl SlopeFit {
    pub fn within(&self, tol: f64) -> bool {
        (self.slope - self.expected).abs() <= tol
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BananaReport {
    /// log|Ω77| against log s₁ with s₂ fixed.
    pub omega_s1: SlopeFit,
    /// log|Ω77| against log s₂ with s₁ fixed.
    pub omega_s2: SlopeFit,
    /// log|Ω77| along s₁ = s₂ = s.
    pub omega_diagonal: SlopeFit,
    /// log|θ43| against log s₁; θ43 has ε₁ = 1.
    pub theta_eps1: SlopeFit,
    /// log|θ33| along the diagonal; this factor vanishes with τ₂₃.
    pub corner_factor: SlopeFit,
}

impl BananaReport {
    pub fn all_within(&self, tol: f64) -> bool {
        [&self.omega_s1, &self.omega_s2, &self.omega_diagonal, &self.theta_eps1, &self.corner_factor].iter().all(|f| f.within(tol))
    }
}

fn regress(points: Vec<(f64, f64)>, expected: f64) -> SlopeFit {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let residual = (points.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum::<f64>() / n).sqrt();
    SlopeFit { slope, expected, residual, points }
}

fn sample<F>(pts: &[(f64, f64)], x: impl Fn(f64, f64) -> f64, p: &BananaFamilyParams, opts: &ThetaOptions, f: F) -> Result<Vec<(f64, f64)>>
where
    F: Fn(&ThetaTable) -> CertifiedComplex + Sync,
{
    let vals: Vec<Result<CertifiedComplex>> = thread::scope(|sc| {
        let hs: Vec<_> = pts
            .iter()
            .map(|&(s1, s2)| {
                let f = &f;
                sc.spawn(move || Ok(f(&ThetaTable::compute(&banana_period_matrix(s1, s2, p)?, opts)?)))
            })
            .collect();
        hs.into_iter().map(|h| h.join().expect("evaluation thread panicked")).collect()
    });
    pts.iter()
        .zip(vals)
        .map(|(&(s1, s2), v)| {
            let v = v?;
            if !(v.value.norm() > 10.0 * v.err) {
                return Err(Error::Inconclusive(format!("value at ({s1:e}, {s2:e}) not resolved above its error")));
            }
            Ok((x(s1, s2).ln(), v.value.norm().ln()))
        })
        .collect()
}

/// Slopes of Ω77 and two of its factors near the banana corner.
///
/// Expected: 5/4 in each sᵢ separately (the corner factor tends to α₂s₂ or
/// α₁s₁, a nonzero constant), 1/8 for an ε₁ = 1 theta constant, and along the
/// diagonal 2·5/4 plus 1 from the corner factor, so 7/2. Fits whose residual
/// exceeds `tol` are inconclusive.
pub fn banana_exponent_check(p: &BananaFamilyParams, tol: f64) -> Result<BananaReport> {
    banana_exponent_check_on(p, tol, DEFAULT_BANANA_POINTS)
}

pub const DEFAULT_BANANA_POINTS: usize = 5;

/// As [`banana_exponent_check`] with `points` samples per fit, half a decade apart.
/// Fewer than three points cannot show a residual and are inconclusive.
pub fn banana_exponent_check_on(p: &BananaFamilyParams, tol: f64, points: usize) -> Result<BananaReport> {
    p.validate()?;
    if points < 3 {
        return Err(Error::Inconclusive(format!("{points} samples per fit is too coarse; need at least 3")));
    }
    let opts = ThetaOptions { tol: 1e-60, max_radius: 60.0 };
    let omega = expand_symbolic_omega();
    let om = |t: &ThetaTable| omega.eval(t);
    let fixed = p.s_max * 0.2;
    let small: Vec<f64> = (0..points).map(|k| fixed * 1e-2 * 10f64.powf(-0.5 * k as f64)).collect();
    let diag: Vec<f64> = (0..points).map(|k| (p.s_max * 0.2).min(1e-2) * 10f64.powf(-0.5 * k as f64)).collect();
    let along_s1: Vec<(f64, f64)> = small.iter().map(|&s| (s, fixed)).collect();
    let along_s2: Vec<(f64, f64)> = small.iter().map(|&s| (fixed, s)).collect();
    let along_d: Vec<(f64, f64)> = diag.iter().map(|&s| (s, s)).collect();
    let first = |a: f64, _: f64| a;
    let second = |_: f64, b: f64| b;
    let th43 = |t: &ThetaTable| t.theta(&ch("43"));
    let th33 = |t: &ThetaTable| t.theta(&ch("33"));
    let report = BananaReport {
        omega_s1: regress(sample(&along_s1, first, p, &opts, om)?, 1.25),
        omega_s2: regress(sample(&along_s2, second, p, &opts, om)?, 1.25),
        omega_diagonal: regress(sample(&along_d, first, p, &opts, om)?, 3.5),
        theta_eps1: regress(sample(&along_s1, first, p, &opts, th43)?, 0.125),
        corner_factor: regress(sample(&along_d, first, p, &opts, th33)?, 1.0),
    };
    for (name, f) in [
        ("Ω77 in s₁", &report.omega_s1),
        ("Ω77 in s₂", &report.omega_s2),
        ("Ω77 on the diagonal", &report.omega_diagonal),
        ("θ43 in s₁", &report.theta_eps1),
        ("θ33 on the diagonal", &report.corner_factor),
    ] {
        if !(f.residual <= tol) {
            return Err(Error::Inconclusive(format!("{name}: residual {:.3e} above {tol}", f.residual)));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::expr::Symbol;
    use crate::theta::theta_constant;

    #[test]
    fn period_matrix_shape() {
        let p = BananaFamilyParams::default();
        let s = (-2.0 * PI).exp();
        let t = banana_period_matrix(s, s, &p).unwrap();
        assert!(t.get(0, 0).im >= 2.0 - 0.1);
        assert_eq!(p.c23(0.0, 0.0), Complex64::new(0.0, 0.0));
        assert!(matches!(banana_period_matrix(0.0, 0.01, &p), Err(Error::ParameterRange(_))));
        assert!(matches!(banana_period_matrix(0.01, 0.5, &p), Err(Error::ParameterRange(_))));
        let bad = BananaFamilyParams { tau22: Complex64::new(0.0, -1.0), ..p };
        assert!(matches!(banana_period_matrix(0.01, 0.01, &bad), Err(Error::ParameterRange(_))));
        let q = banana_q(s, s, &p).unwrap();
        assert!(q.norm() < (-PI * 1.9).exp());
    }

    /// θ[0ε″; δ₁δ″] tends to the genus-2 theta θ[ε″; δ″] of the lower block.
    #[test]
    fn eps1_zero_thetas_tend_to_genus_two_values() {
        let p = BananaFamilyParams::default();
        let s = 1e-5;
        let t = banana_period_matrix(s, s, &p).unwrap();
        let opts = ThetaOptions::with_tol(1e-12);
        let lower = PeriodMatrix::new(2, vec![p.tau22, p.c23(s, s), p.c23(s, s), p.tau33]).unwrap();
        for l in ["00", "04", "12", "21", "16"] {
            let full = theta_constant(&ch(l), &t, &opts).unwrap().value;
            let small = theta_constant(&genus_two(l), &lower, &opts).unwrap().value;
            assert!((full - small).norm() < 1e-2, "{l}: {full} vs {small}");
        }
    }

    /// Drops the first row of a genus-3 characteristic with ε₁ = 0.
    fn genus_two(l: &str) -> crate::chars::Characteristic {
        let m = ch(l);
        let e = [m.eps_bit(1), m.eps_bit(2)];
        let d = [m.delta_bit(1), m.delta_bit(2)];
        crate::chars::Characteristic::from_bits(&e, &d).unwrap()
    }

    #[test]
    fn every_omega_monomial_carries_the_corner_factor() {
        let e = expand_symbolic_omega();
        for (m, _) in e.terms() {
            assert!(m.contains(&Symbol::theta("33")) || m.contains(&Symbol::theta("37")));
        }
    }

    #[test]
    fn exponents_near_the_corner() {
        let r = banana_exponent_check(&BananaFamilyParams::default(), 0.05).unwrap();
        assert!(r.omega_diagonal.within(0.1), "{:?}", r.omega_diagonal.slope);
        assert!(r.theta_eps1.within(0.01), "{}", r.theta_eps1.slope);
        assert!(r.omega_s1.within(0.05), "{}", r.omega_s1.slope);
        assert!(r.omega_s2.within(0.05), "{}", r.omega_s2.slope);
        assert!(r.corner_factor.within(0.05), "{}", r.corner_factor.slope);
    }

    #[test]
    fn coarse_grid_is_inconclusive() {
        let r = banana_exponent_check_on(&BananaFamilyParams::default(), 0.05, 2);
        assert!(matches!(r, Err(Error::Inconclusive(_))));
    }
}
