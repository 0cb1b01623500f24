use super::{det3, theta_gradient, CertifiedComplex, PeriodMatrix, ThetaOptions, ThetaTable};
use crate::chars::{complete_fundamental_system, is_azygetic, Characteristic};
use crate::error::{Error, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{OnceLock, RwLock};

/// Seed of the fixed perturbation in the sign-resolution base point.
pub const SIGN_BASE_SEED: u64 = 0x7e7a_5eed;

/// D(n₁,n₂,n₃) = det[b_{n₁}; b_{n₂}; b_{n₃}] from independent gradient evaluations.
pub fn jacobian_determinant(
    n1: &Characteristic,
    n2: &Characteristic,
    n3: &Characteristic,
    tau: &PeriodMatrix,
    opts: &ThetaOptions,
) -> Result<CertifiedComplex> {
    require_odd(&[*n1, *n2, *n3])?;
    if tau.genus() != 3 {
        return Err(Error::UnsupportedDimension("Jacobian determinants are genus 3".into()));
    }
    let row = |m: &Characteristic| -> Result<[CertifiedComplex; 3]> {
        let g = theta_gradient(m, tau, opts)?;
        Ok([g.components[0], g.components[1], g.components[2]])
    };
    Ok(det3(&[row(n1)?, row(n2)?, row(n3)?]))
}

/// D(n₁,n₂,n₃) from a precomputed table.
pub fn jacobian_from_table(table: &ThetaTable, n: &[Characteristic; 3]) -> CertifiedComplex {
    det3(&[table.grad_row(&n[0]), table.grad_row(&n[1]), table.grad_row(&n[2])])
}

fn require_odd(ns: &[Characteristic]) -> Result<()> {
    if let Some(m) = ns.iter().find(|m| !m.is_odd()) {
        return Err(Error::Precondition(format!("{m} is not odd")));
    }
    Ok(())
}

/// i·I₃ + 0.1·E with E a fixed complex symmetric matrix, entries in [−1, 1].
pub fn sign_base_point() -> PeriodMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(SIGN_BASE_SEED);
    let mut e = vec![Complex64::new(0.0, 0.0); 9];
    for i in 0..3 {
        for j in i..3 {
            let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * 0.1;
            e[i * 3 + j] = z;
            e[j * 3 + i] = z;
        }
        e[i * 3 + i] += Complex64::new(0.0, 1.0);
    }
    PeriodMatrix::new(3, e).expect("base point is in Siegel space")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignEntry {
    pub sign: i8,
    /// D / (π³∏θ) at the base point; ±1 up to rounding.
    pub ratio_at_base: [f64; 2],
    pub base_seed: u64,
}

static SIGN_CACHE: OnceLock<RwLock<HashMap<[Characteristic; 3], SignEntry>>> = OnceLock::new();

/// The sign s with D(n₁,n₂,n₃) = s·π³·∏θ_quintuple, resolved at the base point
/// and cached per ordered triple.
pub fn jacobi_sign(triple: &[Characteristic; 3]) -> Result<SignEntry> {
    let cache = SIGN_CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(e) = cache.read().expect("sign cache poisoned").get(triple) {
        return Ok(*e);
    }
    let entry = resolve_sign(triple)?;
    // A racing writer computes the same deterministic entry.
    cache.write().expect("sign cache poisoned").entry(*triple).or_insert(entry);
    Ok(entry)
}

fn resolve_sign(triple: &[Characteristic; 3]) -> Result<SignEntry> {
    let quint = complete_fundamental_system(*triple)?;
    let tau = sign_base_point();
    let table = ThetaTable::compute(&tau, &ThetaOptions::with_tol(1e-14))?;
    let d = jacobian_from_table(&table, triple);
    let p = CertifiedComplex::product(quint.iter().map(|m| table.thetas[m.index()]).collect::<Vec<_>>().iter())
        .scale(Complex64::new(PI.powi(3), 0.0));
    let plus = (d - p).norm();
    let minus = (d + p).norm();
    let slack = d.err + p.err;
    let sign = if plus <= slack && minus > slack {
        1
    } else if minus <= slack && plus > slack {
        -1
    } else {
        return Err(Error::PrecisionExhausted(format!(
            "cannot resolve the Jacobi sign of ({}, {}, {}): |D−P|={plus:e}, |D+P|={minus:e}, err={slack:e}",
            triple[0], triple[1], triple[2]
        )));
    };
    let ratio = d.value / p.value;
    Ok(SignEntry { sign, ratio_at_base: [ratio.re, ratio.im], base_seed: SIGN_BASE_SEED })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JacobiProduct {
    pub value: CertifiedComplex,
    pub sign: i8,
    pub quintuple: [Characteristic; 5],
}

/// ±π³·∏θ over the completing quintuple, sign resolved numerically.
pub fn jacobi_product(
    n1: &Characteristic,
    n2: &Characteristic,
    n3: &Characteristic,
    tau: &PeriodMatrix,
    opts: &ThetaOptions,
) -> Result<JacobiProduct> {
    let table = ThetaTable::compute(tau, opts)?;
    jacobi_from_table(&table, &[*n1, *n2, *n3])
}

pub fn jacobi_from_table(table: &ThetaTable, triple: &[Characteristic; 3]) -> Result<JacobiProduct> {
    require_odd(triple)?;
    if !is_azygetic(&triple[0], &triple[1], &triple[2]) {
        return Err(Error::Precondition("triple is not azygetic".into()));
    }
    let quintuple = complete_fundamental_system(*triple)?;
    let s = jacobi_sign(triple)?;
    let p = CertifiedComplex::product(quintuple.iter().map(|m| table.thetas[m.index()]).collect::<Vec<_>>().iter());
    Ok(JacobiProduct {
        value: p.scale(Complex64::new(s.sign as f64 * PI.powi(3), 0.0)),
        sign: s.sign,
        quintuple,
    })
}

/// A τ near i·I₃: i·I + scale·(X + iY), X, Y symmetric with entries in [−1, 1].
pub fn random_tau_near_identity<R: Rng>(rng: &mut R, scale: f64) -> PeriodMatrix {
    loop {
        let mut e = vec![Complex64::new(0.0, 0.0); 9];
        for i in 0..3 {
            for j in i..3 {
                let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale;
                e[i * 3 + j] = z;
                e[j * 3 + i] = z;
            }
            e[i * 3 + i] += Complex64::new(0.0, 1.0);
        }
        if let Ok(t) = PeriodMatrix::new(3, e) {
            return t;
        }
    }
}
