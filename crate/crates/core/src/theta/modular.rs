use super::PeriodMatrix;
use crate::chars::SymplecticMatrix;
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

fn block(g: usize, v: &[i64]) -> DMatrix<Complex64> {
    DMatrix::from_fn(g, g, |i, j| Complex64::new(v[i * g + j] as f64, 0.0))
}

/// γ·τ = (Aτ + B)(Cτ + D)⁻¹ together with det(Cτ + D).
pub fn act_on_tau(gamma: &SymplecticMatrix, tau: &PeriodMatrix) -> Result<(PeriodMatrix, Complex64)> {
    let g = tau.genus();
    if gamma.g != g {
        return Err(Error::UnsupportedDimension(format!("γ has genus {}, τ has genus {g}", gamma.g)));
    }
    if !gamma.is_symplectic() {
        return Err(Error::InvalidElement("matrix is not symplectic".into()));
    }
    let t = tau.to_matrix();
    let num = block(g, &gamma.a) * &t + block(g, &gamma.b);
    let den = block(g, &gamma.c) * &t + block(g, &gamma.d);
    let det = den.determinant();
    let inv = den
        .try_inverse()
        .ok_or_else(|| Error::InternalConsistency("Cτ + D is singular".into()))?;
    let out = num * inv;
    let entries = (0..g * g).map(|k| out[(k / g, k % g)]).collect();
    Ok((PeriodMatrix::new(g, entries)?, det))
}

/// A random word in standard generators of Γ(4,8): translations by 4(E_ij + E_ji)
/// and 8E_ii in both corners, and I + 4E_ij in GL.
pub fn random_gamma_4_8<R: Rng>(rng: &mut R, g: usize, len: usize) -> SymplecticMatrix {
    let mut acc = SymplecticMatrix::identity(g);
    for _ in 0..len {
        let i = rng.random_range(0..g);
        let j = rng.random_range(0..g);
        let sign = if rng.random_bool(0.5) { 1 } else { -1 };
        let mut s = vec![0i64; g * g];
        if i == j {
            s[i * g + i] = 8 * sign;
        } else {
            s[i * g + j] = 4 * sign;
            s[j * g + i] = 4 * sign;
        }
        let step = match rng.random_range(0..3) {
            0 => SymplecticMatrix::translation(g, s).expect("symmetric"),
            1 => SymplecticMatrix::lower_translation(g, s).expect("symmetric"),
            _ if i != j => SymplecticMatrix::elementary_gl(g, i, j, 4 * sign),
            _ => continue,
        };
        acc = acc.mul(&step);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chars::Characteristic;
    use crate::theta::{random_tau_near_identity, ThetaOptions, ThetaTable};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sampled_elements_lie_in_gamma_4_8() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let m = random_gamma_4_8(&mut rng, 3, 4);
            assert!(m.is_symplectic());
            assert!(m.in_gamma_4_8());
        }
    }

    #[test]
    fn inverse_action_returns() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let tau = random_tau_near_identity(&mut rng, 0.2);
        let s = SymplecticMatrix::block_swap(3).mul(&SymplecticMatrix::elementary_gl(3, 0, 2, 1));
        let (t1, _) = act_on_tau(&s, &tau).unwrap();
        let (t2, _) = act_on_tau(&s.inverse(), &t1).unwrap();
        for k in 0..9 {
            assert!((t2.entries()[k] - tau.entries()[k]).norm() < 1e-12);
        }
    }

    #[test]
    fn theta_ratios_are_gamma_4_8_invariant() {
        // Short words keep γτ in a region where the sums converge quickly.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let tau = random_tau_near_identity(&mut rng, 0.15);
        let s = vec![0, 4, 0, 4, 8, 0, 0, 0, 0];
        let o = ThetaOptions::with_tol(1e-13);
        let a = ThetaTable::compute(&tau, &o).unwrap();
        let base = Characteristic::zero(3);
        for gamma in [
            SymplecticMatrix::translation(3, s.clone()).unwrap(),
            SymplecticMatrix::lower_translation(3, s).unwrap(),
        ] {
            let (gt, det) = act_on_tau(&gamma, &tau).unwrap();
            // The lower translation lands at small Im τ, so allow a wide ellipsoid.
            let b = ThetaTable::compute(&gt, &ThetaOptions { max_radius: 200.0, ..o }).unwrap();
            for m in Characteristic::all(3).into_iter().filter(|m| m.is_even()) {
                let r0 = a.theta(&m).value / a.theta(&base).value;
                let r1 = b.theta(&m).value / b.theta(&base).value;
                assert!((r0 - r1).norm() < 1e-8, "{m}");
            }
            // θ² has weight one up to a fourth root of unity.
            let w = (b.theta(&base).value / a.theta(&base).value).powi(2) / det;
            let k = (0..4).map(|j| Complex64::new(0.0, 1.0).powi(j)).any(|u| (w - u).norm() < 1e-8);
            assert!(k, "{w}");
        }
    }
}
