use crate::error::Result;
use crate::quartic::{guarded_table, reconstruct_quartic_from_table, HomPoly, LinearForm, TernaryQuartic};
use crate::theta::{CertifiedComplex, PeriodMatrix, ThetaOptions, ThetaTable};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Basis of S²: x², y², z², xy, xz, yz.
pub const QUADRATIC_BASIS: [[u32; 3]; 6] = [[2, 0, 0], [0, 2, 0], [0, 0, 2], [1, 1, 0], [1, 0, 1], [0, 1, 1]];

/// α₁!·α₂!·α₃!, the factor turning a coefficient into the matching fourth partial.
pub fn partial_factor(e: [u32; 3]) -> u64 {
    e.iter().map(|&k| (1..=k as u64).product::<u64>()).product()
}

/// The 6×6 apolar matrix of a quartic: entry (u, v) = ∂^{u+v}F.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalecticantMatrix {
    pub entries: [[CertifiedComplex; 6]; 6],
}

pub fn catalecticant_matrix(f: &TernaryQuartic) -> CatalecticantMatrix {
    let mut entries = [[CertifiedComplex::zero(); 6]; 6];
    for (i, u) in QUADRATIC_BASIS.iter().enumerate() {
        for (j, v) in QUADRATIC_BASIS.iter().enumerate() {
            let e = [u[0] + v[0], u[1] + v[1], u[2] + v[2]];
            entries[i][j] = f.poly.coeff(e).scale(Complex64::new(partial_factor(e) as f64, 0.0));
        }
    }
    CatalecticantMatrix { entries }
}

impl CatalecticantMatrix {
    pub fn values(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(6, 6, |i, j| self.entries[i][j].value)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().flatten().map(|c| c.value.norm()).fold(0.0, f64::max)
    }

    /// Full permutation expansion with the error of every product carried along.
    pub fn determinant(&self) -> CertifiedComplex {
        let mut total = CertifiedComplex::zero();
        let mut perm = [0usize, 1, 2, 3, 4, 5];
        heap_permutations(&mut perm, 6, &mut |p, sign| {
            let mut t = CertifiedComplex::one();
            for (r, &c) in p.iter().enumerate() {
                t = t * self.entries[r][c];
            }
            total = total + if sign { t } else { -t };
        });
        total
    }

    /// Singular values, largest first.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.values().singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    /// Number of singular values above `rel_tol` times the largest.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let s = self.singular_values();
        let top = s[0];
        if top == 0.0 {
            return 0;
        }
        s.iter().filter(|&&x| x > rel_tol * top).count()
    }
}

/// Heap's algorithm; the flag is true for even permutations.
fn heap_permutations(a: &mut [usize; 6], k: usize, f: &mut impl FnMut(&[usize; 6], bool)) {
    fn go(a: &mut [usize; 6], k: usize, even: &mut bool, f: &mut impl FnMut(&[usize; 6], bool)) {
        if k == 1 {
            f(a, *even);
            return;
        }
        go(a, k - 1, even, f);
        for i in 0..k - 1 {
            if k % 2 == 0 {
                a.swap(i, k - 1);
            } else {
                a.swap(0, k - 1);
            }
            *even = !*even;
            go(a, k - 1, even, f);
        }
    }
    let mut even = true;
    go(a, k, &mut even, f);
}

#[derive(Debug, Clone, Serialize)]
pub struct ClebschVerdict {
    pub is_clebsch: bool,
    pub det_abs: f64,
    /// |det| / max|entry|⁶.
    pub scaled_det: f64,
    pub det_err: f64,
    pub rank: usize,
    pub singular_values: Vec<f64>,
}

/// Clebsch iff det Cat₂(F) vanishes; the test is |det| ≤ tol·max|entry|⁶.
pub fn is_clebsch(f: &TernaryQuartic, tol: f64) -> ClebschVerdict {
    let m = catalecticant_matrix(f);
    let d = m.determinant();
    let scale = m.max_abs().powi(6);
    let scaled = if scale > 0.0 { d.value.norm() / scale } else { 0.0 };
    let sv = m.singular_values();
    ClebschVerdict {
        is_clebsch: scaled <= tol,
        det_abs: d.value.norm(),
        scaled_det: scaled,
        det_err: d.err,
        rank: m.rank(tol.sqrt().max(1e-10)),
        singular_values: sv,
    }
}

/// Five linear forms whose fourth powers sum to a Clebsch quartic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarPentagon {
    pub forms: [[Complex64; 3]; 5],
}

/// Σ ℓᵢ⁴.
pub fn pentagon_quartic(p: &PolarPentagon) -> TernaryQuartic {
    power_sum(&p.forms)
}

/// Σ ℓᵢ⁴ for any number of forms.
pub fn power_sum(forms: &[[Complex64; 3]]) -> TernaryQuartic {
    let mut poly = HomPoly::zero(4);
    for l in forms {
        poly = poly.add(&TernaryQuartic::power_of_line(&LinearForm::new(*l)).poly);
    }
    TernaryQuartic { poly }
}

/// det Cat₂ of the quartic reconstructed from the theta data in `table`.
pub fn clebsch_from_table(table: &ThetaTable) -> CertifiedComplex {
    catalecticant_matrix(&reconstruct_quartic_from_table(table)).determinant()
}

/// The modular form det Cat₂(F), F = (af)² + (be)² + (cd)² − 2afbe − 2becd − 2afcd.
pub fn clebsch_modular_form(tau: &PeriodMatrix, opts: &ThetaOptions) -> Result<CertifiedComplex> {
    Ok(clebsch_from_table(&guarded_table(tau, opts)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theta::{act_on_tau, random_gamma_4_8, random_tau_near_identity};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn random_form(rng: &mut ChaCha8Rng) -> [Complex64; 3] {
        std::array::from_fn(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    fn random_quartic(rng: &mut ChaCha8Rng) -> TernaryQuartic {
        let coeffs: Vec<Complex64> = (0..15).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
        TernaryQuartic::from_coefficients(&coeffs).unwrap()
    }

    fn fermat() -> TernaryQuartic {
        power_sum(&[[c(1.0), c(0.0), c(0.0)], [c(0.0), c(1.0), c(0.0)], [c(0.0), c(0.0), c(1.0)]])
    }

    #[test]
    fn fourth_power_has_rank_one() {
        let m = catalecticant_matrix(&power_sum(&[[c(1.0), c(0.0), c(0.0)]]));
        assert_eq!(m.rank(1e-10), 1);
        assert_eq!(m.entries[0][0].value, c(24.0));
    }

    #[test]
    fn fermat_has_rank_three_and_vanishing_determinant() {
        let m = catalecticant_matrix(&fermat());
        assert_eq!(m.rank(1e-10), 3);
        assert_eq!(m.determinant().value, c(0.0));
        assert!(is_clebsch(&fermat(), 1e-8).is_clebsch);
    }

    #[test]
    fn matrix_is_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = catalecticant_matrix(&random_quartic(&mut rng));
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(m.entries[i][j].value, m.entries[j][i].value);
            }
        }
    }

    #[test]
    fn random_quartics_are_not_clebsch() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let v = is_clebsch(&random_quartic(&mut rng), 1e-8);
            assert!(!v.is_clebsch, "scaled det {}", v.scaled_det);
            assert_eq!(v.rank, 6);
        }
    }

    #[test]
    fn pentagon_quartics_are_clebsch() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let p = PolarPentagon { forms: std::array::from_fn(|_| random_form(&mut rng)) };
            let v = is_clebsch(&pentagon_quartic(&p), 1e-8);
            assert!(v.is_clebsch, "scaled det {}", v.scaled_det);
            assert!(v.rank <= 5);
        }
    }

    #[test]
    fn pentagon_with_one_nonzero_form_is_its_fourth_power() {
        let z = [c(0.0); 3];
        let p = PolarPentagon { forms: [[c(1.0), c(0.0), c(0.0)], z, z, z, z] };
        let f = pentagon_quartic(&p);
        assert_eq!(f.coefficient([4, 0, 0]), c(1.0));
        assert!(f.coefficients().iter().filter(|x| x.norm() > 0.0).count() == 1);
    }

    #[test]
    fn pentagon_order_does_not_matter() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let forms: [[Complex64; 3]; 5] = std::array::from_fn(|_| random_form(&mut rng));
        let mut rev = forms;
        rev.reverse();
        let a = pentagon_quartic(&PolarPentagon { forms }).coefficients();
        let b = pentagon_quartic(&PolarPentagon { forms: rev }).coefficients();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn catalecticant_is_linear() {
        // small integer coefficients keep every entry exact
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut int_quartic = || {
            let v: Vec<Complex64> = (0..15).map(|_| Complex64::new(rng.random_range(-9..=9) as f64, rng.random_range(-9..=9) as f64)).collect();
            TernaryQuartic::from_coefficients(&v).unwrap()
        };
        let (f, g) = (int_quartic(), int_quartic());
        let sum = catalecticant_matrix(&f.add(&g));
        let (mf, mg) = (catalecticant_matrix(&f), catalecticant_matrix(&g));
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(sum.entries[i][j].value, mf.entries[i][j].value + mg.entries[i][j].value);
            }
        }
    }

    /// k with |det Cat₂(F∘M)| = |det M|^k |det Cat₂(F)|, measured on random M.
    fn substitution_exponent(seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // seven fourth powers give a generic quartic, and F∘M is again a power sum
        let forms: Vec<[Complex64; 3]> = (0..7).map(|_| random_form(&mut rng)).collect();
        let m = nalgebra::Matrix3::from_fn(|_, _| Complex64::new(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5)));
        let moved: Vec<[Complex64; 3]> = forms
            .iter()
            .map(|l| std::array::from_fn(|j| (0..3).map(|i| l[i] * m[(i, j)]).sum()))
            .collect();
        let before = catalecticant_matrix(&power_sum(&forms)).determinant().value.norm();
        let after = catalecticant_matrix(&power_sum(&moved)).determinant().value.norm();
        (after / before).ln() / m.determinant().norm().ln()
    }

    #[test]
    fn determinant_is_a_relative_invariant() {
        let ks: Vec<f64> = (0..6).map(substitution_exponent).collect();
        let k = ks[0].round();
        for x in &ks {
            assert!((x - k).abs() < 1e-6, "{ks:?}");
        }
        // two copies of det S²M = det(M)⁴
        assert_eq!(k, 8.0);
    }

    #[test]
    fn modular_form_is_finite_and_nonzero_at_a_generic_point() {
        let i = Complex64::i();
        let e = |a: usize, b: usize| if a == b { i + 0.1 } else { c(0.1) };
        let tau = PeriodMatrix::new(3, (0..9).map(|k| e(k / 3, k % 3)).collect()).unwrap();
        let v = clebsch_modular_form(&tau, &ThetaOptions::with_tol(1e-13)).unwrap();
        assert!(v.value.is_finite());
        assert!(v.value.norm() > 100.0 * v.err, "{v:?}");
    }

    #[test]
    fn absolute_value_has_weight_56_under_gamma_4_8() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let tau = random_tau_near_identity(&mut rng, 0.2);
        let o = ThetaOptions { tol: 1e-13, max_radius: 200.0 };
        let base = clebsch_modular_form(&tau, &o).unwrap().value.norm();
        let mut done = 0;
        while done < 3 {
            let g = random_gamma_4_8(&mut rng, 3, 2);
            let Ok((gt, det)) = act_on_tau(&g, &tau) else { continue };
            if gt.lambda_min() < 0.05 {
                continue;
            }
            let v = clebsch_modular_form(&gt, &o).unwrap().value.norm();
            let want = det.norm().powi(56) * base;
            assert!((v - want).abs() < 1e-5 * want, "{v} vs {want}");
            done += 1;
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn rank_is_at_most_the_number_of_powers(k in 1usize..=6, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let forms: Vec<[Complex64; 3]> = (0..k).map(|_| random_form(&mut rng)).collect();
            prop_assert!(catalecticant_matrix(&power_sum(&forms)).rank(1e-9) <= k);
        }
    }
}
