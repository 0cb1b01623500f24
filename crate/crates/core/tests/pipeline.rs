use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thetaflex::catalecticant::{catalecticant_matrix, clebsch_modular_form, is_clebsch};
use thetaflex::chars::enumerate_counts;
use thetaflex::quartic::*;
use thetaflex::theta::{random_tau_near_identity, ThetaOptions};

fn taus(n: usize) -> Vec<thetaflex::theta::PeriodMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    (0..n).map(|_| random_tau_near_identity(&mut rng, 0.2)).collect()
}

#[test]
fn aronhold_lines_are_bitangents_of_the_reconstructed_quartic() {
    let opts = ThetaOptions::with_tol(1e-12);
    for tau in taus(5) {
        let forms = aronhold_forms(&tau, &opts).unwrap();
        let q = stripped_quartic(&forms);
        for l in forms.as_array() {
            let r = hyperflex_test(&q, &l, 1e-4).unwrap();
            assert_eq!(r.verdict, Tangency::BitangentOnly, "{r:?}");
        }
    }
}

#[test]
fn clebsch_form_is_det_of_reconstructed_catalecticant() {
    let opts = ThetaOptions::with_tol(1e-12);
    for tau in taus(3) {
        let q = reconstruct_quartic(&tau, &opts).unwrap();
        let direct = catalecticant_matrix(&q).determinant().value;
        let form = clebsch_modular_form(&tau, &opts).unwrap().value;
        assert!((direct - form).norm() <= 1e-9 * direct.norm(), "{direct} vs {form}");
        assert!(!is_clebsch(&q, 1e-8).is_clebsch);
    }
}

#[test]
fn characteristic_counts() {
    let c = enumerate_counts();
    assert_eq!((c.odd, c.even), (28, 36));
    assert_eq!(c.boundary_split, (16, 12));
}
