use super::reconstruct::guarded_table;
use crate::chars::{ch, complete_fundamental_system, find_transporter, standard_generators, Characteristic, SymplecticMatrix};
use crate::error::{Error, Result};
use crate::theta::{jacobi_from_table, jacobian_from_table, CertifiedComplex, PeriodMatrix, ThetaOptions, ThetaTable};
use num_rational::Rational64;
use serde::Serialize;
use std::f64::consts::PI;

/// (β·D(p₀) + s·γ·D(p₁))² + t·4βγ·D(q₀)·D(q₁), with β and γ products of six
/// theta constants and s, t = ±1.
///
/// The printed hyperflex form has s = +1, t = −1 and pairs D(77,64,13) with
/// D(77,51,26). The form whose zeros are hyperflexes of the line a = 0 is
/// [`BitangentForm::corrected`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BitangentForm {
    pub beta: [Characteristic; 6],
    pub gamma: [Characteristic; 6],
    pub p: [[Characteristic; 3]; 2],
    pub q: [[Characteristic; 3]; 2],
    pub inner_sign: i8,
    pub outer_sign: i8,
}

fn chars<const N: usize>(labels: [&str; N]) -> [Characteristic; N] {
    labels.map(ch)
}

const BETA: [&str; 6] = ["01", "10", "37", "43", "52", "75"];
const GAMMA: [&str; 6] = ["02", "25", "34", "40", "67", "76"];

impl BitangentForm {
    pub fn printed() -> Self {
        Self {
            beta: chars(BETA),
            gamma: chars(GAMMA),
            p: [chars(["77", "64", "13"]), chars(["77", "51", "26"])],
            q: [chars(["77", "64", "51"]), chars(["77", "13", "26"])],
            inner_sign: 1,
            outer_sign: -1,
        }
    }

    pub fn corrected() -> Self {
        Self {
            beta: chars(BETA),
            gamma: chars(GAMMA),
            p: [chars(["77", "64", "26"]), chars(["77", "51", "13"])],
            q: [chars(["77", "64", "51"]), chars(["77", "26", "13"])],
            inner_sign: -1,
            outer_sign: 1,
        }
    }

    /// Every characteristic replaced by its image under γ.
    pub fn transport(&self, g: &SymplecticMatrix) -> Self {
        Self {
            beta: self.beta.map(|m| g.act(&m)),
            gamma: self.gamma.map(|m| g.act(&m)),
            p: self.p.map(|t| t.map(|m| g.act(&m))),
            q: self.q.map(|t| t.map(|m| g.act(&m))),
            inner_sign: self.inner_sign,
            outer_sign: self.outer_sign,
        }
    }

    /// 12 theta constants of weight ½ and two Jacobian determinants of weight 5/2.
    pub fn weight(&self) -> Rational64 {
        Rational64::new(12, 2) + Rational64::new(2 * 5, 2)
    }

    /// The odd characteristic whose bitangent the form tests (shared by all four D's).
    pub fn line(&self) -> Option<Characteristic> {
        let c = self.p[0][0];
        self.p.iter().chain(&self.q).all(|t| t.contains(&c)).then_some(c)
    }

    pub fn triples(&self) -> [[Characteristic; 3]; 4] {
        [self.p[0], self.p[1], self.q[0], self.q[1]]
    }

    /// Evaluation with D taken from the gradients directly.
    pub fn eval_table(&self, t: &ThetaTable) -> CertifiedComplex {
        self.combine(t, |tr| jacobian_from_table(t, tr))
    }

    /// Evaluation with each D replaced by its Jacobi product ±π³∏θ.
    pub fn eval_table_jacobi(&self, t: &ThetaTable) -> Result<CertifiedComplex> {
        let mut ds = Vec::with_capacity(4);
        for tr in self.triples() {
            ds.push(jacobi_from_table(t, &tr)?.value);
        }
        Ok(self.combine(t, |tr| ds[self.triples().iter().position(|x| x == tr).unwrap()]))
    }

    fn combine<F: Fn(&[Characteristic; 3]) -> CertifiedComplex>(&self, t: &ThetaTable, dfun: F) -> CertifiedComplex {
        let prod = |ms: &[Characteristic]| ms.iter().fold(CertifiedComplex::one(), |a, m| a * t.theta(m));
        let beta = prod(&self.beta);
        let gamma = prod(&self.gamma);
        let inner = beta * dfun(&self.p[0]) + (gamma * dfun(&self.p[1])).scale((self.inner_sign as f64).into());
        let outer = (beta * gamma * dfun(&self.q[0]) * dfun(&self.q[1])).scale((4.0 * self.outer_sign as f64).into());
        inner * inner + outer
    }
}

/// Ω77 evaluated two ways.
#[derive(Debug, Clone, Serialize)]
pub struct Omega77Value {
    /// The defining expression with Jacobi products for the four determinants.
    pub value: CertifiedComplex,
    /// The theta-monomial display (its value times π⁶ should equal `value`).
    pub display: CertifiedComplex,
    /// The defining expression with determinants of gradients.
    pub direct: CertifiedComplex,
    pub signs: [i8; 4],
    pub quintuples: [[Characteristic; 5]; 4],
}

impl Omega77Value {
    /// |value − π⁶·display| / |value|.
    pub fn display_defect(&self) -> f64 {
        (self.value.value - self.display.value * PI.powi(6)).norm() / self.value.value.norm()
    }
}

/// The theta-monomial display of the hyperflex form.
pub fn omega77_display(t: &ThetaTable) -> CertifiedComplex {
    let p = |ls: &[&str]| ls.iter().fold(CertifiedComplex::one(), |a, l| a * t.theta(&ch(l)));
    let s = p(&["01", "10", "37", "43", "52", "75", "42", "06", "30", "21", "55"])
        + p(&["02", "25", "34", "40", "67", "76", "33", "05", "14", "60", "42"]);
    let r = p(&[
        "01", "02", "10", "25", "34", "37", "40", "43", "52", "67", "75", "76", "00", "04", "57", "70", "61", "73", "20", "07",
        "00", "16",
    ]);
    s * s - r.scale(4.0.into())
}

pub fn omega77_from_table(t: &ThetaTable) -> Result<Omega77Value> {
    let form = BitangentForm::printed();
    let mut signs = [0i8; 4];
    let mut quintuples = [[Characteristic::zero(3); 5]; 4];
    for (k, tr) in form.triples().iter().enumerate() {
        let j = jacobi_from_table(t, tr)?;
        signs[k] = j.sign;
        quintuples[k] = j.quintuple;
    }
    Ok(Omega77Value {
        value: form.eval_table_jacobi(t)?,
        display: omega77_display(t),
        direct: form.eval_table(t),
        signs,
        quintuples,
    })
}

pub fn omega77(tau: &PeriodMatrix, opts: &ThetaOptions) -> Result<Omega77Value> {
    omega77_from_table(&guarded_table(tau, opts)?)
}

/// The corrected hyperflex form Ω′ at τ.
pub fn hyperflex_form(tau: &PeriodMatrix, opts: &ThetaOptions) -> Result<CertifiedComplex> {
    Ok(BitangentForm::corrected().eval_table(&guarded_table(tau, opts)?))
}

/// A symplectic γ with γ∘77 = target.
pub fn transporter_to(target: &Characteristic) -> Result<SymplecticMatrix> {
    if !target.is_odd() {
        return Err(Error::Precondition(format!("{target} is not odd")));
    }
    let gens = standard_generators(3);
    find_transporter(&ch("77"), target, &gens)
}

/// `form` with its labels moved so that it tests the bitangent of `target`.
pub fn transported_form(form: &BitangentForm, target: &Characteristic) -> Result<BitangentForm> {
    Ok(form.transport(&transporter_to(target)?))
}

/// Ω_m: the printed form relabeled by a γ with γ∘77 = m.
pub fn omega_m(tau: &PeriodMatrix, target: &Characteristic, opts: &ThetaOptions) -> Result<CertifiedComplex> {
    let f = transported_form(&BitangentForm::printed(), target)?;
    Ok(f.eval_table(&guarded_table(tau, opts)?))
}

/// Quintuples completing each triple of `form`; these are fundamental systems.
pub fn form_quintuples(form: &BitangentForm) -> Result<Vec<[Characteristic; 5]>> {
    form.triples().iter().map(|t| complete_fundamental_system(*t)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chars::is_fundamental_system;
    use crate::quartic::{aronhold_forms_from_table, psi};
    use crate::theta::{act_on_tau, random_gamma_4_8, random_tau_near_identity};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn table(tau: &PeriodMatrix) -> ThetaTable {
        guarded_table(tau, &ThetaOptions::with_tol(1e-13)).unwrap()
    }

    #[test]
    fn printed_quintuples_are_recovered() {
        let q = form_quintuples(&BitangentForm::printed()).unwrap();
        let want = [
            ["42", "06", "30", "21", "55"],
            ["33", "05", "14", "60", "42"],
            ["00", "04", "57", "70", "61"],
            ["73", "20", "07", "00", "16"],
        ];
        for (got, w) in q.iter().zip(want) {
            let mut a: Vec<_> = got.to_vec();
            let mut b: Vec<_> = w.iter().map(|l| ch(l)).collect();
            a.sort();
            b.sort();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn weight_is_eleven() {
        assert_eq!(BitangentForm::printed().weight(), Rational64::from_integer(11));
        assert_eq!(BitangentForm::corrected().weight(), Rational64::from_integer(11));
    }

    #[test]
    fn display_agrees_with_defining_expression() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..4 {
            let v = omega77_from_table(&table(&random_tau_near_identity(&mut rng, 0.3))).unwrap();
            assert!(v.display_defect() < 1e-6, "{}", v.display_defect());
            assert!((v.value.value - v.direct.value).norm() < 1e-8 * v.value.value.norm());
        }
    }

    #[test]
    fn corrected_form_matches_tangency_discriminant() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..4 {
            let t = table(&random_tau_near_identity(&mut rng, 0.3));
            let f = aronhold_forms_from_table(&t);
            let lhs = psi(&f.a, &f.b, &f.c, &f.e, &f.d.neg()).unwrap().value;
            let alpha = t.theta(&ch("66")) * t.theta(&ch("41")) * t.theta(&ch("50"));
            let rhs = (alpha * alpha * BitangentForm::corrected().eval_table(&t)).value;
            assert!((lhs - rhs).norm() < 1e-8 * lhs.norm());
        }
    }

    #[test]
    fn transport_to_self_is_identity_and_keeps_fundamental_systems() {
        let f = transported_form(&BitangentForm::printed(), &ch("77")).unwrap();
        assert_eq!(f.line(), Some(ch("77")));
        for m in Characteristic::all(3).into_iter().filter(|m| m.is_odd()).take(8) {
            let g = transported_form(&BitangentForm::printed(), &m).unwrap();
            assert_eq!(g.line(), Some(m));
            for (tr, q) in g.triples().iter().zip(form_quintuples(&g).unwrap()) {
                let mut all = tr.to_vec();
                all.extend(q);
                assert!(is_fundamental_system(&all));
            }
        }
    }

    #[test]
    fn automorphy_under_gamma_4_8() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let tau = random_tau_near_identity(&mut rng, 0.2);
        let o = ThetaOptions { tol: 1e-13, max_radius: 200.0 };
        let base = omega_m(&tau, &ch("77"), &o).unwrap().value.norm();
        let mut done = 0;
        while done < 3 {
            let g = random_gamma_4_8(&mut rng, 3, 2);
            let Ok((gt, det)) = act_on_tau(&g, &tau) else { continue };
            if gt.lambda_min() < 0.05 {
                continue;
            }
            let v = omega_m(&gt, &ch("77"), &o).unwrap().value.norm();
            let want = det.norm().powi(11) * base;
            assert!((v - want).abs() < 1e-5 * want, "{v} vs {want}");
            done += 1;
        }
    }
}
