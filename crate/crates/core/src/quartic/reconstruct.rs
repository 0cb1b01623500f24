use super::poly::{HomPoly, LinearForm, TernaryQuartic};
use crate::chars::{ch, Characteristic};
use crate::error::{Error, Result};
use crate::theta::{jacobian_from_table, CertifiedComplex, PeriodMatrix, ThetaOptions, ThetaTable, HYPERELLIPTIC_GUARD};
use serde::Serialize;

/// Theta table at τ after the hyperelliptic guard.
pub fn guarded_table(tau: &PeriodMatrix, opts: &ThetaOptions) -> Result<ThetaTable> {
    if tau.genus() != 3 {
        return Err(Error::UnsupportedDimension("plane quartics need genus 3".into()));
    }
    let t = ThetaTable::compute(tau, opts)?;
    t.check_guard(HYPERELLIPTIC_GUARD)?;
    Ok(t)
}

/// The gradient covector b_m as a linear form.
pub fn gradient_form(table: &ThetaTable, m: &Characteristic) -> LinearForm {
    LinearForm::certified(table.grad_row(m))
}

fn theta_product(table: &ThetaTable, labels: &[&str]) -> CertifiedComplex {
    labels.iter().fold(CertifiedComplex::one(), |acc, l| acc * table.theta(&ch(l)))
}

fn d(table: &ThetaTable, a: &str, b: &str, c: &str) -> CertifiedComplex {
    jacobian_from_table(table, &[ch(a), ch(b), ch(c)])
}

/// Theta-constant labels and gradient label of each Aronhold letter a…f.
pub const ARONHOLD_LETTERS: [([&str; 3], &str); 6] = [
    (["66", "41", "50"], "77"),
    (["75", "52", "43"], "64"),
    (["40", "76", "67"], "51"),
    (["02", "25", "34"], "13"),
    (["37", "01", "10"], "26"),
    (["24", "12", "03"], "35"),
];

/// The six Aronhold forms a, b, c, d, e, f.
#[derive(Debug, Clone, Serialize)]
pub struct AronholdForms {
    pub a: LinearForm,
    pub b: LinearForm,
    pub c: LinearForm,
    pub d: LinearForm,
    pub e: LinearForm,
    pub f: LinearForm,
}

impl AronholdForms {
    pub fn as_array(&self) -> [LinearForm; 6] {
        [self.a, self.b, self.c, self.d, self.e, self.f]
    }
}

pub fn aronhold_forms_from_table(table: &ThetaTable) -> AronholdForms {
    let f: Vec<LinearForm> = ARONHOLD_LETTERS
        .iter()
        .map(|(ts, g)| gradient_form(table, &ch(g)).scale(theta_product(table, ts)))
        .collect();
    AronholdForms { a: f[0], b: f[1], c: f[2], d: f[3], e: f[4], f: f[5] }
}

/// a = θ66θ41θ50·b77, b = θ75θ52θ43·b64, c = θ40θ76θ67·b51,
/// d = θ02θ25θ34·b13, e = θ37θ01θ10·b26, f = θ24θ12θ03·b35.
pub fn aronhold_forms(tau: &PeriodMatrix, opts: &ThetaOptions) -> Result<AronholdForms> {
    Ok(aronhold_forms_from_table(&guarded_table(tau, opts)?))
}

/// (af)² + (be − cd)² − 2af(be + cd), the quartic with its theta-constant
/// prefactor removed.
pub fn stripped_quartic(f: &AronholdForms) -> TernaryQuartic {
    let p = |l: &LinearForm| l.to_poly();
    let af = p(&f.a).mul(&p(&f.f));
    let be = p(&f.b).mul(&p(&f.e));
    let cd = p(&f.c).mul(&p(&f.d));
    let minus = CertifiedComplex::real(-1.0);
    let conic = be.add(&cd.scale(minus));
    let cross = af.mul(&be.add(&cd)).scale(CertifiedComplex::real(-2.0));
    let poly = af.mul(&af).add(&conic.mul(&conic)).add(&cross);
    TernaryQuartic { poly }
}

pub fn reconstruct_quartic_from_table(table: &ThetaTable) -> TernaryQuartic {
    stripped_quartic(&aronhold_forms_from_table(table))
}

pub fn reconstruct_quartic(tau: &PeriodMatrix, opts: &ThetaOptions) -> Result<TernaryQuartic> {
    Ok(reconstruct_quartic_from_table(&guarded_table(tau, opts)?))
}

/// Symmetric 4×4 matrix of linear forms with zero diagonal.
#[derive(Debug, Clone, Serialize)]
pub struct DpfsmMatrix {
    /// Upper-triangular entries q12, q13, q14, q23, q24, q34.
    pub upper: [LinearForm; 6],
}

impl DpfsmMatrix {
    pub fn entry(&self, i: usize, j: usize) -> Option<LinearForm> {
        if i == j {
            return None;
        }
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        let k = match (i, j) {
            (0, 1) => 0,
            (0, 2) => 1,
            (0, 3) => 2,
            (1, 2) => 3,
            (1, 3) => 4,
            _ => 5,
        };
        Some(self.upper[k])
    }

    /// det Q = (q12q34)² + (q13q24 − q14q23)² − 2q12q34(q13q24 + q14q23).
    pub fn determinant(&self) -> TernaryQuartic {
        let q: Vec<HomPoly> = self.upper.iter().map(|l| l.to_poly()).collect();
        let x = q[0].mul(&q[5]);
        let y = q[1].mul(&q[4]);
        let z = q[2].mul(&q[3]);
        let yz = y.add(&z.scale(CertifiedComplex::real(-1.0)));
        let cross = x.mul(&y.add(&z)).scale(CertifiedComplex::real(-2.0));
        TernaryQuartic { poly: x.mul(&x).add(&yz.mul(&yz)).add(&cross) }
    }
}

pub fn dpfsm_matrix_from_table(table: &ThetaTable) -> Result<DpfsmMatrix> {
    let den1 = d(table, "77", "31", "26");
    let den2 = d(table, "77", "46", "51");
    for (name, den) in [("D(77,31,26)", den1), ("D(77,46,51)", den2)] {
        if den.value.norm() <= HYPERELLIPTIC_GUARD.max(den.err) {
            return Err(Error::HyperellipticProximity(format!("|{name}| = {:e}", den.value.norm())));
        }
    }
    let ratio = |num: CertifiedComplex, den: CertifiedComplex| {
        num.checked_div(den).ok_or_else(|| Error::HyperellipticProximity("denominator not separated from zero".into()))
    };
    let g = |l: &str| gradient_form(table, &ch(l));
    Ok(DpfsmMatrix {
        upper: [
            g("77").scale(ratio(d(table, "31", "13", "26"), den1)?),
            g("64").scale(ratio(d(table, "22", "13", "35"), den1)?),
            g("51").scale(ratio(d(table, "77", "64", "46"), den1)?),
            g("13").scale(ratio(d(table, "22", "13", "35"), den2)?),
            g("26").scale(ratio(d(table, "77", "13", "31"), den1)?),
            g("35").scale(ratio(d(table, "64", "13", "22"), den1)?),
        ],
    })
}

pub fn dpfsm_matrix(tau: &PeriodMatrix, opts: &ThetaOptions) -> Result<DpfsmMatrix> {
    dpfsm_matrix_from_table(&guarded_table(tau, opts)?)
}
