use crate::config::RunConfig;
use num_complex::Complex64;
use num_rational::Rational64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::path::Path;
use thetaflex::boundary::*;
use thetaflex::catalecticant::*;
use thetaflex::chars::*;
use thetaflex::quartic::*;
use thetaflex::theta::*;
use thetaflex::{Error, Result};

fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{} is not a valid {what}: {e}", path.display())))
}

pub fn read_tau(path: &Path) -> Result<PeriodMatrix> {
    read_json(path, "period matrix {re, im}")
}

#[derive(Debug, Serialize)]
pub struct ThetaReport {
    pub characteristic: Characteristic,
    pub parity: i8,
    pub tau: PeriodMatrix,
    pub value: CertifiedComplex,
    /// Only for odd characteristics.
    pub gradient: Option<GradientVector>,
}

pub fn theta(cfg: &RunConfig, m: &str, tau: &Path) -> Result<ThetaReport> {
    let m: Characteristic = m.parse()?;
    let tau = read_tau(tau)?;
    if m.genus() as usize != tau.genus() {
        return Err(Error::UnsupportedDimension(format!("characteristic has genus {}, τ has genus {}", m.genus(), tau.genus())));
    }
    let opts = cfg.theta_options();
    let value = theta_constant(&m, &tau, &opts)?;
    let gradient = if m.is_odd() { Some(theta_gradient(&m, &tau, &opts)?) } else { None };
    Ok(ThetaReport { characteristic: m, parity: m.parity(), tau, value, gradient })
}

#[derive(Debug, Serialize)]
pub struct OrbitsReport {
    pub counts: CountReport,
    /// Orbits of ordered pairs of characteristics under Sp(6, 𝔽₂).
    pub pair_orbits: usize,
    pub group_order: usize,
}

pub fn parse_subspace(s: &str) -> Result<SymplecticSubspace> {
    match s.to_ascii_uppercase().as_str() {
        "V0" => Ok(SymplecticSubspace::v0()),
        "V1" => Ok(SymplecticSubspace::v1()),
        _ => {
            let parts: Vec<&str> = s.split(',').collect();
            let [a, b] = parts.as_slice() else {
                return Err(Error::Parse(format!("subspace must be V0, V1 or two labels \"n1,n2\", got {s:?}")));
            };
            SymplecticSubspace::new(a.parse()?, b.parse()?)
        }
    }
}

pub fn orbits(boundary: &str, subspace: &str) -> Result<OrbitsReport> {
    let n: Characteristic = boundary.parse()?;
    let v = parse_subspace(subspace)?;
    let counts = enumerate_counts_for(&n, &v)?;
    let gens = standard_generators(3);
    let mut labels = tuple_orbits(3, 2, &gens);
    labels.sort_unstable();
    labels.dedup();
    Ok(OrbitsReport { counts, pair_orbits: labels.len(), group_order: generated_group_order_mod2(3, &gens) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FormChoice {
    /// Ω77 built from the four Jacobian triples (its zeros are not hyperflexes).
    Printed,
    /// The form with the geometric pairing of the Aronhold conic.
    Corrected,
}

impl FormChoice {
    fn form(self) -> BitangentForm {
        match self {
            FormChoice::Printed => BitangentForm::printed(),
            FormChoice::Corrected => BitangentForm::corrected(),
        }
    }
}

pub struct HyperflexArgs {
    pub direction: Option<[f64; 6]>,
    pub bracket: (f64, f64),
    pub samples: usize,
    pub form: FormChoice,
    pub verify_psi: bool,
    /// Offset along the path for the comparison point.
    pub offset: f64,
}

#[derive(Debug, Serialize)]
pub struct PsiCheck {
    pub tau: PeriodMatrix,
    /// Ψ(a,b,c,d,e) / (θ66θ73θ41θ50θ04·Ω77).
    pub printed_ratio: [f64; 2],
    pub printed_identity_holds: bool,
    /// Ψ(a,b,c,e,−d) / ((θ66θ41θ50)²·Ω′).
    pub corrected_ratio: [f64; 2],
    pub corrected_identity_holds: bool,
}

#[derive(Debug, Serialize)]
pub struct HyperflexRunReport {
    pub form: FormChoice,
    /// Upper triangle of S in τ(t) = i(I + tS).
    pub direction: [f64; 6],
    pub bracket: (f64, f64),
    pub root: HyperflexRoot,
    pub at_root: HyperflexReport,
    pub nearby_t: f64,
    pub nearby: HyperflexReport,
    pub is_hyperflex: bool,
    pub psi_check: Option<PsiCheck>,
}

fn full_direction(d: [f64; 6]) -> [f64; 9] {
    [d[0], d[1], d[2], d[1], d[3], d[4], d[2], d[4], d[5]]
}

fn upper(s: [f64; 9]) -> [f64; 6] {
    [s[0], s[1], s[2], s[4], s[5], s[8]]
}

const PSI_TOL: f64 = 1e-6;

fn psi_check(t: &ThetaTable, tau: PeriodMatrix) -> Result<PsiCheck> {
    let f = aronhold_forms_from_table(t);
    let th = |ls: &[&str]| ls.iter().map(|l| t.theta(&ch(l)).value).product::<Complex64>();
    let printed = psi(&f.a, &f.b, &f.c, &f.d, &f.e)?.value / (th(&["66", "73", "41", "50", "04"]) * omega77_from_table(t)?.value.value);
    let alpha = th(&["66", "41", "50"]);
    let corrected = psi(&f.a, &f.b, &f.c, &f.e, &f.d.neg())?.value / (alpha * alpha * BitangentForm::corrected().eval_table(t).value);
    let near_one = |z: Complex64| (z - 1.0).norm() <= PSI_TOL;
    Ok(PsiCheck {
        tau,
        printed_ratio: [printed.re, printed.im],
        printed_identity_holds: near_one(printed),
        corrected_ratio: [corrected.re, corrected.im],
        corrected_identity_holds: near_one(corrected),
    })
}

pub fn hyperflex(cfg: &RunConfig, a: &HyperflexArgs) -> Result<HyperflexRunReport> {
    let direction = match a.direction {
        Some(d) => d,
        None => upper(random_symmetric_direction(&mut ChaCha8Rng::seed_from_u64(cfg.seed))),
    };
    let path = imaginary_path(full_direction(direction));
    let opts = cfg.theta_options();
    let form = a.form.form();
    let eval = |tau: &PeriodMatrix| -> Result<CertifiedComplex> { Ok(form.eval_table(&guarded_table(tau, &opts)?)) };
    let root = find_hyperflex_tau(&path, eval, a.bracket, a.samples, 1e-10)?;
    let report_at = |t: Complex64| -> Result<(HyperflexReport, ThetaTable, PeriodMatrix)> {
        let tau = path(t)?;
        let table = guarded_table(&tau, &opts)?;
        let forms = aronhold_forms_from_table(&table);
        Ok((hyperflex_test(&stripped_quartic(&forms), &forms.a, 1e-4)?, table, tau))
    };
    let (at_root, _, _) = report_at(root.t)?;
    let nearby_t = root.t.re + a.offset;
    let (nearby, near_table, near_tau) = report_at(Complex64::new(nearby_t, root.t.im))?;
    let is_hyperflex = at_root.verdict == Tangency::Hyperflex && nearby.verdict != Tangency::Hyperflex;
    // the identity is checked away from the root, where both sides are nonzero
    let psi_check = if a.verify_psi { Some(psi_check(&near_table, near_tau)?) } else { None };
    Ok(HyperflexRunReport { form: a.form, direction, bracket: a.bracket, root, at_root, nearby_t, nearby, is_hyperflex, psi_check })
}

#[derive(Debug, Serialize)]
pub struct ClassesReport {
    pub hyperflex: DivisorClassSummary,
    pub exponents: Option<BoundaryExponents>,
    pub clebsch: Option<ClebschClass>,
    pub clebsch_expansion: Option<ExpansionSummary>,
}

#[derive(Debug, Serialize)]
pub struct DivisorClassSummary {
    pub class: DivisorClass,
    pub display: String,
    pub abelian: AbelianClass,
    pub abelian_display: String,
    #[serde(with = "thetaflex::rational")]
    pub weight: Rational64,
    pub counts: CountReport,
}

#[derive(Debug, Serialize)]
pub struct ExpansionSummary {
    pub monomials: usize,
    pub symbol_counts: Option<(u32, u32)>,
    #[serde(with = "thetaflex::rational::option")]
    pub weight: Option<Rational64>,
    pub stats: ExpansionStats,
    pub common_factor: CommonFactorReport,
}

pub fn classes(cfg: &RunConfig, show_exponents: bool, clebsch: bool, expand: bool) -> Result<ClassesReport> {
    let h = hyperflex_divisor_class()?;
    let hyperflex = DivisorClassSummary {
        display: h.class.to_string(),
        class: h.class.clone(),
        abelian_display: h.abelian.to_string(),
        abelian: h.abelian.clone(),
        weight: h.weight,
        counts: h.counts.clone(),
    };
    let clebsch_class = if clebsch {
        let c = clebsch_divisor_class()?;
        if let Some(d) = &c.discrepancy {
            eprintln!("falsification: {d}");
        }
        Some(c)
    } else {
        None
    };
    let clebsch_expansion = if expand {
        let full = clebsch_symbolic_expression(cfg.monomial_cap)?;
        let common_factor = common_factor_check(&symbolic_entries()?, cfg.seed, 3);
        Some(ExpansionSummary {
            monomials: full.terms.len(),
            symbol_counts: full.uniform_counts(),
            weight: full.weight(),
            stats: full.stats,
            common_factor,
        })
    } else {
        None
    };
    Ok(ClassesReport { hyperflex, exponents: show_exponents.then_some(h.exponents), clebsch: clebsch_class, clebsch_expansion })
}

pub fn banana(params: Option<&Path>, tol: f64, points: usize) -> Result<(BananaFamilyParams, BananaReport)> {
    let p = match params {
        Some(path) => read_json(path, "banana family parameter set")?,
        None => BananaFamilyParams::default(),
    };
    let r = banana_exponent_check_on(&p, tol, points)?;
    Ok((p, r))
}

#[derive(Debug, Serialize)]
pub struct CatalecticantReport {
    pub quartic: TernaryQuartic,
    pub verdict: ClebschVerdict,
    pub determinant: CertifiedComplex,
}

pub fn catalecticant(cfg: &RunConfig, quartic: Option<&Path>, tau: Option<&Path>, tol: f64) -> Result<CatalecticantReport> {
    let quartic = match (quartic, tau) {
        (Some(q), None) => read_json(q, "quartic (list of {exponents, re, im})")?,
        (None, Some(t)) => reconstruct_quartic(&read_tau(t)?, &cfg.theta_options())?,
        _ => return Err(Error::Parse("give exactly one of --quartic and --tau".into())),
    };
    let determinant = catalecticant_matrix(&quartic).determinant();
    Ok(CatalecticantReport { verdict: is_clebsch(&quartic, tol), quartic, determinant })
}
