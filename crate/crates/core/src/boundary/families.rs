use super::expr::FormExpression;
use super::orders::{min_plus_order, BoundaryContext, OrderAssignment};
use crate::chars::SymplecticSubspace;
use crate::error::{Error, Result};
use crate::theta::{random_tau_near_identity, CertifiedComplex, PeriodMatrix, ThetaOptions, ThetaTable};
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;
use std::thread;

/// Largest distance from the snapping grid a fitted slope may have.
pub const SNAP_TOL: f64 = 0.02;

#[derive(Debug, Clone)]
enum Shape {
    /// τ₀ + iT·vvᵀ.
    Nodal { base: Vec<Complex64>, v: [i64; 3] },
    /// A·[[τ₁, s·rᵀ], [s·r, τ″]]·Aᵀ.
    Split { tau1: Complex64, tau2: [Complex64; 3], r: [Complex64; 2], basis: [[i64; 3]; 3] },
}

/// A one-parameter path in Siegel space approaching a boundary component.
#[derive(Debug, Clone)]
pub struct DegenerationFamily {
    pub context: BoundaryContext,
    shape: Shape,
    /// Parameter values, ordered toward the boundary.
    pub params: Vec<f64>,
}

impl DegenerationFamily {
    /// A path toward `context`. D_n needs n with ε = 0; P_V is available for V₀ and V₁.
    pub fn toward(context: BoundaryContext, seed: u64) -> Result<Self> {
        match context {
            BoundaryContext::D { n } => {
                if n.eps_mask() != 0 || n.is_zero() || n.genus() != 3 {
                    return Err(Error::UnsupportedOrbit(format!("no nodal family toward D_{n}")));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let base = random_tau_near_identity(&mut rng, 0.15).entries().to_vec();
                let v = [0, 1, 2].map(|i| n.delta_bit(i) as i64);
                Ok(Self { context, shape: Shape::Nodal { base, v }, params: vec![2.0, 3.0, 4.0, 5.0, 6.0, 7.0] })
            }
            BoundaryContext::P { v } => {
                let basis = if v.same_plane(&SymplecticSubspace::v0()) {
                    [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
                } else if v.same_plane(&SymplecticSubspace::v1()) {
                    [[1, 0, -1], [0, 1, 0], [0, 0, 1]]
                } else {
                    return Err(Error::UnsupportedOrbit("split families are built for V₀ and V₁".into()));
                };
                let c = Complex64::new;
                let _ = seed;
                Ok(Self {
                    context,
                    shape: Shape::Split {
                        tau1: c(0.11, 1.07),
                        tau2: [c(-0.13, 1.21), c(0.17, 0.31), c(0.05, 0.96)],
                        r: [c(0.71, 0.23), c(-0.43, 0.52)],
                        basis,
                    },
                    params: vec![1e-2, 3e-3, 1e-3, 3e-4, 1e-4],
                })
            }
        }
    }

    pub fn with_params(mut self, params: Vec<f64>) -> Self {
        self.params = params;
        self
    }

    pub fn tau(&self, p: f64) -> Result<PeriodMatrix> {
        match &self.shape {
            Shape::Nodal { base, v } => {
                let mut e = base.clone();
                for i in 0..3 {
                    for j in 0..3 {
                        e[3 * i + j] += Complex64::new(0.0, p * (v[i] * v[j]) as f64);
                    }
                }
                PeriodMatrix::new(3, e)
            }
            Shape::Split { tau1, tau2, r, basis } => {
                let s = Complex64::new(p, 0.0);
                let m = [[*tau1, s * r[0], s * r[1]], [s * r[0], tau2[0], tau2[1]], [s * r[1], tau2[1], tau2[2]]];
                let mut e = vec![Complex64::zero(); 9];
                for i in 0..3 {
                    for j in 0..3 {
                        for k in 0..3 {
                            for l in 0..3 {
                                e[3 * i + j] += m[k][l] * (basis[i][k] * basis[j][l]) as f64;
                            }
                        }
                    }
                }
                PeriodMatrix::new(3, e)
            }
        }
        .map_err(|e| Error::ParameterRange(format!("parameter {p}: {e}")))
    }

    /// log|t| up to an additive constant: −2πT on D_n, log s on P_V.
    pub fn log_t(&self, p: f64) -> f64 {
        match self.shape {
            Shape::Nodal { .. } => -2.0 * PI * p,
            Shape::Split { .. } => p.ln(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FitSample {
    pub param: f64,
    pub log_t: f64,
    pub log_abs: f64,
    pub relative_err: f64,
}

/// Least-squares slope of log|value| against log|t|.
#[derive(Debug, Clone, Serialize)]
pub struct OrderFit {
    pub samples: Vec<FitSample>,
    /// Slope over all samples.
    pub slope: f64,
    /// Slope over the three samples nearest the boundary; this is what gets snapped.
    pub tail_slope: f64,
    #[serde(with = "crate::rational")]
    pub order: Rational64,
}

/// Evaluates at every parameter (in parallel), fits, and snaps to the context's grid.
pub fn numeric_order_fit<F>(evaluator: F, family: &DegenerationFamily, opts: &ThetaOptions) -> Result<OrderFit>
where
    F: Fn(&ThetaTable) -> Result<CertifiedComplex> + Sync,
{
    if family.params.len() < 3 {
        return Err(Error::Precondition("a fit needs at least three parameters".into()));
    }
    let values: Vec<Result<CertifiedComplex>> = thread::scope(|sc| {
        let handles: Vec<_> = family
            .params
            .iter()
            .map(|&p| {
                let ev = &evaluator;
                sc.spawn(move || ev(&ThetaTable::compute(&family.tau(p)?, opts)?))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("evaluation thread panicked")).collect()
    });
    let mut samples = Vec::with_capacity(values.len());
    for (&p, v) in family.params.iter().zip(values) {
        let v = v?;
        let n = v.value.norm();
        if !(n > 10.0 * v.err) || n == 0.0 {
            return Err(Error::Inconclusive(format!("|value| = {n:e} not resolved above its error {:e} at {p}", v.err)));
        }
        samples.push(FitSample { param: p, log_t: family.log_t(p), log_abs: n.ln(), relative_err: v.err / n });
    }
    let slope = lsq_slope(&samples);
    let tail_slope = lsq_slope(&samples[samples.len() - 3..]);
    let grid = family.context.grid().to_f64().unwrap();
    let k = (tail_slope / grid).round();
    if (tail_slope - k * grid).abs() > SNAP_TOL || !tail_slope.is_finite() {
        return Err(Error::Inconclusive(format!("slope {tail_slope:.4} is not within {SNAP_TOL} of the grid {grid}")));
    }
    let order = family.context.grid() * Rational64::from_integer(k as i64);
    Ok(OrderFit { samples, slope, tail_slope, order })
}

fn lsq_slope(s: &[FitSample]) -> f64 {
    let n = s.len() as f64;
    let mx = s.iter().map(|x| x.log_t).sum::<f64>() / n;
    let my = s.iter().map(|x| x.log_abs).sum::<f64>() / n;
    let sxy: f64 = s.iter().map(|x| (x.log_t - mx) * (x.log_abs - my)).sum();
    let sxx: f64 = s.iter().map(|x| (x.log_t - mx).powi(2)).sum();
    sxy / sxx
}

/// Whether the leading monomials of an expression survive along a family.
#[derive(Debug, Clone, Serialize)]
pub struct CancellationReport {
    #[serde(with = "crate::rational::option")]
    pub min_plus_order: Option<Rational64>,
    pub leading_monomials: usize,
    pub fit: Option<OrderFit>,
    /// |value|·|t|^(−order) at the two samples nearest the boundary.
    pub leading_coefficient: [f64; 2],
    pub cancelled: bool,
}

/// Fits the order of `expr` along `family` and compares with the min-plus bound.
///
/// A fitted order above the bound means the leading monomials cancel. A fitted
/// order below it contradicts the tables and is an error.
pub fn cancellation_check(
    expr: &FormExpression,
    assign: &OrderAssignment,
    family: &DegenerationFamily,
    opts: &ThetaOptions,
) -> Result<CancellationReport> {
    if !family.context.same_component(&assign.context) {
        return Err(Error::Precondition("family and assignment refer to different boundary components".into()));
    }
    if expr.is_empty() {
        return Ok(CancellationReport {
            min_plus_order: None,
            leading_monomials: 0,
            fit: None,
            leading_coefficient: [0.0; 2],
            cancelled: true,
        });
    }
    let mp = min_plus_order(expr, assign)?;
    let fit = numeric_order_fit(|t| Ok(expr.eval(t)), family, opts)?;
    if fit.order < mp.order {
        return Err(Error::InternalConsistency(format!(
            "fitted order {} is below the min-plus bound {}",
            fit.order, mp.order
        )));
    }
    let o = mp.order.to_f64().unwrap();
    let n = fit.samples.len();
    let lc = |s: &FitSample| (s.log_abs - o * s.log_t).exp();
    let leading_coefficient = [lc(&fit.samples[n - 2]), lc(&fit.samples[n - 1])];
    let cancelled = fit.order > mp.order;
    if !cancelled {
        let ratio = leading_coefficient[1] / leading_coefficient[0];
        if !(0.5..2.0).contains(&ratio) {
            return Err(Error::Inconclusive(format!("leading coefficient not settled (ratio {ratio:.3})")));
        }
    }
    Ok(CancellationReport { min_plus_order: Some(mp.order), leading_monomials: mp.leading.len(), fit: Some(fit), leading_coefficient, cancelled })
}

/// Options for fits: the tail must sit far below the smallest values sampled.
pub fn fit_options() -> ThetaOptions {
    ThetaOptions { tol: 1e-60, max_radius: 60.0 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::expr::{expand_symbolic_omega, FormExpression};
    use crate::boundary::orders::{order_table_d, order_table_p, OrderValue};
    use crate::chars::{ch, Characteristic};

    fn theta_fit(m: Characteristic, fam: &DegenerationFamily) -> Result<Rational64> {
        Ok(numeric_order_fit(|t| Ok(t.theta(&m)), fam, &fit_options())?.order)
    }

    fn constant(v: OrderValue) -> Rational64 {
        match v {
            OrderValue::Constant { order } => order,
            _ => unreachable!(),
        }
    }

    #[test]
    fn d04_examples() {
        let f = DegenerationFamily::toward(BoundaryContext::d("04"), 1).unwrap();
        assert_eq!(theta_fit(ch("43"), &f).unwrap(), Rational64::new(1, 8));
        assert_eq!(theta_fit(ch("01"), &f).unwrap(), Rational64::from_integer(0));
    }

    #[test]
    fn v0_example() {
        let f = DegenerationFamily::toward(BoundaryContext::P { v: SymplecticSubspace::v0() }, 1).unwrap();
        assert_eq!(theta_fit(ch("75"), &f).unwrap(), Rational64::from_integer(1));
    }

    #[test]
    fn all_even_thetas_match_the_tables() {
        let ctxs = [
            BoundaryContext::d("04"),
            BoundaryContext::d("06"),
            BoundaryContext::P { v: SymplecticSubspace::v0() },
            BoundaryContext::P { v: SymplecticSubspace::v1() },
        ];
        for ctx in ctxs {
            let f = DegenerationFamily::toward(ctx, 2).unwrap();
            for m in Characteristic::all(3).into_iter().filter(|m| m.is_even()) {
                let expect = match ctx {
                    BoundaryContext::D { n } => constant(order_table_d(&m, &n).unwrap()),
                    BoundaryContext::P { v } => constant(order_table_p(&m, &v).unwrap()),
                };
                assert_eq!(theta_fit(m, &f).unwrap(), expect, "θ{m} on {ctx:?}");
            }
        }
    }

    #[test]
    fn gradient_components_match_the_tables_in_adapted_coordinates() {
        for ctx in [BoundaryContext::d("04"), BoundaryContext::P { v: SymplecticSubspace::v0() }] {
            let f = DegenerationFamily::toward(ctx, 3).unwrap();
            for m in Characteristic::all(3).into_iter().filter(|m| m.is_odd()) {
                let expect = match ctx {
                    BoundaryContext::D { n } => order_table_d(&m, &n).unwrap(),
                    BoundaryContext::P { v } => order_table_p(&m, &v).unwrap(),
                };
                let OrderValue::Gradient { orders } = expect else { unreachable!() };
                for a in 0..3 {
                    let fit = numeric_order_fit(|t| Ok(t.grad_component(&m, a)), &f, &fit_options()).unwrap();
                    assert_eq!(fit.order, orders[a], "∂{}θ{m} on {ctx:?}", a + 1);
                }
            }
        }
    }

    #[test]
    fn synthetic_cancellation_is_detected() {
        let ctx = BoundaryContext::d("04");
        let a = OrderAssignment::from_tables(ctx).unwrap();
        let f = DegenerationFamily::toward(ctx, 4).unwrap();
        let x = FormExpression::thetas(&["00", "12"]);
        let r = cancellation_check(&x.sub(&x), &a, &f, &fit_options()).unwrap();
        assert!(r.cancelled && r.fit.is_none());
        // θ00 and θ04 share their limit on D04; the difference starts at order 1/2
        let d = FormExpression::thetas(&["00"]).sub(&FormExpression::thetas(&["04"]));
        let r = cancellation_check(&d, &a, &f, &fit_options()).unwrap();
        assert!(r.cancelled);
        assert_eq!(r.fit.unwrap().order, Rational64::new(1, 2));
    }

    #[test]
    fn omega_survives_on_d04_and_v0() {
        let e = expand_symbolic_omega();
        for ctx in [BoundaryContext::d("04"), BoundaryContext::P { v: SymplecticSubspace::v0() }] {
            let a = OrderAssignment::from_tables(ctx).unwrap();
            let f = DegenerationFamily::toward(ctx, 5).unwrap();
            let r = cancellation_check(&e, &a, &f, &fit_options()).unwrap();
            assert!(!r.cancelled, "{ctx:?}: {r:?}");
            assert!(r.leading_coefficient[1] > 0.0);
        }
    }

    #[test]
    fn mismatched_context_is_rejected() {
        let a = OrderAssignment::from_tables(BoundaryContext::d("04")).unwrap();
        let f = DegenerationFamily::toward(BoundaryContext::d("06"), 1).unwrap();
        assert!(matches!(cancellation_check(&expand_symbolic_omega(), &a, &f, &fit_options()), Err(Error::Precondition(_))));
        assert!(DegenerationFamily::toward(BoundaryContext::d("40"), 1).is_err());
    }
}
