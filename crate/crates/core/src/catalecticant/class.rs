use super::numeric::clebsch_from_table;
use super::symbolic::{structural_weight, streaming_min_plus, symbolic_entries, StreamingOrder, DEFAULT_MONOMIAL_CAP};
use crate::boundary::{fit_options, numeric_order_fit, BoundaryContext, DegenerationFamily, DivisorClass, OrderAssignment, OrderFit};
use crate::chars::SymplecticSubspace;
use crate::error::{Error, Result};
use num_rational::Rational64;
use serde::Serialize;

/// The class the Clebsch locus is expected to have: 56λ − 6δ₀ − 16δ₁.
pub fn expected_clebsch_class() -> DivisorClass {
    DivisorClass::integers(56, -6, -16)
}

#[derive(Debug, Clone, Serialize)]
pub struct ClebschClass {
    pub class: DivisorClass,
    #[serde(with = "crate::rational")]
    pub weight: Rational64,
    /// Exact orders on D04 and P_V₀ from truncated symbolic expansions.
    pub delta0: StreamingOrder,
    pub delta1: StreamingOrder,
    /// Fitted orders of the numeric form along the matching families.
    pub delta0_fit: OrderFit,
    pub delta1_fit: OrderFit,
    pub matches_expected: bool,
    /// Set when the computed class differs from the expected one.
    pub discrepancy: Option<String>,
}

/// λ from the weight, δ₀ and δ₁ from the symbolic orders, each confirmed by a
/// numeric fit of det Cat₂ along a degenerating family.
pub fn clebsch_divisor_class() -> Result<ClebschClass> {
    let entries = symbolic_entries()?;
    let weight = structural_weight(&entries).ok_or_else(|| Error::MixedWeight("catalecticant entries are inhomogeneous".into()))?;
    let d = BoundaryContext::d("04");
    let p = BoundaryContext::P { v: SymplecticSubspace::v0() };
    let delta0 = streaming_min_plus(&entries, &OrderAssignment::from_tables(d)?, DEFAULT_MONOMIAL_CAP)?;
    let delta1 = streaming_min_plus(&entries, &OrderAssignment::from_tables(p)?, DEFAULT_MONOMIAL_CAP)?;
    let opts = fit_options();
    let delta0_fit = numeric_order_fit(|t| Ok(clebsch_from_table(t)), &DegenerationFamily::toward(d, 11)?, &opts)?;
    let delta1_fit = numeric_order_fit(|t| Ok(clebsch_from_table(t)), &DegenerationFamily::toward(p, 11)?, &opts)?;
    for (name, sym, fit) in [("δ₀", &delta0, &delta0_fit), ("δ₁", &delta1, &delta1_fit)] {
        if sym.order != fit.order {
            return Err(Error::InternalConsistency(format!(
                "{name}: symbolic order {} but the numeric form vanishes to order {}",
                sym.order, fit.order
            )));
        }
    }
    let class = DivisorClass::new(weight, -delta0.order, -delta1.order);
    let expected = expected_clebsch_class();
    let matches_expected = class == expected;
    let discrepancy = (!matches_expected).then(|| format!("computed {class}, expected {expected}"));
    Ok(ClebschClass { class, weight, delta0, delta1, delta0_fit, delta1_fit, matches_expected, discrepancy })
}
