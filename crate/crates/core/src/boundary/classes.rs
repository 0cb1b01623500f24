use super::expr::{expand_symbolic_omega, weight};
use super::families::{cancellation_check, fit_options, CancellationReport, DegenerationFamily};
use super::orders::{min_plus_order, BoundaryContext, OrderAssignment};
use crate::chars::{enumerate_counts, CountReport, SymplecticSubspace};
use crate::error::Result;
use num_rational::Rational64;
use num_traits::Signed;
use serde::Serialize;
use std::fmt;

/// a·λ + b·δ₀ + c·δ₁ in Pic(M̄₃) ⊗ ℚ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DivisorClass {
    #[serde(with = "crate::rational")]
    pub lambda: Rational64,
    #[serde(with = "crate::rational")]
    pub delta0: Rational64,
    #[serde(with = "crate::rational")]
    pub delta1: Rational64,
}

impl DivisorClass {
    pub fn new(lambda: Rational64, delta0: Rational64, delta1: Rational64) -> Self {
        Self { lambda, delta0, delta1 }
    }

    pub fn integers(lambda: i64, delta0: i64, delta1: i64) -> Self {
        Self::new(lambda.into(), delta0.into(), delta1.into())
    }

    /// The pullback to the toroidal compactification of A₃: a·L + b·D.
    pub fn abelian(&self) -> AbelianClass {
        AbelianClass { l: self.lambda, d: self.delta0 }
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}·λ {} {}·δ₀ {} {}·δ₁", self.lambda, sign(self.delta0), self.delta0.abs(), sign(self.delta1), self.delta1.abs())
    }
}

fn sign(q: Rational64) -> &'static str {
    if q < 0.into() {
        "−"
    } else {
        "+"
    }
}

/// a·L + b·D on the abelian side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AbelianClass {
    #[serde(with = "crate::rational")]
    pub l: Rational64,
    #[serde(with = "crate::rational")]
    pub d: Rational64,
}

impl fmt::Display for AbelianClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}·L {} {}·D", self.l, sign(self.d), self.d.abs())
    }
}

/// Vanishing orders of Ω77 on the four boundary components that matter.
#[derive(Debug, Clone, Serialize)]
pub struct BoundaryExponents {
    #[serde(with = "crate::rational")]
    pub d0: Rational64,
    #[serde(with = "crate::rational")]
    pub d1: Rational64,
    #[serde(with = "crate::rational")]
    pub p1: Rational64,
    #[serde(with = "crate::rational")]
    pub p3: Rational64,
    /// Numeric checks along D04, D06, P_V₀, P_V₁, in that order.
    pub checks: Vec<CancellationReport>,
}

impl BoundaryExponents {
    pub fn as_tuple(&self) -> (Rational64, Rational64, Rational64, Rational64) {
        (self.d0, self.d1, self.p1, self.p3)
    }
}

/// Representative components: D04 and D06 for the two orbits of (77, n), V₀
/// (three even sums) and V₁ (one even sum) for the two orbits of (77, V).
pub fn exponent_contexts() -> [BoundaryContext; 4] {
    [
        BoundaryContext::d("04"),
        BoundaryContext::d("06"),
        BoundaryContext::P { v: SymplecticSubspace::v0() },
        BoundaryContext::P { v: SymplecticSubspace::v1() },
    ]
}

/// Min-plus orders only, without the numeric checks.
pub fn symbolic_boundary_exponents() -> Result<[Rational64; 4]> {
    let e = expand_symbolic_omega();
    let mut out = [Rational64::from_integer(0); 4];
    for (k, ctx) in exponent_contexts().into_iter().enumerate() {
        out[k] = min_plus_order(&e, &OrderAssignment::from_tables(ctx)?)?.order;
    }
    Ok(out)
}

/// Min-plus orders, each confirmed along a degenerating family. Where the
/// leading monomials cancel, the fitted order is used instead.
pub fn compute_boundary_exponents() -> Result<BoundaryExponents> {
    let e = expand_symbolic_omega();
    let opts = fit_options();
    let mut orders = [Rational64::from_integer(0); 4];
    let mut checks = Vec::with_capacity(4);
    for (k, ctx) in exponent_contexts().into_iter().enumerate() {
        let assign = OrderAssignment::from_tables(ctx)?;
        let fam = DegenerationFamily::toward(ctx, 7 + k as u64)?;
        let r = cancellation_check(&e, &assign, &fam, &opts)?;
        orders[k] = match (&r.fit, r.cancelled) {
            (Some(f), true) => f.order,
            _ => r.min_plus_order.expect("nonzero expression"),
        };
        checks.push(r);
    }
    Ok(BoundaryExponents { d0: orders[0], d1: orders[1], p3: orders[2], p1: orders[3], checks })
}

/// weight·#odd·λ − (n₊·d₀ + n₋·d₁)·δ₀ − (n₃·p₃ + n₁·p₁)·δ₁, where n₊, n₋ count
/// odd m with m + n even or odd, and n₁, n₃ count odd m with one or three even
/// elements among m + V.
pub fn assemble_class(counts: &CountReport, w: Rational64, ex: &BoundaryExponents) -> DivisorClass {
    let z = |k: usize| Rational64::from_integer(k as i64);
    let (n_even, n_odd) = counts.boundary_split;
    let (n_one, n_three) = counts.subspace_split;
    DivisorClass::new(
        w * z(counts.odd),
        -(z(n_even) * ex.d0 + z(n_odd) * ex.d1),
        -(z(n_three) * ex.p3 + z(n_one) * ex.p1),
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct HyperflexClass {
    pub class: DivisorClass,
    pub abelian: AbelianClass,
    #[serde(with = "crate::rational")]
    pub weight: Rational64,
    pub counts: CountReport,
    pub exponents: BoundaryExponents,
}

/// The class of the closure of the hyperflex locus in M̄₃.
pub fn hyperflex_divisor_class() -> Result<HyperflexClass> {
    let counts = enumerate_counts();
    let w = weight(&expand_symbolic_omega())?;
    let exponents = compute_boundary_exponents()?;
    let class = assemble_class(&counts, w, &exponents);
    Ok(HyperflexClass { class, abelian: class.abelian(), weight: w, counts, exponents })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn symbolic_exponents() {
        assert_eq!(symbolic_boundary_exponents().unwrap(), [q(5, 4), q(1, 1), q(4, 1), q(2, 1)]);
    }

    #[test]
    fn assembly_from_plugged_in_values() {
        let ex = BoundaryExponents { d0: q(5, 4), d1: q(1, 1), p1: q(2, 1), p3: q(4, 1), checks: vec![] };
        let c = assemble_class(&enumerate_counts(), q(11, 1), &ex);
        assert_eq!(c, DivisorClass::integers(308, -32, -76));
        assert_eq!(q(16, 1) * ex.d0 + q(12, 1) * ex.d1, q(32, 1));
        assert_eq!(q(10, 1) * ex.p3 + q(18, 1) * ex.p1, q(76, 1));
        assert_eq!(c.abelian().to_string(), "308·L − 32·D");
        assert_eq!(c.to_string(), "308·λ − 32·δ₀ − 76·δ₁");
    }

    #[test]
    fn full_computation() {
        let h = hyperflex_divisor_class().unwrap();
        assert_eq!(h.class, DivisorClass::integers(308, -32, -76));
        assert!(h.exponents.checks.iter().all(|c| !c.cancelled));
        let j = serde_json::to_value(h.class).unwrap();
        assert_eq!(j["delta0"]["num"], -32);
        assert_eq!(j["delta0"]["den"], 1);
    }
}
