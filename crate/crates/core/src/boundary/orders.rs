use super::expr::{FormExpression, Monomial, Symbol};
use crate::chars::{classify_boundary_pair, BoundaryTag, Characteristic, SymplecticMatrix, SymplecticSubspace};
use crate::error::{Error, Result};
use num_rational::Rational64;
use serde::{Serialize, Serializer};
use std::collections::BTreeMap;

fn q(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

/// Vanishing order of a theta constant, or of the three gradient components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum OrderValue {
    Constant {
        #[serde(with = "crate::rational")]
        order: Rational64,
    },
    Gradient {
        #[serde(with = "crate::rational::array")]
        orders: [Rational64; 3],
    },
}

/// Boundary component the orders refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BoundaryContext {
    /// Δ₀ component D_n, local parameter t = exp(2πiτ₁₁) in adapted coordinates.
    D { n: Characteristic },
    /// Δ₁ component P_V, local parameter the off-diagonal block.
    P { v: SymplecticSubspace },
}

impl BoundaryContext {
    pub fn d(label: &str) -> Self {
        BoundaryContext::D { n: crate::chars::ch(label) }
    }

    pub fn transform(&self, g: &SymplecticMatrix) -> Self {
        match self {
            BoundaryContext::D { n } => BoundaryContext::D { n: g.act_linear(n) },
            BoundaryContext::P { v } => BoundaryContext::P { v: v.transform(g) },
        }
    }

    /// Orders along D_n are multiples of 1/8, along P_V integers.
    pub fn grid(&self) -> Rational64 {
        match self {
            BoundaryContext::D { .. } => q(1, 8),
            BoundaryContext::P { .. } => q(1, 1),
        }
    }

    pub fn same_component(&self, o: &Self) -> bool {
        match (self, o) {
            (BoundaryContext::D { n }, BoundaryContext::D { n: k }) => n == k,
            (BoundaryContext::P { v }, BoundaryContext::P { v: w }) => v.same_plane(w),
            _ => false,
        }
    }
}

/// Orders along D_n. Gradient vectors are in coordinates where the first axis
/// is the pinched direction.
pub fn order_table_d(m: &Characteristic, n: &Characteristic) -> Result<OrderValue> {
    let tag = classify_boundary_pair(m, n)?;
    if m.is_even() {
        let order = if tag == BoundaryTag::OddSum { q(1, 8) } else { q(0, 1) };
        return Ok(OrderValue::Constant { order });
    }
    match tag {
        BoundaryTag::Degenerate => Err(Error::UnsupportedOrbit(format!("odd m = n = {m} has no tabulated gradient orders"))),
        BoundaryTag::OddSum => Ok(OrderValue::Gradient { orders: [q(1, 2), q(0, 1), q(0, 1)] }),
        BoundaryTag::EvenSum => Ok(OrderValue::Gradient { orders: [q(1, 8); 3] }),
    }
}

/// Orders along P_V. Gradient vectors are in coordinates where the first axis
/// spans the elliptic factor.
pub fn order_table_p(m: &Characteristic, v: &SymplecticSubspace) -> Result<OrderValue> {
    if m.genus() != 3 {
        return Err(Error::UnsupportedDimension("boundary tables are for genus 3".into()));
    }
    let (n1, n2) = v.generators();
    let e1 = (*m + n1).is_even();
    let e2 = (*m + n2).is_even();
    if m.is_even() {
        let order = if !e1 && !e2 { q(1, 1) } else { q(0, 1) };
        return Ok(OrderValue::Constant { order });
    }
    Ok(OrderValue::Gradient { orders: if e1 && e2 { [q(0, 1), q(1, 1), q(1, 1)] } else { [q(1, 1), q(0, 1), q(0, 1)] } })
}

/// Orders of every theta constant and gradient component along one boundary component.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderAssignment {
    pub context: BoundaryContext,
    pub theta: BTreeMap<Characteristic, Rational64>,
    pub grad: BTreeMap<(Characteristic, usize), Rational64>,
}

impl OrderAssignment {
    /// All table values for genus 3; pairs the tables do not cover are left unassigned.
    pub fn from_tables(context: BoundaryContext) -> Result<Self> {
        let mut theta = BTreeMap::new();
        let mut grad = BTreeMap::new();
        for m in Characteristic::all(3) {
            let v = match &context {
                BoundaryContext::D { n } => order_table_d(&m, n),
                BoundaryContext::P { v } => order_table_p(&m, v),
            };
            match v {
                Ok(OrderValue::Constant { order }) => {
                    theta.insert(m, order);
                }
                Ok(OrderValue::Gradient { orders }) => {
                    for (a, o) in orders.into_iter().enumerate() {
                        grad.insert((m, a), o);
                    }
                }
                Err(Error::UnsupportedOrbit(_)) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(Self { context, theta, grad })
    }

    pub fn order_of(&self, s: &Symbol) -> Result<Rational64> {
        match s {
            Symbol::Theta { m } => self.theta.get(m).copied(),
            Symbol::Grad { m, axis } => self.grad.get(&(*m, *axis)).copied(),
            Symbol::Pi => Some(q(0, 1)),
        }
        .ok_or_else(|| Error::MissingOrder(s.to_string()))
    }

    pub fn monomial_order(&self, m: &Monomial) -> Result<Rational64> {
        let mut total = q(0, 1);
        for (s, e) in m.factors() {
            total += self.order_of(s)? * Rational64::from_integer(*e as i64);
        }
        Ok(total)
    }

    /// The assignment for γ·context, with every key moved by γ.
    pub fn relabel(&self, g: &SymplecticMatrix) -> Self {
        Self {
            context: self.context.transform(g),
            theta: self.theta.iter().map(|(m, o)| (g.act(m), *o)).collect(),
            grad: self.grad.iter().map(|((m, a), o)| ((g.act(m), *a), *o)).collect(),
        }
    }
}

impl Serialize for OrderAssignment {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        #[derive(Serialize)]
        struct Entry {
            symbol: String,
            #[serde(with = "crate::rational")]
            order: Rational64,
        }
        let theta: Vec<Entry> = self.theta.iter().map(|(m, o)| Entry { symbol: format!("θ{m}"), order: *o }).collect();
        let grad: Vec<Entry> =
            self.grad.iter().map(|((m, a), o)| Entry { symbol: format!("∂{}θ{m}", a + 1), order: *o }).collect();
        let mut st = s.serialize_struct("OrderAssignment", 3)?;
        st.serialize_field("context", &self.context)?;
        st.serialize_field("theta", &theta)?;
        st.serialize_field("grad", &grad)?;
        st.end()
    }
}

/// Minimum monomial order and the monomials attaining it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinPlus {
    #[serde(with = "crate::rational")]
    pub order: Rational64,
    pub leading: Vec<Monomial>,
}

/// Order of each monomial as the sum of its symbol orders; the expression's
/// order is at least the minimum, with equality unless the leading monomials cancel.
pub fn min_plus_order(expr: &FormExpression, assign: &OrderAssignment) -> Result<MinPlus> {
    let mut best: Option<MinPlus> = None;
    for (m, _) in expr.terms() {
        let o = assign.monomial_order(m)?;
        match &mut best {
            Some(b) if o > b.order => {}
            Some(b) if o == b.order => b.leading.push(m.clone()),
            _ => best = Some(MinPlus { order: o, leading: vec![m.clone()] }),
        }
    }
    best.ok_or_else(|| Error::Domain("the zero expression has infinite order".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::expr::{expand_symbolic_omega, jacobian_expression};
    use crate::chars::{ch, standard_generators};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn constant(v: OrderValue) -> Rational64 {
        match v {
            OrderValue::Constant { order } => order,
            _ => panic!("expected a constant order"),
        }
    }

    #[test]
    fn d_table_examples() {
        let n = ch("04");
        for l in ["43", "52", "75", "40", "67", "76"] {
            assert_eq!(constant(order_table_d(&ch(l), &n).unwrap()), q(1, 8), "{l}");
        }
        assert_eq!(constant(order_table_d(&ch("01"), &n).unwrap()), q(0, 1));
        assert_eq!(constant(order_table_d(&ch("04"), &n).unwrap()), q(0, 1));
        assert!(matches!(order_table_d(&ch("77"), &ch("77")), Err(Error::UnsupportedOrbit(_))));
        assert!(matches!(order_table_d(&ch("77"), &ch("00")), Err(Error::InvalidBoundaryLabel(_))));
        // 13 has ε₁ = 0: only the pinched direction vanishes
        assert_eq!(order_table_d(&ch("13"), &n).unwrap(), OrderValue::Gradient { orders: [q(1, 2), q(0, 1), q(0, 1)] });
        assert_eq!(order_table_d(&ch("77"), &n).unwrap(), OrderValue::Gradient { orders: [q(1, 8); 3] });
    }

    #[test]
    fn p_table_examples() {
        let v0 = SymplecticSubspace::v0();
        let v1 = SymplecticSubspace::v1();
        for l in ["75", "67", "76"] {
            assert_eq!(constant(order_table_p(&ch(l), &v0).unwrap()), q(1, 1));
        }
        for l in ["43", "76"] {
            assert_eq!(constant(order_table_p(&ch(l), &v1).unwrap()), q(1, 1));
        }
        assert_eq!(constant(order_table_p(&ch("00"), &v0).unwrap()), q(0, 1));
        let even_ones = Characteristic::all(3)
            .into_iter()
            .filter(|m| m.is_even() && constant(order_table_p(m, &v0).unwrap()) == q(1, 1))
            .count();
        assert_eq!(even_ones, 6);
    }

    fn jacobi_order(t: [&str; 3], ctx: BoundaryContext) -> Rational64 {
        let e = jacobian_expression(&[ch(t[0]), ch(t[1]), ch(t[2])]).unwrap();
        min_plus_order(&e, &OrderAssignment::from_tables(ctx).unwrap()).unwrap().order
    }

    #[test]
    fn determinant_orders_through_quintuples() {
        let d04 = BoundaryContext::d("04");
        let d06 = BoundaryContext::d("06");
        let v0 = BoundaryContext::P { v: SymplecticSubspace::v0() };
        assert_eq!(jacobi_order(["77", "64", "13"], d04), q(1, 4));
        assert_eq!(jacobi_order(["77", "51", "26"], d04), q(1, 4));
        assert_eq!(jacobi_order(["77", "64", "51"], d04), q(3, 8));
        assert_eq!(jacobi_order(["77", "13", "26"], d04), q(1, 8));
        assert_eq!(jacobi_order(["77", "64", "13"], d06), q(1, 2));
        assert_eq!(jacobi_order(["77", "64", "13"], v0), q(1, 1));
        assert_eq!(jacobi_order(["77", "64", "51"], v0), q(1, 1));
    }

    /// The gradient table gives the same D-order as the quintuple on D04.
    #[test]
    fn gradient_and_quintuple_orders_agree() {
        let a = OrderAssignment::from_tables(BoundaryContext::d("04")).unwrap();
        let mut e = FormExpression::zero();
        let t = [ch("77"), ch("64"), ch("13")];
        for (p, sign) in [([0, 1, 2], 1), ([1, 2, 0], 1), ([2, 0, 1], 1), ([0, 2, 1], -1), ([2, 1, 0], -1), ([1, 0, 2], -1)] {
            e.add_term(sign, Monomial::from_symbols((0..3).map(|r| Symbol::Grad { m: t[r], axis: p[r] })));
        }
        assert_eq!(min_plus_order(&e, &a).unwrap().order, q(1, 4));
    }

    #[test]
    fn omega_exponents() {
        let e = expand_symbolic_omega();
        let cases = [
            (BoundaryContext::d("04"), q(5, 4), 4),
            (BoundaryContext::d("06"), q(1, 1), 1),
            (BoundaryContext::P { v: SymplecticSubspace::v0() }, q(4, 1), 4),
            (BoundaryContext::P { v: SymplecticSubspace::v1() }, q(2, 1), 3),
        ];
        for (ctx, order, leading) in cases {
            let r = min_plus_order(&e, &OrderAssignment::from_tables(ctx).unwrap()).unwrap();
            assert_eq!((r.order, r.leading.len()), (order, leading), "{ctx:?}");
        }
    }

    #[test]
    fn missing_and_zero() {
        let mut a = OrderAssignment::from_tables(BoundaryContext::d("04")).unwrap();
        a.theta.remove(&ch("42"));
        assert!(matches!(min_plus_order(&expand_symbolic_omega(), &a), Err(Error::MissingOrder(_))));
        assert!(min_plus_order(&FormExpression::zero(), &a).is_err());
    }

    /// Relabeling by γ and moving the context by γ leaves the order unchanged.
    #[test]
    fn min_plus_is_symplectic_invariant() {
        let gens = standard_generators(3);
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        let e = expand_symbolic_omega();
        let base = [BoundaryContext::d("04"), BoundaryContext::d("06"), BoundaryContext::P { v: SymplecticSubspace::v1() }];
        for _ in 0..50 {
            let mut g = SymplecticMatrix::identity(3);
            for _ in 0..rng.random_range(1..12) {
                g = g.mul(&gens[rng.random_range(0..gens.len())]);
            }
            for ctx in base {
                let a = OrderAssignment::from_tables(ctx).unwrap();
                let before = min_plus_order(&e, &a).unwrap().order;
                let moved = a.relabel(&g);
                let fresh = OrderAssignment::from_tables(moved.context).unwrap();
                assert_eq!(moved.theta, fresh.theta);
                assert_eq!(min_plus_order(&e.relabel(&g), &fresh).unwrap().order, before);
            }
        }
    }
}
