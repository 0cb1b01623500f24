use crate::chars::{ch, is_azygetic, Characteristic, SymplecticMatrix};
use crate::error::{Error, Result};
use crate::quartic::BitangentForm;
use crate::theta::{jacobi_sign, CertifiedComplex, ThetaTable};
use crate::chars::complete_fundamental_system;
use num_complex::Complex64;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

/// A formal variable of a theta expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Symbol {
    /// θ[m](τ, 0) for even m.
    Theta { m: Characteristic },
    /// ∂θ[m]/∂z_{axis+1} at z = 0 for odd m.
    Grad { m: Characteristic, axis: usize },
    Pi,
}

impl Symbol {
    pub fn theta(label: &str) -> Self {
        Symbol::Theta { m: ch(label) }
    }

    pub fn relabel(self, g: &SymplecticMatrix) -> Self {
        match self {
            Symbol::Theta { m } => Symbol::Theta { m: g.act(&m) },
            Symbol::Grad { m, axis } => Symbol::Grad { m: g.act(&m), axis },
            Symbol::Pi => Symbol::Pi,
        }
    }

    /// ½ per theta constant, 5/6 per gradient component.
    pub fn weight(&self) -> Rational64 {
        match self {
            Symbol::Theta { .. } => Rational64::new(1, 2),
            Symbol::Grad { .. } => Rational64::new(5, 6),
            Symbol::Pi => Rational64::from_integer(0),
        }
    }

    fn value(&self, t: &ThetaTable) -> CertifiedComplex {
        match self {
            Symbol::Theta { m } => t.theta(m),
            Symbol::Grad { m, axis } => t.grad_component(m, *axis),
            Symbol::Pi => CertifiedComplex::new(Complex64::new(PI, 0.0), PI * f64::EPSILON),
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Theta { m } => write!(f, "θ{m}"),
            Symbol::Grad { m, axis } => write!(f, "∂{}θ{m}", axis + 1),
            Symbol::Pi => write!(f, "π"),
        }
    }
}

/// A multiset of symbols, kept sorted with merged exponents.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Monomial(Vec<(Symbol, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn from_symbols<I: IntoIterator<Item = Symbol>>(it: I) -> Self {
        let mut counts: BTreeMap<Symbol, u32> = BTreeMap::new();
        for s in it {
            *counts.entry(s).or_default() += 1;
        }
        Monomial(counts.into_iter().collect())
    }

    pub fn factors(&self) -> &[(Symbol, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    /// Number of factors (with multiplicity) satisfying `pred`.
    pub fn count(&self, pred: impl Fn(&Symbol) -> bool) -> u32 {
        self.0.iter().filter(|(s, _)| pred(s)).map(|(_, e)| e).sum()
    }

    pub fn contains(&self, s: &Symbol) -> bool {
        self.0.iter().any(|(x, _)| x == s)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut counts: BTreeMap<Symbol, u32> = self.0.iter().copied().collect();
        for (s, e) in &o.0 {
            *counts.entry(*s).or_default() += e;
        }
        Monomial(counts.into_iter().collect())
    }

    pub fn weight(&self) -> Rational64 {
        self.0.iter().map(|(s, e)| s.weight() * Rational64::from_integer(*e as i64)).sum()
    }

    pub fn relabel(&self, g: &SymplecticMatrix) -> Self {
        Monomial::from_symbols(self.0.iter().flat_map(|(s, e)| std::iter::repeat_n(s.relabel(g), *e as usize)))
    }

    pub fn eval(&self, t: &ThetaTable) -> CertifiedComplex {
        self.0.iter().fold(CertifiedComplex::one(), |acc, (s, e)| acc * s.value(t).powi(*e))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, (s, e)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "·")?;
            }
            if *e == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}^{e}")?;
            }
        }
        Ok(())
    }
}

/// An integer polynomial in theta symbols.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormExpression {
    terms: BTreeMap<Monomial, i128>,
}

impl FormExpression {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(coeff: i128, m: Monomial) -> Self {
        let mut e = Self::zero();
        e.add_term(coeff, m);
        e
    }

    pub fn symbols<I: IntoIterator<Item = Symbol>>(coeff: i128, it: I) -> Self {
        Self::term(coeff, Monomial::from_symbols(it))
    }

    /// Product of theta constants with the given labels.
    pub fn thetas(labels: &[&str]) -> Self {
        Self::symbols(1, labels.iter().map(|l| Symbol::theta(l)))
    }

    pub fn add_term(&mut self, coeff: i128, m: Monomial) {
        if coeff == 0 {
            return;
        }
        let c = self.terms.entry(m.clone()).or_insert(0);
        *c = c.checked_add(coeff).expect("coefficient overflow");
        if *c == 0 {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, i128)> {
        self.terms.iter().map(|(m, c)| (m, *c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> i128 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (m, c) in o.terms() {
            r.add_term(c, m.clone());
        }
        r
    }

    pub fn scale(&self, k: i128) -> Self {
        let mut r = Self::zero();
        for (m, c) in self.terms() {
            r.add_term(c.checked_mul(k).expect("coefficient overflow"), m.clone());
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(-1))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::zero();
        for (a, x) in self.terms() {
            for (b, y) in o.terms() {
                r.add_term(x.checked_mul(y).expect("coefficient overflow"), a.mul(b));
            }
        }
        r
    }

    /// Every characteristic replaced by its image under γ.
    pub fn relabel(&self, g: &SymplecticMatrix) -> Self {
        let mut r = Self::zero();
        for (m, c) in self.terms() {
            r.add_term(c, m.relabel(g));
        }
        r
    }

    pub fn eval(&self, t: &ThetaTable) -> CertifiedComplex {
        self.terms().map(|(m, c)| m.eval(t).scale(Complex64::new(c as f64, 0.0))).sum()
    }
}

impl fmt::Display for FormExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms().enumerate() {
            let sign = if c < 0 { "−" } else if k > 0 { "+" } else { "" };
            if k > 0 {
                write!(f, " {sign} ")?;
            } else {
                write!(f, "{sign}")?;
            }
            if c.abs() != 1 {
                write!(f, "{}·", c.abs())?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

/// Common weight of all monomials.
pub fn weight(expr: &FormExpression) -> Result<Rational64> {
    let mut ws = expr.terms().map(|(m, _)| m.weight());
    let w = ws.next().ok_or_else(|| Error::Domain("the zero expression has no weight".into()))?;
    if let Some(other) = ws.find(|x| *x != w) {
        return Err(Error::MixedWeight(format!("monomials of weight {w} and {other}")));
    }
    Ok(w)
}

/// D(n₁,n₂,n₃) as ±π³·∏θ over the completing quintuple when the triple is
/// azygetic, otherwise as the 3×3 determinant of gradient symbols.
pub fn jacobian_expression(triple: &[Characteristic; 3]) -> Result<FormExpression> {
    if triple.iter().any(|m| !m.is_odd()) {
        return Err(Error::Precondition("Jacobian determinants take odd characteristics".into()));
    }
    if is_azygetic(&triple[0], &triple[1], &triple[2]) {
        let q = complete_fundamental_system(*triple)?;
        let s = jacobi_sign(triple)?.sign as i128;
        let syms = q.iter().map(|m| Symbol::Theta { m: *m }).chain(std::iter::repeat_n(Symbol::Pi, 3));
        return Ok(FormExpression::symbols(s, syms));
    }
    let mut e = FormExpression::zero();
    for (p, sign) in [([0, 1, 2], 1), ([1, 2, 0], 1), ([2, 0, 1], 1), ([0, 2, 1], -1), ([2, 1, 0], -1), ([1, 0, 2], -1)] {
        let syms = (0..3).map(|r| Symbol::Grad { m: triple[r], axis: p[r] });
        e.add_term(sign, Monomial::from_symbols(syms));
    }
    Ok(e)
}

/// A bitangent form as a polynomial in theta symbols, each D replaced by
/// [`jacobian_expression`].
pub fn bitangent_form_expression(form: &BitangentForm) -> Result<FormExpression> {
    let beta = FormExpression::symbols(1, form.beta.iter().map(|m| Symbol::Theta { m: *m }));
    let gamma = FormExpression::symbols(1, form.gamma.iter().map(|m| Symbol::Theta { m: *m }));
    let [p0, p1] = [jacobian_expression(&form.p[0])?, jacobian_expression(&form.p[1])?];
    let [q0, q1] = [jacobian_expression(&form.q[0])?, jacobian_expression(&form.q[1])?];
    let inner = beta.mul(&p0).add(&gamma.mul(&p1).scale(form.inner_sign as i128));
    let outer = beta.mul(&gamma).mul(&q0).mul(&q1).scale(4 * form.outer_sign as i128);
    Ok(inner.mul(&inner).add(&outer))
}

const OMEGA_A: [&str; 11] = ["01", "10", "37", "43", "52", "75", "42", "06", "30", "21", "55"];
const OMEGA_B: [&str; 11] = ["02", "25", "34", "40", "67", "76", "33", "05", "14", "60", "42"];
const OMEGA_C: [&str; 22] = [
    "01", "02", "10", "25", "34", "37", "40", "43", "52", "67", "75", "76", "00", "04", "57", "70", "61", "73", "20", "07", "00",
    "16",
];

/// π⁶·((A + B)² − 4C), the hyperflex form Ω77 as four theta monomials.
pub fn expand_symbolic_omega() -> FormExpression {
    let a = FormExpression::thetas(&OMEGA_A);
    let b = FormExpression::thetas(&OMEGA_B);
    let c = FormExpression::thetas(&OMEGA_C);
    let s = a.add(&b);
    let pi6 = FormExpression::symbols(1, [Symbol::Pi; 6]);
    s.mul(&s).sub(&c.scale(4)).mul(&pi6)
}
