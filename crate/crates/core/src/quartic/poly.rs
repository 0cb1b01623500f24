use crate::error::{Error, Result};
use crate::theta::CertifiedComplex;
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Exponent triples of degree `d` in graded-lex order: x^d, x^{d−1}y, x^{d−1}z, …, z^d.
pub fn monomials(d: u32) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    for a in (0..=d).rev() {
        for b in (0..=d - a).rev() {
            out.push([a, b, d - a - b]);
        }
    }
    out
}

fn monomial_index(e: [u32; 3]) -> usize {
    let d = e[0] + e[1] + e[2];
    let k = d - e[0];
    // rows with larger x-exponent come first; row for x-exponent a has d−a+1 entries
    (k * (k + 1) / 2 + (k - e[1])) as usize
}

/// A homogeneous ternary polynomial with certified coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct HomPoly {
    pub degree: u32,
    pub coeffs: Vec<CertifiedComplex>,
}

impl HomPoly {
    pub fn zero(degree: u32) -> Self {
        let n = ((degree + 1) * (degree + 2) / 2) as usize;
        Self { degree, coeffs: vec![CertifiedComplex::zero(); n] }
    }

    pub fn coeff(&self, e: [u32; 3]) -> CertifiedComplex {
        self.coeffs[monomial_index(e)]
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero(self.degree + o.degree);
        for (i, ea) in monomials(self.degree).into_iter().enumerate() {
            if self.coeffs[i].value.norm() == 0.0 && self.coeffs[i].err == 0.0 {
                continue;
            }
            for (j, eb) in monomials(o.degree).into_iter().enumerate() {
                let k = monomial_index([ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]]);
                out.coeffs[k] = out.coeffs[k] + self.coeffs[i] * o.coeffs[j];
            }
        }
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.degree, o.degree);
        Self { degree: self.degree, coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| *a + *b).collect() }
    }

    pub fn scale(&self, k: CertifiedComplex) -> Self {
        Self { degree: self.degree, coeffs: self.coeffs.iter().map(|c| *c * k).collect() }
    }

    pub fn eval(&self, p: [Complex64; 3]) -> Complex64 {
        monomials(self.degree)
            .into_iter()
            .zip(&self.coeffs)
            .map(|(e, c)| c.value * p[0].powu(e[0]) * p[1].powu(e[1]) * p[2].powu(e[2]))
            .sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.value.norm()).fold(0.0, f64::max)
    }

    pub fn max_err(&self) -> f64 {
        self.coeffs.iter().map(|c| c.err).fold(0.0, f64::max)
    }
}

/// l₁x + l₂y + l₃z.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearForm {
    pub coefficients: [CertifiedComplex; 3],
}

impl LinearForm {
    pub fn new(c: [Complex64; 3]) -> Self {
        Self { coefficients: c.map(CertifiedComplex::exact) }
    }
    pub fn certified(c: [CertifiedComplex; 3]) -> Self {
        Self { coefficients: c }
    }
    pub fn real(c: [f64; 3]) -> Self {
        Self::new(c.map(|v| Complex64::new(v, 0.0)))
    }
    pub fn values(&self) -> [Complex64; 3] {
        self.coefficients.map(|c| c.value)
    }
    pub fn scale(&self, k: CertifiedComplex) -> Self {
        Self { coefficients: self.coefficients.map(|c| c * k) }
    }
    pub fn neg(&self) -> Self {
        Self { coefficients: self.coefficients.map(|c| -c) }
    }
    pub fn max_abs(&self) -> f64 {
        self.coefficients.iter().map(|c| c.value.norm()).fold(0.0, f64::max)
    }
    pub fn to_poly(&self) -> HomPoly {
        HomPoly { degree: 1, coeffs: self.coefficients.to_vec() }
    }
    /// Rejects forms whose coefficients all lie below `threshold`.
    pub fn check_line(&self, threshold: f64) -> Result<()> {
        if self.max_abs() <= threshold {
            return Err(Error::DegenerateLine(format!("max |l_i| = {:e}", self.max_abs())));
        }
        Ok(())
    }
    /// True when the two forms are proportional within relative `tol`.
    pub fn is_proportional(&self, o: &Self, tol: f64) -> bool {
        let a = self.values();
        let b = o.values();
        let scale = self.max_abs() * o.max_abs();
        (0..3).all(|i| (0..3).all(|j| (a[i] * b[j] - a[j] * b[i]).norm() <= tol * scale))
    }
}

/// det[l; m; n] of three linear forms.
pub fn det_lines(l: &LinearForm, m: &LinearForm, n: &LinearForm) -> CertifiedComplex {
    crate::theta::det3(&[l.coefficients, m.coefficients, n.coefficients])
}

/// A plane quartic: the 15 coefficients of x⁴, x³y, x³z, x²y², x²yz, x²z², xy³,
/// xy²z, xyz², xz³, y⁴, y³z, y²z², yz³, z⁴ in that order.
#[derive(Debug, Clone, PartialEq)]
pub struct TernaryQuartic {
    pub poly: HomPoly,
}

impl TernaryQuartic {
    pub fn from_poly(poly: HomPoly) -> Result<Self> {
        if poly.degree != 4 {
            return Err(Error::Domain(format!("expected degree 4, got {}", poly.degree)));
        }
        Ok(Self { poly })
    }

    pub fn from_coefficients(c: &[Complex64]) -> Result<Self> {
        if c.len() != 15 {
            return Err(Error::Domain(format!("a quartic has 15 coefficients, got {}", c.len())));
        }
        Ok(Self { poly: HomPoly { degree: 4, coeffs: c.iter().map(|&v| CertifiedComplex::exact(v)).collect() } })
    }

    /// Fourth power of a linear form.
    pub fn power_of_line(l: &LinearForm) -> Self {
        let p = l.to_poly();
        let p2 = p.mul(&p);
        Self { poly: p2.mul(&p2) }
    }

    pub fn coefficients(&self) -> Vec<Complex64> {
        self.poly.coeffs.iter().map(|c| c.value).collect()
    }

    pub fn coefficient(&self, e: [u32; 3]) -> Complex64 {
        self.poly.coeff(e).value
    }

    pub fn eval(&self, p: [Complex64; 3]) -> Complex64 {
        self.poly.eval(p)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self { poly: self.poly.add(&o.poly) }
    }

    /// Gradient at p (three partial derivatives).
    pub fn gradient(&self, p: [Complex64; 3]) -> [Complex64; 3] {
        let mut g = [Complex64::new(0.0, 0.0); 3];
        for (e, c) in monomials(4).into_iter().zip(&self.poly.coeffs) {
            for v in 0..3 {
                if e[v] == 0 {
                    continue;
                }
                let mut t = c.value * e[v] as f64;
                for w in 0..3 {
                    let k = if w == v { e[w] - 1 } else { e[w] };
                    t *= p[w].powu(k);
                }
                g[v] += t;
            }
        }
        g
    }

    /// Restriction to the line l = 0, dehomogenized at the coordinate of largest
    /// |l_i|. Returns the binary quartic in the two remaining coordinates.
    pub fn restrict_to_line(&self, l: &LinearForm) -> Result<BinaryQuartic> {
        l.check_line(0.0)?;
        let v = l.values();
        let k = (0..3).max_by(|&a, &b| v[a].norm().total_cmp(&v[b].norm())).unwrap();
        let (i, j) = ((k + 1) % 3, (k + 2) % 3);
        // x_k = −(l_i x_i + l_j x_j)/l_k; the other two coordinates become s and t.
        let mut sub: [HomPoly; 3] = [HomPoly::zero(1), HomPoly::zero(1), HomPoly::zero(1)];
        sub[i].coeffs[0] = CertifiedComplex::one();
        sub[j].coeffs[1] = CertifiedComplex::one();
        let lk = l.coefficients[k];
        let ri = (-l.coefficients[i]).checked_div(lk).ok_or_else(|| Error::DegenerateLine("pivot vanishes".into()))?;
        let rj = (-l.coefficients[j]).checked_div(lk).ok_or_else(|| Error::DegenerateLine("pivot vanishes".into()))?;
        sub[k].coeffs[0] = ri;
        sub[k].coeffs[1] = rj;
        // variables of the substitution polynomials are (s, t, unused)
        let mut acc = HomPoly::zero(4);
        for (e, c) in monomials(4).into_iter().zip(&self.poly.coeffs) {
            let mut term = HomPoly { degree: 0, coeffs: vec![*c] };
            for v in 0..3 {
                for _ in 0..e[v] {
                    term = term.mul(&sub[v]);
                }
            }
            acc = acc.add(&term);
        }
        let coeffs: Vec<CertifiedComplex> = (0..=4u32).map(|a| acc.coeff([4 - a, a, 0])).collect();
        Ok(BinaryQuartic { coeffs: [coeffs[0], coeffs[1], coeffs[2], coeffs[3], coeffs[4]], pivot: k })
    }

    /// Maximum relative coefficient error.
    pub fn relative_err(&self) -> f64 {
        self.poly.max_err() / self.poly.max_abs()
    }
}

/// c₀s⁴ + c₁s³t + c₂s²t² + c₃st³ + c₄t⁴.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinaryQuartic {
    pub coeffs: [CertifiedComplex; 5],
    /// Coordinate eliminated when restricting to a line.
    pub pivot: usize,
}

impl BinaryQuartic {
    pub fn new(c: [Complex64; 5]) -> Self {
        Self { coeffs: c.map(CertifiedComplex::exact), pivot: 0 }
    }
    pub fn values(&self) -> [Complex64; 5] {
        self.coeffs.map(|c| c.value)
    }
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.value.norm()).fold(0.0, f64::max)
    }
    pub fn max_err(&self) -> f64 {
        self.coeffs.iter().map(|c| c.err).fold(0.0, f64::max)
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    /// Informational on input; the exponents decide.
    #[serde(default)]
    monomial: String,
    exponents: [u32; 3],
    re: f64,
    #[serde(default)]
    im: f64,
    #[serde(default)]
    err: f64,
}

fn monomial_name(e: [u32; 3]) -> String {
    let mut s = String::new();
    for (v, k) in ["x", "y", "z"].iter().zip(e) {
        match k {
            0 => {}
            1 => s.push_str(v),
            _ => s.push_str(&format!("{v}^{k}")),
        }
    }
    s
}

impl Serialize for TernaryQuartic {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<TermRepr> = monomials(4)
            .into_iter()
            .zip(&self.poly.coeffs)
            .map(|(e, c)| TermRepr { monomial: monomial_name(e), exponents: e, re: c.value.re, im: c.value.im, err: c.err })
            .collect();
        terms.serialize(s)
    }
}

impl<'de> Deserialize<'de> for TernaryQuartic {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let terms = Vec::<TermRepr>::deserialize(d)?;
        let mut poly = HomPoly::zero(4);
        // absent monomials have coefficient zero
        let mut seen = [false; 15];
        for t in terms {
            if t.exponents.iter().sum::<u32>() != 4 {
                return Err(serde::de::Error::custom("exponents must sum to 4"));
            }
            let k = monomial_index(t.exponents);
            if seen[k] {
                return Err(serde::de::Error::custom("duplicate monomial"));
            }
            seen[k] = true;
            poly.coeffs[k] = CertifiedComplex::new(Complex64::new(t.re, t.im), t.err.max(0.0));
        }
        Ok(Self { poly })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_order_and_index() {
        let m = monomials(4);
        assert_eq!(m.len(), 15);
        assert_eq!(m[0], [4, 0, 0]);
        assert_eq!(m[1], [3, 1, 0]);
        assert_eq!(m[2], [3, 0, 1]);
        assert_eq!(m[14], [0, 0, 4]);
        for (i, e) in m.iter().enumerate() {
            assert_eq!(monomial_index(*e), i);
        }
    }

    #[test]
    fn power_of_line_evaluates() {
        let l = LinearForm::real([1.0, -2.0, 0.5]);
        let q = TernaryQuartic::power_of_line(&l);
        let p = [Complex64::new(0.3, 0.1), Complex64::new(-1.0, 0.0), Complex64::new(2.0, 0.5)];
        let lv = p[0] - p[1] * 2.0 + p[2] * 0.5;
        assert!((q.eval(p) - lv.powu(4)).norm() < 1e-12);
    }

    #[test]
    fn restriction_vanishes_on_line_points() {
        let c: Vec<Complex64> = (0..15).map(|k| Complex64::new(k as f64 * 0.3 - 2.0, (k * k) as f64 * 0.01)).collect();
        let q = TernaryQuartic::from_coefficients(&c).unwrap();
        let l = LinearForm::real([0.2, 1.5, -0.7]);
        let b = q.restrict_to_line(&l).unwrap();
        assert_eq!(b.pivot, 1);
        // point with x = s, z = t, y solved from the line
        let (s, t) = (Complex64::new(0.4, 0.2), Complex64::new(-1.1, 0.0));
        let y = -(s * 0.2 + t * -0.7) / 1.5;
        let direct = q.eval([s, y, t]);
        // pivot 1: remaining coordinates are (z, x) in cyclic order
        let bv = b.values();
        let via: Complex64 = (0..5).map(|a| bv[a] * t.powu(4 - a as u32) * s.powu(a as u32)).sum();
        assert!((direct - via).norm() < 1e-10 * direct.norm().max(1.0));
    }

    #[test]
    fn gradient_matches_finite_difference() {
        let c: Vec<Complex64> = (0..15).map(|k| Complex64::new((k % 4) as f64 - 1.5, 0.2 * k as f64)).collect();
        let q = TernaryQuartic::from_coefficients(&c).unwrap();
        let p = [Complex64::new(0.3, 0.1), Complex64::new(-0.4, 0.0), Complex64::new(0.9, -0.2)];
        let g = q.gradient(p);
        let h = 1e-6;
        for v in 0..3 {
            let mut a = p;
            let mut b = p;
            a[v] += h;
            b[v] -= h;
            let fd = (q.eval(a) - q.eval(b)) / (2.0 * h);
            assert!((fd - g[v]).norm() < 1e-6);
        }
    }

    #[test]
    fn json_round_trip_and_validation() {
        let c: Vec<Complex64> = (0..15).map(|k| Complex64::new(k as f64, -1.0)).collect();
        let q = TernaryQuartic::from_coefficients(&c).unwrap();
        let s = serde_json::to_string(&q).unwrap();
        assert!(s.contains("\"monomial\":\"x^2yz\""));
        let back: TernaryQuartic = serde_json::from_str(&s).unwrap();
        assert_eq!(back, q);
        // missing terms are zero
        let mut v: Vec<serde_json::Value> = serde_json::from_str(&s).unwrap();
        let last = v.pop().unwrap();
        let sparse: TernaryQuartic = serde_json::from_value(serde_json::Value::Array(v.clone())).unwrap();
        assert_eq!(sparse.coefficients()[14], Complex64::new(0.0, 0.0));
        assert_eq!(sparse.coefficients()[..14], q.coefficients()[..14]);
        let mut dup = v.clone();
        dup.push(v[0].clone());
        assert!(serde_json::from_value::<TernaryQuartic>(serde_json::Value::Array(dup)).is_err());
        let mut bad = last;
        bad["exponents"] = serde_json::json!([1, 1, 1]);
        v.push(bad);
        assert!(serde_json::from_value::<TernaryQuartic>(serde_json::Value::Array(v)).is_err());
    }
}
