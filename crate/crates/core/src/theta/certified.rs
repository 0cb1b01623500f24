use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::ops::{Add, Mul, Neg, Sub};

/// A complex value with an absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifiedComplex {
    pub value: Complex64,
    pub err: f64,
}

impl CertifiedComplex {
    pub fn new(value: Complex64, err: f64) -> Self {
        debug_assert!(err >= 0.0);
        Self { value, err }
    }
    pub fn exact(value: Complex64) -> Self {
        Self { value, err: 0.0 }
    }
    pub fn zero() -> Self {
        Self::exact(Complex64::new(0.0, 0.0))
    }
    pub fn one() -> Self {
        Self::exact(Complex64::new(1.0, 0.0))
    }
    pub fn real(v: f64) -> Self {
        Self::exact(Complex64::new(v, 0.0))
    }
    pub fn norm(&self) -> f64 {
        self.value.norm()
    }
    /// True when zero lies inside the error disc.
    pub fn contains_zero(&self) -> bool {
        self.value.norm() <= self.err
    }
    /// err / |value|, infinite when the value is zero.
    pub fn relative_err(&self) -> f64 {
        self.err / self.value.norm()
    }

    /// Quotient with a first-order-free bound; `None` when the divisor may vanish.
    pub fn checked_div(self, rhs: Self) -> Option<Self> {
        let b = rhs.value.norm();
        if b <= rhs.err {
            return None;
        }
        let value = self.value / rhs.value;
        let err = (self.value.norm() * rhs.err + b * self.err) / (b * (b - rhs.err));
        Some(Self::new(value, err))
    }

    pub fn scale(self, k: Complex64) -> Self {
        Self::new(self.value * k, self.err * k.norm())
    }

    pub fn powi(self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc * self;
        }
        acc
    }

    /// Product of many values.
    pub fn product<'a, I: IntoIterator<Item = &'a CertifiedComplex>>(it: I) -> Self {
        it.into_iter().fold(Self::one(), |a, b| a * *b)
    }
}

impl Add for CertifiedComplex {
    type Output = Self;
    fn add(self, r: Self) -> Self {
        let v = self.value + r.value;
        Self::new(v, self.err + r.err + v.norm() * f64::EPSILON)
    }
}

impl Sub for CertifiedComplex {
    type Output = Self;
    fn sub(self, r: Self) -> Self {
        self + (-r)
    }
}

impl Neg for CertifiedComplex {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.value, self.err)
    }
}

impl Mul for CertifiedComplex {
    type Output = Self;
    fn mul(self, r: Self) -> Self {
        let v = self.value * r.value;
        let err = self.value.norm() * r.err + r.value.norm() * self.err + self.err * r.err
            + 2.0 * v.norm() * f64::EPSILON;
        Self::new(v, err)
    }
}

impl std::iter::Sum for CertifiedComplex {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |a, b| a + b)
    }
}

/// 3×3 determinant of certified entries (cofactor expansion, error propagated).
pub fn det3(rows: &[[CertifiedComplex; 3]; 3]) -> CertifiedComplex {
    let m = |i: usize, j: usize| rows[i][j];
    m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
        + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
}

#[derive(Serialize, Deserialize)]
struct Repr {
    re: f64,
    im: f64,
    err: f64,
}

impl Serialize for CertifiedComplex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        Repr { re: self.value.re, im: self.value.im, err: self.err }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CertifiedComplex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = Repr::deserialize(d)?;
        if !(r.err >= 0.0) {
            return Err(serde::de::Error::custom("err must be non-negative"));
        }
        Ok(Self::new(Complex64::new(r.re, r.im), r.err))
    }
}
