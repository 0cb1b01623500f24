//! Exact rationals serialized as `{num, den}`.

use num_rational::Rational64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Serialize, Deserialize)]
struct Frac {
    num: i64,
    den: i64,
}

impl From<Rational64> for Frac {
    fn from(q: Rational64) -> Self {
        Frac { num: *q.numer(), den: *q.denom() }
    }
}

fn back<E: serde::de::Error>(f: Frac) -> Result<Rational64, E> {
    if f.den == 0 {
        return Err(E::custom("zero denominator"));
    }
    Ok(Rational64::new(f.num, f.den))
}

pub fn serialize<S: Serializer>(q: &Rational64, s: S) -> Result<S::Ok, S::Error> {
    Frac::from(*q).serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational64, D::Error> {
    back(Frac::deserialize(d)?)
}

/// Same for fixed-length arrays.
pub mod array {
    use super::*;

    pub fn serialize<S: Serializer, const N: usize>(q: &[Rational64; N], s: S) -> Result<S::Ok, S::Error> {
        q.iter().map(|x| Frac::from(*x)).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>, const N: usize>(d: D) -> Result<[Rational64; N], D::Error> {
        let v = Vec::<Frac>::deserialize(d)?;
        let n = v.len();
        let q: Vec<Rational64> = v.into_iter().map(back).collect::<Result<_, _>>()?;
        q.try_into().map_err(|_| serde::de::Error::invalid_length(n, &"fixed-length array"))
    }
}

/// Same for `Option`.
pub mod option {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Option<Rational64>, s: S) -> Result<S::Ok, S::Error> {
        q.map(Frac::from).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational64>, D::Error> {
        Option::<Frac>::deserialize(d)?.map(back).transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize, Deserialize, PartialEq, Debug)]
    struct W {
        #[serde(with = "crate::rational")]
        q: Rational64,
        #[serde(with = "crate::rational::array")]
        v: [Rational64; 2],
    }

    #[test]
    fn round_trip() {
        let w = W { q: Rational64::new(-10, 8), v: [Rational64::new(1, 8), Rational64::from_integer(3)] };
        let s = serde_json::to_string(&w).unwrap();
        assert_eq!(s, r#"{"q":{"num":-5,"den":4},"v":[{"num":1,"den":8},{"num":3,"den":1}]}"#);
        assert_eq!(serde_json::from_str::<W>(&s).unwrap(), w);
        assert!(serde_json::from_str::<W>(r#"{"q":{"num":1,"den":0},"v":[]}"#).is_err());
    }
}
