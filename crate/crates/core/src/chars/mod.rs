//! Theta characteristics over (Z/2)^g × (Z/2)^g.
//!
//! A characteristic is stored as two bit vectors. Bit `i` of `eps` is ε_{i+1}.
//! The octal presentation `(i, j)` with `i = 4ε₁+2ε₂+ε₃` only exists for g = 3.

mod orbits;
mod symplectic;

pub use orbits::*;
pub use symplectic::*;

use crate::error::{Error, Result};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

/// Largest genus the bit layout supports.
pub const MAX_GENUS: u8 = 8;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Characteristic {
    genus: u8,
    eps: u8,
    delta: u8,
}

impl Characteristic {
    pub fn new(genus: u8, eps: u8, delta: u8) -> Result<Self> {
        if genus == 0 || genus > MAX_GENUS {
            return Err(Error::UnsupportedDimension(format!("genus {genus}")));
        }
        let mask = mask(genus);
        if eps & !mask != 0 || delta & !mask != 0 {
            return Err(Error::Precondition(format!(
                "bit vector wider than genus {genus}"
            )));
        }
        Ok(Self { genus, eps, delta })
    }

    /// Genus-3 characteristic from bit masks; panics on out-of-range bits.
    pub const fn g3(eps: u8, delta: u8) -> Self {
        assert!(eps < 8 && delta < 8);
        Self { genus: 3, eps, delta }
    }

    pub fn from_bits(eps: &[u8], delta: &[u8]) -> Result<Self> {
        if eps.len() != delta.len() {
            return Err(Error::Precondition("eps and delta lengths differ".into()));
        }
        let mut e = 0u8;
        let mut d = 0u8;
        for (i, (&a, &b)) in eps.iter().zip(delta).enumerate() {
            if a > 1 || b > 1 {
                return Err(Error::Precondition("entries must be 0 or 1".into()));
            }
            e |= a << i;
            d |= b << i;
        }
        Self::new(eps.len() as u8, e, d)
    }

    /// Octal label `ij`, genus 3 only.
    pub fn from_octal(i: u8, j: u8) -> Result<Self> {
        if i > 7 || j > 7 {
            return Err(Error::Parse(format!("octal digits out of range: {i}{j}")));
        }
        Ok(Self::g3(rev3(i), rev3(j)))
    }

    pub fn zero(genus: u8) -> Self {
        Self { genus, eps: 0, delta: 0 }
    }

    /// Index in `0..4^g`, `eps` in the high bits. Stable across the crate.
    pub fn index(&self) -> usize {
        ((self.eps as usize) << self.genus) | self.delta as usize
    }

    pub fn from_index(genus: u8, idx: usize) -> Self {
        let m = mask(genus) as usize;
        Self {
            genus,
            eps: ((idx >> genus) & m) as u8,
            delta: (idx & m) as u8,
        }
    }

    /// All 4^g characteristics in index order.
    pub fn all(genus: u8) -> Vec<Self> {
        (0..1usize << (2 * genus))
            .map(|i| Self::from_index(genus, i))
            .collect()
    }

    pub fn genus(&self) -> u8 {
        self.genus
    }
    pub fn eps_mask(&self) -> u8 {
        self.eps
    }
    pub fn delta_mask(&self) -> u8 {
        self.delta
    }
    pub fn eps_bit(&self, i: usize) -> u8 {
        (self.eps >> i) & 1
    }
    pub fn delta_bit(&self, i: usize) -> u8 {
        (self.delta >> i) & 1
    }
    pub fn eps_bits(&self) -> Vec<u8> {
        (0..self.genus as usize).map(|i| self.eps_bit(i)).collect()
    }
    pub fn delta_bits(&self) -> Vec<u8> {
        (0..self.genus as usize).map(|i| self.delta_bit(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.eps == 0 && self.delta == 0
    }

    /// +1 for even, -1 for odd.
    pub fn parity(&self) -> i8 {
        if (self.eps & self.delta).count_ones() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn is_even(&self) -> bool {
        self.parity() == 1
    }
    pub fn is_odd(&self) -> bool {
        self.parity() == -1
    }

    /// Standard symplectic pairing ω(m, n) ∈ {0, 1}.
    pub fn pairing(&self, other: &Self) -> u8 {
        (((self.eps & other.delta).count_ones() + (other.eps & self.delta).count_ones()) % 2) as u8
    }

    /// The octal label; g = 3 only.
    pub fn octal(&self) -> Result<OctalLabel> {
        encode_label(self)
    }

    /// Genus-3 octal string, e.g. "77". Falls back to the bit form otherwise.
    pub fn label(&self) -> String {
        match self.octal() {
            Ok(l) => format!("{}{}", l.i, l.j),
            Err(_) => format!("{:?}", self),
        }
    }
}

/// Reverse the three low bits: ε₁ is the high octal digit but bit 0 here.
fn rev3(v: u8) -> u8 {
    ((v & 1) << 2) | (v & 2) | ((v >> 2) & 1)
}

fn mask(genus: u8) -> u8 {
    if genus >= 8 {
        0xff
    } else {
        (1u8 << genus) - 1
    }
}

impl Add for Characteristic {
    type Output = Characteristic;
    fn add(self, rhs: Self) -> Self {
        debug_assert_eq!(self.genus, rhs.genus);
        Self {
            genus: self.genus,
            eps: self.eps ^ rhs.eps,
            delta: self.delta ^ rhs.delta,
        }
    }
}

impl fmt::Debug for Characteristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.genus == 3 {
            write!(f, "θ{}", self.label())
        } else {
            let b = |v: Vec<u8>| v.iter().map(|x| x.to_string()).collect::<String>();
            write!(f, "[{};{}]", b(self.eps_bits()), b(self.delta_bits()))
        }
    }
}

impl fmt::Display for Characteristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.genus == 3 {
            f.write_str(&self.label())
        } else {
            write!(f, "{self:?}")
        }
    }
}

impl FromStr for Characteristic {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let b = s.as_bytes();
        if b.len() != 2 || !b.iter().all(|c| (b'0'..=b'7').contains(c)) {
            return Err(Error::Parse(format!("expected two octal digits, got {s:?}")));
        }
        Self::from_octal(b[0] - b'0', b[1] - b'0')
    }
}

/// Shorthand for tests and tables: `ch("77")`. Panics on bad input.
pub fn ch(s: &str) -> Characteristic {
    s.parse().expect("valid octal characteristic")
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CharRepr {
    Octal(String),
    Bits { eps: Vec<u8>, delta: Vec<u8> },
}

impl Serialize for Characteristic {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.genus == 3 {
            s.serialize_str(&self.label())
        } else {
            CharRepr::Bits {
                eps: self.eps_bits(),
                delta: self.delta_bits(),
            }
            .serialize(s)
        }
    }
}

impl<'de> Deserialize<'de> for Characteristic {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match CharRepr::deserialize(d)? {
            CharRepr::Octal(s) => s.parse().map_err(D::Error::custom),
            CharRepr::Bits { eps, delta } => {
                Characteristic::from_bits(&eps, &delta).map_err(D::Error::custom)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OctalLabel {
    pub i: u8,
    pub j: u8,
}

pub fn encode_label(m: &Characteristic) -> Result<OctalLabel> {
    if m.genus != 3 {
        return Err(Error::UnsupportedDimension(format!(
            "octal labels need genus 3, got {}",
            m.genus
        )));
    }
    Ok(OctalLabel {
        i: rev3(m.eps),
        j: rev3(m.delta),
    })
}

pub fn decode_label(l: OctalLabel) -> Result<Characteristic> {
    Characteristic::from_octal(l.i, l.j)
}

pub fn parity(m: &Characteristic) -> i8 {
    m.parity()
}

/// e(m₁)e(m₂)e(m₃)e(m₁+m₂+m₃); -1 is azygetic.
pub fn triple_sign(a: &Characteristic, b: &Characteristic, c: &Characteristic) -> i8 {
    a.parity() * b.parity() * c.parity() * (*a + *b + *c).parity()
}

pub fn is_azygetic(a: &Characteristic, b: &Characteristic, c: &Characteristic) -> bool {
    triple_sign(a, b, c) == -1
}

/// Every 3-subset azygetic.
pub fn is_fundamental_system(seq: &[Characteristic]) -> bool {
    let n = seq.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if !is_azygetic(&seq[i], &seq[j], &seq[k]) {
                    return false;
                }
            }
        }
    }
    true
}

/// No even-size subsequence (of size ≥ 2) sums to zero.
pub fn is_essentially_independent(seq: &[Characteristic]) -> bool {
    let n = seq.len();
    if n > 20 {
        // 2^n subsets; nothing in this crate needs more.
        panic!("sequence too long for the subset test");
    }
    (1u32..1 << n)
        .filter(|s| s.count_ones() >= 2 && s.count_ones() % 2 == 0)
        .all(|s| {
            let mut acc = Characteristic::zero(seq[0].genus);
            for (i, m) in seq.iter().enumerate() {
                if s >> i & 1 == 1 {
                    acc = acc + *m;
                }
            }
            !acc.is_zero()
        })
}

/// The unique five even characteristics completing an azygetic odd triple to a fundamental system.
pub fn complete_fundamental_system(
    triple: [Characteristic; 3],
) -> Result<[Characteristic; 5]> {
    let g = triple[0].genus;
    if g != 3 || triple.iter().any(|m| m.genus != 3) {
        return Err(Error::UnsupportedDimension("completion is for genus 3".into()));
    }
    if triple.iter().any(|m| !m.is_odd()) {
        return Err(Error::Precondition("triple must consist of odd characteristics".into()));
    }
    if !is_azygetic(&triple[0], &triple[1], &triple[2]) {
        return Err(Error::Precondition("triple is not azygetic".into()));
    }
    // Candidates must be azygetic with every pair of the triple.
    let cands: Vec<Characteristic> = Characteristic::all(3)
        .into_iter()
        .filter(|m| m.is_even())
        .filter(|m| {
            is_azygetic(&triple[0], &triple[1], m)
                && is_azygetic(&triple[0], &triple[2], m)
                && is_azygetic(&triple[1], &triple[2], m)
        })
        .collect();
    let mut found: Vec<[Characteristic; 5]> = Vec::new();
    let mut cur: Vec<Characteristic> = Vec::with_capacity(5);
    extend_system(&triple, &cands, 0, &mut cur, &mut found);
    match found.len() {
        1 => Ok(found[0]),
        0 => Err(Error::InternalConsistency(format!(
            "no completion for ({}, {}, {})",
            triple[0], triple[1], triple[2]
        ))),
        k => Err(Error::InternalConsistency(format!(
            "{k} completions for ({}, {}, {})",
            triple[0], triple[1], triple[2]
        ))),
    }
}

fn extend_system(
    base: &[Characteristic; 3],
    cands: &[Characteristic],
    start: usize,
    cur: &mut Vec<Characteristic>,
    out: &mut Vec<[Characteristic; 5]>,
) {
    if cur.len() == 5 {
        out.push([cur[0], cur[1], cur[2], cur[3], cur[4]]);
        return;
    }
    for idx in start..cands.len() {
        let c = cands[idx];
        let ok = base
            .iter()
            .chain(cur.iter())
            .enumerate()
            .all(|(i, x)| {
                base.iter()
                    .chain(cur.iter())
                    .skip(i + 1)
                    .all(|y| is_azygetic(x, y, &c))
            });
        if ok {
            cur.push(c);
            extend_system(base, cands, idx + 1, cur, out);
            cur.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn octal_roundtrip() {
        for m in Characteristic::all(3) {
            let l = encode_label(&m).unwrap();
            assert_eq!(decode_label(l).unwrap(), m);
        }
        let m = Characteristic::from_bits(&[1, 1, 0], &[0, 1, 1]).unwrap();
        assert_eq!(encode_label(&m).unwrap(), OctalLabel { i: 6, j: 3 });
        assert_eq!(ch("77").eps_bits(), vec![1, 1, 1]);
    }

    #[test]
    fn octal_needs_genus_three() {
        let m = Characteristic::new(2, 1, 1).unwrap();
        assert!(matches!(m.octal(), Err(Error::UnsupportedDimension(_))));
    }

    #[test]
    fn parity_counts() {
        let all = Characteristic::all(3);
        assert_eq!(all.iter().filter(|m| m.is_even()).count(), 36);
        assert_eq!(all.iter().filter(|m| m.is_odd()).count(), 28);
        assert_eq!(ch("77").parity(), -1);
        assert_eq!(ch("00").parity(), 1);
    }

    #[test]
    fn triple_signs() {
        assert_eq!(triple_sign(&ch("77"), &ch("64"), &ch("13")), -1);
        assert!((ch("77") + ch("64") + ch("13")).is_zero());
        assert_eq!(triple_sign(&ch("77"), &ch("51"), &ch("26")), -1);
        assert_eq!(triple_sign(&ch("00"), &ch("00"), &ch("00")), 1);
    }

    #[test]
    fn fundamental_systems() {
        let s: Vec<_> = ["77", "64", "13", "42", "06", "30", "21", "55"].iter().map(|s| ch(s)).collect();
        assert!(is_fundamental_system(&s));
        assert!(!is_fundamental_system(&[ch("00"), ch("00"), ch("00")]));
    }

    #[test]
    fn essential_independence() {
        assert!(!is_essentially_independent(&[ch("35"), ch("35")]));
        assert!(is_essentially_independent(&[ch("77"), ch("64"), ch("13")]));
        assert!(is_essentially_independent(&[]));
    }

    #[test]
    fn completion_of_display_triples() {
        let q = complete_fundamental_system([ch("77"), ch("64"), ch("13")]).unwrap();
        let mut got: Vec<_> = q.iter().map(|m| m.label()).collect();
        got.sort();
        assert_eq!(got, vec!["06", "21", "30", "42", "55"]);
    }

    #[test]
    fn completion_rejects_bad_input() {
        assert!(matches!(
            complete_fundamental_system([ch("77"), ch("00"), ch("13")]),
            Err(Error::Precondition(_))
        ));
        // 77, 64, 51: check it is azygetic first, then a syzygetic one.
        let syz = Characteristic::all(3)
            .into_iter()
            .filter(|m| m.is_odd())
            .find(|m| triple_sign(&ch("77"), &ch("64"), m) == 1)
            .unwrap();
        assert!(matches!(
            complete_fundamental_system([ch("77"), ch("64"), syz]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn serde_forms() {
        let m = ch("63");
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, "\"63\"");
        let back: Characteristic = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        let bits: Characteristic =
            serde_json::from_str(r#"{"eps":[1,1,0],"delta":[0,1,1]}"#).unwrap();
        assert_eq!(bits, m);
        assert!(serde_json::from_str::<Characteristic>("\"8x\"").is_err());
    }
}
