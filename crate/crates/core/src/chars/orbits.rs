use super::{is_essentially_independent, triple_sign, Characteristic, SymplecticMatrix};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Invariants deciding Γ_g-conjugacy of sequences of characteristics.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrbitSignature {
    pub parities: Vec<i8>,
    pub triple_signs: BTreeMap<(usize, usize, usize), i8>,
    /// Index subsets (bitmasks) that are essentially independent.
    pub essential_independence: Vec<u32>,
}

pub fn orbit_signature(seq: &[Characteristic]) -> OrbitSignature {
    let n = seq.len();
    let parities = seq.iter().map(|m| m.parity()).collect();
    let mut triple_signs = BTreeMap::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                triple_signs.insert((i, j, k), triple_sign(&seq[i], &seq[j], &seq[k]));
            }
        }
    }
    let essential_independence = (1u32..1 << n)
        .filter(|s| {
            let sub: Vec<_> = (0..n).filter(|i| s >> i & 1 == 1).map(|i| seq[i]).collect();
            is_essentially_independent(&sub)
        })
        .collect();
    OrbitSignature { parities, triple_signs, essential_independence }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryTag {
    EvenSum,
    OddSum,
    Degenerate,
}

/// Orbit of (m, n) for a theta characteristic m and boundary label n ≠ 0.
pub fn classify_boundary_pair(m: &Characteristic, n: &Characteristic) -> Result<BoundaryTag> {
    if n.is_zero() {
        return Err(Error::InvalidBoundaryLabel("n = 0 labels no boundary component".into()));
    }
    let s = *m + *n;
    Ok(if s.is_zero() {
        BoundaryTag::Degenerate
    } else if s.is_even() {
        BoundaryTag::EvenSum
    } else {
        BoundaryTag::OddSum
    })
}

/// A symplectic plane span(n₁, n₂) with ω(n₁, n₂) = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymplecticSubspace {
    n1: Characteristic,
    n2: Characteristic,
}

impl SymplecticSubspace {
    pub fn new(n1: Characteristic, n2: Characteristic) -> Result<Self> {
        if n1.is_zero() || n2.is_zero() || n1 == n2 {
            return Err(Error::InvalidSubspace("generators are dependent".into()));
        }
        if n1.pairing(&n2) != 1 {
            return Err(Error::InvalidSubspace("ω(n₁, n₂) must be 1".into()));
        }
        Ok(Self { n1, n2 })
    }

    /// span([100;000], [000;100]).
    pub fn v0() -> Self {
        Self::new(Characteristic::g3(1, 0), Characteristic::g3(0, 1)).unwrap()
    }

    /// span([101;000], [000;100]).
    pub fn v1() -> Self {
        Self::new(Characteristic::g3(0b101, 0), Characteristic::g3(0, 1)).unwrap()
    }

    pub fn generators(&self) -> (Characteristic, Characteristic) {
        (self.n1, self.n2)
    }

    /// The three nonzero elements.
    pub fn elements(&self) -> [Characteristic; 3] {
        [self.n1, self.n2, self.n1 + self.n2]
    }

    pub fn contains(&self, v: &Characteristic) -> bool {
        v.is_zero() || self.elements().contains(v)
    }

    /// Same plane, regardless of the chosen basis.
    pub fn same_plane(&self, other: &Self) -> bool {
        other.elements().iter().all(|v| self.contains(v))
    }

    pub fn transform(&self, gamma: &SymplecticMatrix) -> Self {
        Self { n1: gamma.act_linear(&self.n1), n2: gamma.act_linear(&self.n2) }
    }
}

/// Number of even elements among m+n₁, m+n₂, m+n₁+n₂.
pub fn classify_subspace_pair(m: &Characteristic, v: &SymplecticSubspace) -> usize {
    v.elements().iter().filter(|n| (*m + **n).is_even()).count()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountReport {
    pub odd: usize,
    pub even: usize,
    pub boundary: Characteristic,
    /// (#odd m with m+n even, #odd m with m+n odd)
    pub boundary_split: (usize, usize),
    pub subspace: SymplecticSubspace,
    /// (#odd m with one even element, #odd m with three)
    pub subspace_split: (usize, usize),
}

pub fn enumerate_counts_for(n: &Characteristic, v: &SymplecticSubspace) -> Result<CountReport> {
    if n.is_zero() {
        return Err(Error::InvalidBoundaryLabel("n = 0".into()));
    }
    let all = Characteristic::all(n.genus());
    let odd: Vec<_> = all.iter().filter(|m| m.is_odd()).copied().collect();
    let even_sum = odd.iter().filter(|m| (**m + *n).is_even()).count();
    let one = odd.iter().filter(|m| classify_subspace_pair(m, v) == 1).count();
    let three = odd.iter().filter(|m| classify_subspace_pair(m, v) == 3).count();
    Ok(CountReport {
        odd: odd.len(),
        even: all.len() - odd.len(),
        boundary: *n,
        boundary_split: (even_sum, odd.len() - even_sum),
        subspace: *v,
        subspace_split: (one, three),
    })
}

/// Counts for n = 04 and V₀.
pub fn enumerate_counts() -> CountReport {
    enumerate_counts_for(&super::ch("04"), &SymplecticSubspace::v0()).expect("fixed labels are valid")
}

/// Disjoint-set forest with path halving.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }
    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
    /// Canonical representative of every element.
    pub fn labels(&mut self) -> Vec<usize> {
        (0..self.parent.len()).map(|i| self.find(i)).collect()
    }
}

/// Orbit labels of all 64^r ordered r-tuples of characteristics (affine action).
pub fn tuple_orbits(genus: u8, r: u32, gens: &[SymplecticMatrix]) -> Vec<usize> {
    let base = 1usize << (2 * genus);
    let total = base.pow(r);
    let tables: Vec<Vec<usize>> = gens
        .iter()
        .map(|s| {
            (0..base)
                .map(|i| s.act(&Characteristic::from_index(genus, i)).index())
                .collect()
        })
        .collect();
    let mut uf = UnionFind::new(total);
    for t in &tables {
        for x in 0..total {
            let mut y = 0usize;
            let mut rest = x;
            let mut mul = 1usize;
            for _ in 0..r {
                y += t[rest % base] * mul;
                rest /= base;
                mul *= base;
            }
            uf.union(x, y);
        }
    }
    uf.labels()
}

/// Decodes a tuple index produced by [`tuple_orbits`].
pub fn tuple_from_index(genus: u8, r: u32, mut x: usize) -> Vec<Characteristic> {
    let base = 1usize << (2 * genus);
    (0..r)
        .map(|_| {
            let m = Characteristic::from_index(genus, x % base);
            x /= base;
            m
        })
        .collect()
}

/// Orbit labels of pairs (m, n), m affine and n linear, indexed m + 64·n.
pub fn boundary_pair_orbits(genus: u8, gens: &[SymplecticMatrix]) -> Vec<usize> {
    let base = 1usize << (2 * genus);
    let mut uf = UnionFind::new(base * base);
    for s in gens {
        let aff: Vec<usize> = (0..base).map(|i| s.act(&Characteristic::from_index(genus, i)).index()).collect();
        let lin: Vec<usize> = (0..base)
            .map(|i| s.act_linear(&Characteristic::from_index(genus, i)).index())
            .collect();
        for n in 0..base {
            for m in 0..base {
                uf.union(m + base * n, aff[m] + base * lin[n]);
            }
        }
    }
    uf.labels()
}
