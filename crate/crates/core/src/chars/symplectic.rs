use super::Characteristic;
use crate::error::{Error, Result};
use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

/// γ = [[A, B], [C, D]] with integer g×g blocks stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymplecticMatrix {
    pub g: usize,
    pub a: Vec<i64>,
    pub b: Vec<i64>,
    pub c: Vec<i64>,
    pub d: Vec<i64>,
}

fn eye(g: usize) -> Vec<i64> {
    let mut m = vec![0; g * g];
    for i in 0..g {
        m[i * g + i] = 1;
    }
    m
}

fn mat_mul(g: usize, x: &[i64], y: &[i64]) -> Vec<i64> {
    let mut out = vec![0; g * g];
    for i in 0..g {
        for k in 0..g {
            let v = x[i * g + k];
            if v == 0 {
                continue;
            }
            for j in 0..g {
                out[i * g + j] += v * y[k * g + j];
            }
        }
    }
    out
}

fn mat_add(x: &[i64], y: &[i64]) -> Vec<i64> {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

fn transpose(g: usize, x: &[i64]) -> Vec<i64> {
    let mut t = vec![0; g * g];
    for i in 0..g {
        for j in 0..g {
            t[j * g + i] = x[i * g + j];
        }
    }
    t
}

fn is_symmetric(g: usize, x: &[i64]) -> bool {
    (0..g).all(|i| (0..g).all(|j| x[i * g + j] == x[j * g + i]))
}

impl SymplecticMatrix {
    pub fn from_blocks(g: usize, a: Vec<i64>, b: Vec<i64>, c: Vec<i64>, d: Vec<i64>) -> Result<Self> {
        if [&a, &b, &c, &d].iter().any(|m| m.len() != g * g) {
            return Err(Error::InvalidElement("block sizes do not match g".into()));
        }
        Ok(Self { g, a, b, c, d })
    }

    pub fn identity(g: usize) -> Self {
        Self { g, a: eye(g), b: vec![0; g * g], c: vec![0; g * g], d: eye(g) }
    }

    /// The block swap [[0, I], [-I, 0]].
    pub fn block_swap(g: usize) -> Self {
        let minus: Vec<i64> = eye(g).iter().map(|v| -v).collect();
        Self { g, a: vec![0; g * g], b: eye(g), c: minus, d: vec![0; g * g] }
    }

    /// [[I, S], [0, I]] for symmetric S.
    pub fn translation(g: usize, s: Vec<i64>) -> Result<Self> {
        if s.len() != g * g || !is_symmetric(g, &s) {
            return Err(Error::InvalidElement("translation needs a symmetric block".into()));
        }
        Ok(Self { g, a: eye(g), b: s, c: vec![0; g * g], d: eye(g) })
    }

    /// [[I, 0], [S, I]] for symmetric S.
    pub fn lower_translation(g: usize, s: Vec<i64>) -> Result<Self> {
        if s.len() != g * g || !is_symmetric(g, &s) {
            return Err(Error::InvalidElement("translation needs a symmetric block".into()));
        }
        Ok(Self { g, a: eye(g), b: vec![0; g * g], c: s, d: eye(g) })
    }

    /// [[A, 0], [0, A^{-T}]] for A = I + k·E_ij, i ≠ j.
    pub fn elementary_gl(g: usize, i: usize, j: usize, k: i64) -> Self {
        assert!(i != j && i < g && j < g);
        let mut a = eye(g);
        a[i * g + j] = k;
        let mut d = eye(g);
        d[j * g + i] = -k;
        Self { g, a, b: vec![0; g * g], c: vec![0; g * g], d }
    }

    /// Block-diagonal [[A, 0], [0, A^{-T}]] where `a_inv` must be the integer inverse of `a`.
    pub fn gl(g: usize, a: Vec<i64>, a_inv: Vec<i64>) -> Result<Self> {
        if mat_mul(g, &a, &a_inv) != eye(g) {
            return Err(Error::InvalidElement("a_inv is not the inverse of a".into()));
        }
        Ok(Self { g, a, b: vec![0; g * g], c: vec![0; g * g], d: transpose(g, &a_inv) })
    }

    pub fn mul(&self, o: &Self) -> Self {
        let g = self.g;
        Self {
            g,
            a: mat_add(&mat_mul(g, &self.a, &o.a), &mat_mul(g, &self.b, &o.c)),
            b: mat_add(&mat_mul(g, &self.a, &o.b), &mat_mul(g, &self.b, &o.d)),
            c: mat_add(&mat_mul(g, &self.c, &o.a), &mat_mul(g, &self.d, &o.c)),
            d: mat_add(&mat_mul(g, &self.c, &o.b), &mat_mul(g, &self.d, &o.d)),
        }
    }

    /// Inverse [[Dᵀ, -Bᵀ], [-Cᵀ, Aᵀ]], valid for symplectic matrices.
    pub fn inverse(&self) -> Self {
        let g = self.g;
        let neg = |m: Vec<i64>| m.into_iter().map(|v| -v).collect::<Vec<_>>();
        Self {
            g,
            a: transpose(g, &self.d),
            b: neg(transpose(g, &self.b)),
            c: neg(transpose(g, &self.c)),
            d: transpose(g, &self.a),
        }
    }

    /// AᵀC, BᵀD symmetric and AᵀD − CᵀB = I, checked exactly.
    pub fn is_symplectic(&self) -> bool {
        let g = self.g;
        let atc = mat_mul(g, &transpose(g, &self.a), &self.c);
        let btd = mat_mul(g, &transpose(g, &self.b), &self.d);
        let at_d = mat_mul(g, &transpose(g, &self.a), &self.d);
        let ct_b = mat_mul(g, &transpose(g, &self.c), &self.b);
        let diff: Vec<i64> = at_d.iter().zip(&ct_b).map(|(x, y)| x - y).collect();
        is_symmetric(g, &atc) && is_symmetric(g, &btd) && diff == eye(g)
    }

    /// The same identities modulo 2.
    pub fn is_symplectic_mod2(&self) -> bool {
        let g = self.g;
        let m2 = |v: Vec<i64>| v.into_iter().map(|x| x.rem_euclid(2)).collect::<Vec<_>>();
        let atc = m2(mat_mul(g, &transpose(g, &self.a), &self.c));
        let btd = m2(mat_mul(g, &transpose(g, &self.b), &self.d));
        let at_d = mat_mul(g, &transpose(g, &self.a), &self.d);
        let ct_b = mat_mul(g, &transpose(g, &self.c), &self.b);
        let diff = m2(at_d.iter().zip(&ct_b).map(|(x, y)| x - y).collect());
        is_symmetric(g, &atc) && is_symmetric(g, &btd) && diff == eye(g)
    }

    /// Membership in Γ_g(4,8): γ ≡ I mod 4 and diag(AᵀB), diag(CᵀD) ≡ 0 mod 8.
    pub fn in_gamma_4_8(&self) -> bool {
        let g = self.g;
        let id = eye(g);
        let cong = |m: &[i64], r: &[i64]| m.iter().zip(r).all(|(x, y)| (x - y).rem_euclid(4) == 0);
        let zero = vec![0; g * g];
        if !(cong(&self.a, &id) && cong(&self.d, &id) && cong(&self.b, &zero) && cong(&self.c, &zero)) {
            return false;
        }
        let atb = mat_mul(g, &transpose(g, &self.a), &self.b);
        let ctd = mat_mul(g, &transpose(g, &self.c), &self.d);
        (0..g).all(|i| atb[i * g + i].rem_euclid(8) == 0 && ctd[i * g + i].rem_euclid(8) == 0)
    }

    fn block_bit(m: &[i64], g: usize, i: usize, j: usize) -> u8 {
        (m[i * g + j].rem_euclid(2)) as u8
    }

    fn mat_vec_mod2(m: &[i64], g: usize, v: u8) -> u8 {
        let mut out = 0u8;
        for i in 0..g {
            let mut s = 0u8;
            for j in 0..g {
                s ^= Self::block_bit(m, g, i, j) & ((v >> j) & 1);
            }
            out |= s << i;
        }
        out
    }

    /// Linear part [[D, -C], [-B, A]] applied mod 2. Used for boundary labels.
    pub fn act_linear(&self, n: &Characteristic) -> Characteristic {
        let g = self.g;
        let e = Self::mat_vec_mod2(&self.d, g, n.eps_mask()) ^ Self::mat_vec_mod2(&self.c, g, n.delta_mask());
        let d = Self::mat_vec_mod2(&self.b, g, n.eps_mask()) ^ Self::mat_vec_mod2(&self.a, g, n.delta_mask());
        Characteristic::new(n.genus(), e, d).expect("same genus")
    }

    /// The affine shift (diag(C·Dᵀ), diag(A·Bᵀ)) mod 2.
    ///
    /// With the transposes on the other side the rule fails to compose
    /// (γ₁γ₂)∘m = γ₁∘(γ₂∘m); this is the convention that does.
    pub fn affine_shift(&self) -> Characteristic {
        let g = self.g;
        let ctd = mat_mul(g, &self.c, &transpose(g, &self.d));
        let atb = mat_mul(g, &self.a, &transpose(g, &self.b));
        let mut e = 0u8;
        let mut d = 0u8;
        for i in 0..g {
            e |= (ctd[i * g + i].rem_euclid(2) as u8) << i;
            d |= (atb[i * g + i].rem_euclid(2) as u8) << i;
        }
        Characteristic::new(g as u8, e, d).expect("genus fits")
    }

    /// Action on characteristics with the affine correction.
    pub fn act(&self, m: &Characteristic) -> Characteristic {
        self.act_linear(m) + self.affine_shift()
    }

    /// Packs the 2g×2g matrix mod 2 into a u64 (g ≤ 4).
    pub fn pack_mod2(&self) -> u64 {
        let g = self.g;
        assert!(g <= 4);
        let n = 2 * g;
        let mut out = 0u64;
        for i in 0..n {
            for j in 0..n {
                let blk = match (i < g, j < g) {
                    (true, true) => &self.a,
                    (true, false) => &self.b,
                    (false, true) => &self.c,
                    (false, false) => &self.d,
                };
                let bit = Self::block_bit(blk, g, i % g, j % g) as u64;
                out |= bit << (i * n + j);
            }
        }
        out
    }
}

/// Applies γ to a characteristic, rejecting elements that are not symplectic mod 2.
pub fn apply_symplectic(gamma: &SymplecticMatrix, m: &Characteristic) -> Result<Characteristic> {
    if gamma.g != m.genus() as usize {
        return Err(Error::InvalidElement("genus mismatch".into()));
    }
    if !gamma.is_symplectic_mod2() {
        return Err(Error::InvalidElement("not symplectic over F2".into()));
    }
    Ok(gamma.act(m))
}

/// Translations by E_ii and E_ij+E_ji (transvections), their lower-triangular
/// counterparts and the block swap. Generates Sp(2g, Z).
pub fn standard_generators(g: usize) -> Vec<SymplecticMatrix> {
    let mut out = vec![SymplecticMatrix::block_swap(g)];
    for i in 0..g {
        for j in i..g {
            let mut s = vec![0i64; g * g];
            s[i * g + j] = 1;
            s[j * g + i] = 1;
            out.push(SymplecticMatrix::translation(g, s.clone()).unwrap());
            out.push(SymplecticMatrix::lower_translation(g, s).unwrap());
        }
    }
    for i in 0..g {
        for j in 0..g {
            if i != j {
                out.push(SymplecticMatrix::elementary_gl(g, i, j, 1));
            }
        }
    }
    out
}

fn mul_packed(n: usize, x: u64, y: u64) -> u64 {
    let row_mask = (1u64 << n) - 1;
    let mut out = 0u64;
    for i in 0..n {
        let row = (x >> (i * n)) & row_mask;
        let mut acc = 0u64;
        for k in 0..n {
            if row >> k & 1 == 1 {
                acc ^= (y >> (k * n)) & row_mask;
            }
        }
        out |= acc << (i * n);
    }
    out
}

/// Size of the subgroup of Sp(2g, F2) generated by `gens` (BFS over packed matrices).
pub fn generated_group_order_mod2(g: usize, gens: &[SymplecticMatrix]) -> usize {
    let n = 2 * g;
    let packed: Vec<u64> = gens.iter().map(|x| x.pack_mod2()).collect();
    let id = SymplecticMatrix::identity(g).pack_mod2();
    let mut seen: FxHashSet<u64> = FxHashSet::default();
    seen.insert(id);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for &s in &packed {
            let y = mul_packed(n, x, s);
            if seen.insert(y) {
                queue.push_back(y);
            }
        }
    }
    seen.len()
}

/// |Sp(2g, F2)| = 2^{g²} ∏ (4^i − 1).
pub fn sp_order_mod2(g: u32) -> u64 {
    let mut o = 1u64 << (g * g);
    for i in 1..=g {
        o *= 4u64.pow(i) - 1;
    }
    o
}

/// A product of generators carrying `from` to `to` under the affine action.
pub fn find_transporter(
    from: &Characteristic,
    to: &Characteristic,
    gens: &[SymplecticMatrix],
) -> Result<SymplecticMatrix> {
    let g = from.genus();
    let size = 1usize << (2 * g);
    let mut word: Vec<Option<SymplecticMatrix>> = vec![None; size];
    word[from.index()] = Some(SymplecticMatrix::identity(g as usize));
    let mut queue = VecDeque::from([*from]);
    while let Some(m) = queue.pop_front() {
        let w = word[m.index()].clone().unwrap();
        if m == *to {
            break;
        }
        for s in gens {
            let next = s.act(&m);
            if word[next.index()].is_none() {
                word[next.index()] = Some(s.mul(&w));
                queue.push_back(next);
            }
        }
    }
    let gamma = word[to.index()]
        .clone()
        .ok_or_else(|| Error::InternalConsistency(format!("{to} not in the orbit of {from}")))?;
    if gamma.act(from) != *to {
        return Err(Error::InternalConsistency("composed word does not transport".into()));
    }
    Ok(gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chars::ch;

    #[test]
    fn generators_are_symplectic() {
        for s in standard_generators(3) {
            assert!(s.is_symplectic());
            assert!(s.mul(&s.inverse()) == SymplecticMatrix::identity(3));
        }
    }

    #[test]
    fn identity_fixes_everything() {
        let id = SymplecticMatrix::identity(3);
        for m in Characteristic::all(3) {
            assert_eq!(apply_symplectic(&id, &m).unwrap(), m);
        }
    }

    #[test]
    fn non_symplectic_is_rejected() {
        let mut bad = SymplecticMatrix::identity(3);
        bad.a[1] = 1;
        assert!(matches!(apply_symplectic(&bad, &ch("77")), Err(Error::InvalidElement(_))));
    }

    #[test]
    fn action_is_a_left_action() {
        let gens = standard_generators(3);
        for x in &gens {
            for y in &gens {
                let xy = x.mul(y);
                for m in Characteristic::all(3) {
                    assert_eq!(xy.act(&m), x.act(&y.act(&m)));
                }
            }
        }
    }

    #[test]
    fn group_order_is_sp6_f2() {
        assert_eq!(sp_order_mod2(3), 1_451_520);
        assert_eq!(generated_group_order_mod2(3, &standard_generators(3)), 1_451_520);
    }

    #[test]
    fn transporter_reaches_every_odd() {
        let gens = standard_generators(3);
        for m in Characteristic::all(3).into_iter().filter(|m| m.is_odd()) {
            let g = find_transporter(&ch("77"), &m, &gens).unwrap();
            assert_eq!(g.act(&ch("77")), m);
            assert!(g.is_symplectic());
        }
    }

    #[test]
    fn gamma_4_8_membership() {
        let mut s = vec![0i64; 9];
        s[0] = 8;
        s[1] = 4;
        s[3] = 4;
        assert!(SymplecticMatrix::translation(3, s).unwrap().in_gamma_4_8());
        assert!(!SymplecticMatrix::block_swap(3).in_gamma_4_8());
    }
}
