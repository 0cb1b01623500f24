//! det Cat₂(F) as a polynomial in theta symbols.
//!
//! Each Aronhold letter is ℓ_L = P_L·Σ_k g_{L,k}x_k, with P_L a product of three
//! theta constants and g_{L,k} the gradient components of one odd theta. A
//! monomial of the determinant is therefore fixed by its 18 gradient
//! exponents; the theta part is ∏ P_L^{n_L} with n_L the degree in letter L.
//! Keys pack the 18 exponents into a u128, five bits each.

use super::numeric::{partial_factor, QUADRATIC_BASIS};
use crate::boundary::{FormExpression, Monomial, OrderAssignment, Symbol};
use crate::chars::{ch, Characteristic};
use crate::error::{Error, Result};
use crate::quartic::ARONHOLD_LETTERS;
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;
use serde::Serialize;
use std::thread;

pub const LETTERS: usize = 6;
pub const VARS: usize = 18;
const BITS: u32 = 5;
const MASK: u128 = (1 << BITS) - 1;

/// Default cap on live monomials during an expansion.
pub const DEFAULT_MONOMIAL_CAP: usize = 10_000_000;

pub type Key = u128;
pub type Poly = FxHashMap<Key, i128>;

pub fn var(letter: usize, axis: usize) -> usize {
    3 * letter + axis
}

pub fn exponent(k: Key, v: usize) -> u32 {
    ((k >> (BITS * v as u32)) & MASK) as u32
}

pub fn unit(v: usize) -> Key {
    1 << (BITS * v as u32)
}

/// Degree of `k` in the three variables of one letter.
pub fn letter_degree(k: Key, letter: usize) -> u32 {
    (0..3).map(|a| exponent(k, var(letter, a))).sum()
}

fn mul_poly(a: &Poly, b: &Poly) -> Result<Poly> {
    let mut out = Poly::default();
    for (ka, ca) in a {
        for (kb, cb) in b {
            let c = ca.checked_mul(*cb).ok_or_else(overflow)?;
            let e = out.entry(ka + kb).or_insert(0);
            *e = e.checked_add(c).ok_or_else(overflow)?;
        }
    }
    out.retain(|_, c| *c != 0);
    Ok(out)
}

fn overflow() -> Error {
    Error::ResourceExhausted("i128 coefficient overflow".into())
}

/// A ternary form whose coefficients are polynomials in the gradient variables.
#[derive(Debug, Clone)]
struct Form {
    degree: u32,
    coeffs: FxHashMap<[u32; 3], Poly>,
}

impl Form {
    fn letter(l: usize) -> Self {
        let mut coeffs = FxHashMap::default();
        for a in 0..3 {
            let mut e = [0; 3];
            e[a] = 1;
            coeffs.insert(e, Poly::from_iter([(unit(var(l, a)), 1)]));
        }
        Form { degree: 1, coeffs }
    }

    fn mul(&self, o: &Self) -> Result<Self> {
        let mut coeffs: FxHashMap<[u32; 3], Poly> = FxHashMap::default();
        for (ea, pa) in &self.coeffs {
            for (eb, pb) in &o.coeffs {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
                let prod = mul_poly(pa, pb)?;
                let slot = coeffs.entry(e).or_default();
                for (k, c) in prod {
                    *slot.entry(k).or_insert(0) += c;
                }
            }
        }
        for p in coeffs.values_mut() {
            p.retain(|_, c| *c != 0);
        }
        Ok(Form { degree: self.degree + o.degree, coeffs })
    }

    fn add_scaled(&mut self, o: &Self, k: i128) {
        for (e, p) in &o.coeffs {
            let slot = self.coeffs.entry(*e).or_default();
            for (key, c) in p {
                *slot.entry(*key).or_insert(0) += k * c;
            }
            slot.retain(|_, c| *c != 0);
        }
    }
}

/// The 36 entries of Cat₂(F) for F = X² + Y² + Z² − 2XY − 2YZ − 2XZ with
/// X = af, Y = be, Z = cd, as polynomials in the gradient variables.
pub fn symbolic_entries() -> Result<Vec<Vec<Poly>>> {
    let l: Vec<Form> = (0..LETTERS).map(Form::letter).collect();
    let x = l[0].mul(&l[5])?;
    let y = l[1].mul(&l[4])?;
    let z = l[2].mul(&l[3])?;
    let mut f = Form { degree: 4, coeffs: FxHashMap::default() };
    for (p, q, k) in [(&x, &x, 1), (&y, &y, 1), (&z, &z, 1), (&x, &y, -2), (&y, &z, -2), (&x, &z, -2)] {
        f.add_scaled(&p.mul(q)?, k);
    }
    debug_assert_eq!(f.degree, 4);
    let mut rows = Vec::with_capacity(6);
    for u in QUADRATIC_BASIS {
        let mut row = Vec::with_capacity(6);
        for v in QUADRATIC_BASIS {
            let e = [u[0] + v[0], u[1] + v[1], u[2] + v[2]];
            let k = partial_factor(e) as i128;
            let p = f.coeffs.get(&e).cloned().unwrap_or_default();
            row.push(p.into_iter().map(|(key, c)| (key, c * k)).collect());
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Orders of the 18 gradient variables with the letter's theta factor folded
/// in, in units of 1/8.
#[derive(Debug, Clone, Copy)]
pub struct VarOrders(pub [i64; VARS]);

impl VarOrders {
    pub fn from_assignment(a: &OrderAssignment) -> Result<Self> {
        let mut w = [0i64; VARS];
        for (l, (thetas, grad)) in ARONHOLD_LETTERS.iter().enumerate() {
            let mut p = Rational64::from_integer(0);
            for t in thetas {
                p += a.order_of(&Symbol::Theta { m: ch(t) })?;
            }
            for ax in 0..3 {
                let o = p + a.order_of(&Symbol::Grad { m: ch(grad), axis: ax })?;
                let eighths = o * Rational64::from_integer(8);
                if !eighths.is_integer() {
                    return Err(Error::Domain(format!("order {o} is not a multiple of 1/8")));
                }
                w[var(l, ax)] = eighths.to_integer();
            }
        }
        Ok(VarOrders(w))
    }

    pub fn of(&self, k: Key) -> i64 {
        (0..VARS).map(|v| exponent(k, v) as i64 * self.0[v]).sum()
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ExpansionStats {
    /// Live monomials after each row of the Laplace expansion.
    pub live_per_row: Vec<usize>,
    pub peak_live: usize,
    pub final_terms: usize,
    pub cap: usize,
    /// Order bound (units of 1/8) when the expansion was truncated.
    pub order_bound: Option<i64>,
}

/// Row-by-row Laplace expansion over column subsets. With `orders`, partial
/// products that cannot reach a monomial of order ≤ `bound` are dropped.
pub fn laplace_determinant(
    m: &[Vec<Poly>],
    truncation: Option<(&VarOrders, i64)>,
    cap: usize,
) -> std::result::Result<(Poly, ExpansionStats), (Error, ExpansionStats)> {
    let n = m.len();
    let mut stats = ExpansionStats { cap, order_bound: truncation.map(|t| t.1), ..Default::default() };
    // least order any entry of each row can contribute
    let row_min: Vec<i64> = match truncation {
        Some((w, _)) => m.iter().map(|row| row.iter().flat_map(|p| p.keys().map(|k| w.of(*k))).min().unwrap_or(i64::MAX / 4)).collect(),
        None => vec![0; n],
    };
    let rest: Vec<i64> = (0..=n).map(|r| row_min[r..].iter().sum()).collect();
    let mut layer: FxHashMap<u8, Poly> = FxHashMap::default();
    layer.insert(0, Poly::from_iter([(0, 1)]));
    for r in 0..n {
        let targets: Vec<u8> = (0u8..1 << n).filter(|t| t.count_ones() as usize == r + 1).collect();
        let results: Vec<Result<(u8, Poly)>> = thread::scope(|sc| {
            let hs: Vec<_> = targets
                .iter()
                .map(|&t| {
                    let layer = &layer;
                    let rest = rest[r + 1];
                    sc.spawn(move || {
                        let mut acc = Poly::default();
                        for c in 0..n {
                            if t >> c & 1 == 0 {
                                continue;
                            }
                            let s = t & !(1 << c);
                            let Some(prev) = layer.get(&s) else { continue };
                            let sign: i128 = if (s >> (c + 1)).count_ones() % 2 == 0 { 1 } else { -1 };
                            for (ka, ca) in prev {
                                let oa = truncation.map(|(w, _)| w.of(*ka));
                                for (kb, cb) in &m[r][c] {
                                    if let (Some(oa), Some((w, b))) = (oa, truncation) {
                                        if oa + w.of(*kb) + rest > b {
                                            continue;
                                        }
                                    }
                                    let v = ca.checked_mul(*cb).and_then(|x| x.checked_mul(sign)).ok_or_else(overflow)?;
                                    let e = acc.entry(ka + kb).or_insert(0);
                                    *e = e.checked_add(v).ok_or_else(overflow)?;
                                }
                            }
                        }
                        acc.retain(|_, c| *c != 0);
                        Ok((t, acc))
                    })
                })
                .collect();
            hs.into_iter().map(|h| h.join().expect("expansion thread panicked")).collect()
        });
        let mut next = FxHashMap::default();
        let mut live = 0;
        for res in results {
            match res {
                Ok((t, p)) => {
                    live += p.len();
                    if !p.is_empty() {
                        next.insert(t, p);
                    }
                }
                Err(e) => return Err((e, stats)),
            }
        }
        stats.live_per_row.push(live);
        stats.peak_live = stats.peak_live.max(live);
        if live > cap {
            return Err((Error::ResourceExhausted(format!("{live} live monomials after row {} exceed the cap {cap}", r + 1)), stats));
        }
        layer = next;
    }
    let det = layer.remove(&(((1u16 << n) - 1) as u8)).unwrap_or_default();
    stats.final_terms = det.len();
    Ok((det, stats))
}

/// Symbol counts of one key: (theta constants, gradient components).
pub fn symbol_counts(k: Key) -> (u32, u32) {
    let g: u32 = (0..VARS).map(|v| exponent(k, v)).sum();
    (3 * g, g)
}

/// The monomial of theta symbols a key stands for.
pub fn key_monomial(k: Key) -> Monomial {
    let mut syms = Vec::new();
    for (l, (thetas, grad)) in ARONHOLD_LETTERS.iter().enumerate() {
        let n = letter_degree(k, l) as usize;
        for t in thetas {
            syms.extend(std::iter::repeat_n(Symbol::Theta { m: ch(t) }, n));
        }
        for a in 0..3 {
            syms.extend(std::iter::repeat_n(Symbol::Grad { m: ch(grad), axis: a }, exponent(k, var(l, a)) as usize));
        }
    }
    Monomial::from_symbols(syms)
}

pub fn to_form_expression(p: &Poly) -> FormExpression {
    let mut e = FormExpression::zero();
    for (k, c) in p {
        e.add_term(*c, key_monomial(*k));
    }
    e
}

/// Odd characteristic carrying the gradient of each letter.
pub fn letter_gradients() -> [Characteristic; LETTERS] {
    ARONHOLD_LETTERS.map(|(_, g)| ch(g))
}

const PRIME: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

fn eval_mod(p: &Poly, x: &[u64; VARS]) -> u64 {
    let mut s = 0u64;
    for (k, c) in p {
        let mut t = (c.rem_euclid(PRIME as i128)) as u64;
        for (v, xv) in x.iter().enumerate() {
            let e = exponent(*k, v);
            if e > 0 {
                t = mulmod(t, powmod(*xv, e as u64));
            }
        }
        s = (s + t) % PRIME;
    }
    s
}

fn det_mod(mut a: Vec<Vec<u64>>) -> u64 {
    let n = a.len();
    let mut det = 1u64;
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| a[r][c] != 0) else { return 0 };
        if p != c {
            a.swap(p, c);
            det = (PRIME - det) % PRIME;
        }
        det = mulmod(det, a[c][c]);
        let inv = powmod(a[c][c], PRIME - 2);
        for r in c + 1..n {
            let f = mulmod(a[r][c], inv);
            for k in c..n {
                a[r][k] = (a[r][k] + PRIME - mulmod(f, a[c][k])) % PRIME;
            }
        }
    }
    det
}

/// det Cat₂ at a point of (ℤ/p)^18.
pub fn determinant_mod_p(entries: &[Vec<Poly>], x: &[u64; VARS]) -> u64 {
    det_mod(entries.iter().map(|row| row.iter().map(|p| eval_mod(p, x)).collect()).collect())
}

/// Which symbols divide every monomial: a symbol divides the determinant iff
/// the determinant vanishes identically once that symbol is set to zero, and a
/// single nonzero evaluation modulo p proves it does not.
#[derive(Debug, Clone, Serialize)]
pub struct CommonFactorReport {
    /// Letters whose theta factor might divide every monomial.
    pub letters_possibly_dividing: Vec<usize>,
    /// Gradient variables that might divide every monomial.
    pub vars_possibly_dividing: Vec<usize>,
    pub trials: usize,
}

impl CommonFactorReport {
    pub fn no_common_factor(&self) -> bool {
        self.letters_possibly_dividing.is_empty() && self.vars_possibly_dividing.is_empty()
    }
}

pub fn common_factor_check(entries: &[Vec<Poly>], seed: u64, trials: usize) -> CommonFactorReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut point = || -> [u64; VARS] { std::array::from_fn(|_| rng.random_range(1..PRIME)) };
    let mut letters = Vec::new();
    for l in 0..LETTERS {
        let hit = (0..trials).any(|_| {
            let mut x = point();
            for a in 0..3 {
                x[var(l, a)] = 0;
            }
            determinant_mod_p(entries, &x) != 0
        });
        if !hit {
            letters.push(l);
        }
    }
    let mut vars = Vec::new();
    for v in 0..VARS {
        let hit = (0..trials).any(|_| {
            let mut x = point();
            x[v] = 0;
            determinant_mod_p(entries, &x) != 0
        });
        if !hit {
            vars.push(v);
        }
    }
    CommonFactorReport { letters_possibly_dividing: letters, vars_possibly_dividing: vars, trials }
}

/// Exact order of det Cat₂ on one boundary component, from truncated expansions.
#[derive(Debug, Clone, Serialize)]
pub struct StreamingOrder {
    #[serde(with = "crate::rational")]
    pub order: Rational64,
    /// Tropical lower bound: the min-plus order if no leading terms cancelled.
    #[serde(with = "crate::rational")]
    pub tropical_bound: Rational64,
    pub leading_terms: usize,
    pub stats: ExpansionStats,
}

/// Raises the order bound from the tropical lower bound until a truncated
/// expansion has a surviving monomial; its least order is the exact order.
pub fn streaming_min_plus(entries: &[Vec<Poly>], assign: &OrderAssignment, cap: usize) -> Result<StreamingOrder> {
    let w = VarOrders::from_assignment(assign)?;
    let row_min: i64 = entries.iter().map(|row| row.iter().flat_map(|p| p.keys().map(|k| w.of(*k))).min().unwrap_or(0)).sum();
    let lower = tropical_determinant(entries, &w).max(row_min);
    let step = if matches!(assign.context, crate::boundary::BoundaryContext::P { .. }) { 8 } else { 1 };
    let mut bound = lower;
    loop {
        let (det, stats) = laplace_determinant(entries, Some((&w, bound)), cap).map_err(|(e, _)| e)?;
        if let Some(min) = det.keys().map(|k| w.of(*k)).min() {
            let leading = det.keys().filter(|k| w.of(**k) == min).count();
            return Ok(StreamingOrder {
                order: Rational64::new(min, 8),
                tropical_bound: Rational64::new(lower, 8),
                leading_terms: leading,
                stats,
            });
        }
        if bound > lower + 8 * 64 {
            return Err(Error::Inconclusive("no surviving monomial within 64 of the tropical bound".into()));
        }
        bound += step;
    }
}

/// min over permutations of Σ (least order of entry (r, σ(r))).
fn tropical_determinant(entries: &[Vec<Poly>], w: &VarOrders) -> i64 {
    let n = entries.len();
    let ord: Vec<Vec<Option<i64>>> =
        entries.iter().map(|row| row.iter().map(|p| p.keys().map(|k| w.of(*k)).min()).collect()).collect();
    let mut best: Vec<Option<i64>> = vec![None; 1 << n];
    best[0] = Some(0);
    for s in 0usize..1 << n {
        let Some(b) = best[s] else { continue };
        let r = s.count_ones() as usize;
        if r == n {
            continue;
        }
        for c in 0..n {
            if s >> c & 1 == 1 {
                continue;
            }
            if let Some(o) = ord[r][c] {
                let t = s | 1 << c;
                best[t] = Some(best[t].map_or(b + o, |x: i64| x.min(b + o)));
            }
        }
    }
    best[(1 << n) - 1].unwrap_or(i64::MAX)
}

/// Full expansion of det Cat₂(F) with statistics.
#[derive(Debug, Clone)]
pub struct ClebschSymbolic {
    pub terms: Poly,
    pub stats: ExpansionStats,
}

impl ClebschSymbolic {
    /// (theta, gradient) symbol counts, if uniform over all monomials.
    pub fn uniform_counts(&self) -> Option<(u32, u32)> {
        let mut it = self.terms.keys().map(|k| symbol_counts(*k));
        let first = it.next()?;
        it.all(|c| c == first).then_some(first)
    }

    pub fn weight(&self) -> Option<Rational64> {
        self.uniform_counts().map(|(t, g)| Rational64::new(t as i64, 2) + Rational64::new(5 * g as i64, 6))
    }
}

pub fn clebsch_symbolic_expression(cap: usize) -> Result<ClebschSymbolic> {
    let entries = symbolic_entries()?;
    let (terms, stats) = laplace_determinant(&entries, None, cap).map_err(|(e, s)| match e {
        Error::ResourceExhausted(msg) => Error::ResourceExhausted(format!("{msg}; live per row {:?}", s.live_per_row)),
        e => e,
    })?;
    Ok(ClebschSymbolic { terms, stats })
}

impl ClebschSymbolic {
    /// Value at the theta data of `t`, with Σ|terms| as a scale for the rounding error.
    pub fn eval(&self, t: &crate::theta::ThetaTable) -> (num_complex::Complex64, f64) {
        use num_complex::Complex64;
        let mut g = [Complex64::new(0.0, 0.0); VARS];
        let mut p = [Complex64::new(0.0, 0.0); LETTERS];
        for (l, (thetas, grad)) in ARONHOLD_LETTERS.iter().enumerate() {
            p[l] = thetas.iter().map(|x| t.theta(&ch(x)).value).product();
            for a in 0..3 {
                g[var(l, a)] = t.grad_component(&ch(grad), a).value;
            }
        }
        // every letter variable carries its theta factor
        let x: Vec<Complex64> = (0..VARS).map(|v| g[v] * p[v / 3]).collect();
        let pows: Vec<Vec<Complex64>> = x.iter().map(|&b| (0..=24).scan(Complex64::new(1.0, 0.0), |acc, _| {
            let r = *acc;
            *acc *= b;
            Some(r)
        }).collect()).collect();
        let mut sum = Complex64::new(0.0, 0.0);
        let mut mag = 0.0;
        for (k, c) in &self.terms {
            let mut term = Complex64::new(*c as f64, 0.0);
            for (v, pw) in pows.iter().enumerate() {
                let e = exponent(*k, v) as usize;
                if e > 0 {
                    term *= pw[e];
                }
            }
            mag += term.norm();
            sum += term;
        }
        (sum, mag)
    }
}

/// Weight of every entry of Cat₂(F) times six, from the symbol counts of the
/// entries; None if some entry is inhomogeneous.
pub fn structural_weight(entries: &[Vec<Poly>]) -> Option<Rational64> {
    let mut counts = entries.iter().flatten().flat_map(|p| p.keys().map(|k| symbol_counts(*k)));
    let first = counts.next()?;
    if !counts.all(|c| c == first) {
        return None;
    }
    let entry = Rational64::new(first.0 as i64, 2) + Rational64::new(5 * first.1 as i64, 6);
    Some(entry * Rational64::from_integer(entries.len() as i64))
}
