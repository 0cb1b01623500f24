use super::poly::{BinaryQuartic, LinearForm, TernaryQuartic};
use crate::error::{Error, Result};
use crate::theta::{CertifiedComplex, PeriodMatrix};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

/// A point (s : t) of the projective line, normalized to unit length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectivePoint {
    pub s: Complex64,
    pub t: Complex64,
}

impl ProjectivePoint {
    pub fn new(s: Complex64, t: Complex64) -> Self {
        let n = (s.norm_sqr() + t.norm_sqr()).sqrt();
        Self { s: s / n, t: t / n }
    }
    /// Chordal distance, at most 1.
    pub fn distance(&self, o: &Self) -> f64 {
        (self.s * o.t - self.t * o.s).norm()
    }
}

fn horner(c: &[Complex64], u: Complex64) -> (Complex64, Complex64) {
    // c in increasing degree
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dp = dp * u + p;
        p = p * u + a;
    }
    (p, dp)
}

/// Roots of a univariate polynomial (coefficients in increasing degree, nonzero
/// leading coefficient) via companion-matrix eigenvalues and a Newton polish.
pub fn poly_roots(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let lead = c[n];
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        m[(i, n - 1)] = -c[i] / lead;
    }
    let mut roots: Vec<Complex64> = m.schur().eigenvalues().map(|v| v.iter().cloned().collect()).unwrap_or_default();
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner(c, *r);
            if dp.norm() == 0.0 {
                break;
            }
            let cand = *r - p / dp;
            if horner(c, cand).0.norm() < p.norm() {
                *r = cand;
            } else {
                break;
            }
        }
    }
    roots
}

/// Roots of a binary quartic as points of P¹, dehomogenized at the end with the
/// larger coefficient. Zero leading coefficients give roots at that end.
pub fn binary_roots(b: &BinaryQuartic) -> Result<Vec<ProjectivePoint>> {
    let c = b.values();
    if b.max_abs() == 0.0 {
        return Err(Error::LineInQuartic("restricted polynomial vanishes identically".into()));
    }
    let mut out = Vec::new();
    if c[0].norm() >= c[4].norm() {
        // u = s/t; f = t⁴ Σ c_k u^{4−k}
        let inc: Vec<Complex64> = c.iter().rev().cloned().collect();
        for u in poly_roots(&inc) {
            out.push(ProjectivePoint::new(u, Complex64::new(1.0, 0.0)));
        }
    } else {
        for v in poly_roots(&c) {
            out.push(ProjectivePoint::new(Complex64::new(1.0, 0.0), v));
        }
    }
    Ok(out)
}

/// The point of the plane on line `l` with free coordinates (s, t) as produced by
/// [`TernaryQuartic::restrict_to_line`].
pub fn line_point(l: &LinearForm, pivot: usize, p: ProjectivePoint) -> [Complex64; 3] {
    let v = l.values();
    let (i, j) = ((pivot + 1) % 3, (pivot + 2) % 3);
    let mut x = [Complex64::new(0.0, 0.0); 3];
    x[i] = p.s;
    x[j] = p.t;
    x[pivot] = -(v[i] * p.s + v[j] * p.t) / v[pivot];
    x
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tangency {
    /// One point of contact of order four.
    Hyperflex,
    /// Two distinct double points.
    BitangentOnly,
    /// The restriction is not a square: the line is not a bitangent.
    Transversal,
}

#[derive(Debug, Clone, Serialize)]
pub struct HyperflexReport {
    pub verdict: Tangency,
    /// Chordal distance between the two tangency points (roots of the square root).
    pub tangency_distance: f64,
    /// Relative distance of the restricted quartic from the nearest square.
    pub square_residual: f64,
    /// Largest number of raw roots within `root_cluster_tol` of each other.
    pub multiplicity: usize,
    /// Diameter of the largest raw root cluster.
    pub root_cluster_diameter: f64,
    pub roots: Vec<ProjectivePoint>,
    pub tangency_tol: f64,
    pub square_tol: f64,
    pub root_cluster_tol: f64,
}

struct SquareFit {
    residual: f64,
    points: [ProjectivePoint; 2],
}

/// Best square root q = u² + p₁u + p₀ of the monic quartic in one orientation.
fn square_fit(c_inc: &[Complex64; 5], flip: bool) -> Option<SquareFit> {
    let lead = c_inc[4];
    if lead.norm() == 0.0 {
        return None;
    }
    let a: Vec<Complex64> = c_inc.iter().map(|x| x / lead).collect();
    let p1 = a[3] / 2.0;
    let p0 = (a[2] - p1 * p1) / 2.0;
    let r1 = a[1] - p1 * p0 * 2.0;
    let r0 = a[0] - p0 * p0;
    let scale = a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let residual = (r1.norm_sqr() + r0.norm_sqr()).sqrt() / scale;
    let disc = (p1 * p1 - p0 * 4.0).sqrt();
    let one = Complex64::new(1.0, 0.0);
    let mk = |u: Complex64| if flip { ProjectivePoint::new(one, u) } else { ProjectivePoint::new(u, one) };
    let u1 = (-p1 + disc) / 2.0;
    let u2 = (-p1 - disc) / 2.0;
    Some(SquareFit { residual, points: [mk(u1), mk(u2)] })
}

/// Coefficients of f(cos θ·s − sin θ·t, sin θ·s + cos θ·t).
fn rotate(c: &[Complex64; 5], theta: f64) -> [Complex64; 5] {
    let (sn, cs) = theta.sin_cos();
    let mut out = [Complex64::new(0.0, 0.0); 5];
    // s^{4−k} t^k with s = cs·S − sn·T, t = sn·S + cs·T, expanded in powers of T
    for (k, ck) in c.iter().enumerate() {
        let mut poly = vec![Complex64::new(1.0, 0.0)];
        let factors = std::iter::repeat((cs, -sn)).take(4 - k).chain(std::iter::repeat((sn, cs)).take(k));
        for (a, bb) in factors {
            let mut n = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
            for (i, v) in poly.iter().enumerate() {
                n[i] += v * a;
                n[i + 1] += v * bb;
            }
            poly = n;
        }
        for i in 0..5 {
            out[i] += ck * poly[i];
        }
    }
    out
}

/// Classifies the contact of the line with the binary quartic.
///
/// The form is first turned by a rotation of P¹ (which keeps chordal distances)
/// so that neither end coefficient is small.
pub fn classify_binary(b: &BinaryQuartic, tangency_tol: f64) -> Result<HyperflexReport> {
    let scale = b.max_abs();
    if scale == 0.0 || scale <= b.max_err() {
        return Err(Error::LineInQuartic(format!("restriction is zero within {:e}", b.max_err())));
    }
    let theta = (0..8)
        .map(|k| k as f64 * 0.37)
        .max_by(|&x, &y| {
            let e = |th: f64| {
                let r = rotate(&b.values(), th);
                r[0].norm().min(r[4].norm())
            };
            e(x).total_cmp(&e(y))
        })
        .unwrap();
    let c = rotate(&b.values(), theta);
    let rotated = BinaryQuartic { coeffs: c.map(|v| CertifiedComplex::new(v, b.max_err())), pivot: b.pivot };
    let rel = (b.max_err() / scale).max(f64::EPSILON);
    // s-orientation: polynomial in u = s/t has c_k at degree 4−k
    let in_s = [c[4], c[3], c[2], c[1], c[0]];
    let fits = [square_fit(&in_s, false), square_fit(&c, true)];
    let best = fits
        .into_iter()
        .flatten()
        .min_by(|x, y| x.residual.total_cmp(&y.residual))
        .ok_or_else(|| Error::LineInQuartic("no usable orientation".into()))?;
    let (sn, cs) = theta.sin_cos();
    let roots: Vec<ProjectivePoint> = binary_roots(&rotated)?
        .into_iter()
        .map(|p| ProjectivePoint::new(p.s * cs - p.t * sn, p.s * sn + p.t * cs))
        .collect();
    let root_cluster_tol = 10.0 * rel.powf(0.25);
    let mut multiplicity = 1;
    let mut diameter: f64 = 0.0;
    for r in &roots {
        let near: Vec<&ProjectivePoint> = roots.iter().filter(|o| r.distance(o) <= root_cluster_tol).collect();
        if near.len() >= multiplicity {
            let d = near.iter().flat_map(|a| near.iter().map(move |b| a.distance(b))).fold(0.0, f64::max);
            if near.len() > multiplicity || d > diameter {
                diameter = d;
            }
            multiplicity = near.len();
        }
    }
    let square_tol = 1e-6f64.max(100.0 * rel);
    let tangency_distance = best.points[0].distance(&best.points[1]);
    let verdict = if best.residual > square_tol {
        Tangency::Transversal
    } else if tangency_distance <= tangency_tol {
        Tangency::Hyperflex
    } else {
        Tangency::BitangentOnly
    };
    Ok(HyperflexReport {
        verdict,
        tangency_distance,
        square_residual: best.residual,
        multiplicity,
        root_cluster_diameter: diameter,
        roots,
        tangency_tol,
        square_tol,
        root_cluster_tol,
    })
}

/// Restricts `q` to the line `l = 0` and classifies the contact.
///
/// `tol` bounds the chordal distance of the two tangency points for a hyperflex.
pub fn hyperflex_test(q: &TernaryQuartic, l: &LinearForm, tol: f64) -> Result<HyperflexReport> {
    l.check_line(super::psi::DEGENERATE_LINE)?;
    classify_binary(&q.restrict_to_line(l)?, tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RootMethod {
    Bisection,
    Secant,
}

#[derive(Debug, Clone, Serialize)]
pub struct HyperflexRoot {
    /// Path parameter at the root; real for bisection.
    pub t: Complex64,
    pub tau: PeriodMatrix,
    pub value: CertifiedComplex,
    /// Largest |form| seen on the scan, for scale.
    pub scan_max: f64,
    pub method: RootMethod,
    pub iterations: usize,
}

/// τ(t) = i(I + tS); the form values are real up to a common phase along it.
pub fn imaginary_path(s: [f64; 9]) -> impl Fn(Complex64) -> Result<PeriodMatrix> + Sync {
    move |t: Complex64| {
        let e = (0..9)
            .map(|k| {
                let id = if k % 4 == 0 { 1.0 } else { 0.0 };
                Complex64::new(0.0, 1.0) * (id + t * s[k])
            })
            .collect();
        PeriodMatrix::new(3, e)
    }
}

/// A random real symmetric 3×3 matrix with entries in [−1, 1].
pub fn random_symmetric_direction<R: Rng>(rng: &mut R) -> [f64; 9] {
    let mut s = [0.0; 9];
    for i in 0..3 {
        for j in i..3 {
            let v = rng.random_range(-1.0..1.0);
            s[i * 3 + j] = v;
            s[j * 3 + i] = v;
        }
    }
    s
}

/// Locates a zero of t ↦ form(τ(t)) for t in `bracket`.
///
/// The bracket is scanned at `samples + 1` points. When the values share a
/// common phase (up to 10⁻⁶) a sign change is bisected down to `tol`; otherwise
/// a complex secant iteration starts from the smallest sample.
pub fn find_hyperflex_tau<P, F>(path: P, form: F, bracket: (f64, f64), samples: usize, tol: f64) -> Result<HyperflexRoot>
where
    P: Fn(Complex64) -> Result<PeriodMatrix> + Sync,
    F: Fn(&PeriodMatrix) -> Result<CertifiedComplex> + Sync,
{
    let (a, b) = bracket;
    if !(a < b) || samples < 2 {
        return Err(Error::Precondition("need a < b and at least two samples".into()));
    }
    let eval = |t: Complex64| -> Result<CertifiedComplex> { form(&path(t)?) };
    let ts: Vec<f64> = (0..=samples).map(|k| a + (b - a) * k as f64 / samples as f64).collect();
    let threads = available_threads();
    let vals: Vec<Option<CertifiedComplex>> = if threads == 1 {
        ts.iter().map(|&t| eval(Complex64::new(t, 0.0)).ok()).collect()
    } else {
        std::thread::scope(|sc| {
        let handles: Vec<_> = ts
            .chunks(ts.len().div_ceil(threads))
            .map(|chunk| sc.spawn(|| chunk.iter().map(|&t| eval(Complex64::new(t, 0.0)).ok()).collect::<Vec<_>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("scan worker panicked")).collect()
        })
    };
    let pts: Vec<(f64, CertifiedComplex)> = ts.iter().zip(vals).filter_map(|(&t, v)| v.map(|v| (t, v))).collect();
    if pts.len() < 2 {
        return Err(Error::RootNotBracketed("the form could not be evaluated along the path".into()));
    }
    let scan_max = pts.iter().map(|(_, v)| v.value.norm()).fold(0.0, f64::max);
    let peak = pts.iter().max_by(|x, y| x.1.value.norm().total_cmp(&y.1.value.norm())).unwrap().1.value;
    let phase = peak / peak.norm();
    let real = pts.iter().all(|(_, v)| (v.value / phase).im.abs() <= 1e-6 * scan_max + v.err);
    let mut last_err = None;
    if real {
        let rot = |v: &CertifiedComplex| (v.value / phase).re;
        // A sign change can also come from a vanishing theta factor; those bisect
        // into the hyperelliptic guard and the next window is tried.
        for w in pts.windows(2).filter(|w| rot(&w[0].1).signum() != rot(&w[1].1).signum()) {
            let bisect = || -> Result<HyperflexRoot> {
                let (mut lo, mut hi) = (w[0].0, w[1].0);
                let mut flo = rot(&w[0].1);
                let mut it = 0;
                while hi - lo > tol && it < 200 {
                    let mid = 0.5 * (lo + hi);
                    let fm = rot(&eval(Complex64::new(mid, 0.0))?);
                    if fm == 0.0 {
                        lo = mid;
                        hi = mid;
                        break;
                    }
                    if fm.signum() == flo.signum() {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                    it += 1;
                }
                let t = Complex64::new(0.5 * (lo + hi), 0.0);
                let tau = path(t)?;
                let value = form(&tau)?;
                Ok(HyperflexRoot { t, tau, value, scan_max, method: RootMethod::Bisection, iterations: it })
            };
            match bisect() {
                Ok(r) => return Ok(r),
                Err(e) => last_err = Some(e),
            }
        }
    }
    // complex secant from the two smallest neighbouring samples
    let k = (0..pts.len()).min_by(|&x, &y| pts[x].1.value.norm().total_cmp(&pts[y].1.value.norm())).unwrap();
    let k2 = if k + 1 < pts.len() { k + 1 } else { k - 1 };
    let (mut t0, mut f0) = (Complex64::new(pts[k2].0, 0.0), pts[k2].1.value);
    let (mut t1, mut f1) = (Complex64::new(pts[k].0, 0.0), pts[k].1.value);
    for it in 0..60 {
        if f1 == f0 {
            break;
        }
        let t2 = t1 - f1 * (t1 - t0) / (f1 - f0);
        if !(t2.re.is_finite() && t2.im.is_finite()) || (t2.im.abs() > b - a) || t2.re < a - (b - a) || t2.re > b + (b - a) {
            break;
        }
        let f2 = match eval(t2) {
            Ok(v) => v,
            Err(e) => {
                last_err = Some(e);
                break;
            }
        };
        t0 = t1;
        f0 = f1;
        t1 = t2;
        f1 = f2.value;
        if (t1 - t0).norm() <= tol {
            let tau = path(t1)?;
            return Ok(HyperflexRoot { t: t1, tau, value: f2, scan_max, method: RootMethod::Secant, iterations: it + 1 });
        }
    }
    Err(Error::RootNotBracketed(match last_err {
        Some(e) => format!("no usable sign change on [{a}, {b}] (last: {e})"),
        None => format!("no sign change or convergent secant on [{a}, {b}]"),
    }))
}

fn available_threads() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_roots(r: [f64; 4]) -> BinaryQuartic {
        // Π (s − r_i t)
        let mut c = vec![Complex64::new(1.0, 0.0)];
        for ri in r {
            let mut n = vec![Complex64::new(0.0, 0.0); c.len() + 1];
            for (k, v) in c.iter().enumerate() {
                n[k] += v;
                n[k + 1] -= v * ri;
            }
            c = n;
        }
        BinaryQuartic::new([c[0], c[1], c[2], c[3], c[4]])
    }

    #[test]
    fn quadruple_root_is_a_hyperflex() {
        let r = classify_binary(&from_roots([2.0; 4]), 1e-4).unwrap();
        assert_eq!(r.verdict, Tangency::Hyperflex);
        assert_eq!(r.multiplicity, 4);
        assert!(r.tangency_distance < 1e-6);
    }

    #[test]
    fn two_double_roots_are_a_bitangent() {
        let r = classify_binary(&from_roots([1.0, 1.0, 2.0, 2.0]), 1e-4).unwrap();
        assert_eq!(r.verdict, Tangency::BitangentOnly);
        assert_eq!(r.multiplicity, 2);
        let want = ProjectivePoint::new(1.0.into(), 1.0.into()).distance(&ProjectivePoint::new(2.0.into(), 1.0.into()));
        assert!((r.tangency_distance - want).abs() < 1e-10);
    }

    #[test]
    fn simple_roots_are_transversal() {
        let r = classify_binary(&from_roots([0.0, 1.0, -3.0, 0.5]), 1e-4).unwrap();
        assert_eq!(r.verdict, Tangency::Transversal);
        assert_eq!(r.multiplicity, 1);
    }

    #[test]
    fn roots_at_infinity_are_found() {
        // s²t²: double roots at 0 and ∞
        let b = BinaryQuartic::new([0.0.into(), 0.0.into(), 1.0.into(), 0.0.into(), 0.0.into()]);
        let r = classify_binary(&b, 1e-4).unwrap();
        assert_eq!(r.verdict, Tangency::BitangentOnly);
        assert!((r.tangency_distance - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_restriction_is_an_error() {
        let b = BinaryQuartic::new([0.0.into(); 5]);
        assert!(matches!(classify_binary(&b, 1e-4), Err(Error::LineInQuartic(_))));
    }

    #[test]
    fn verdict_does_not_depend_on_the_dehomogenizing_coordinate() {
        // (x + y + z)·(product of two lines)² restricted to a line through a double point
        let l = LinearForm::real([0.0, 1.0, 0.0]);
        let m = LinearForm::real([1.0, 0.0, -2.0]).to_poly();
        let k = LinearForm::real([1.0, 0.0, 3.0]).to_poly();
        let mk = m.mul(&k);
        let q = TernaryQuartic { poly: mk.mul(&mk) };
        let a = hyperflex_test(&q, &l, 1e-4).unwrap();
        // same line, scaled so the pivot is unchanged, and a rotated copy with another pivot
        let l2 = LinearForm::real([0.0, -3.0, 0.0]);
        let b = hyperflex_test(&q, &l2, 1e-4).unwrap();
        assert_eq!(a.verdict, Tangency::BitangentOnly);
        assert_eq!(b.verdict, Tangency::BitangentOnly);
        assert!((a.tangency_distance - b.tangency_distance).abs() < 1e-12);
    }

    #[test]
    fn bisection_finds_a_real_root() {
        let path = |t: Complex64| PeriodMatrix::diagonal(&[Complex64::new(0.0, 1.0) + t; 3]);
        let form = |tau: &PeriodMatrix| Ok(CertifiedComplex::exact(Complex64::new(0.0, 2.0) * (tau.get(0, 0).re - 0.123)));
        let r = find_hyperflex_tau(path, form, (0.0, 0.5), 10, 1e-10).unwrap();
        assert_eq!(r.method, RootMethod::Bisection);
        assert!((r.t.re - 0.123).abs() < 1e-9);
    }

    #[test]
    fn secant_finds_a_complex_root() {
        let path = |t: Complex64| PeriodMatrix::diagonal(&[Complex64::new(0.0, 1.0) + t; 3]);
        let target = Complex64::new(0.2, 0.01);
        let form = move |tau: &PeriodMatrix| {
            let t = tau.get(0, 0) - Complex64::new(0.0, 1.0);
            Ok(CertifiedComplex::exact((t - target) * (t + 1.0)))
        };
        let r = find_hyperflex_tau(path, form, (0.0, 0.5), 10, 1e-12).unwrap();
        assert_eq!(r.method, RootMethod::Secant);
        assert!((r.t - target).norm() < 1e-9);
    }

    #[test]
    fn no_root_is_reported() {
        let path = |t: Complex64| PeriodMatrix::diagonal(&[Complex64::new(0.0, 1.0) + t; 3]);
        let form = |_: &PeriodMatrix| Ok(CertifiedComplex::real(1.0));
        assert!(matches!(find_hyperflex_tau(path, form, (0.0, 0.5), 10, 1e-10), Err(Error::RootNotBracketed(_))));
    }
}
