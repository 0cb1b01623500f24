use super::poly::{det_lines, LinearForm};
use crate::error::Result;
use crate::theta::CertifiedComplex;

/// Coefficients at or below this size make a form unusable as the line `l`.
pub const DEGENERATE_LINE: f64 = 1e-300;

/// Ψ_{l,m,n,k,s} = (|l m k| + |l n s|)² − 4·|l m n|·|l k s|.
///
/// This vanishes iff l = 0 is tangent to the conic mk + ns = 0. For the conic
/// mk − ns use [`conic_tangency_discriminant`].
pub fn psi(l: &LinearForm, m: &LinearForm, n: &LinearForm, k: &LinearForm, s: &LinearForm) -> Result<CertifiedComplex> {
    l.check_line(DEGENERATE_LINE)?;
    let lmk = det_lines(l, m, k);
    let lns = det_lines(l, n, s);
    let lmn = det_lines(l, m, n);
    let lks = det_lines(l, k, s);
    let t = lmk + lns;
    Ok(t * t - (lmn * lks).scale(4.0.into()))
}

/// Vanishes iff l = 0 meets the conic mk − ns = 0 in a double point.
pub fn conic_tangency_discriminant(
    l: &LinearForm,
    m: &LinearForm,
    n: &LinearForm,
    k: &LinearForm,
    s: &LinearForm,
) -> Result<CertifiedComplex> {
    psi(l, m, n, k, &s.neg())
}
