//! Ellipsoid enumeration and Gaussian tail bounds for lattice theta sums.

/// Upper-triangular R with Y = RᵀR (row-major g×g).
pub(crate) fn cholesky_upper(y: &[f64], g: usize) -> Option<Vec<f64>> {
    let mut r = vec![0.0; g * g];
    for i in 0..g {
        let mut d = y[i * g + i];
        for k in 0..i {
            d -= r[k * g + i] * r[k * g + i];
        }
        if d <= 0.0 {
            return None;
        }
        let rii = d.sqrt();
        r[i * g + i] = rii;
        for j in i + 1..g {
            let mut s = y[i * g + j];
            for k in 0..i {
                s -= r[k * g + i] * r[k * g + j];
            }
            r[i * g + j] = s / rii;
        }
    }
    Some(r)
}

/// Visits every n with n_i ∈ offset_i + step·Z and (n−c)ᵀY(n−c) ≤ ρ².
///
/// `r` is the upper Cholesky factor of Y. Coordinates are fixed from the last
/// one down (Fincke–Pohst), so the callback sees each point exactly once.
pub(crate) fn for_each_in_ellipsoid<F: FnMut(&[f64])>(
    r: &[f64],
    g: usize,
    rho2: f64,
    offset: &[f64],
    step: f64,
    center: &[f64],
    f: &mut F,
) {
    let mut n = vec![0.0; g];
    recurse(r, g, g, rho2, offset, step, center, &mut n, f);
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: FnMut(&[f64])>(
    r: &[f64],
    g: usize,
    level: usize,
    budget: f64,
    offset: &[f64],
    step: f64,
    center: &[f64],
    n: &mut Vec<f64>,
    f: &mut F,
) {
    if level == 0 {
        f(n);
        return;
    }
    let i = level - 1;
    let rii = r[i * g + i];
    // x_i + Σ_{j>i} (r_ij / r_ii) x_j with x = n − c
    let mut shift = 0.0;
    for j in i + 1..g {
        shift += r[i * g + j] / rii * (n[j] - center[j]);
    }
    let mid = center[i] - shift;
    let half = (budget.max(0.0)).sqrt() / rii;
    let kmin = ((mid - half - offset[i]) / step).ceil() as i64;
    let kmax = ((mid + half - offset[i]) / step).floor() as i64;
    for k in kmin..=kmax {
        let v = offset[i] + step * k as f64;
        let t = rii * (v - mid);
        let rest = budget - t * t;
        if rest < 0.0 {
            continue;
        }
        n[i] = v;
        recurse(r, g, i, rest, offset, step, center, n, f);
    }
}

/// Σ over a shifted lattice of exp(−π xᵀYx) restricted to xᵀYx > ρ² is at most
/// `theta_tail_factor(λ, g) · exp(−πρ²/2)`.
pub(crate) fn theta_tail_factor(lambda_min: f64, g: usize) -> f64 {
    (1.0 + (2.0 / lambda_min).sqrt()).powi(g as i32)
}

/// Same for 2π|x_j|·exp(−π xᵀYx), one gradient component.
pub(crate) fn gradient_tail_factor(lambda_min: f64, g: usize) -> f64 {
    let e = std::f64::consts::E;
    let pi = std::f64::consts::PI;
    2.0 * pi * (2.0 / (e * pi * lambda_min)).sqrt() * (1.0 + 2.0 / lambda_min.sqrt()).powi(g as i32)
}

/// Smallest ρ² making `factor · exp(−πρ²/2) ≤ target`.
pub(crate) fn radius_sq_for(factor: f64, target: f64) -> f64 {
    let v = 2.0 / std::f64::consts::PI * (factor / target).ln();
    v.max(1.0)
}
