use std::f64::consts::PI;

use crate::error::{out_of_range, Result};
use crate::quadrature::{integrate, integrate_with_breaks};

fn check(r: f64, t: f64) -> Result<()> {
    if !(r.is_finite() && r > 0.0) {
        return Err(out_of_range(format!("radius r = {r}")));
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(out_of_range(format!("scale t = {t}")));
    }
    Ok(())
}

/// Chain integral a_n(t) on the circle of radius `r`, for n ≤ 3.
///
/// Each step contributes the factor 2(1 - e^{-πrt})/t, so
/// a_n = 2πr (2(1 - e^{-πrt})/t)^n.
pub fn circle_term(n: usize, r: f64, t: f64) -> Result<f64> {
    check(r, t)?;
    let e = (-PI * r * t).exp();
    match n {
        1 => Ok(4.0 * PI * r * (1.0 - e) / t),
        2 => Ok(8.0 * PI * r / (t * t) * (1.0 - 2.0 * e + e * e)),
        3 => Ok(16.0 * PI * r * (1.0 - e).powi(3) / t.powi(3)),
        _ => Err(out_of_range(format!("circle term order {n} (supported: 1..=3)"))),
    }
}

/// The four-bracket n = 3 expression exactly as printed. It does not equal
/// the chain integral for any constant prefactor; kept for reporting.
pub fn circle_term_n3_printed(r: f64, t: f64) -> f64 {
    let p = PI * r;
    let e = |k: f64| (-k * p * t).exp();
    1.0 / t.powi(3)
        + (1.0 / t.powi(3) - 2.0 * p / (t * t)) * e(1.0)
        + (12.0 * p * p / t + 4.0 * p / (t * t) - 1.0 / t.powi(3)) * e(2.0)
        + (-18.0 * p * p / t + 6.0 * p / (t * t) - 1.0 / t.powi(3)) * e(3.0)
}

/// Volume of {s ∈ [0,p]^{n-1} : 0 ≤ l - Σs ≤ p}, i.e. the density of a sum
/// of n uniform [0,p] lengths times p^n, evaluated by nested quadrature.
pub fn simplex_slice_volume(n: usize, l: f64, p: f64) -> f64 {
    if n == 1 {
        return if (0.0..=p).contains(&l) { 1.0 } else { 0.0 };
    }
    if n == 2 {
        return (l.min(p) - (l - p).max(0.0)).max(0.0);
    }
    let lo = (l - (n - 1) as f64 * p).max(0.0);
    let hi = l.min(p);
    if hi <= lo {
        return 0.0;
    }
    let mut breaks = vec![lo];
    for k in 1..n {
        let b = l - k as f64 * p;
        if b > lo && b < hi {
            breaks.push(b);
        }
    }
    breaks.push(hi);
    breaks.sort_by(f64::total_cmp);
    integrate_with_breaks(|s| simplex_slice_volume(n - 1, l - s, p), &breaks, 1e-13).value
}

/// Independent oracle for `circle_term`: integrates e^{-tl} against the
/// length density 2πr·2^n·V_n(l).
pub fn circle_term_by_length_density(n: usize, r: f64, t: f64) -> f64 {
    let p = PI * r;
    let breaks: Vec<f64> = (0..=n).map(|k| k as f64 * p).collect();
    let v = integrate_with_breaks(
        |l| (-t * l).exp() * simplex_slice_volume(n, l, p),
        &breaks,
        1e-12,
    )
    .value;
    2.0 * PI * r * 2f64.powi(n as i32) * v
}

/// Chain integral a_n(t) on the round 2-sphere of radius `r`, for n ≤ 2.
///
/// Each step contributes c = 2πr²(1 + e^{-πrt})/(1 + r²t²), so
/// a_n = 4πr² c^n.
pub fn sphere_term(n: usize, r: f64, t: f64) -> Result<f64> {
    check(r, t)?;
    let e = (-PI * r * t).exp();
    let q = 1.0 + r * r * t * t;
    match n {
        1 => Ok(8.0 * PI * PI * r.powi(4) * (1.0 + e) / q),
        2 => Ok(16.0 * PI.powi(3) * r.powi(6) * (1.0 + e).powi(2) / (q * q)),
        _ => Err(out_of_range(format!("sphere term order {n} (supported: 1..=2)"))),
    }
}

/// The n = 2 sphere expression exactly as printed; disagrees with the
/// chain integral.
pub fn sphere_term_n2_printed(r: f64, t: f64) -> f64 {
    let e = (-PI * r * t).exp();
    let q = 1.0 + r * r * t * t;
    8.0 * PI.powi(3) * r.powi(4) / q
        * (PI * r * r * e
            + r * r * (1.0 + e)
            + (2.0 * r.powi(3) * t * (1.0 + e) + 2.0 * r.powi(4) * t * t * (e + e * e)) / q)
}

/// Independent oracle for `sphere_term`: nested quadrature of
/// 2(2π)^{n+1} r^{n+2} ∫_{[0,πr]^n} e^{-tΣs} Π sin(s_j/r) ds.
pub fn sphere_term_by_quadrature(n: usize, r: f64, t: f64) -> f64 {
    let p = PI * r;
    let pref = 2.0 * (2.0 * PI).powi(n as i32 + 1) * r.powi(n as i32 + 2);
    let one = |s: f64| (-t * s).exp() * (s / r).sin();
    let v = match n {
        1 => integrate(one, 0.0, p, 1e-13).value,
        2 => integrate(
            |s1| one(s1) * integrate(one, 0.0, p, 1e-13).value,
            0.0,
            p,
            1e-12,
        )
        .value,
        _ => f64::NAN,
    };
    pref * v
}
