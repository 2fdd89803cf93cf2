//! Chain integrals on [a, b] with Lebesgue measure, L = b - a.
//!
//! α_{j,k}(t) = ∫_{[a,b]^{j+1}} e^{-t Σ|x_{i-1} - x_i|} w_k(x_j) dx, where
//! w_k(x) = (b-x)^k/k! e^{-t(b-x)} + (x-a)^k/k! e^{-t(x-a)}.

use crate::error::{out_of_range, Result};
use crate::quadrature::integrate_with_breaks;

fn check(t: f64, l: f64) -> Result<()> {
    if !(t.is_finite() && t > 0.0) {
        return Err(out_of_range(format!("scale t = {t}")));
    }
    if !(l.is_finite() && l > 0.0) {
        return Err(out_of_range(format!("interval length L = {l}")));
    }
    Ok(())
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Σ_{j=0}^{p} L^{p-j} / ((p-j)! t^{j+1})
fn tail_sum(p: usize, t: f64, l: f64) -> f64 {
    (0..=p)
        .map(|j| l.powi((p - j) as i32) / (factorial(p - j) * t.powi(j as i32 + 1)))
        .sum()
}

/// α_{0,p} = ∫ w_p = 2 ∫_0^L u^p/p! e^{-tu} du.
pub fn interval_alpha0(p: usize, t: f64, l: f64) -> f64 {
    2.0 * (1.0 / t.powi(p as i32 + 1) - (-t * l).exp() * tail_sum(p, t, l))
}

fn alpha1_common(k: usize, t: f64, l: f64) -> f64 {
    let e = (-t * l).exp();
    let first: f64 = (0..=k + 1)
        .map(|m| 2.0 * e / (2.0 * t).powi(m as i32) * tail_sum(k + 1 - m, t, l))
        .sum();
    let second: f64 = (0..=k)
        .map(|m| {
            4.0 * e * l.powi((k - m) as i32) / ((2.0 * t).powi(m as i32 + 2) * factorial(k - m))
                * (1.0 - e)
        })
        .sum();
    -first - second
}

/// Closed form of α_{1,k}.
pub fn interval_alpha1(k: usize, t: f64, l: f64) -> f64 {
    alpha1_common(k, t, l) + (4.0 - 0.5f64.powi(k as i32)) / t.powi(k as i32 + 2)
}

/// α_{1,k} exactly as printed. Its last term (2^{k+2} - 2)/(2t)^{k+2} (1 - e^{-tL})
/// should read (2^{k+4} - 4)/(2t)^{k+2}, with no (1 - e^{-tL}) factor.
pub fn interval_alpha1_printed(k: usize, t: f64, l: f64) -> f64 {
    let e = (-t * l).exp();
    alpha1_common(k, t, l) + (2f64.powi(k as i32 + 2) - 2.0) / (2.0 * t).powi(k as i32 + 2) * (1.0 - e)
}

/// One step of the recursion: α_{j,·} from α_{j-1,·}.
fn recurse(prev: &[f64], k: usize, t: f64, l: f64) -> f64 {
    let e = (-t * l).exp();
    let head: f64 = (0..=k + 1)
        .map(|m| prev[k + 1 - m] / (2.0 * t).powi(m as i32))
        .sum();
    let tail: f64 = (0..=k)
        .map(|m| l.powi((k - m) as i32) / ((2.0 * t).powi(m as i32 + 1) * factorial(k - m)))
        .sum();
    head - prev[0] * e * tail
}

/// Table `rows[j-1][k] = α_{j,k}` for j = 1..=n and k = 0..=n-j.
fn alpha_table(n: usize, t: f64, l: f64) -> Vec<Vec<f64>> {
    let mut rows = vec![(0..n).map(|k| interval_alpha1(k, t, l)).collect::<Vec<_>>()];
    for j in 2..=n {
        let prev = &rows[j - 2];
        let row = (0..=n - j).map(|k| recurse(prev, k, t, l)).collect();
        rows.push(row);
    }
    rows
}

/// α_{n,k}(t) for n ≥ 1 via the closed α_{1,·} and the recursion.
pub fn interval_alpha(n: usize, k: usize, t: f64, l: f64) -> Result<f64> {
    check(t, l)?;
    if n == 0 {
        return Ok(interval_alpha0(k, t, l));
    }
    let rows = alpha_table(n + k, t, l);
    Ok(rows[n - 1][k])
}

/// α_{n,k} obtained by running the recursion from α_{0,·}; an internal
/// consistency check on the α_{1,·} closed form.
pub fn interval_alpha_from_zero(n: usize, k: usize, t: f64, l: f64) -> f64 {
    let width = n + k + 1;
    let mut row: Vec<f64> = (0..=width).map(|p| interval_alpha0(p, t, l)).collect();
    for j in 1..=n {
        row = (0..=width - j).map(|kk| recurse(&row, kk, t, l)).collect();
    }
    row[k]
}

/// a_n(t) = ∫_{[a,b]^{n+1}} e^{-t Σ|x_{i-1} - x_i|} dx.
pub fn interval_term(n: usize, t: f64, l: f64) -> Result<f64> {
    check(t, l)?;
    if n == 0 {
        return Err(out_of_range("interval term order 0"));
    }
    let two_n = 2f64.powi(n as i32);
    let mut v = two_n * l / t.powi(n as i32) - two_n / t.powi(n as i32 + 1) * (1.0 - (-t * l).exp());
    if n >= 2 {
        let rows = alpha_table(n - 1, t, l);
        for m in 1..n {
            v -= 2f64.powi(m as i32 - 1) / t.powi(m as i32) * rows[n - m - 1][0];
        }
    }
    Ok(v)
}

/// L - 2L/t + 2(1 - e^{-tL})/t².
pub fn interval_first_partial(t: f64, l: f64) -> f64 {
    l - 2.0 * l / t + 2.0 / (t * t) * (1.0 - (-t * l).exp())
}

const INNER_TOL: f64 = 1e-12;

/// ∫_0^L e^{-t|x-y|} dy by quadrature.
fn kernel_row(x: f64, t: f64, l: f64) -> f64 {
    integrate_with_breaks(|y| (-t * (x - y).abs()).exp(), &[0.0, x, l], INNER_TOL).value
}

/// Nested-quadrature oracle for a_n, n ≤ 3.
pub fn interval_term_by_quadrature(n: usize, t: f64, l: f64) -> f64 {
    let tol = 1e-10;
    match n {
        1 => integrate_with_breaks(|x| kernel_row(x, t, l), &[0.0, l], tol).value,
        2 => integrate_with_breaks(|x| kernel_row(x, t, l).powi(2), &[0.0, l], tol).value,
        3 => integrate_with_breaks(
            |x| {
                let hx = kernel_row(x, t, l);
                hx * integrate_with_breaks(
                    |y| (-t * (x - y).abs()).exp() * kernel_row(y, t, l),
                    &[0.0, x, l],
                    INNER_TOL,
                )
                .value
            },
            &[0.0, l],
            tol,
        )
        .value,
        _ => f64::NAN,
    }
}

fn weight_fn(k: usize, x: f64, t: f64, l: f64) -> f64 {
    let (u, v) = (x, l - x);
    (v.powi(k as i32) * (-t * v).exp() + u.powi(k as i32) * (-t * u).exp()) / factorial(k)
}

/// Nested-quadrature oracle for α_{n,k}, n ∈ {0, 1, 2}.
pub fn interval_alpha_by_quadrature(n: usize, k: usize, t: f64, l: f64) -> f64 {
    let tol = 1e-11;
    let w = |x: f64| weight_fn(k, x, t, l);
    match n {
        0 => integrate_with_breaks(w, &[0.0, l], tol).value,
        1 => integrate_with_breaks(|x| kernel_row(x, t, l) * w(x), &[0.0, l], tol).value,
        2 => integrate_with_breaks(
            |x| {
                kernel_row(x, t, l)
                    * integrate_with_breaks(
                        |y| (-t * (x - y).abs()).exp() * w(y),
                        &[0.0, x, l],
                        INNER_TOL,
                    )
                    .value
            },
            &[0.0, l],
            tol,
        )
        .value,
        _ => f64::NAN,
    }
}
