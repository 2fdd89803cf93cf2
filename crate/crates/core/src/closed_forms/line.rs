//! The real line with Laplace weight e^{-|x|} and Gaussian weight e^{-x²}.

use std::f64::consts::PI;

use libm::erfc;

use crate::quadrature::{integrate, integrate_with_breaks, ABS_TOL};

/// Truncation radius for Laplace-weight integrals; the tail is below e^{-40}.
const LAPLACE_CUT: f64 = 40.0;
/// Truncation for one-dimensional Gaussian integrals; the tail is below e^{-800}.
const GAUSS_CUT: f64 = 40.0;

/// a_1(t) for the Laplace weight: 2(t+2)/(t+1)².
pub fn laplace_line_first_term(t: f64) -> f64 {
    2.0 * (t + 2.0) / ((t + 1.0) * (t + 1.0))
}

/// ∫∫ e^{-t|x-y| - |x| - |y|} by nested quadrature on [-40, 40]².
pub fn laplace_line_first_term_by_quadrature(t: f64) -> f64 {
    let inner = |y: f64| {
        let mut pts = vec![-LAPLACE_CUT, 0.0, y, LAPLACE_CUT];
        pts.sort_by(f64::total_cmp);
        integrate_with_breaks(
            |x| (-t * (x - y).abs() - x.abs()).exp(),
            &pts,
            1e-13,
        )
        .value
    };
    integrate_with_breaks(
        |y| (-y.abs()).exp() * inner(y),
        &[-LAPLACE_CUT, 0.0, LAPLACE_CUT],
        1e-11,
    )
    .value
}

/// Gaussian-weight first term, with two reference values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianFirstTerm {
    /// ∫_0^∞ e^{-tl} √(2π) e^{-l²/2} dl by adaptive quadrature.
    pub quadrature: f64,
    /// π e^{t²/2} erfc(t/√2), the same integral in closed form.
    pub erfc_form: f64,
    /// π e^{-t²/2} as printed; agrees only at t = 0.
    pub printed: f64,
}

pub fn gaussian_line_first_term(t: f64) -> GaussianFirstTerm {
    let quadrature = integrate(
        |l| (-t * l - l * l / 2.0).exp() * (2.0 * PI).sqrt(),
        0.0,
        GAUSS_CUT,
        ABS_TOL,
    )
    .value;
    GaussianFirstTerm {
        quadrature,
        erfc_form: PI * (t * t / 2.0).exp() * erfc(t / 2f64.sqrt()),
        printed: PI * (-t * t / 2.0).exp(),
    }
}

/// sup_y ∫ e^{-t|x-y|} e^{-x²} dx = 2∫_0^∞ e^{-tx - x²} dx.
pub fn gaussian_kernel_mass(t: f64) -> f64 {
    2.0 * integrate(|x| (-t * x - x * x).exp(), 0.0, GAUSS_CUT, 1e-13).value
}

/// 4√(π/3) ∫∫_{s>0} e^{-t(s₁+s₂)} e^{-(a s₁² + b s₂²)} cosh(c s₁ s₂), with
/// the exponents combined so nothing overflows.
fn reduced_double_integral(t: f64, a: f64, b: f64, c: f64, cut: f64) -> f64 {
    let f = |s1: f64, s2: f64| {
        let q = -t * (s1 + s2) - a * s1 * s1 - b * s2 * s2;
        0.5 * ((q + c * s1 * s2).exp() + (q - c * s1 * s2).exp())
    };
    let v = integrate(
        |s1| integrate(|s2| f(s1, s2), 0.0, cut, 1e-13).value,
        0.0,
        cut,
        1e-11,
    )
    .value;
    4.0 * (PI / 3.0).sqrt() * v
}

/// The reduced two-dimensional form of the Gaussian second term, as printed:
/// quadratic form (7s₁² + 4s₂²)/3 with cosh(10 s₁ s₂ / 3).
///
/// The form is positive definite (smallest eigenvalue ≈ 0.093), so
/// truncating at 24 leaves a tail far below 1e-12.
pub fn gaussian_line_second_term(t: f64) -> f64 {
    reduced_double_integral(t, 7.0 / 3.0, 4.0 / 3.0, 10.0 / 3.0, 24.0)
}

/// The reduction of ∫∫∫ e^{-t(|x-y|+|y-z|)} e^{-x²-y²-z²} obtained by
/// integrating out the midpoint: quadratic form 2(s₁² + s₂²)/3 with
/// cosh(2 s₁ s₂ / 3). Smallest eigenvalue 1/3; truncation at 14.
pub fn gaussian_line_second_term_corrected(t: f64) -> f64 {
    reduced_double_integral(t, 2.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0, 14.0)
}
