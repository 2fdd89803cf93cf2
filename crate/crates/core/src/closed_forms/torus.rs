use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use crate::error::{out_of_range, Result};
use crate::quadrature::{integrate_with_breaks, simpson, ABS_TOL};

/// Injectivity radius of the unit flat torus.
pub const TORUS_RHO: f64 = 0.5;
/// Diameter of the unit flat torus.
pub const TORUS_DIAMETER: f64 = FRAC_1_SQRT_2;

fn level(l: f64) -> f64 {
    if l <= TORUS_RHO {
        TAU * l
    } else {
        l * (TAU - 8.0 * (1.0 / (2.0 * l)).min(1.0).acos())
    }
}

/// Length of the geodesic circle of radius `l` on the unit flat torus.
pub fn torus_level_volume(l: f64) -> Result<f64> {
    if !(0.0..=TORUS_DIAMETER).contains(&l) {
        return Err(out_of_range(format!("torus level l = {l}")));
    }
    Ok(level(l))
}

/// a_1(t) = ∫_0^R e^{-tl} F(l) dl, split at the kink l = 1/2.
pub fn torus_first_term(t: f64) -> f64 {
    integrate_with_breaks(
        |l| (-t * l).exp() * level(l),
        &[0.0, TORUS_RHO, TORUS_DIAMETER],
        ABS_TOL,
    )
    .value
}

/// Composite Simpson value of the same integral, on each side of the kink.
pub fn torus_first_term_simpson(t: f64, panels: usize) -> f64 {
    let f = |l: f64| (-t * l).exp() * level(l);
    let left = (panels as f64 * TORUS_RHO / TORUS_DIAMETER) as usize;
    simpson(f, 0.0, TORUS_RHO, left.max(2)) + simpson(f, TORUS_RHO, TORUS_DIAMETER, (panels - left).max(2))
}

/// M(t) = ∫_{1/2}^{R} e^{-tl} l arccos(1/(2l)) dl, the cut-locus correction:
/// a_1(t) = 2π/t² - 8M(t) - 2π(Rt + 1)e^{-tR}/t².
pub fn torus_cut_integral(t: f64) -> f64 {
    integrate_with_breaks(
        |l| (-t * l).exp() * l * (1.0 / (2.0 * l)).min(1.0).acos(),
        &[TORUS_RHO, TORUS_DIAMETER],
        1e-13,
    )
    .value
}

/// Elementary lower and upper bounds on `torus_cut_integral`.
pub fn torus_cut_bounds(t: f64) -> (f64, f64) {
    let (rho, r) = (TORUS_RHO, TORUS_DIAMETER);
    let w = (-t * (r - rho)).exp();
    let lower = (-rho * t).exp() / (t * t) * (1.0 - (1.0 + t * (r - rho)) * w);
    let upper = PI / 2.0 * (-rho * t).exp() / (t * t) * (1.0 + rho * t - (1.0 + r * t) * w);
    (lower, upper)
}
