//! Weight and balanced measures, scaled weight measures, and the weight
//! measure of a closed interval.

mod interval_weight;
mod partitions;

use std::f64::consts::{PI, TAU};

pub use interval_weight::{
    interval_weight_bruteforce, interval_weight_identity, interval_weight_mass,
    interval_weight_partition_sum, interval_weight_report, interval_weight_term,
    IntervalWeightRow, PartitionSums, MAX_BRUTEFORCE_ORDER,
};
pub use partitions::{
    cluster_stats, enumerate_partitions, ClusterStats, OrderedPartition, MAX_PARTITION_ORDER,
};

use crate::error::{out_of_range, Result};
use crate::finite_mag::weighted_neumann_partial;
use crate::mc_engine::{estimate_partial_magnitude, kernel_mass_sup, SamplerSpec};
use crate::quadrature::integrate_with_breaks;
use crate::spaces::{AnalyticSpace, FiniteMetricSpace, MagnitudeSeries};

fn check_scale(t: f64) -> Result<()> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(out_of_range(format!("scale t = {t}")))
    }
}

/// c̃ = 1 / ∫ e^{-t d(x, y)} dvol(x) on a homogeneous space, so that c̃·vol
/// is a weight measure for td.
pub fn homogeneous_weight_constant(space: &AnalyticSpace, t: f64) -> Result<f64> {
    check_scale(t)?;
    match space {
        AnalyticSpace::Circle { .. } | AnalyticSpace::Sphere2 { .. } => {
            Ok(1.0 / kernel_mass_sup(space, t))
        }
        other => Err(out_of_range(format!(
            "homogeneous weight measure on {other} (circle or sphere only)"
        ))),
    }
}

/// μ_w(X) = c̃ · vol(X).
pub fn homogeneous_weight_mass(space: &AnalyticSpace, t: f64) -> Result<f64> {
    Ok(homogeneous_weight_constant(space, t)? * space.total_mass())
}

/// Basepoints used by `weight_identity_residuals`: angles on the circle,
/// (polar, azimuth) pairs on the sphere.
fn basepoints(space: &AnalyticSpace, count: usize) -> Vec<(f64, f64)> {
    match space {
        AnalyticSpace::Circle { .. } => (0..count)
            .map(|k| (TAU * (k as f64 + 0.25) / count as f64, 0.0))
            .collect(),
        _ => {
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|k| {
                    let z = 1.0 - (2.0 * k as f64 + 1.0) / count as f64;
                    (z.acos(), (golden * k as f64).rem_euclid(TAU))
                })
                .collect()
        }
    }
}

/// ∫ e^{-t d(x, y)} dμ_w(x) - 1 at `count` fixed basepoints, integrated in
/// fixed coordinates (not centred at y).
pub fn weight_identity_residuals(space: &AnalyticSpace, t: f64, count: usize) -> Result<Vec<f64>> {
    let c = homogeneous_weight_constant(space, t)?;
    let tol = 1e-12;
    Ok(basepoints(space, count)
        .into_iter()
        .map(|(theta0, phi0)| match *space {
            AnalyticSpace::Circle { r } => {
                let anti = (theta0 + PI).rem_euclid(TAU);
                let mut pts = vec![0.0, theta0, anti, TAU];
                pts.sort_by(f64::total_cmp);
                let v = integrate_with_breaks(
                    |x| {
                        let d = (x - theta0).abs();
                        (-t * r * d.min(TAU - d)).exp()
                    },
                    &pts,
                    tol,
                )
                .value;
                c * r * v - 1.0
            }
            AnalyticSpace::Sphere2 { r } => {
                let (s0, c0) = theta0.sin_cos();
                let inner = |theta: f64| {
                    let (s, co) = theta.sin_cos();
                    let mut pts = vec![0.0, phi0, (phi0 + PI).rem_euclid(TAU), TAU];
                    pts.sort_by(f64::total_cmp);
                    integrate_with_breaks(
                        |phi| {
                            let cosang = (co * c0 + s * s0 * (phi - phi0).cos()).clamp(-1.0, 1.0);
                            (-t * r * cosang.acos()).exp()
                        },
                        &pts,
                        1e-13,
                    )
                    .value
                        * s
                };
                let mut pts = vec![0.0, theta0, PI - theta0, PI];
                pts.sort_by(f64::total_cmp);
                c * r * r * integrate_with_breaks(inner, &pts, tol).value - 1.0
            }
            _ => unreachable!("checked by homogeneous_weight_constant"),
        })
        .collect())
}

/// One row of the homogeneous weight check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightCheckRow {
    pub order: usize,
    pub partial: f64,
    pub std_error: f64,
    /// μ_w(X) for even orders, 0 for odd orders.
    pub expected: f64,
    /// |partial - expected| / std_error; 0 when both are exact.
    pub deviation_sigma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightCheck {
    pub weight_mass: f64,
    pub series: MagnitudeSeries,
    pub rows: Vec<WeightCheckRow>,
}

impl WeightCheck {
    /// |a_n - μ_w(X)| / stderr for every estimated term.
    pub fn term_deviations(&self) -> Vec<f64> {
        self.series
            .terms()
            .iter()
            .map(|term| sigma(term.value - self.weight_mass, term.std_error))
            .collect()
    }

    pub fn max_deviation(&self) -> f64 {
        self.rows.iter().map(|r| r.deviation_sigma).fold(0.0, f64::max)
    }
}

fn sigma(diff: f64, se: f64) -> f64 {
    if se > 0.0 {
        diff.abs() / se
    } else if diff.abs() < 1e-12 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Monte Carlo partial magnitudes under the Speyer-normalized measure,
/// compared with the alternating pattern μ_w(X), 0, μ_w(X), 0, ...
pub fn weight_partial_magnitude_check(
    space: &AnalyticSpace,
    t: f64,
    order: usize,
    samples: u64,
    seed: u64,
) -> Result<WeightCheck> {
    let weight_mass = homogeneous_weight_mass(space, t)?;
    let spec = SamplerSpec::new(*space, seed, samples)?.with_total_mass(weight_mass)?;
    let series = estimate_partial_magnitude(&spec, t, order)?;
    let rows = (0..=order)
        .map(|n| {
            let expected = if n % 2 == 0 { weight_mass } else { 0.0 };
            let partial = series.partial_sum(n);
            let std_error = series.partial_sum_std_error(n);
            WeightCheckRow {
                order: n,
                partial,
                std_error,
                expected,
                deviation_sigma: sigma(partial - expected, std_error),
            }
        })
        .collect();
    Ok(WeightCheck {
        weight_mass,
        series,
        rows,
    })
}

fn check_fraction(name: &str, c: f64) -> Result<()> {
    if c.is_finite() && c > 0.0 && c < 1.0 {
        Ok(())
    } else {
        Err(out_of_range(format!("{name} = {c} (must lie in (0, 1))")))
    }
}

/// Mag(X, td, c·μ_w) = c/(1+c) · μ_w(X).
pub fn scaled_weight_magnitude(space: &AnalyticSpace, t: f64, c: f64) -> Result<f64> {
    check_fraction("measure scale c", c)?;
    Ok(c / (1.0 + c) * homogeneous_weight_mass(space, t)?)
}

/// Monte Carlo partial sums of the geometric series Σ (-1)^n c^{n+1} μ_w(X).
pub fn scaled_weight_series(
    space: &AnalyticSpace,
    t: f64,
    c: f64,
    order: usize,
    samples: u64,
    seed: u64,
) -> Result<MagnitudeSeries> {
    check_fraction("measure scale c", c)?;
    let mass = c * homogeneous_weight_mass(space, t)?;
    let spec = SamplerSpec::new(*space, seed, samples)?.with_total_mass(mass)?;
    estimate_partial_magnitude(&spec, t, order)
}

/// Magnitude of a balanced probability measure with constant c_b: 1/(1 + c_b).
pub fn balanced_magnitude(c_b: f64) -> Result<f64> {
    check_fraction("balance constant c_b", c_b)?;
    Ok(1.0 / (1.0 + c_b))
}

/// Two points at distance d = ln(1/(2c_b)) with mass 1/2 each, so that
/// Σ_{x ≠ y} e^{-d(x,y)} μ({x}) = c_b. Requires c_b < 1/2.
pub fn two_point_balanced(c_b: f64) -> Result<(FiniteMetricSpace, [f64; 2])> {
    if !(c_b.is_finite() && c_b > 0.0 && c_b < 0.5) {
        return Err(out_of_range(format!(
            "two-point balance constant c_b = {c_b} (must lie in (0, 1/2))"
        )));
    }
    let d = -(2.0 * c_b).ln();
    Ok((
        FiniteMetricSpace::from_rows(vec![vec![0.0, d], vec![d, 0.0]])?,
        [0.5, 0.5],
    ))
}

/// Partial magnitudes of the two-point balanced measure at scale 1.
pub fn two_point_balanced_series(c_b: f64, order: usize) -> Result<MagnitudeSeries> {
    let (space, weights) = two_point_balanced(c_b)?;
    weighted_neumann_partial(&space, &weights, 1.0, order)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_constants() {
        let circle = AnalyticSpace::circle(1.0).unwrap();
        let t = 1.0;
        let c = homogeneous_weight_constant(&circle, t).unwrap();
        assert!((c - t / (2.0 * (1.0 - (-PI).exp()))).abs() < 1e-15);
        let total = homogeneous_weight_mass(&circle, t).unwrap();
        assert!((total - PI / (1.0 - (-PI).exp())).abs() < 1e-14);
        let big = homogeneous_weight_constant(&circle, 1e3).unwrap();
        assert!((big / 500.0 - 1.0).abs() < 1e-12);

        for &r in &[0.5, 1.0, 2.0] {
            let s = AnalyticSpace::sphere(r).unwrap();
            let c = homogeneous_weight_constant(&s, 1.0).unwrap();
            let expected = (1.0 + r * r) / (2.0 * PI * r * r * (1.0 + (-PI * r).exp()));
            assert!((c / expected - 1.0).abs() < 1e-14);
        }
        let torus = AnalyticSpace::FlatTorusUnit;
        assert!(homogeneous_weight_constant(&torus, 1.0).is_err());
        assert!(homogeneous_weight_constant(&circle, 0.0).is_err());
    }

    #[test]
    fn weight_identity_holds_at_basepoints() {
        for space in [AnalyticSpace::circle(1.3).unwrap(), AnalyticSpace::sphere(0.8).unwrap()] {
            for t in [0.5, 1.0, 3.0] {
                let res = weight_identity_residuals(&space, t, 16).unwrap();
                assert_eq!(res.len(), 16);
                assert!(res.iter().all(|r| r.abs() < 1e-8), "{space} t={t}: {res:?}");
            }
        }
    }

    #[test]
    fn scaled_and_balanced_values() {
        let circle = AnalyticSpace::circle(1.0).unwrap();
        let mw = homogeneous_weight_mass(&circle, 1.0).unwrap();
        let v = scaled_weight_magnitude(&circle, 1.0, 0.5).unwrap();
        assert!((v - mw / 3.0).abs() < 1e-15);
        assert!(scaled_weight_magnitude(&circle, 1.0, 1e-12).unwrap() < 1e-11);
        assert!(scaled_weight_magnitude(&circle, 1.0, 1.0).is_err());
        assert!((balanced_magnitude(0.5).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((balanced_magnitude(1e-12).unwrap() - 1.0).abs() < 1e-11);
        assert!(balanced_magnitude(0.0).is_err());
    }

    #[test]
    fn two_point_balanced_matches() {
        let cb = (-1.0f64).exp();
        let (space, _) = two_point_balanced(cb).unwrap();
        assert!((space.dist(0, 1) - (1.0 - 2f64.ln())).abs() < 1e-15);
        let series = two_point_balanced_series(cb, 200).unwrap();
        for (n, term) in series.terms().iter().enumerate() {
            assert!((term.value - cb.powi(n as i32 + 1)).abs() < 1e-15);
        }
        let target = balanced_magnitude(cb).unwrap();
        assert!((series.partial_sum(200) - target).abs() < 1e-14);
        assert!(two_point_balanced(0.5).is_err());
    }

    #[test]
    fn alternating_pattern_on_circle() {
        let circle = AnalyticSpace::circle(1.0).unwrap();
        let check = weight_partial_magnitude_check(&circle, 1.0, 4, 200_000, 3).unwrap();
        assert_eq!(check.rows[0].deviation_sigma, 0.0);
        assert!(check.max_deviation() < 4.5, "{:?}", check.rows);
        assert!(check.term_deviations().iter().all(|&d| d < 4.5));
    }

    #[test]
    fn geometric_series_on_circle() {
        let circle = AnalyticSpace::circle(1.0).unwrap();
        let c = 0.25;
        let s = scaled_weight_series(&circle, 1.0, c, 6, 100_000, 5).unwrap();
        let target = scaled_weight_magnitude(&circle, 1.0, c).unwrap();
        let d = s.partial_sum(6) - target;
        assert!(d.abs() < 4.5 * s.partial_sum_std_error(6) + 1e-4, "{d}");
    }
}
