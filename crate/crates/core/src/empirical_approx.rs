//! Magnitude under finitely supported measures on analytic spaces, and a
//! minimal-energy surrogate for Fekete points on the 2-sphere.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::closed_forms::sphere_term;
use crate::error::{out_of_range, Error, Result};
use crate::finite_mag::weighted_neumann_partial;
use crate::mc_engine::{distance, estimate_term, geodesic_distance, Point, SamplerSpec};
use crate::spaces::{AnalyticSpace, FiniteMetricSpace, MagnitudeSeries};

/// Points of an analytic space carrying positive masses.
#[derive(Debug, Clone, PartialEq)]
pub struct PointConfiguration {
    pub space: AnalyticSpace,
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
}

impl PointConfiguration {
    pub fn new(space: AnalyticSpace, points: Vec<Point>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(out_of_range("empty point configuration"));
        }
        if weights.len() != points.len() {
            return Err(out_of_range(format!(
                "{} weights for {} points",
                weights.len(),
                points.len()
            )));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(out_of_range("nonpositive point weight"));
        }
        for p in &points {
            geodesic_distance(&space, p, p)?;
        }
        Ok(Self {
            space,
            points,
            weights,
        })
    }

    /// The empirical measure: mass 1/m on each point.
    pub fn empirical(space: AnalyticSpace, points: Vec<Point>) -> Result<Self> {
        let m = points.len().max(1);
        Self::new(space, points, vec![1.0 / m as f64; m])
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The support as a finite metric space with the induced distance.
    pub fn metric(&self) -> Result<FiniteMetricSpace> {
        let m = self.len();
        let mut dist = vec![0.0; m * m];
        for i in 0..m {
            for j in i + 1..m {
                let d = distance(&self.space, &self.points[i], &self.points[j]);
                if !(d > 0.0) {
                    return Err(out_of_range(format!("points {i} and {j} coincide")));
                }
                dist[i * m + j] = d;
                dist[j * m + i] = d;
            }
        }
        let labels = (0..m).map(|i| i.to_string()).collect();
        Ok(FiniteMetricSpace::from_trusted(labels, dist))
    }
}

/// Mag(X, td, Σ w_z δ_z; N) for N = 0..=order, evaluated exactly over proper
/// chains of support points.
pub fn empirical_partial_magnitude(
    cfg: &PointConfiguration,
    t: f64,
    order: usize,
) -> Result<MagnitudeSeries> {
    weighted_neumann_partial(&cfg.metric()?, &cfg.weights, t, order)
}

/// Default descent budget for `minimal_energy_configuration`.
pub const ENERGY_ITERATIONS: usize = 400;

fn log_energy(x: &[[f64; 3]]) -> f64 {
    let mut e = 0.0;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let d = sub(x[i], x[j]);
            e -= 0.5 * dot(d, d).ln();
        }
    }
    e
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn normalize(a: [f64; 3]) -> [f64; 3] {
    let n = dot(a, a).sqrt();
    [a[0] / n, a[1] / n, a[2] / n]
}

/// Tangential part of the repulsive force on each point.
fn forces(x: &[[f64; 3]]) -> Vec<[f64; 3]> {
    x.par_iter()
        .enumerate()
        .map(|(i, &xi)| {
            let mut f = [0.0; 3];
            for (j, &xj) in x.iter().enumerate() {
                if i != j {
                    let d = sub(xi, xj);
                    let s = 1.0 / dot(d, d);
                    f = [f[0] + s * d[0], f[1] + s * d[1], f[2] + s * d[2]];
                }
            }
            let radial = dot(f, xi);
            [f[0] - radial * xi[0], f[1] - radial * xi[1], f[2] - radial * xi[2]]
        })
        .collect()
}

/// Unit vectors approximately minimizing -Σ_{i<j} log|x_i - x_j|.
///
/// Starts from a seeded uniform sample and takes projected gradient steps
/// with backtracking; deterministic for a given seed and iteration budget.
pub fn minimal_energy_points(m: usize, seed: u64, iterations: usize) -> Result<Vec<[f64; 3]>> {
    if m < 2 {
        return Err(out_of_range(format!("configuration size m = {m} (need at least 2)")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<[f64; 3]> = (0..m)
        .map(|_| {
            let g: [f64; 3] = [
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
            ];
            normalize(g)
        })
        .collect();
    let mut energy = log_energy(&x);
    let mut step = 1.0 / m as f64;
    for _ in 0..iterations {
        let f = forces(&x);
        let mut accepted = false;
        for _ in 0..30 {
            let trial: Vec<[f64; 3]> = x
                .iter()
                .zip(&f)
                .map(|(p, g)| normalize([p[0] + step * g[0], p[1] + step * g[1], p[2] + step * g[2]]))
                .collect();
            let e = log_energy(&trial);
            if e < energy {
                x = trial;
                energy = e;
                step *= 1.5;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Ok(x)
}

/// Empirical measure of a minimal-energy configuration on Sphere2(r).
pub fn minimal_energy_configuration(m: usize, seed: u64, r: f64) -> Result<PointConfiguration> {
    let space = AnalyticSpace::sphere(r)?;
    let points = minimal_energy_points(m, seed, ENERGY_ITERATIONS)?
        .into_iter()
        .map(Point::Sphere)
        .collect();
    PointConfiguration::empirical(space, points)
}

/// Empirical measure of `m` i.i.d. uniform points on Sphere2(r).
pub fn uniform_sphere_configuration(m: usize, seed: u64, r: f64) -> Result<PointConfiguration> {
    let space = AnalyticSpace::sphere(r)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..m)
        .map(|_| crate::mc_engine::sample_point(&space, &mut rng))
        .collect();
    PointConfiguration::empirical(space, points)
}

/// c = 2(1 + r²)/(1 + e^{-πr}).
pub fn fekete_constant(r: f64) -> f64 {
    2.0 * (1.0 + r * r) / (1.0 + (-std::f64::consts::PI * r).exp())
}

/// Mag(Sphere2(r), d, vol/(4πr²); N) at scale 1. Exact for N ≤ 2; higher
/// orders use Monte Carlo terms with `samples` chains.
pub fn sphere_probability_target(r: f64, order: usize, samples: u64, seed: u64) -> Result<f64> {
    let area = 4.0 * std::f64::consts::PI * r * r;
    let space = AnalyticSpace::sphere(r)?;
    let mut acc = 1.0;
    for n in 1..=order {
        let a = if n <= 2 {
            sphere_term(n, r, 1.0)? / area.powi(n as i32 + 1)
        } else {
            let spec = SamplerSpec::new(space, seed, samples)?.with_total_mass(1.0)?;
            estimate_term(&spec, n, 1.0)?.value
        };
        acc += if n % 2 == 0 { a } else { -a };
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeketeRow {
    pub m: usize,
    pub order: usize,
    pub empirical: f64,
    pub target: f64,
    pub abs_dev: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeketeExperiment {
    pub r: f64,
    pub constant: f64,
    pub rows: Vec<FeketeRow>,
}

/// Empirical partial magnitude of minimal-energy configurations against
/// the uniform probability measure, at scale 1.
pub fn fekete_convergence_experiment(
    r: f64,
    m_list: &[usize],
    order: usize,
    seed: u64,
) -> Result<FeketeExperiment> {
    let target = sphere_probability_target(r, order, 1_000_000, seed)?;
    let rows = m_list
        .par_iter()
        .map(|&m| {
            let cfg = minimal_energy_configuration(m, seed, r)?;
            let empirical = empirical_partial_magnitude(&cfg, 1.0, order)?.partial_sum(order);
            Ok(FeketeRow {
                m,
                order,
                empirical,
                target,
                abs_dev: (empirical - target).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FeketeExperiment {
        r,
        constant: fekete_constant(r),
        rows,
    })
}

/// Writes unit-sphere coordinates as CSV (x, y, z).
pub fn write_configuration<W: Write>(cfg: &PointConfiguration, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "y", "z"])?;
    for p in &cfg.points {
        match p {
            Point::Sphere(v) => w.write_record(v.iter().map(|c| format!("{c:.17e}")))?,
            _ => return Err(Error::MismatchedSpaces),
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use rand::Rng;

    use super::*;
    use crate::finite_mag::{neumann_partial, shift_metric};

    fn sorted_distances(x: &[[f64; 3]]) -> Vec<f64> {
        let mut d = Vec::new();
        for i in 0..x.len() {
            for j in i + 1..x.len() {
                let v = sub(x[i], x[j]);
                d.push(dot(v, v).sqrt());
            }
        }
        d.sort_by(f64::total_cmp);
        d
    }

    #[test]
    fn single_point() {
        let cfg = PointConfiguration::new(
            AnalyticSpace::circle(1.0).unwrap(),
            vec![Point::Circle(0.3)],
            vec![0.7],
        )
        .unwrap();
        let s = empirical_partial_magnitude(&cfg, 1.0, 4).unwrap();
        assert!(s.partial_sums().iter().all(|&p| p == 0.7));
    }

    #[test]
    fn unit_weights_match_counting_measure() {
        let cfg = uniform_sphere_configuration(12, 4, 1.0).unwrap();
        let ones = PointConfiguration::new(cfg.space, cfg.points.clone(), vec![1.0; 12]).unwrap();
        let a = empirical_partial_magnitude(&ones, 2.0, 6).unwrap();
        let b = neumann_partial(&ones.metric().unwrap(), 2.0, 6).unwrap();
        assert_eq!(a.partial_sums(), b.partial_sums());
    }

    #[test]
    fn rescaling_identity() {
        let cfg = uniform_sphere_configuration(30, 9, 1.0).unwrap();
        let m = cfg.len() as f64;
        let emp = empirical_partial_magnitude(&cfg, 1.0, 4).unwrap();
        let shifted = shift_metric(&cfg.metric().unwrap(), m.ln()).unwrap();
        let counting = neumann_partial(&shifted, 1.0, 4).unwrap();
        for n in 0..=4 {
            let lhs = counting.partial_sum(n) / m;
            assert!((lhs - emp.partial_sum(n)).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn energy_minimizers_are_symmetric() {
        let two = minimal_energy_points(2, 1, ENERGY_ITERATIONS).unwrap();
        assert!((dot(two[0], two[1]) + 1.0).abs() < 1e-9);

        let tet = sorted_distances(&minimal_energy_points(4, 1, ENERGY_ITERATIONS).unwrap());
        let edge = (8.0f64 / 3.0).sqrt();
        assert!(tet.iter().all(|d| (d - edge).abs() < 1e-6), "{tet:?}");

        let oct = sorted_distances(&minimal_energy_points(6, 2, ENERGY_ITERATIONS).unwrap());
        assert!(oct[..12].iter().all(|d| (d - 2f64.sqrt()).abs() < 1e-6), "{oct:?}");
        assert!(oct[12..].iter().all(|d| (d - 2.0).abs() < 1e-6));
    }

    #[test]
    fn minimizer_beats_perturbations() {
        let x = minimal_energy_points(4, 3, ENERGY_ITERATIONS).unwrap();
        let e0 = log_energy(&x);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let y: Vec<[f64; 3]> = x
                .iter()
                .map(|p| {
                    normalize([
                        p[0] + 1e-3 * rng.gen::<f64>(),
                        p[1] + 1e-3 * rng.gen::<f64>(),
                        p[2] + 1e-3 * rng.gen::<f64>(),
                    ])
                })
                .collect();
            assert!(log_energy(&y) >= e0 - 1e-12);
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let a = minimal_energy_points(20, 5, 100).unwrap();
        let b = minimal_energy_points(20, 5, 100).unwrap();
        assert_eq!(a, b);
        assert!(minimal_energy_points(1, 5, 10).is_err());
    }

    #[test]
    fn zeroth_order_deviation_vanishes() {
        let exp = fekete_convergence_experiment(1.0, &[10, 20], 0, 0).unwrap();
        assert!(exp.rows.iter().all(|r| r.abs_dev == 0.0 || r.abs_dev < 1e-15));
        assert!((exp.constant - 4.0 / (1.0 + (-std::f64::consts::PI).exp())).abs() < 1e-15);
    }

    #[test]
    fn configuration_dump() {
        let cfg = minimal_energy_configuration(3, 0, 1.0).unwrap();
        let mut buf = Vec::new();
        write_configuration(&cfg, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("x,y,z\n"));
    }

    #[test]
    fn rejects_bad_configurations() {
        let s = AnalyticSpace::circle(1.0).unwrap();
        assert!(PointConfiguration::new(s, vec![], vec![]).is_err());
        assert!(PointConfiguration::new(s, vec![Point::Circle(0.0)], vec![-1.0]).is_err());
        assert!(PointConfiguration::new(s, vec![Point::Line(0.0)], vec![1.0]).is_err());
        let dup = PointConfiguration::empirical(s, vec![Point::Circle(0.0), Point::Circle(0.0)]).unwrap();
        assert!(empirical_partial_magnitude(&dup, 1.0, 1).is_err());
    }
}
