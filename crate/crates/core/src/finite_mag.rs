//! Classical magnitude and Neumann-series partial magnitude of finite
//! metric spaces.

use nalgebra::{DMatrix, DVector};

use crate::error::{out_of_range, Error, Result};
use crate::linalg;
use crate::spaces::{FiniteMetricSpace, MagnitudeSeries, Term};

/// Z with entries e^{-t d(x,y)}.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    pub t: f64,
    pub entries: DMatrix<f64>,
}

impl SimilarityMatrix {
    pub fn new(m: &FiniteMetricSpace, t: f64) -> Self {
        let n = m.len();
        Self {
            t,
            entries: DMatrix::from_fn(n, n, |i, j| (-t * m.dist(i, j)).exp()),
        }
    }

    /// Y = Z - I.
    pub fn off_diagonal(&self) -> DMatrix<f64> {
        let n = self.entries.nrows();
        &self.entries - DMatrix::identity(n, n)
    }
}

fn check_scale(t: f64) -> Result<()> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(out_of_range(format!("scale t = {t}")))
    }
}

pub fn weighting_vector(m: &FiniteMetricSpace, t: f64) -> Result<Vec<f64>> {
    check_scale(t)?;
    let z = SimilarityMatrix::new(m, t);
    Ok(linalg::solve_ones(&z.entries)?.weights)
}

/// Sum of the entries of Z⁻¹, via a linear solve.
pub fn classical_magnitude(m: &FiniteMetricSpace, t: f64) -> Result<f64> {
    Ok(weighting_vector(m, t)?.iter().sum())
}

/// Weighted proper-chain sums a_n = Σ w_{x_0} y_{x_0 x_1} w_{x_1} ⋯ w_{x_n}
/// for n = 1..=order, where `y` has zero diagonal.
pub(crate) fn chain_sums(y: &DMatrix<f64>, weights: &[f64], order: usize) -> Vec<f64> {
    let w = DVector::from_column_slice(weights);
    let mut u = w.clone();
    let mut out = Vec::with_capacity(order);
    for _ in 0..order {
        u = (y * &u).component_mul(&w);
        out.push(u.sum());
    }
    out
}

/// Partial magnitudes for the counting measure, N = 0..=order.
pub fn neumann_partial(m: &FiniteMetricSpace, t: f64, order: usize) -> Result<MagnitudeSeries> {
    weighted_neumann_partial(m, &vec![1.0; m.len()], t, order)
}

/// Partial magnitudes for the measure Σ w_x δ_x.
pub fn weighted_neumann_partial(
    m: &FiniteMetricSpace,
    weights: &[f64],
    t: f64,
    order: usize,
) -> Result<MagnitudeSeries> {
    check_scale(t)?;
    if weights.len() != m.len() {
        return Err(out_of_range(format!(
            "{} weights for {} points",
            weights.len(),
            m.len()
        )));
    }
    if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(out_of_range("nonpositive point weight"));
    }
    let y = SimilarityMatrix::new(m, t).off_diagonal();
    let terms = chain_sums(&y, weights, order)
        .into_iter()
        .enumerate()
        .map(|(k, v)| Term::exact(k + 1, v))
        .collect();
    Ok(MagnitudeSeries::from_terms(t, weights.iter().sum(), terms))
}

/// Scale thresholds above which the Neumann series is known to converge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceThreshold {
    /// Smallest t* with max_y Σ_{x≠y} c_{xy} e^{-t d(x,y)} < 1 for all t > t*.
    pub exact: f64,
    /// ln(max_y Σ_{x≠y} c_{xy}) / ε.
    pub column_bound: f64,
    /// ln|X| / ε.
    pub cardinality_bound: f64,
}

/// Convergence thresholds for column sums weighted by multiplicities `c(x, y)`.
pub(crate) fn threshold_with_multiplicity(
    m: &FiniteMetricSpace,
    c: impl Fn(usize, usize) -> f64,
) -> Result<ConvergenceThreshold> {
    let n = m.len();
    if n < 2 {
        return Err(out_of_range(
            "convergence threshold of a single point (undefined)",
        ));
    }
    let eps = m.min_distance().expect("at least two points");
    let column = |t: f64| -> f64 {
        (0..n)
            .map(|y| {
                (0..n)
                    .filter(|&x| x != y)
                    .map(|x| c(x, y) * (-t * m.dist(x, y)).exp())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    };
    let at_zero = column(0.0);
    let column_bound = at_zero.ln().max(0.0) / eps;
    let cardinality_bound = (n as f64).ln() / eps;
    let exact = if at_zero <= 1.0 {
        0.0
    } else {
        let (mut lo, mut hi) = (0.0, column_bound);
        for _ in 0..200 {
            if hi - lo <= 1e-13 {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if column(mid) < 1.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };
    Ok(ConvergenceThreshold {
        exact,
        column_bound,
        cardinality_bound,
    })
}

pub fn convergence_threshold(m: &FiniteMetricSpace) -> Result<ConvergenceThreshold> {
    threshold_with_multiplicity(m, |_, _| 1.0)
}

/// Spectral radius of Y at scale t; the series converges iff it is below 1.
pub fn neumann_spectral_radius(m: &FiniteMetricSpace, t: f64) -> f64 {
    linalg::spectral_radius(&SimilarityMatrix::new(m, t).off_diagonal())
}

/// The metric d + c off the diagonal.
pub fn shift_metric(m: &FiniteMetricSpace, c: f64) -> Result<FiniteMetricSpace> {
    if !(c.is_finite() && c >= 0.0) {
        return Err(Error::OutOfRange(format!("metric shift c = {c}")));
    }
    let n = m.len();
    let dist = (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            if i == j {
                0.0
            } else {
                m.dist(i, j) + c
            }
        })
        .collect();
    Ok(FiniteMetricSpace::from_trusted(m.labels().to_vec(), dist))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::validate_metric;

    fn four_cut() -> FiniteMetricSpace {
        FiniteMetricSpace::from_rows(vec![
            vec![0., 1., 2., 1.],
            vec![1., 0., 1., 2.],
            vec![2., 1., 0., 1.],
            vec![1., 2., 1., 0.],
        ])
        .unwrap()
    }

    fn two_points(d: f64) -> FiniteMetricSpace {
        FiniteMetricSpace::from_rows(vec![vec![0., d], vec![d, 0.]]).unwrap()
    }

    fn four_cut_closed(t: f64) -> f64 {
        4.0 * (2.0 * t).exp() / (1.0 + t.exp()).powi(2)
    }

    #[test]
    fn four_cut_magnitude() {
        for t in [0.3, 1.0, 2.0, 5.0] {
            let v = classical_magnitude(&four_cut(), t).unwrap();
            assert!((v / four_cut_closed(t) - 1.0).abs() < 1e-13, "t={t}");
        }
    }

    #[test]
    fn singleton_magnitude() {
        let s = FiniteMetricSpace::singleton();
        assert_eq!(classical_magnitude(&s, 3.0).unwrap(), 1.0);
        assert_eq!(weighting_vector(&s, 0.1).unwrap(), vec![1.0]);
        let series = neumann_partial(&s, 1.0, 5).unwrap();
        assert!(series.terms().iter().all(|t| t.value == 0.0));
        assert!(series.partial_sums().iter().all(|&p| p == 1.0));
    }

    #[test]
    fn two_point_against_hand_inverse() {
        let (d, t): (f64, f64) = (0.7, 1.3);
        let q = (-t * d).exp();
        let w = weighting_vector(&two_points(d), t).unwrap();
        // [[1,q],[q,1]]^{-1} = [[1,-q],[-q,1]]/(1-q^2)
        let row = (1.0 - q) / (1.0 - q * q);
        assert!((w[0] - row).abs() < 1e-15 && (w[1] - row).abs() < 1e-15);
        let mag = classical_magnitude(&two_points(d), t).unwrap();
        assert!((mag - 2.0 / (1.0 + q)).abs() < 1e-14);
    }

    #[test]
    fn four_cut_weights_are_equal() {
        let t = 1.7;
        let w = weighting_vector(&four_cut(), t).unwrap();
        for x in w {
            assert!((x - four_cut_closed(t) / 4.0).abs() < 1e-14);
        }
    }

    #[test]
    fn first_term_is_off_diagonal_sum() {
        let m = four_cut();
        let t = 0.9;
        let s = neumann_partial(&m, t, 1).unwrap();
        let direct: f64 = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .map(|(i, j)| (-t * m.dist(i, j)).exp())
            .sum();
        assert!((s.terms()[0].value - direct).abs() < 1e-14);
    }

    #[test]
    fn neumann_converges_on_four_cut() {
        let t = 2.0;
        let s = neumann_partial(&four_cut(), t, 40).unwrap();
        assert!((s.partial_sum(40) - four_cut_closed(t)).abs() < 1e-9);
    }

    #[test]
    fn thresholds() {
        let th = convergence_threshold(&four_cut()).unwrap();
        assert!((th.column_bound - 3f64.ln()).abs() < 1e-15);
        assert!((th.cardinality_bound - 4f64.ln()).abs() < 1e-15);
        assert!((th.exact - (1.0 + 2f64.sqrt()).ln()).abs() < 1e-10);
        assert_eq!(convergence_threshold(&two_points(1.0)).unwrap().exact, 0.0);
        assert!(convergence_threshold(&FiniteMetricSpace::singleton()).is_err());
    }

    #[test]
    fn shift() {
        let s = shift_metric(&two_points(1.0), 1.0).unwrap();
        assert_eq!(s.dist(0, 1), 2.0);
        assert_eq!(shift_metric(&four_cut(), 0.0).unwrap(), four_cut());
        let shifted = shift_metric(&four_cut(), 4f64.ln()).unwrap();
        assert!(validate_metric(&shifted.rows()).unwrap().is_valid());
        assert!(shift_metric(&four_cut(), -1.0).is_err());
    }

    #[test]
    fn rejects_bad_scale() {
        assert!(classical_magnitude(&four_cut(), 0.0).is_err());
        assert!(neumann_partial(&four_cut(), f64::NAN, 2).is_err());
    }
}
