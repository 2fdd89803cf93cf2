//! Dense symmetric solves used by the finite and graph magnitude code.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Condition estimates above this are treated as singular.
pub const MAX_CONDITION: f64 = 1e13;

#[derive(Debug, Clone)]
pub struct OnesSolve {
    pub weights: Vec<f64>,
    /// Estimate of the 1-norm condition number.
    pub condition: f64,
}

/// Solves `a v = 1` for symmetric `a` with a partially pivoted LU factorization.
pub fn solve_ones(a: &DMatrix<f64>) -> Result<OnesSolve> {
    let n = a.nrows();
    let lu = a.clone().lu();
    let ones = DVector::from_element(n, 1.0);
    let Some(v) = lu.solve(&ones) else {
        return Err(Error::Singular {
            condition: f64::INFINITY,
        });
    };
    let inv_norm = inverse_norm1_estimate(n, |x| lu.solve(x));
    let condition = match inv_norm {
        Some(inv) => norm1(a) * inv,
        None => f64::INFINITY,
    };
    if !condition.is_finite() || condition > MAX_CONDITION || v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Singular { condition });
    }
    Ok(OnesSolve {
        weights: v.iter().copied().collect(),
        condition,
    })
}

fn norm1(a: &DMatrix<f64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Hager's estimator for ‖A⁻¹‖₁, valid as written for symmetric A.
fn inverse_norm1_estimate<F>(n: usize, solve: F) -> Option<f64>
where
    F: Fn(&DVector<f64>) -> Option<DVector<f64>>,
{
    let mut x = DVector::from_element(n, 1.0 / n as f64);
    let mut est = 0.0;
    for _ in 0..5 {
        let y = solve(&x)?;
        est = y.iter().map(|v| v.abs()).sum::<f64>();
        let xi = y.map(|v| if v >= 0.0 { 1.0 } else { -1.0 });
        let z = solve(&xi)?;
        let (j, zmax) = z
            .iter()
            .enumerate()
            .map(|(i, v)| (i, v.abs()))
            .fold((0, f64::NEG_INFINITY), |acc, c| if c.1 > acc.1 { c } else { acc });
        if zmax <= z.dot(&x) {
            break;
        }
        x = DVector::zeros(n);
        x[j] = 1.0;
    }
    Some(est)
}

/// Largest absolute eigenvalue of a symmetric matrix.
pub fn spectral_radius(a: &DMatrix<f64>) -> f64 {
    a.clone()
        .symmetric_eigenvalues()
        .iter()
        .fold(0.0, |m, v| m.max(v.abs()))
}
