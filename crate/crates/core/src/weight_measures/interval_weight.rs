//! The weight measure μ_w = (δ_a + δ_b + dx)/2 on [a, b].
//!
//! Chain integrals split at the atoms. Between two atoms (or a chain end)
//! the continuous points form a run, and a run integral is computed exactly
//! by iterating the kernel operator K f(y) = ∫ e^{-t|x-y|} f(x) dx on the
//! span of 1, U_j(x) = x^j/j! e^{-tx} and V_j(x) = (L-x)^j/j! e^{-t(L-x)}
//! (coordinates shifted so that a = 0), which K maps into itself.

use rayon::prelude::*;

use super::partitions::{cluster_sum, MAX_PARTITION_ORDER};
use crate::error::{out_of_range, Result};
use crate::mc_engine::{estimate_partial_magnitude, SamplerSpec};
use crate::quadrature::integrate_with_breaks;
use crate::spaces::{AnalyticSpace, IntervalMeasure};

/// Largest order accepted by the brute-force oracle (3^{N+1} patterns).
pub const MAX_BRUTEFORCE_ORDER: usize = 10;

fn check(t: f64, l: f64) -> Result<()> {
    if !(t.is_finite() && t > 0.0) {
        return Err(out_of_range(format!("scale t = {t}")));
    }
    if !(l.is_finite() && l > 0.0) {
        return Err(out_of_range(format!("interval length L = {l}")));
    }
    Ok(())
}

/// μ_w([a, b]) = 1 + L/2.
pub fn interval_weight_mass(l: f64) -> f64 {
    1.0 + l / 2.0
}

/// ∫_0^L u^j/j! e^{-su} du.
fn moment(j: usize, s: f64, l: f64) -> f64 {
    let x = s * l;
    if x < 30.0 {
        // e^{-x}/s^{j+1} Σ_{i>j} x^i/i!, all terms positive.
        let mut term = (1..=j + 1).fold(1.0, |acc, i| acc * x / i as f64);
        let mut sum = 0.0;
        let mut i = j + 1;
        while term > sum * 1e-17 || i < j + 3 {
            sum += term;
            i += 1;
            term *= x / i as f64;
            if i > j + 400 {
                break;
            }
        }
        (-x).exp() * sum / s.powi(j as i32 + 1)
    } else {
        let mut tail = 0.0;
        let mut fact = 1.0;
        for i in 0..=j {
            if i > 0 {
                fact *= i as f64;
            }
            tail += l.powi(i as i32) / fact * s.powi(i as i32 - j as i32 - 1);
        }
        1.0 / s.powi(j as i32 + 1) - (-x).exp() * tail
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// c + Σ u_j U_j + Σ v_j V_j on [0, L].
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ExpPoly {
    c: f64,
    u: Vec<f64>,
    v: Vec<f64>,
}

/// Where a run of continuous points meets the rest of the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum End {
    Open,
    Left,
    Right,
}

impl ExpPoly {
    fn boundary(end: End) -> Self {
        match end {
            End::Open => Self { c: 1.0, u: vec![], v: vec![] },
            End::Left => Self { c: 0.0, u: vec![1.0], v: vec![] },
            End::Right => Self { c: 0.0, u: vec![], v: vec![1.0] },
        }
    }

    #[cfg(test)]
    fn eval(&self, x: f64, t: f64, l: f64) -> f64 {
        let (u, v) = (x, l - x);
        let mut s = self.c;
        for (j, cj) in self.u.iter().enumerate() {
            s += cj * u.powi(j as i32) / factorial(j) * (-t * u).exp();
        }
        for (j, cj) in self.v.iter().enumerate() {
            s += cj * v.powi(j as i32) / factorial(j) * (-t * v).exp();
        }
        s
    }

    /// K applied once.
    fn apply_kernel(&self, t: f64, l: f64) -> Self {
        let deg = self.u.len().max(self.v.len()) + 1;
        let mut out = Self {
            c: 2.0 * self.c / t,
            u: vec![0.0; deg.max(1)],
            v: vec![0.0; deg.max(1)],
        };
        out.u[0] -= self.c / t;
        out.v[0] -= self.c / t;
        let e = (-t * l).exp();
        let two_t = 2.0 * t;
        // K[U_k] = U_{k+1} + Σ_{j≤k} U_j/(2t)^{k-j+1} - e^{-tL} P_k V_0, and
        // symmetrically for V_k, with P_k = Σ_{j≤k} L^j/j!/(2t)^{k-j+1}.
        let step = |src: &[f64], same: &mut Vec<f64>, other: &mut Vec<f64>| {
            for (k, &a) in src.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                same[k + 1] += a;
                let mut p = 0.0;
                for j in 0..=k {
                    let w = two_t.powi(-((k - j + 1) as i32));
                    same[j] += a * w;
                    p += l.powi(j as i32) / factorial(j) * w;
                }
                other[0] -= a * e * p;
            }
        };
        let (mut u, mut v) = (std::mem::take(&mut out.u), std::mem::take(&mut out.v));
        step(&self.u, &mut u, &mut v);
        step(&self.v, &mut v, &mut u);
        out.u = u;
        out.v = v;
        out
    }

    /// ∫_0^L f(x) h(x) dx with h the boundary function of `end`.
    fn pair(&self, end: End, t: f64, l: f64) -> f64 {
        let e = (-t * l).exp();
        let near = |j: usize| moment(j, 2.0 * t, l);
        let far = |j: usize| e * l.powi(j as i32 + 1) / factorial(j + 1);
        let (cu, cv): (Box<dyn Fn(usize) -> f64>, Box<dyn Fn(usize) -> f64>) = match end {
            End::Open => (Box::new(|j| moment(j, t, l)), Box::new(|j| moment(j, t, l))),
            End::Left => (Box::new(near), Box::new(far)),
            End::Right => (Box::new(far), Box::new(near)),
        };
        let constant = match end {
            End::Open => l,
            _ => moment(0, t, l),
        };
        self.c * constant
            + self.u.iter().enumerate().map(|(j, a)| a * cu(j)).sum::<f64>()
            + self.v.iter().enumerate().map(|(j, a)| a * cv(j)).sum::<f64>()
    }
}

/// Run integrals J(k, left, right) for k = 1..=max_len.
struct RunTable {
    values: Vec<[[f64; 3]; 3]>,
}

const ENDS: [End; 3] = [End::Open, End::Left, End::Right];

fn end_index(e: End) -> usize {
    match e {
        End::Open => 0,
        End::Left => 1,
        End::Right => 2,
    }
}

impl RunTable {
    fn new(max_len: usize, t: f64, l: f64) -> Self {
        let mut values = vec![[[0.0; 3]; 3]; max_len + 1];
        for left in ENDS {
            let mut f = ExpPoly::boundary(left);
            for k in 1..=max_len {
                if k > 1 {
                    f = f.apply_kernel(t, l);
                }
                for right in ENDS {
                    values[k][end_index(left)][end_index(right)] = f.pair(right, t, l);
                }
            }
        }
        Self { values }
    }

    fn get(&self, k: usize, left: End, right: End) -> f64 {
        self.values[k][end_index(left)][end_index(right)]
    }
}

/// Unnormalized (density-1) integral of one atom/continuous pattern.
/// Digit 0 is a continuous point, 1 the atom at a, 2 the atom at b.
fn pattern_integral(digits: &[u8], runs: &RunTable, e: f64) -> f64 {
    let mut value = 1.0;
    let mut prev = End::Open;
    let mut run = 0;
    for &d in digits {
        if d == 0 {
            run += 1;
            continue;
        }
        let here = if d == 1 { End::Left } else { End::Right };
        if run > 0 {
            value *= runs.get(run, prev, here);
        } else if prev != End::Open {
            if prev == here {
                return 0.0;
            }
            value *= e;
        }
        prev = here;
        run = 0;
    }
    if run > 0 {
        value *= runs.get(run, prev, End::Open);
    }
    value
}

/// The proper-chain integral a_n = ∫_{P_n} e^{-t Len} dμ_w^{n+1}, by exact
/// enumeration of the 3^{n+1} atom/continuous patterns.
pub fn interval_weight_term(n: usize, l: f64, t: f64) -> Result<f64> {
    check(t, l)?;
    if n == 0 || n > MAX_BRUTEFORCE_ORDER {
        return Err(out_of_range(format!(
            "brute-force order {n} (supported: 1..={MAX_BRUTEFORCE_ORDER})"
        )));
    }
    let runs = RunTable::new(n + 1, t, l);
    let e = (-t * l).exp();
    let count = 3usize.pow(n as u32 + 1);
    let parts: Vec<f64> = (0..count)
        .into_par_iter()
        .map(|mut code| {
            let mut digits = [0u8; MAX_BRUTEFORCE_ORDER + 1];
            for d in digits.iter_mut().take(n + 1) {
                *d = (code % 3) as u8;
                code /= 3;
            }
            pattern_integral(&digits[..n + 1], &runs, e)
        })
        .collect();
    Ok(0.5f64.powi(n as i32 + 1) * parts.iter().sum::<f64>())
}

/// Mag([a, b], td, μ_w; N) for N = 0..=order from the exact terms.
pub fn interval_weight_bruteforce(order: usize, l: f64, t: f64) -> Result<Vec<f64>> {
    check(t, l)?;
    let mut acc = interval_weight_mass(l);
    let mut out = vec![acc];
    for n in 1..=order {
        let a = interval_weight_term(n, l, t)?;
        acc += if n % 2 == 0 { a } else { -a };
        out.push(acc);
    }
    Ok(out)
}

/// The two readings of the cluster formula for Mag(..; N).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionSums {
    /// μ_w(X) - Σ_{n≤N} (-1)^n Σ_λ 2^{f(λ)} e^{-tLg(λ)}.
    pub verbatim: f64,
    /// Same, with each λ weighted by (1/2)^{Σ parts ≥ 2}.
    pub corrected: f64,
}

/// Cluster-formula partial magnitude; e^{-Lg} is read as e^{-tLg} at scale t.
pub fn interval_weight_partition_sum(order: usize, l: f64, t: f64) -> Result<PartitionSums> {
    check(t, l)?;
    if order > MAX_PARTITION_ORDER {
        return Err(out_of_range(format!(
            "partition-sum order {order} (supported: up to {MAX_PARTITION_ORDER})"
        )));
    }
    let mass = interval_weight_mass(l);
    let (mut verbatim, mut corrected) = (mass, mass);
    for n in 1..=order {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        verbatim -= sign * cluster_sum(n, l, t, false)?;
        corrected -= sign * cluster_sum(n, l, t, true)?;
    }
    Ok(PartitionSums {
        verbatim,
        corrected,
    })
}

/// ∫ e^{-t|x-y|} dμ_w(x) at `y`, with the continuous part by quadrature.
pub fn interval_weight_identity(l: f64, t: f64, y: f64) -> Result<f64> {
    check(t, l)?;
    if !(0.0..=l).contains(&y) {
        return Err(out_of_range(format!("basepoint {y} outside [0, {l}]")));
    }
    let continuous =
        integrate_with_breaks(|x| (-t * (x - y).abs()).exp(), &[0.0, y, l], 1e-13).value;
    Ok(0.5 * ((-t * y).exp() + (-t * (l - y)).exp() + continuous))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalWeightRow {
    pub order: usize,
    pub verbatim_formula: f64,
    pub corrected_formula: f64,
    pub bruteforce: f64,
    pub mc_estimate: Option<f64>,
    pub mc_stderr: Option<f64>,
}

/// Comparison table for N = 0..=order; MC columns when `mc` = (samples, seed).
pub fn interval_weight_report(
    order: usize,
    l: f64,
    t: f64,
    mc: Option<(u64, u64)>,
) -> Result<Vec<IntervalWeightRow>> {
    let brute = interval_weight_bruteforce(order, l, t)?;
    let series = match mc {
        Some((samples, seed)) => {
            let space = AnalyticSpace::interval(0.0, l, IntervalMeasure::Weight)?;
            Some(estimate_partial_magnitude(
                &SamplerSpec::new(space, seed, samples)?,
                t,
                order,
            )?)
        }
        None => None,
    };
    (0..=order)
        .map(|n| {
            let sums = interval_weight_partition_sum(n, l, t)?;
            Ok(IntervalWeightRow {
                order: n,
                verbatim_formula: sums.verbatim,
                corrected_formula: sums.corrected,
                bruteforce: brute[n],
                mc_estimate: series.as_ref().map(|s| s.partial_sum(n)),
                mc_stderr: series.as_ref().map(|s| s.partial_sum_std_error(n)),
            })
        })
        .collect()
}
