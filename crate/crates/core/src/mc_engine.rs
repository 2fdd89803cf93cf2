//! Monte Carlo estimation of chain integrals a_n(t) over analytic spaces.
//!
//! Samples are drawn in fixed-size batches. Batch `b` of order `n` reads a
//! ChaCha8 stream keyed by `(seed, n)` with stream id `b`, and batch results
//! are reduced in index order, so estimates do not depend on the number of
//! worker threads.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use rayon::prelude::*;

use crate::closed_forms;
use crate::error::{out_of_range, Error, Result};
use crate::spaces::{AnalyticSpace, IntervalMeasure, MagnitudeSeries, Term, TermMethod};

/// Samples per batch; part of the determinism contract.
pub const BATCH_SIZE: u64 = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Point {
    /// Angle in [0, 2π).
    Circle(f64),
    /// Unit vector; distances are scaled by the sphere radius.
    Sphere([f64; 3]),
    /// Coordinates in [0, 1)².
    Torus([f64; 2]),
    Line(f64),
    /// A point mass; `tag` identifies which atom.
    Atom { tag: u8, x: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerSpec {
    pub space: AnalyticSpace,
    pub seed: u64,
    pub samples: u64,
    /// Total mass μ(X) of the measure being integrated against.
    pub normalization: f64,
}

impl SamplerSpec {
    /// Sampler for the space's reference measure.
    pub fn new(space: AnalyticSpace, seed: u64, samples: u64) -> Result<Self> {
        if samples < 2 {
            return Err(out_of_range(format!("sample count {samples}")));
        }
        Ok(Self {
            space,
            seed,
            samples,
            normalization: space.total_mass(),
        })
    }

    /// Same shape of measure, rescaled to total mass `mass`.
    pub fn with_total_mass(mut self, mass: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(out_of_range(format!("total mass {mass}")));
        }
        self.normalization = mass;
        Ok(self)
    }

    /// Ratio of this measure to the reference measure.
    pub fn mass_scale(&self) -> f64 {
        self.normalization / self.space.total_mass()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TermEstimate {
    pub n: usize,
    pub value: f64,
    pub std_error: f64,
    pub proper_fraction: f64,
}

/// Draws one point from the normalized measure.
pub fn sample_point<R: Rng + ?Sized>(space: &AnalyticSpace, rng: &mut R) -> Point {
    match *space {
        AnalyticSpace::Circle { .. } => Point::Circle(rng.gen::<f64>() * TAU),
        AnalyticSpace::Sphere2 { .. } => {
            let z = 2.0 * rng.gen::<f64>() - 1.0;
            let phi = rng.gen::<f64>() * TAU;
            let s = (1.0 - z * z).max(0.0).sqrt();
            Point::Sphere([s * phi.cos(), s * phi.sin(), z])
        }
        AnalyticSpace::FlatTorusUnit => Point::Torus([rng.gen(), rng.gen()]),
        AnalyticSpace::Interval { a, b, measure } => match measure {
            IntervalMeasure::Lebesgue => Point::Line(a + (b - a) * rng.gen::<f64>()),
            IntervalMeasure::Weight => {
                let p_atom = 0.5 / space.total_mass();
                let u: f64 = rng.gen();
                if u < p_atom {
                    Point::Atom { tag: 0, x: a }
                } else if u < 2.0 * p_atom {
                    Point::Atom { tag: 1, x: b }
                } else {
                    Point::Line(a + (b - a) * rng.gen::<f64>())
                }
            }
        },
        AnalyticSpace::LineGaussian => {
            let z: f64 = StandardNormal.sample(rng);
            Point::Line(z * std::f64::consts::FRAC_1_SQRT_2)
        }
        AnalyticSpace::LineLaplace => {
            let e: f64 = Exp1.sample(rng);
            Point::Line(if rng.gen::<bool>() { e } else { -e })
        }
    }
}

fn coordinate(p: &Point) -> Option<f64> {
    match *p {
        Point::Line(x) | Point::Atom { x, .. } => Some(x),
        _ => None,
    }
}

fn accepts(space: &AnalyticSpace, p: &Point) -> bool {
    match (space, p) {
        (AnalyticSpace::Circle { .. }, Point::Circle(_)) => true,
        (AnalyticSpace::Sphere2 { .. }, Point::Sphere(_)) => true,
        (AnalyticSpace::FlatTorusUnit, Point::Torus(_)) => true,
        (AnalyticSpace::Interval { measure: IntervalMeasure::Weight, .. }, Point::Atom { .. }) => true,
        (AnalyticSpace::Interval { .. }, Point::Line(_)) => true,
        (AnalyticSpace::LineGaussian | AnalyticSpace::LineLaplace, Point::Line(_)) => true,
        _ => false,
    }
}

/// Intrinsic distance between two points of `space`.
pub fn geodesic_distance(space: &AnalyticSpace, p: &Point, q: &Point) -> Result<f64> {
    if !(accepts(space, p) && accepts(space, q)) {
        return Err(Error::MismatchedSpaces);
    }
    Ok(distance(space, p, q))
}

#[inline]
pub(crate) fn distance(space: &AnalyticSpace, p: &Point, q: &Point) -> f64 {
    match (space, p, q) {
        (AnalyticSpace::Circle { r }, Point::Circle(x), Point::Circle(y)) => {
            let d = (x - y).abs();
            r * d.min(TAU - d)
        }
        (AnalyticSpace::Sphere2 { r }, Point::Sphere(x), Point::Sphere(y)) => {
            let dot = x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
            let c = [
                x[1] * y[2] - x[2] * y[1],
                x[2] * y[0] - x[0] * y[2],
                x[0] * y[1] - x[1] * y[0],
            ];
            let cross = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
            r * cross.atan2(dot)
        }
        (AnalyticSpace::FlatTorusUnit, Point::Torus(x), Point::Torus(y)) => {
            let wrap = |d: f64| {
                let d = d.abs();
                d.min(1.0 - d)
            };
            wrap(x[0] - y[0]).hypot(wrap(x[1] - y[1]))
        }
        _ => match (coordinate(p), coordinate(q)) {
            (Some(x), Some(y)) => (x - y).abs(),
            _ => f64::NAN,
        },
    }
}

/// Consecutive chain points must differ. Atoms compare by identity; for
/// continuous points equality has probability zero but is still checked.
#[inline]
fn same_point(p: &Point, q: &Point) -> bool {
    match (p, q) {
        (Point::Atom { tag: a, .. }, Point::Atom { tag: b, .. }) => a == b,
        (Point::Atom { .. }, _) | (_, Point::Atom { .. }) => false,
        _ => p == q,
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for batch `batch` of the order-`n` estimator.
fn batch_rng(seed: u64, n: usize, batch: u64) -> ChaCha8Rng {
    let mut state = seed ^ (n as u64).wrapping_mul(0xD6E8_FEB8_6659_FD93);
    let mut key = [0u8; 32];
    for chunk in key.chunks_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(batch);
    rng
}

/// Draws a chain of `n + 1` points; returns its length and whether it is proper.
#[inline]
fn draw_chain<R: Rng>(space: &AnalyticSpace, n: usize, rng: &mut R) -> (f64, bool) {
    let mut prev = sample_point(space, rng);
    let mut len = 0.0;
    let mut proper = true;
    for _ in 0..n {
        let next = sample_point(space, rng);
        if same_point(&prev, &next) {
            proper = false;
        }
        len += distance(space, &prev, &next);
        prev = next;
    }
    (len, proper)
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    #[inline]
    fn push(&mut self, x: f64) {
        self.count += 1.0;
        let d = x - self.mean;
        self.mean += d / self.count;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.count == 0.0 {
            return other;
        }
        let count = self.count + other.count;
        let d = other.mean - self.mean;
        Moments {
            count,
            mean: self.mean + d * other.count / count,
            m2: self.m2 + other.m2 + d * d * self.count * other.count / count,
        }
    }
}

fn batch_sizes(samples: u64) -> Vec<(u64, u64)> {
    let batches = samples.div_ceil(BATCH_SIZE);
    (0..batches)
        .map(|b| (b, BATCH_SIZE.min(samples - b * BATCH_SIZE)))
        .collect()
}

/// Estimates a_n at every scale in `ts` from one shared set of chains.
pub fn estimate_term_grid(spec: &SamplerSpec, n: usize, ts: &[f64]) -> Result<Vec<TermEstimate>> {
    if n == 0 {
        return Err(out_of_range("chain order 0"));
    }
    if let Some(t) = ts.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
        return Err(out_of_range(format!("scale t = {t}")));
    }
    let per_batch: Vec<(Vec<Moments>, u64)> = batch_sizes(spec.samples)
        .into_par_iter()
        .map(|(b, size)| {
            let mut rng = batch_rng(spec.seed, n, b);
            let mut moments = vec![Moments::default(); ts.len()];
            let mut proper_count = 0;
            for _ in 0..size {
                let (len, proper) = draw_chain(&spec.space, n, &mut rng);
                if proper {
                    proper_count += 1;
                }
                for (m, &t) in moments.iter_mut().zip(ts) {
                    m.push(if proper { (-t * len).exp() } else { 0.0 });
                }
            }
            (moments, proper_count)
        })
        .collect();

    let mut total = vec![Moments::default(); ts.len()];
    let mut proper = 0u64;
    for (moments, p) in per_batch {
        proper += p;
        for (acc, m) in total.iter_mut().zip(moments) {
            *acc = acc.merge(m);
        }
    }
    let scale = spec.normalization.powi(n as i32 + 1);
    let samples = spec.samples as f64;
    Ok(total
        .into_iter()
        .map(|m| TermEstimate {
            n,
            value: scale * m.mean,
            std_error: scale * (m.m2 / (samples - 1.0)).sqrt() / samples.sqrt(),
            proper_fraction: proper as f64 / samples,
        })
        .collect())
}

pub fn estimate_term(spec: &SamplerSpec, n: usize, t: f64) -> Result<TermEstimate> {
    Ok(estimate_term_grid(spec, n, &[t])?[0])
}

/// Monte Carlo partial magnitudes Mag(X, td, μ; N) for N = 0..=order.
pub fn estimate_partial_magnitude(spec: &SamplerSpec, t: f64, order: usize) -> Result<MagnitudeSeries> {
    let terms = (1..=order)
        .map(|n| {
            estimate_term(spec, n, t).map(|e| Term {
                order: n,
                value: e.value,
                std_error: e.std_error,
                method: TermMethod::MonteCarlo,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MagnitudeSeries::from_terms(t, spec.normalization, terms)
        .with_tail_bound(tail_bound(spec, t, order)?.bound()))
}

/// sup_y ∫ e^{-t d(x,y)} dμ(x) for the reference measure of `space`.
pub fn kernel_mass_sup(space: &AnalyticSpace, t: f64) -> f64 {
    match *space {
        AnalyticSpace::Circle { r } => 2.0 * (1.0 - (-t * PI * r).exp()) / t,
        AnalyticSpace::Sphere2 { r } => {
            2.0 * PI * r * r * (1.0 + (-PI * r * t).exp()) / (1.0 + r * r * t * t)
        }
        AnalyticSpace::FlatTorusUnit => closed_forms::torus_first_term(t),
        AnalyticSpace::Interval { a, b, measure } => {
            let l = b - a;
            match measure {
                IntervalMeasure::Lebesgue => 2.0 * (1.0 - (-t * l / 2.0).exp()) / t,
                IntervalMeasure::Weight => {
                    // Integral equals 1/t + E(y)(1 - 1/t)/2 with E(y) = e^{-t(y-a)} + e^{-t(b-y)}.
                    let e = if t > 1.0 {
                        1.0 + (-t * l).exp()
                    } else {
                        2.0 * (-t * l / 2.0).exp()
                    };
                    1.0 / t + 0.5 * e * (1.0 - 1.0 / t)
                }
            }
        }
        AnalyticSpace::LineGaussian => closed_forms::gaussian_kernel_mass(t),
        AnalyticSpace::LineLaplace => 2.0 / (1.0 + t),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailBound {
    /// Bound on Σ_{n>N} a_n.
    Bound(f64),
    /// The geometric bound is unavailable because c(t) ≥ 1.
    NoBound { c: f64 },
}

impl TailBound {
    pub fn bound(&self) -> Option<f64> {
        match *self {
            TailBound::Bound(b) => Some(b),
            TailBound::NoBound { .. } => None,
        }
    }
}

/// Geometric tail bound μ(X) c^{N+1} / (1 - c).
pub fn tail_bound(spec: &SamplerSpec, t: f64, order: usize) -> Result<TailBound> {
    if !(t.is_finite() && t > 0.0) {
        return Err(out_of_range(format!("scale t = {t}")));
    }
    let c = spec.mass_scale() * kernel_mass_sup(&spec.space, t);
    if c >= 1.0 - 1e-12 {
        return Ok(TailBound::NoBound { c });
    }
    Ok(TailBound::Bound(
        spec.normalization * c.powi(order as i32 + 1) / (1.0 - c),
    ))
}

/// Histogram estimate of the chain-length density μ_l^n.
#[derive(Debug, Clone, PartialEq)]
pub struct LengthHistogram {
    pub edges: Vec<f64>,
    pub density: Vec<f64>,
    pub std_error: Vec<f64>,
    /// Fraction of proper chains longer than the histogram range.
    pub overflow: f64,
}

impl LengthHistogram {
    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }
}

/// Histogram of total chain length under μ^{n+1}, scaled to estimate μ_l^n.
///
/// `range` defaults to `n` times the diameter, or `n * 4` on the line.
pub fn estimate_length_density(
    spec: &SamplerSpec,
    n: usize,
    bins: usize,
    range: Option<f64>,
) -> Result<LengthHistogram> {
    if bins < 2 {
        return Err(out_of_range(format!("bin count {bins}")));
    }
    if n == 0 {
        return Err(out_of_range("chain order 0"));
    }
    let hi = range.unwrap_or_else(|| n as f64 * spec.space.diameter().unwrap_or(4.0));
    if !(hi.is_finite() && hi > 0.0) {
        return Err(out_of_range(format!("histogram range {hi}")));
    }
    let width = hi / bins as f64;
    let per_batch: Vec<(Vec<u64>, u64)> = batch_sizes(spec.samples)
        .into_par_iter()
        .map(|(b, size)| {
            let mut rng = batch_rng(spec.seed, n, b);
            let mut counts = vec![0u64; bins];
            let mut over = 0;
            for _ in 0..size {
                let (len, proper) = draw_chain(&spec.space, n, &mut rng);
                if !proper {
                    continue;
                }
                let k = (len / width) as usize;
                if len >= hi {
                    over += 1;
                } else {
                    counts[k.min(bins - 1)] += 1;
                }
            }
            (counts, over)
        })
        .collect();
    let mut counts = vec![0u64; bins];
    let mut over = 0;
    for (c, o) in per_batch {
        over += o;
        for (acc, v) in counts.iter_mut().zip(c) {
            *acc += v;
        }
    }
    let samples = spec.samples as f64;
    let scale = spec.normalization.powi(n as i32 + 1) / (samples * width);
    let density = counts.iter().map(|&c| c as f64 * scale).collect();
    let std_error = counts
        .iter()
        .map(|&c| {
            let p = c as f64 / samples;
            scale * (samples * p * (1.0 - p)).sqrt()
        })
        .collect();
    Ok(LengthHistogram {
        edges: (0..=bins).map(|i| i as f64 * width).collect(),
        density,
        std_error,
        overflow: over as f64 / samples,
    })
}
