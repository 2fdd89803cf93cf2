use std::f64::consts::PI;
use std::fmt;

use crate::error::{out_of_range, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IntervalMeasure {
    Lebesgue,
    /// (δ_a + δ_b + Lebesgue) / 2
    Weight,
}

/// A point mass carried by a measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub location: f64,
    pub mass: f64,
}

/// A manifold (or interval, or line) together with its reference measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnalyticSpace {
    Circle { r: f64 },
    Sphere2 { r: f64 },
    FlatTorusUnit,
    Interval { a: f64, b: f64, measure: IntervalMeasure },
    /// Real line with density e^{-x^2}.
    LineGaussian,
    /// Real line with density e^{-|x|}.
    LineLaplace,
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(out_of_range(format!("{name} = {v} (must be positive)")))
    }
}

impl AnalyticSpace {
    pub fn circle(r: f64) -> Result<Self> {
        Ok(Self::Circle { r: positive("r", r)? })
    }

    pub fn sphere(r: f64) -> Result<Self> {
        Ok(Self::Sphere2 { r: positive("r", r)? })
    }

    pub fn interval(a: f64, b: f64, measure: IntervalMeasure) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(out_of_range(format!("interval [{a}, {b}]")));
        }
        Ok(Self::Interval { a, b, measure })
    }

    /// Total mass of the reference measure.
    pub fn total_mass(&self) -> f64 {
        match *self {
            Self::Circle { r } => 2.0 * PI * r,
            Self::Sphere2 { r } => 4.0 * PI * r * r,
            Self::FlatTorusUnit => 1.0,
            Self::Interval { a, b, measure } => match measure {
                IntervalMeasure::Lebesgue => b - a,
                IntervalMeasure::Weight => 1.0 + (b - a) / 2.0,
            },
            Self::LineGaussian => PI.sqrt(),
            Self::LineLaplace => 2.0,
        }
    }

    pub fn atoms(&self) -> Vec<Atom> {
        match *self {
            Self::Interval {
                a,
                b,
                measure: IntervalMeasure::Weight,
            } => vec![
                Atom { location: a, mass: 0.5 },
                Atom { location: b, mass: 0.5 },
            ],
            _ => Vec::new(),
        }
    }

    /// Mass of the absolutely continuous part.
    pub fn continuous_mass(&self) -> f64 {
        self.total_mass() - self.atoms().iter().map(|a| a.mass).sum::<f64>()
    }

    /// Diameter of the space, if bounded.
    pub fn diameter(&self) -> Option<f64> {
        match *self {
            Self::Circle { r } | Self::Sphere2 { r } => Some(PI * r),
            Self::FlatTorusUnit => Some(std::f64::consts::FRAC_1_SQRT_2),
            Self::Interval { a, b, .. } => Some(b - a),
            Self::LineGaussian | Self::LineLaplace => None,
        }
    }

    pub fn has_atoms(&self) -> bool {
        !self.atoms().is_empty()
    }
}

impl fmt::Display for AnalyticSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Circle { r } => write!(f, "circle(r={r})"),
            Self::Sphere2 { r } => write!(f, "sphere(r={r})"),
            Self::FlatTorusUnit => write!(f, "torus"),
            Self::Interval { a, b, measure } => {
                let m = match measure {
                    IntervalMeasure::Lebesgue => "lebesgue",
                    IntervalMeasure::Weight => "weight",
                };
                write!(f, "interval([{a},{b}],{m})")
            }
            Self::LineGaussian => write!(f, "line-gauss"),
            Self::LineLaplace => write!(f, "line-laplace"),
        }
    }
}
