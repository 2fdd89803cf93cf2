//! Graph magnitude under the trivial and geodesic-counting path measures.

use nalgebra::DMatrix;

use crate::error::{out_of_range, Result};
use crate::finite_mag::{
    self, chain_sums, threshold_with_multiplicity, ConvergenceThreshold,
};
use crate::linalg;
use crate::spaces::{all_pairs, graph_metric, GeodesicGraph, MagnitudeSeries, Term};

/// Number of distinct shortest paths between each pair of vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeodesicCountMatrix {
    n: usize,
    counts: Vec<u64>,
}

impl GeodesicCountMatrix {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, x: usize, y: usize) -> u64 {
        self.counts[x * self.n + y]
    }
}

/// Which measure is placed on the sets of geodesics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathMeasure {
    /// Mass one on every nonempty geodesic set; gives classical magnitude.
    Trivial,
    /// Mass equal to the number of geodesics.
    Counting,
}

pub fn count_geodesics(g: &GeodesicGraph) -> Result<GeodesicCountMatrix> {
    let sp = all_pairs(g)?;
    Ok(GeodesicCountMatrix {
        n: sp.n,
        counts: sp.counts,
    })
}

/// Z̃ with entries |Ω_{x,y}| e^{-t d(x,y)} off the diagonal and 1 on it.
pub fn tilde_similarity(g: &GeodesicGraph, t: f64) -> Result<DMatrix<f64>> {
    if !(t.is_finite() && t > 0.0) {
        return Err(out_of_range(format!("scale t = {t}")));
    }
    let sp = all_pairs(g)?;
    let n = sp.n;
    Ok(DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            1.0
        } else {
            sp.counts[i * n + j] as f64 * (-t * sp.dist[i * n + j]).exp()
        }
    }))
}

pub fn tilde_magnitude(g: &GeodesicGraph, t: f64) -> Result<f64> {
    let z = tilde_similarity(g, t)?;
    Ok(linalg::solve_ones(&z)?.weights.iter().sum())
}

pub fn tilde_neumann_partial(g: &GeodesicGraph, t: f64, order: usize) -> Result<MagnitudeSeries> {
    let z = tilde_similarity(g, t)?;
    let n = z.nrows();
    let y = z - DMatrix::identity(n, n);
    let terms = chain_sums(&y, &vec![1.0; n], order)
        .into_iter()
        .enumerate()
        .map(|(k, v)| Term::exact(k + 1, v))
        .collect();
    Ok(MagnitudeSeries::from_terms(t, n as f64, terms))
}

pub fn tilde_convergence_threshold(g: &GeodesicGraph) -> Result<ConvergenceThreshold> {
    let m = graph_metric(g)?;
    let counts = count_geodesics(g)?;
    threshold_with_multiplicity(&m, |x, y| counts.get(x, y) as f64)
}

/// Spectral radius of Ỹ = Z̃ - I.
pub fn tilde_spectral_radius(g: &GeodesicGraph, t: f64) -> Result<f64> {
    let z = tilde_similarity(g, t)?;
    let n = z.nrows();
    Ok(linalg::spectral_radius(&(z - DMatrix::identity(n, n))))
}

/// Magnitude of a graph for the chosen path measure.
pub fn graph_magnitude(g: &GeodesicGraph, gamma: PathMeasure, t: f64) -> Result<f64> {
    match gamma {
        PathMeasure::Trivial => finite_mag::classical_magnitude(&graph_metric(g)?, t),
        PathMeasure::Counting => tilde_magnitude(g, t),
    }
}

pub fn graph_neumann_partial(
    g: &GeodesicGraph,
    gamma: PathMeasure,
    t: f64,
    order: usize,
) -> Result<MagnitudeSeries> {
    match gamma {
        PathMeasure::Trivial => finite_mag::neumann_partial(&graph_metric(g)?, t, order),
        PathMeasure::Counting => tilde_neumann_partial(g, t, order),
    }
}
