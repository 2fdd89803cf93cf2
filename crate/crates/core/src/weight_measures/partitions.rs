use crate::error::{out_of_range, Result};

/// Largest `n` accepted by the exhaustive enumerations.
pub const MAX_PARTITION_ORDER: usize = 20;

/// An ordered partition (composition) of n + 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrderedPartition {
    parts: Vec<usize>,
}

impl OrderedPartition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(out_of_range(format!("composition {parts:?}")));
        }
        Ok(Self { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// The integer being partitioned, n + 1.
    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Sum of the parts that are at least 2.
    pub fn repeated_mass(&self) -> usize {
        self.parts.iter().filter(|&&p| p >= 2).sum()
    }
}

/// Composition of `n + 1` encoded by which of the `n` gaps are cut.
fn from_mask(n: usize, mask: u32) -> Vec<usize> {
    let mut parts = Vec::new();
    let mut run = 1;
    for gap in 0..n {
        if mask & (1 << gap) != 0 {
            parts.push(run);
            run = 1;
        } else {
            run += 1;
        }
    }
    parts.push(run);
    parts
}

fn check_order(n: usize) -> Result<()> {
    if n == 0 || n > MAX_PARTITION_ORDER {
        return Err(out_of_range(format!(
            "partition order n = {n} (supported: 1..={MAX_PARTITION_ORDER})"
        )));
    }
    Ok(())
}

/// Compositions of n + 1 with at least one part ≥ 2; there are 2^n - 1.
pub fn enumerate_partitions(n: usize) -> Result<Vec<OrderedPartition>> {
    check_order(n)?;
    let full = (1u32 << n) - 1;
    Ok((0..full)
        .map(|mask| OrderedPartition {
            parts: from_mask(n, mask),
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClusterStats {
    /// Number of maximal runs of parts ≥ 2.
    pub f: usize,
    /// Σ over runs of (run length - 1).
    pub g: usize,
}

fn stats(parts: &[usize]) -> (usize, usize) {
    let (mut f, mut g, mut run) = (0, 0, 0);
    for &p in parts.iter().chain(std::iter::once(&1)) {
        if p >= 2 {
            run += 1;
        } else if run > 0 {
            f += 1;
            g += run - 1;
            run = 0;
        }
    }
    (f, g)
}

pub fn cluster_stats(lambda: &OrderedPartition) -> Result<ClusterStats> {
    let (f, g) = stats(&lambda.parts);
    if f == 0 {
        return Err(out_of_range("all-ones composition has no clusters"));
    }
    Ok(ClusterStats { f, g })
}

/// Σ_{λ ∈ C_{n+1}} 2^{f(λ)} e^{-tLg(λ)}, optionally with each λ weighted by
/// (1/2)^{Σ parts ≥ 2}.
pub(crate) fn cluster_sum(n: usize, l: f64, t: f64, atom_mass: bool) -> Result<f64> {
    check_order(n)?;
    let full = (1u32 << n) - 1;
    let e = (-t * l).exp();
    Ok((0..full)
        .map(|mask| {
            let parts = from_mask(n, mask);
            let (f, g) = stats(&parts);
            let mut v = 2f64.powi(f as i32) * e.powi(g as i32);
            if atom_mass {
                let repeated: usize = parts.iter().filter(|&&p| p >= 2).sum();
                v *= 0.5f64.powi(repeated as i32);
            }
            v
        })
        .sum())
}
