#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermMethod {
    Exact,
    Quadrature,
    MonteCarlo,
}

impl TermMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            TermMethod::Exact => "exact",
            TermMethod::Quadrature => "quadrature",
            TermMethod::MonteCarlo => "montecarlo",
        }
    }
}

/// One chain integral a_n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub order: usize,
    pub value: f64,
    pub std_error: f64,
    pub method: TermMethod,
}

impl Term {
    pub fn exact(order: usize, value: f64) -> Self {
        Self {
            order,
            value,
            std_error: 0.0,
            method: TermMethod::Exact,
        }
    }
}

/// Terms a_1..a_N together with the partial magnitudes they generate.
#[derive(Debug, Clone, PartialEq)]
pub struct MagnitudeSeries {
    t: f64,
    mass: f64,
    terms: Vec<Term>,
    partial_sums: Vec<f64>,
    tail_bound: Option<f64>,
}

impl MagnitudeSeries {
    /// `terms[k]` must have order `k + 1`.
    pub fn from_terms(t: f64, mass: f64, terms: Vec<Term>) -> Self {
        let mut partial_sums = Vec::with_capacity(terms.len() + 1);
        let mut acc = mass;
        partial_sums.push(acc);
        for (k, term) in terms.iter().enumerate() {
            debug_assert_eq!(term.order, k + 1);
            if term.order % 2 == 0 {
                acc += term.value;
            } else {
                acc -= term.value;
            }
            partial_sums.push(acc);
        }
        Self {
            t,
            mass,
            terms,
            partial_sums,
            tail_bound: None,
        }
    }

    pub fn with_tail_bound(mut self, bound: Option<f64>) -> Self {
        self.tail_bound = bound;
        self
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// μ(X), the zeroth partial sum.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn max_order(&self) -> usize {
        self.terms.len()
    }

    pub fn partial_sums(&self) -> &[f64] {
        &self.partial_sums
    }

    pub fn partial_sum(&self, n: usize) -> f64 {
        self.partial_sums[n]
    }

    /// Standard error of Mag(..; n), combining term errors in quadrature.
    pub fn partial_sum_std_error(&self, n: usize) -> f64 {
        self.terms[..n]
            .iter()
            .fold(0.0, |acc, t| acc + t.std_error * t.std_error)
            .sqrt()
    }

    pub fn tail_bound(&self) -> Option<f64> {
        self.tail_bound
    }
}
