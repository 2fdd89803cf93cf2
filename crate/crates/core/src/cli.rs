//! Command-line front end. Every subcommand writes CSV.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::closed_forms::{
    catalog, circle_term, circle_term_by_length_density, gaussian_line_first_term,
    gaussian_line_second_term_corrected, interval_term, interval_term_by_quadrature,
    laplace_line_first_term, laplace_line_first_term_by_quadrature, sphere_term,
    sphere_term_by_quadrature, torus_first_term, CATALOG_SCALES,
};
use crate::empirical_approx::{
    fekete_convergence_experiment, minimal_energy_configuration, write_configuration,
};
use crate::error::{out_of_range, Error, Result};
use crate::finite_mag::{classical_magnitude, neumann_partial, neumann_spectral_radius};
use crate::graph_mag::{graph_magnitude, graph_neumann_partial, tilde_spectral_radius, PathMeasure};
use crate::mc_engine::{estimate_length_density, estimate_term_grid, SamplerSpec};
use crate::spaces::{
    graph_metric, parse_edge_list, read_distance_csv, AnalyticSpace, FiniteMetricSpace,
    GeodesicGraph, IntervalMeasure,
};
use crate::weight_measures::{
    homogeneous_weight_mass, interval_weight_report, interval_weight_term,
    scaled_weight_series, weight_partial_magnitude_check, MAX_BRUTEFORCE_ORDER,
};

/// Environment variable capping the worker count (0 = automatic).
pub const THREADS_ENV: &str = "MAGNILAB_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "magnilab",
    version,
    about = "Magnitude and partial magnitude of metric measure spaces"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Magnitude function of a finite metric space given as a distance CSV.
    Finite {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
        /// Partial-sum order for the series method.
        #[arg(long = "N", default_value_t = 20)]
        order: usize,
        #[arg(long, value_enum, default_value_t = Method::Inverse)]
        method: Method,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Magnitude function of a graph given as an edge list.
    Graph {
        #[arg(long)]
        edges: PathBuf,
        #[arg(long, value_enum, default_value_t = Gamma::Triv)]
        gamma: Gamma,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long = "N", default_value_t = 20)]
        order: usize,
        #[arg(long, value_enum, default_value_t = Method::Inverse)]
        method: Method,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Partial magnitudes Mag(X, td, μ; n) for n = 0..=N on an analytic space.
    Manifold {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long = "N", default_value_t = 3)]
        order: usize,
        #[arg(long, value_enum, default_value_t = Method::All)]
        method: Method,
        #[command(flatten)]
        mc: McArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Monte Carlo check of the alternating pattern for Speyer weight measures.
    WeightCheck {
        #[arg(long, value_enum)]
        space: SpaceKind,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long = "N", default_value_t = 4)]
        order: usize,
        /// Scale the weight measure by c ∈ (0, 1) and check c/(1+c)·μ_w(X).
        #[arg(long)]
        c: Option<f64>,
        #[command(flatten)]
        mc: McArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Histogram of the chain-length density.
    LengthSpectrum {
        #[command(flatten)]
        space: SpaceArgs,
        /// Chain order (number of legs).
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 50)]
        bins: usize,
        /// Upper end of the histogram; defaults to n times the diameter.
        #[arg(long)]
        range: Option<f64>,
        #[command(flatten)]
        mc: McArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Cluster formula vs exact enumeration for the interval weight measure.
    IntervalWeight {
        #[arg(long = "L", default_value_t = 1.0)]
        length: f64,
        /// Scale; values other than 1 use the t-scaled cluster weights e^{-tLg}.
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long = "N", default_value_t = 4)]
        order: usize,
        /// Skip the Monte Carlo columns.
        #[arg(long)]
        no_mc: bool,
        #[command(flatten)]
        mc: McArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Empirical measures of minimal-energy sphere configurations.
    FeketeDemo {
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        #[arg(long, value_delimiter = ',', default_values_t = [50usize, 100, 200, 400])]
        m: Vec<usize>,
        #[arg(long = "N", default_value_t = 2)]
        order: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the largest configuration as CSV of unit vectors.
        #[arg(long)]
        dump_config: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Closed forms against independent oracles.
    Catalog {
        #[arg(long = "t", value_delimiter = ',')]
        t: Vec<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args, Debug, Clone)]
struct GridArgs {
    /// Explicit scale(s), comma separated.
    #[arg(long = "t", value_delimiter = ',', conflicts_with_all = ["t_start", "t_stop"])]
    t: Vec<f64>,
    #[arg(long, requires = "t_stop")]
    t_start: Option<f64>,
    #[arg(long, requires = "t_start")]
    t_stop: Option<f64>,
    #[arg(long, default_value_t = 20)]
    t_count: usize,
    #[arg(long, value_enum, default_value_t = Spacing::Linear)]
    t_spacing: Spacing,
}

#[derive(Args, Debug, Clone)]
struct McArgs {
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug, Clone)]
struct OutArgs {
    /// Output file; standard output when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct SpaceArgs {
    #[arg(long, value_enum)]
    space: SpaceKind,
    /// Radius of the circle or sphere.
    #[arg(long, default_value_t = 1.0)]
    r: f64,
    /// Interval endpoints.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    a: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    b: f64,
    /// Measure on the interval.
    #[arg(long, value_enum, default_value_t = MeasureKind::Lebesgue)]
    measure: MeasureKind,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Spacing {
    Linear,
    Log,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Method {
    Inverse,
    Series,
    Mc,
    Closed,
    Quadrature,
    All,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Gamma {
    Triv,
    Count,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum SpaceKind {
    Circle,
    Sphere,
    Torus,
    Interval,
    LineGauss,
    LineLaplace,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum MeasureKind {
    Lebesgue,
    Weight,
}

impl GridArgs {
    fn resolve(&self, default: &[f64]) -> Result<Vec<f64>> {
        let ts = match (self.t_start, self.t_stop) {
            (Some(start), Some(stop)) => {
                let n = self.t_count;
                if n == 0 {
                    return Err(out_of_range("t-count 0"));
                }
                if n == 1 {
                    vec![start]
                } else {
                    let frac = |k: usize| k as f64 / (n - 1) as f64;
                    match self.t_spacing {
                        Spacing::Linear => (0..n).map(|k| start + (stop - start) * frac(k)).collect(),
                        Spacing::Log => {
                            if !(start > 0.0 && stop > 0.0) {
                                return Err(out_of_range("log spacing needs positive endpoints"));
                            }
                            let (ls, le) = (start.ln(), stop.ln());
                            (0..n).map(|k| (ls + (le - ls) * frac(k)).exp()).collect()
                        }
                    }
                }
            }
            _ if !self.t.is_empty() => self.t.clone(),
            _ => default.to_vec(),
        };
        if let Some(t) = ts.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
            return Err(out_of_range(format!("scale t = {t} (must be positive)")));
        }
        Ok(ts)
    }
}

impl SpaceArgs {
    fn build(&self) -> Result<AnalyticSpace> {
        match self.space {
            SpaceKind::Circle => AnalyticSpace::circle(self.r),
            SpaceKind::Sphere => AnalyticSpace::sphere(self.r),
            SpaceKind::Torus => Ok(AnalyticSpace::FlatTorusUnit),
            SpaceKind::Interval => AnalyticSpace::interval(
                self.a,
                self.b,
                match self.measure {
                    MeasureKind::Lebesgue => IntervalMeasure::Lebesgue,
                    MeasureKind::Weight => IntervalMeasure::Weight,
                },
            ),
            SpaceKind::LineGauss => Ok(AnalyticSpace::LineGaussian),
            SpaceKind::LineLaplace => Ok(AnalyticSpace::LineLaplace),
        }
    }
}

/// One line of a magnitude table.
struct Row {
    t: f64,
    order: Option<usize>,
    value: f64,
    stderr: Option<f64>,
    closed_form: Option<f64>,
    method: &'static str,
    seed: u64,
}

/// Shortest round-trip decimal, switching to exponent form for very small
/// or very large magnitudes.
fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) || !a.is_finite() {
        format!("{}", if a == 0.0 { 0.0 } else { x })
    } else {
        format!("{x:e}")
    }
}

fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn write_rows(rows: &[Row]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "N", "value", "stderr", "closed_form", "abs_err", "method", "seed"])?;
    for r in rows {
        w.write_record([
            num(r.t),
            r.order.map(|n| n.to_string()).unwrap_or_default(),
            num(r.value),
            opt_num(r.stderr),
            opt_num(r.closed_form),
            opt_num(r.closed_form.map(|c| (r.value - c).abs())),
            r.method.to_string(),
            r.seed.to_string(),
        ])?;
    }
    finish(w)
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>> {
    w.into_inner()
        .map_err(|e| Error::Io(io::Error::other(e.to_string())))
}

fn check_method(method: Method, allowed: &[Method], what: &str) -> Result<()> {
    if allowed.contains(&method) {
        Ok(())
    } else {
        Err(out_of_range(format!("method {method:?} for {what}")))
    }
}

fn series_guard(radius: f64, t: f64) -> Result<()> {
    if radius >= 1.0 {
        return Err(Error::NoConvergence(format!(
            "spectral radius {radius:.6} ≥ 1 at t = {t}; the series diverges"
        )));
    }
    Ok(())
}

fn finite_rows(
    m: &FiniteMetricSpace,
    ts: &[f64],
    order: usize,
    method: Method,
    seed: u64,
) -> Result<Vec<Row>> {
    check_method(method, &[Method::Inverse, Method::Series, Method::All], "finite spaces")?;
    let mut rows = Vec::new();
    for &t in ts {
        if matches!(method, Method::Inverse | Method::All) {
            rows.push(Row {
                t,
                order: None,
                value: classical_magnitude(m, t)?,
                stderr: None,
                closed_form: None,
                method: "inverse",
                seed,
            });
        }
        if matches!(method, Method::Series | Method::All) {
            series_guard(neumann_spectral_radius(m, t), t)?;
            rows.push(Row {
                t,
                order: Some(order),
                value: neumann_partial(m, t, order)?.partial_sum(order),
                stderr: None,
                closed_form: None,
                method: "series",
                seed,
            });
        }
    }
    Ok(rows)
}

fn graph_rows(
    g: &GeodesicGraph,
    gamma: Gamma,
    ts: &[f64],
    order: usize,
    method: Method,
    seed: u64,
) -> Result<Vec<Row>> {
    if gamma == Gamma::Triv {
        return finite_rows(&graph_metric(g)?, ts, order, method, seed);
    }
    check_method(method, &[Method::Inverse, Method::Series, Method::All], "graphs")?;
    let mut rows = Vec::new();
    for &t in ts {
        if matches!(method, Method::Inverse | Method::All) {
            rows.push(Row {
                t,
                order: None,
                value: graph_magnitude(g, PathMeasure::Counting, t)?,
                stderr: None,
                closed_form: None,
                method: "inverse",
                seed,
            });
        }
        if matches!(method, Method::Series | Method::All) {
            series_guard(tilde_spectral_radius(g, t)?, t)?;
            rows.push(Row {
                t,
                order: Some(order),
                value: graph_neumann_partial(g, PathMeasure::Counting, t, order)?.partial_sum(order),
                stderr: None,
                closed_form: None,
                method: "series",
                seed,
            });
        }
    }
    Ok(rows)
}

/// Closed-form (or exact) chain integral a_n(t), where one exists.
fn closed_term(space: &AnalyticSpace, n: usize, t: f64) -> Option<f64> {
    match *space {
        AnalyticSpace::Circle { r } => circle_term(n, r, t).ok(),
        AnalyticSpace::Sphere2 { r } => sphere_term(n, r, t).ok(),
        AnalyticSpace::Interval { a, b, measure } => match measure {
            IntervalMeasure::Lebesgue => interval_term(n, t, b - a).ok(),
            IntervalMeasure::Weight if n <= MAX_BRUTEFORCE_ORDER => {
                interval_weight_term(n, b - a, t).ok()
            }
            IntervalMeasure::Weight => None,
        },
        AnalyticSpace::LineLaplace if n == 1 => Some(laplace_line_first_term(t)),
        AnalyticSpace::LineGaussian if n == 1 => Some(gaussian_line_first_term(t).erfc_form),
        _ => None,
    }
}

/// Chain integral by deterministic quadrature, where implemented.
fn quadrature_term(space: &AnalyticSpace, n: usize, t: f64) -> Option<f64> {
    match *space {
        AnalyticSpace::Circle { r } if n <= 3 => Some(circle_term_by_length_density(n, r, t)),
        AnalyticSpace::Sphere2 { r } if n <= 2 => Some(sphere_term_by_quadrature(n, r, t)),
        AnalyticSpace::FlatTorusUnit if n == 1 => Some(torus_first_term(t)),
        AnalyticSpace::Interval {
            a,
            b,
            measure: IntervalMeasure::Lebesgue,
        } if n <= 3 => Some(interval_term_by_quadrature(n, t, b - a)),
        AnalyticSpace::LineLaplace if n == 1 => Some(laplace_line_first_term_by_quadrature(t)),
        AnalyticSpace::LineGaussian if n == 1 => Some(gaussian_line_first_term(t).quadrature),
        AnalyticSpace::LineGaussian if n == 2 => Some(gaussian_line_second_term_corrected(t)),
        _ => None,
    }
}

/// Partial sums μ(X), μ(X) - a_1, ... while every term is available.
fn partials(mass: f64, terms: &[Option<f64>]) -> Vec<Option<f64>> {
    let mut out = vec![Some(mass)];
    let mut acc = Some(mass);
    for (k, a) in terms.iter().enumerate() {
        acc = match (acc, a) {
            (Some(s), Some(a)) => Some(if (k + 1) % 2 == 0 { s + a } else { s - a }),
            _ => None,
        };
        out.push(acc);
    }
    out
}

fn manifold_rows(
    space: &AnalyticSpace,
    ts: &[f64],
    order: usize,
    method: Method,
    mc: &McArgs,
) -> Result<Vec<Row>> {
    check_method(
        method,
        &[Method::Mc, Method::Closed, Method::Quadrature, Method::All],
        "analytic spaces",
    )?;
    let mass = space.total_mass();
    let want = |m: Method| method == m || method == Method::All;

    let closed: Vec<Vec<Option<f64>>> = ts
        .par_iter()
        .map(|&t| partials(mass, &(1..=order).map(|n| closed_term(space, n, t)).collect::<Vec<_>>()))
        .collect();
    let quad: Vec<Vec<Option<f64>>> = if want(Method::Quadrature) {
        ts.par_iter()
            .map(|&t| {
                partials(mass, &(1..=order).map(|n| quadrature_term(space, n, t)).collect::<Vec<_>>())
            })
            .collect()
    } else {
        Vec::new()
    };
    // mc[n-1][i] = estimate of a_n at ts[i], all scales from shared chains.
    let mc_terms = if want(Method::Mc) {
        let spec = SamplerSpec::new(*space, mc.seed, mc.samples)?;
        (1..=order)
            .map(|n| estimate_term_grid(&spec, n, ts))
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };

    for (m, table, label) in [(Method::Closed, &closed, "closed"), (Method::Quadrature, &quad, "quadrature")] {
        if method == m && table.iter().any(|p| p[order].is_none()) {
            return Err(out_of_range(format!("{label} evaluation on {space} up to order {order}")));
        }
    }

    let mut rows = Vec::new();
    for (i, &t) in ts.iter().enumerate() {
        for n in 0..=order {
            let reference = closed[i][n];
            if want(Method::Closed) {
                if let Some(v) = reference {
                    rows.push(Row {
                        t,
                        order: Some(n),
                        value: v,
                        stderr: Some(0.0),
                        closed_form: reference,
                        method: "closed",
                        seed: mc.seed,
                    });
                }
            }
            if want(Method::Quadrature) {
                if let Some(v) = quad[i][n] {
                    rows.push(Row {
                        t,
                        order: Some(n),
                        value: v,
                        stderr: None,
                        closed_form: reference,
                        method: "quadrature",
                        seed: mc.seed,
                    });
                }
            }
            if want(Method::Mc) {
                let mut value = mass;
                let mut var = 0.0;
                for (k, est) in mc_terms.iter().take(n).enumerate() {
                    let e = est[i];
                    value += if (k + 1) % 2 == 0 { e.value } else { -e.value };
                    var += e.std_error * e.std_error;
                }
                rows.push(Row {
                    t,
                    order: Some(n),
                    value,
                    stderr: Some(var.sqrt()),
                    closed_form: reference,
                    method: "mc",
                    seed: mc.seed,
                });
            }
        }
    }
    Ok(rows)
}

fn weight_rows(
    space: &AnalyticSpace,
    ts: &[f64],
    order: usize,
    c: Option<f64>,
    mc: &McArgs,
) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for &t in ts {
        match c {
            None => {
                let check = weight_partial_magnitude_check(space, t, order, mc.samples, mc.seed)?;
                rows.extend(check.rows.iter().map(|r| Row {
                    t,
                    order: Some(r.order),
                    value: r.partial,
                    stderr: Some(r.std_error),
                    closed_form: Some(r.expected),
                    method: "mc",
                    seed: mc.seed,
                }));
            }
            Some(c) => {
                let series = scaled_weight_series(space, t, c, order, mc.samples, mc.seed)?;
                let mw = homogeneous_weight_mass(space, t)?;
                let mut exact = 0.0;
                for n in 0..=order {
                    let a = c.powi(n as i32 + 1) * mw;
                    exact += if n % 2 == 0 { a } else { -a };
                    rows.push(Row {
                        t,
                        order: Some(n),
                        value: series.partial_sum(n),
                        stderr: Some(series.partial_sum_std_error(n)),
                        closed_form: Some(exact),
                        method: "mc",
                        seed: mc.seed,
                    });
                }
            }
        }
    }
    Ok(rows)
}

fn length_rows(
    space: &AnalyticSpace,
    n: usize,
    bins: usize,
    range: Option<f64>,
    mc: &McArgs,
    err: &mut dyn Write,
) -> Result<Vec<u8>> {
    let spec = SamplerSpec::new(*space, mc.seed, mc.samples)?;
    let h = estimate_length_density(&spec, n, bins, range)?;
    if h.overflow > 0.0 {
        let _ = writeln!(err, "note: fraction {} of proper chains exceed the range", h.overflow);
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n", "l_lo", "l_hi", "density", "stderr", "seed"])?;
    for (k, (d, se)) in h.density.iter().zip(&h.std_error).enumerate() {
        w.write_record([
            n.to_string(),
            num(h.edges[k]),
            num(h.edges[k + 1]),
            num(*d),
            num(*se),
            mc.seed.to_string(),
        ])?;
    }
    finish(w)
}

fn interval_weight_csv(l: f64, t: f64, order: usize, mc: Option<&McArgs>) -> Result<Vec<u8>> {
    let rows = interval_weight_report(order, l, t, mc.map(|m| (m.samples, m.seed)))?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["N", "verbatim_formula", "corrected_formula", "bruteforce", "mc_estimate", "mc_stderr"])?;
    for r in rows {
        w.write_record([
            r.order.to_string(),
            num(r.verbatim_formula),
            num(r.corrected_formula),
            num(r.bruteforce),
            opt_num(r.mc_estimate),
            opt_num(r.mc_stderr),
        ])?;
    }
    finish(w)
}

fn fekete_csv(
    r: f64,
    ms: &[usize],
    order: usize,
    seed: u64,
    dump: Option<&Path>,
    err: &mut dyn Write,
) -> Result<Vec<u8>> {
    let exp = fekete_convergence_experiment(r, ms, order, seed)?;
    let _ = writeln!(err, "constant c = 2(1+r^2)/(1+e^(-pi r)) = {}", exp.constant);
    if let Some(path) = dump {
        let m = ms.iter().copied().max().ok_or_else(|| out_of_range("empty m list"))?;
        let cfg = minimal_energy_configuration(m, seed, r)?;
        write_configuration(&cfg, File::create(path)?)?;
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["m", "N", "empirical", "target", "abs_dev"])?;
    for row in exp.rows {
        w.write_record([
            row.m.to_string(),
            row.order.to_string(),
            num(row.empirical),
            num(row.target),
            num(row.abs_dev),
        ])?;
    }
    finish(w)
}

fn catalog_csv(ts: &[f64]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["space", "n", "t", "closed_form", "oracle", "abs_diff", "citation"])?;
    for e in catalog(ts) {
        w.write_record([
            e.space.to_string(),
            e.n.to_string(),
            num(e.t),
            num(e.closed_form),
            num(e.oracle),
            num(e.abs_diff),
            e.citation.to_string(),
        ])?;
    }
    finish(w)
}

fn emit(bytes: &[u8], out: &OutArgs, stdout: &mut dyn Write) -> Result<()> {
    match &out.output {
        Some(path) => fs::write(path, bytes)?,
        None => stdout.write_all(bytes)?,
    }
    Ok(())
}

fn execute(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Finite {
            input,
            grid,
            order,
            method,
            out,
        } => {
            let m = read_distance_csv(File::open(&input)?)?;
            let rows = finite_rows(&m, &grid.resolve(&[1.0])?, order, method, 0)?;
            emit(&write_rows(&rows)?, &out, stdout)
        }
        Command::Graph {
            edges,
            gamma,
            grid,
            order,
            method,
            out,
        } => {
            let g = parse_edge_list(&fs::read_to_string(&edges)?)?;
            let rows = graph_rows(&g, gamma, &grid.resolve(&[1.0])?, order, method, 0)?;
            emit(&write_rows(&rows)?, &out, stdout)
        }
        Command::Manifold {
            space,
            grid,
            order,
            method,
            mc,
            out,
        } => {
            let rows = manifold_rows(&space.build()?, &grid.resolve(&[1.0])?, order, method, &mc)?;
            emit(&write_rows(&rows)?, &out, stdout)
        }
        Command::WeightCheck {
            space,
            r,
            grid,
            order,
            c,
            mc,
            out,
        } => {
            let space = match space {
                SpaceKind::Circle => AnalyticSpace::circle(r)?,
                SpaceKind::Sphere => AnalyticSpace::sphere(r)?,
                other => return Err(out_of_range(format!("weight check on {other:?}"))),
            };
            let rows = weight_rows(&space, &grid.resolve(&[1.0])?, order, c, &mc)?;
            emit(&write_rows(&rows)?, &out, stdout)
        }
        Command::LengthSpectrum {
            space,
            n,
            bins,
            range,
            mc,
            out,
        } => {
            let bytes = length_rows(&space.build()?, n, bins, range, &mc, stderr)?;
            emit(&bytes, &out, stdout)
        }
        Command::IntervalWeight {
            length,
            t,
            order,
            no_mc,
            mc,
            out,
        } => {
            let bytes = interval_weight_csv(length, t, order, (!no_mc).then_some(&mc))?;
            emit(&bytes, &out, stdout)
        }
        Command::FeketeDemo {
            r,
            m,
            order,
            seed,
            dump_config,
            out,
        } => {
            let bytes = fekete_csv(r, &m, order, seed, dump_config.as_deref(), stderr)?;
            emit(&bytes, &out, stdout)
        }
        Command::Catalog { t, out } => {
            let ts = if t.is_empty() { CATALOG_SCALES.to_vec() } else { t };
            if let Some(t) = ts.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
                return Err(out_of_range(format!("scale t = {t} (must be positive)")));
            }
            emit(&catalog_csv(&ts)?, &out, stdout)
        }
    }
}

fn configure_threads() -> std::result::Result<(), String> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| format!("{THREADS_ENV}={raw:?} is not a non-negative integer"))?;
    if n > 0 {
        // Fails only if a pool already exists, e.g. when called twice in-process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the process exit code: 0 on success, 2 on invalid input, 3 on
/// numerical failure.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    2
                }
            };
        }
    };
    if let Err(msg) = configure_threads() {
        let _ = writeln!(stderr, "error: {msg}");
        return 2;
    }
    match execute(cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_numerical() {
                3
            } else {
                2
            }
        }
    }
}

/// `run_with` on the process's standard streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    let code = run_with(args, &mut stdout.lock(), &mut stderr.lock());
    let _ = io::stdout().flush();
    code
}
