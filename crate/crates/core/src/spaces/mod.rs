//! Domain types shared by every module: finite metric spaces, graphs,
//! analytic spaces with measures, and magnitude series.

mod analytic;
mod finite;
mod graph;
mod io;
mod series;

pub use analytic::{AnalyticSpace, Atom, IntervalMeasure};
pub use finite::{validate_metric, FiniteMetricSpace, MetricReport, Violation, METRIC_TOL};
pub use graph::{graph_metric, Edge, GeodesicGraph, MAX_EXACT_COUNT, TIE_TOL};
pub use io::{parse_edge_list, read_distance_csv};
pub use series::{MagnitudeSeries, Term, TermMethod};

pub(crate) use graph::all_pairs;
