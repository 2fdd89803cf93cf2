use std::io::Read;

use crate::error::{Error, Result};

use super::{Edge, FiniteMetricSpace, GeodesicGraph};

/// Reads a distance matrix from CSV. A first row that does not parse as
/// numbers is taken as point labels.
pub fn read_distance_csv<R: Read>(reader: R) -> Result<FiniteMetricSpace> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut labels: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    for (idx, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(row) => rows.push(row),
            Err(_) if idx == 0 => labels = Some(rec.iter().map(String::from).collect()),
            Err(e) => {
                return Err(Error::Parse(format!("row {}: {e}", idx + 1)));
            }
        }
    }
    match labels {
        Some(l) => FiniteMetricSpace::new(l, rows),
        None => FiniteMetricSpace::from_rows(rows),
    }
}

/// Parses an edge list: one `u v [length]` per line, `#` starts a comment.
pub fn parse_edge_list(text: &str) -> Result<GeodesicGraph> {
    let mut edges = Vec::new();
    let mut max_vertex = None::<usize>;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let bad = |what: &str| Error::Parse(format!("line {}: {what}: {raw:?}", lineno + 1));
        if !(2..=3).contains(&fields.len()) {
            return Err(bad("expected `u v` or `u v length`"));
        }
        let u: usize = fields[0].parse().map_err(|_| bad("bad vertex"))?;
        let v: usize = fields[1].parse().map_err(|_| bad("bad vertex"))?;
        let length = match fields.get(2) {
            Some(s) => s.parse().map_err(|_| bad("bad length"))?,
            None => 1.0,
        };
        max_vertex = Some(max_vertex.unwrap_or(0).max(u).max(v));
        edges.push(Edge { u, v, length });
    }
    let n = max_vertex.map_or(1, |m| m + 1);
    GeodesicGraph::new(n, edges)
}
