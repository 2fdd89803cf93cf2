//! Acceptance checks, one PASS/FAIL line per criterion.

use std::process::Command;
use std::time::Instant;

use magnilab::closed_forms::*;
use magnilab::empirical_approx::{
    empirical_partial_magnitude, fekete_convergence_experiment, minimal_energy_configuration,
};
use magnilab::finite_mag::{classical_magnitude, neumann_partial, shift_metric, weighted_neumann_partial};
use magnilab::graph_mag::tilde_magnitude;
use magnilab::mc_engine::{estimate_term, estimate_term_grid, SamplerSpec};
use magnilab::spaces::{graph_metric, AnalyticSpace, Edge, FiniteMetricSpace, GeodesicGraph, IntervalMeasure};
use magnilab::weight_measures::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod tolerances {
    pub const FOUR_CUT_REL: f64 = 1e-10;
    pub const FOUR_CUT_SERIES: f64 = 1e-8;
    pub const FOUR_CUT_SECONDS: f64 = 1.0;
    pub const TILDE_ABS: f64 = 1e-10;
    pub const SIGMAS: f64 = 4.0;
    pub const CIRCLE_SAMPLES: u64 = 1_000_000;
    pub const CIRCLE_N3_QUAD: f64 = 1e-6;
    pub const CIRCLE_SECONDS: f64 = 60.0;
    pub const SPHERE_SAMPLES: u64 = 10_000_000;
    pub const SPHERE_SECONDS: f64 = 120.0;
    pub const TORUS_SAMPLES: u64 = 1_000_000;
    pub const TORUS_LEVEL: f64 = 1e-12;
    pub const INTERVAL_QUAD: f64 = 1e-6;
    pub const INTERVAL_SAMPLES: u64 = 1_000_000;
    pub const INTERVAL_EXACT: f64 = 1e-14;
    pub const LAPLACE_QUAD: f64 = 1e-8;
    pub const GAUSS_SAMPLES: u64 = 1_000_000;
    pub const WEIGHT_SAMPLES: u64 = 1_000_000;
    pub const SCALED_SAMPLES: u64 = 200_000;
    pub const INTERVAL_WEIGHT_FIRST: f64 = 1e-9;
    pub const INTERVAL_WEIGHT_CORRECTED: f64 = 1e-8;
    pub const SCALING: f64 = 1e-12;
    pub const RESCALING: f64 = 1e-12;
}

use tolerances::*;

struct Criterion {
    id: u32,
    title: &'static str,
    checks: Vec<(bool, String)>,
    notes: Vec<String>,
    downgraded: Option<String>,
}

impl Criterion {
    fn new(id: u32, title: &'static str) -> Self {
        Self {
            id,
            title,
            checks: Vec::new(),
            notes: Vec::new(),
            downgraded: None,
        }
    }

    fn check(&mut self, ok: bool, detail: String) {
        self.checks.push((ok, detail));
    }

    fn note(&mut self, detail: String) {
        self.notes.push(detail);
    }

    fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.0)
    }

    fn print(&self) -> bool {
        let ok = self.passed();
        let status = match (ok, &self.downgraded) {
            (true, Some(_)) => "PASS (downgraded)",
            (true, None) => "PASS",
            (false, _) => "FAIL",
        };
        println!("{status} criterion {:>2}: {}", self.id, self.title);
        for (c, detail) in &self.checks {
            println!("    [{}] {detail}", if *c { "ok" } else { "FAIL" });
        }
        for n in &self.notes {
            println!("    note: {n}");
        }
        if let Some(d) = &self.downgraded {
            println!("    downgraded: {d}");
        }
        ok
    }
}

fn sigma(diff: f64, se: f64) -> f64 {
    if se > 0.0 {
        diff.abs() / se
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

fn four_cut_graph() -> GeodesicGraph {
    GeodesicGraph::cycle(4).unwrap()
}

fn four_cut_space() -> FiniteMetricSpace {
    graph_metric(&four_cut_graph()).unwrap()
}

fn criterion_1() -> Criterion {
    let mut c = Criterion::new(1, "4-cut classical magnitude");
    let start = Instant::now();
    let m = four_cut_space();
    for t in [1.2f64, 2.0, 3.0, 5.0] {
        let expected = 4.0 * (2.0 * t).exp() / (1.0 + t.exp()).powi(2);
        let solve = classical_magnitude(&m, t).unwrap();
        let rel = ((solve - expected) / expected).abs();
        c.check(rel <= FOUR_CUT_REL, format!("t = {t}: solve {solve:.15} expected {expected:.15} rel {rel:.1e}"));
        let series = neumann_partial(&m, t, 60).unwrap().partial_sum(60);
        let err = (series - expected).abs();
        c.check(err <= FOUR_CUT_SERIES, format!("t = {t}: N = 60 partial {series:.15} abs err {err:.1e}"));
    }
    let secs = start.elapsed().as_secs_f64();
    c.check(secs < FOUR_CUT_SECONDS, format!("runtime {secs:.3} s"));
    c
}

fn criterion_2() -> Criterion {
    let mut c = Criterion::new(2, "4-cut tilde magnitude and weighted 4-cut");
    let plain = four_cut_graph();
    let weighted = plain.with_edge(Edge { u: 0, v: 2, length: 2.0 }).unwrap();
    for t in [1.5f64, 2.0, 4.0] {
        let e = t.exp();
        let printed_plain = 4.0 * e * e * (1.0 + (1.0 - e).powi(2)) / (4.0 + e.powi(4));
        let got = tilde_magnitude(&plain, t).unwrap();
        let d = (got - printed_plain).abs();
        c.check(d <= TILDE_ABS, format!("4-cut t = {t}: {got:.15} vs {printed_plain:.15} diff {d:.1e}"));

        let printed_weighted = 4.0 * e * e * (2.0 - 2.0 * e + e * e) / (6.0 + e * e + e.powi(4));
        let got = tilde_magnitude(&weighted, t).unwrap();
        let d = (got - printed_weighted).abs();
        c.check(d <= TILDE_ABS, format!("weighted 4-cut t = {t}: {got:.15} vs {printed_weighted:.15} diff {d:.1e}"));
        let q = (-t).exp();
        let derived = 2.0 * (2.0 - 4.0 * q + 5.0 * q * q) / (1.0 + q * q + 6.0 * q.powi(4));
        c.note(format!(
            "weighted 4-cut t = {t}: computed {got:.15}, rederived 2(2-4q+5q^2)/(1+q^2+6q^4) = {derived:.15}"
        ));
    }
    let a = classical_magnitude(&graph_metric(&plain).unwrap(), 2.0).unwrap();
    let b = classical_magnitude(&graph_metric(&weighted).unwrap(), 2.0).unwrap();
    c.check((a - b).abs() <= 1e-12, format!("classical at t = 2: {a:.15} vs {b:.15}"));
    let ta = tilde_magnitude(&plain, 2.0).unwrap();
    let tb = tilde_magnitude(&weighted, 2.0).unwrap();
    c.check((ta - tb).abs() > 1e-6, format!("tilde at t = 2: {ta:.15} vs {tb:.15}"));
    c
}

fn mc_against(c: &mut Criterion, label: &str, spec: &SamplerSpec, n: usize, ts: &[f64], exact: impl Fn(f64) -> f64) {
    let est = estimate_term_grid(spec, n, ts).unwrap();
    for (e, &t) in est.iter().zip(ts) {
        let x = exact(t);
        let s = sigma(e.value - x, e.std_error);
        c.check(
            s <= SIGMAS,
            format!("{label} n = {n} t = {t}: mc {:.8} ± {:.2e} vs {x:.8} ({s:.2} σ)", e.value, e.std_error),
        );
    }
}

fn criterion_3() -> Criterion {
    let mut c = Criterion::new(3, "circle oracle suite");
    let start = Instant::now();
    let space = AnalyticSpace::circle(1.0).unwrap();
    let spec = SamplerSpec::new(space, 3, CIRCLE_SAMPLES).unwrap();
    for n in 1..=3 {
        mc_against(&mut c, "Circle(1)", &spec, n, &[1.0, 2.0], |t| circle_term(n, 1.0, t).unwrap());
    }
    for t in [1.0, 2.0] {
        let cat = circle_term(3, 1.0, t).unwrap();
        let quad = circle_term_by_length_density(3, 1.0, t);
        let d = (cat - quad).abs();
        c.check(d <= CIRCLE_N3_QUAD, format!("n = 3 t = {t}: catalog {cat:.12} simplex quadrature {quad:.12} diff {d:.1e}"));
        c.note(format!("n = 3 t = {t}: printed bracket expression {:.12}", circle_term_n3_printed(1.0, t)));
    }
    let secs = start.elapsed().as_secs_f64();
    c.check(secs < CIRCLE_SECONDS, format!("runtime {secs:.1} s"));
    c
}

fn criterion_4() -> Criterion {
    let mut c = Criterion::new(4, "sphere oracle suite");
    let start = Instant::now();
    let spec = SamplerSpec::new(AnalyticSpace::sphere(1.0).unwrap(), 4, SPHERE_SAMPLES).unwrap();
    for n in 1..=2 {
        mc_against(&mut c, "Sphere2(1)", &spec, n, &[1.0, 2.0], |t| sphere_term(n, 1.0, t).unwrap());
    }
    c.note(format!("n = 2 t = 1: printed form {:.6}", sphere_term_n2_printed(1.0, 1.0)));
    let secs = start.elapsed().as_secs_f64();
    c.check(secs < SPHERE_SECONDS, format!("runtime {secs:.1} s"));
    c
}

fn criterion_5() -> Criterion {
    let mut c = Criterion::new(5, "flat torus");
    let spec = SamplerSpec::new(AnalyticSpace::FlatTorusUnit, 5, TORUS_SAMPLES).unwrap();
    mc_against(&mut c, "torus", &spec, 1, &[1.0, 5.0, 10.0], torus_first_term);
    for t in [5.0, 10.0, 20.0] {
        let (lo, hi) = torus_cut_bounds(t);
        let m = torus_cut_integral(t);
        c.check(lo <= m && m <= hi, format!("t = {t}: {lo:.6e} <= {m:.6e} <= {hi:.6e}"));
    }
    let at = torus_level_volume(TORUS_RHO).unwrap();
    let left = std::f64::consts::TAU * TORUS_RHO;
    c.check(
        (at - left).abs() <= TORUS_LEVEL,
        format!("F(1/2) = {at:.15}, left branch limit {left:.15}"),
    );
    for delta in [1e-6f64, 1e-12] {
        let right = torus_level_volume(TORUS_RHO + delta).unwrap();
        c.check(
            (right - at).abs() <= 9.0 * delta.sqrt(),
            format!("F(1/2 + {delta:.0e}) - F(1/2) = {:.2e} (square-root kink, bound 9 sqrt(delta))", right - at),
        );
    }
    let end = torus_level_volume(TORUS_DIAMETER).unwrap();
    c.check(end.abs() <= TORUS_LEVEL, format!("F(1/sqrt 2) = {end:.1e}"));
    c
}

fn criterion_6() -> Criterion {
    let mut c = Criterion::new(6, "interval with Lebesgue measure");
    for (l, t) in [(1.0, 2.0), (2.0, 3.0)] {
        for n in 1..=2 {
            let rec = interval_term(n, t, l).unwrap();
            let quad = interval_term_by_quadrature(n, t, l);
            let d = (rec - quad).abs();
            c.check(d <= INTERVAL_QUAD, format!("L = {l} t = {t} n = {n}: recursion {rec:.12} quadrature {quad:.12} diff {d:.1e}"));
        }
        let space = AnalyticSpace::interval(0.0, l, IntervalMeasure::Lebesgue).unwrap();
        let spec = SamplerSpec::new(space, 6, INTERVAL_SAMPLES).unwrap();
        let rec = interval_term(3, t, l).unwrap();
        mc_against(&mut c, &format!("L = {l}"), &spec, 3, &[t], |_| rec);
        let first = l - interval_term(1, t, l).unwrap();
        let closed = interval_first_partial(t, l);
        let d = (first - closed).abs();
        c.check(d <= INTERVAL_EXACT, format!("L = {l} t = {t}: Mag;1 {first:.15} vs L - 2L/t + 2(1-e^(-tL))/t^2 = {closed:.15}"));
        c.note(format!(
            "L = {l} t = {t} k = 0: alpha_1 corrected {:.12}, as printed {:.12}, quadrature {:.12}",
            interval_alpha1(0, t, l),
            interval_alpha1_printed(0, t, l),
            interval_alpha_by_quadrature(1, 0, t, l)
        ));
    }
    c
}

fn criterion_7() -> Criterion {
    let mut c = Criterion::new(7, "line examples");
    for t in [1.0f64, 2.0, 5.0] {
        let quad = 2.0 - laplace_line_first_term_by_quadrature(t);
        let closed = 2.0 - 2.0 * (t + 2.0) / (t + 1.0).powi(2);
        let d = (quad - closed).abs();
        c.check(d <= LAPLACE_QUAD, format!("Laplace t = {t}: quadrature {quad:.12} closed {closed:.12} diff {d:.1e}"));
    }
    let spec = SamplerSpec::new(AnalyticSpace::LineGaussian, 7, GAUSS_SAMPLES).unwrap();
    mc_against(&mut c, "Gaussian", &spec, 1, &[0.5, 1.0, 2.0], |t| gaussian_line_first_term(t).quadrature);
    let zero = gaussian_line_first_term(0.0);
    c.check(
        (zero.printed - zero.erfc_form).abs() < 1e-12,
        format!("Gaussian first term at t = 0: printed {:.12} = {:.12}", zero.printed, zero.erfc_form),
    );
    for t in [0.5, 1.0, 2.0] {
        let g = gaussian_line_first_term(t);
        c.check(
            (g.printed - g.quadrature).abs() > 1e-3,
            format!(
                "flag: t = {t} printed pi e^(-t^2/2) = {:.8} disagrees with quadrature {:.8} (pi e^(t^2/2) erfc(t/sqrt 2) = {:.8})",
                g.printed, g.quadrature, g.erfc_form
            ),
        );
    }
    let est = estimate_term(&spec, 2, 2.0).unwrap();
    let printed = gaussian_line_second_term(2.0);
    let s = sigma(est.value - printed, est.std_error);
    c.check(
        s <= SIGMAS,
        format!("Gaussian second term t = 2: printed reduced form {printed:.8} vs 3-D mc {:.8} ± {:.1e} ({s:.1} σ)", est.value, est.std_error),
    );
    let corrected = gaussian_line_second_term_corrected(2.0);
    c.note(format!(
        "rederived reduction 2(s1^2+s2^2)/3, cosh(2 s1 s2/3): {corrected:.8} ({:.2} σ from mc)",
        sigma(est.value - corrected, est.std_error)
    ));
    c
}

fn criterion_8() -> Criterion {
    let mut c = Criterion::new(8, "Speyer weight measures");
    let spaces = [AnalyticSpace::circle(1.0).unwrap(), AnalyticSpace::sphere(1.0).unwrap()];
    for space in spaces {
        let check = weight_partial_magnitude_check(&space, 1.0, 4, WEIGHT_SAMPLES, 8).unwrap();
        for row in &check.rows {
            c.check(
                row.deviation_sigma <= SIGMAS,
                format!(
                    "{space:?} N = {}: {:.8} ± {:.1e} expected {:.8} ({:.2} σ)",
                    row.order, row.partial, row.std_error, row.expected, row.deviation_sigma
                ),
            );
        }
        let q = 0.25;
        let exact = scaled_weight_magnitude(&space, 1.0, q).unwrap();
        let series = scaled_weight_series(&space, 1.0, q, 12, SCALED_SAMPLES, 8).unwrap();
        let (v, se) = (series.partial_sum(12), series.partial_sum_std_error(12));
        let s = sigma(v - exact, se);
        c.check(s <= SIGMAS, format!("{space:?} c = 1/4 N = 12: {v:.10} ± {se:.1e} vs c/(1+c) mu_w = {exact:.10} ({s:.2} σ)"));
    }
    c
}

fn criterion_9() -> Criterion {
    let mut c = Criterion::new(9, "interval weight measure");
    for l in [0.5, 1.0, 2.0] {
        let v = interval_weight_bruteforce(1, l, 1.0).unwrap()[1];
        c.check((v - 0.5).abs() <= INTERVAL_WEIGHT_FIRST, format!("L = {l}: Mag;1 = {v:.15}"));
    }
    for n in 1..=12 {
        let count = enumerate_partitions(n).unwrap().len();
        c.check(count == (1 << n) - 1, format!("n = {n}: {count} compositions"));
    }
    for (parts, f, g) in [(vec![3, 2, 1, 2, 1, 2, 3], 3, 2), (vec![3, 2, 2, 1, 1, 2, 3], 2, 3)] {
        let s = cluster_stats(&OrderedPartition::new(parts.clone()).unwrap()).unwrap();
        c.check(s.f == f && s.g == g, format!("{parts:?}: f = {}, g = {}", s.f, s.g));
    }
    let rows = interval_weight_report(3, 1.0, 1.0, Some((1_000_000, 9))).unwrap();
    c.note("L = 1, t = 1: N, verbatim, corrected, bruteforce, mc ± se".into());
    let mut worst = 0.0f64;
    for r in &rows {
        c.note(format!(
            "{} {:.10} {:.10} {:.10} {:.6} ± {:.1e}",
            r.order,
            r.verbatim_formula,
            r.corrected_formula,
            r.bruteforce,
            r.mc_estimate.unwrap(),
            r.mc_stderr.unwrap()
        ));
        let s = sigma(r.mc_estimate.unwrap() - r.bruteforce, r.mc_stderr.unwrap());
        c.check(s <= SIGMAS, format!("N = {}: bruteforce vs mc {s:.2} σ", r.order));
        worst = worst.max((r.corrected_formula - r.bruteforce).abs());
    }
    c.check(rows.len() == 4, format!("table emitted with {} rows", rows.len()));
    if worst > INTERVAL_WEIGHT_CORRECTED {
        c.downgraded = Some(format!(
            "corrected cluster formula misses the bruteforce value by up to {worst:.4}; residuals listed above"
        ));
    }
    c
}

fn criterion_10() -> Criterion {
    let mut c = Criterion::new(10, "scaling identity");
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst = 0.0f64;
    for space_id in 0..10 {
        let size = rng.gen_range(2..=8);
        let pts: Vec<[f64; 3]> = (0..size).map(|_| [rng.gen(), rng.gen(), rng.gen()]).collect();
        let rows = pts
            .iter()
            .map(|a| pts.iter().map(|b| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()).collect())
            .collect();
        let m = FiniteMetricSpace::from_rows(rows).unwrap();
        for shift in [0.3, 1.0, 5f64.ln()] {
            let lhs = weighted_neumann_partial(&m, &vec![(-shift).exp(); size], 1.0, 6).unwrap();
            let rhs = neumann_partial(&shift_metric(&m, shift).unwrap(), 1.0, 6).unwrap();
            let mut diffs = vec![(lhs.mass() - (-shift).exp() * rhs.mass()).abs()];
            for (a, b) in lhs.terms().iter().zip(rhs.terms()) {
                diffs.push((a.value - (-shift).exp() * b.value).abs() / a.value.abs().max(1.0));
            }
            let d = diffs.into_iter().fold(0.0, f64::max);
            worst = worst.max(d);
            if d > SCALING {
                c.check(false, format!("space {space_id} (|X| = {size}) c = {shift}: term diff {d:.1e}"));
            }
        }
    }
    c.check(worst <= SCALING, format!("10 spaces, c in {{0.3, 1, ln 5}}, N <= 6: max term diff {worst:.1e}"));
    c
}

fn run_cli(args: &[&str], threads: &str) -> (Vec<u8>, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_magnilab"))
        .args(args)
        .env("MAGNILAB_THREADS", threads)
        .output()
        .unwrap();
    (out.stdout, out.status.code().unwrap_or(-1))
}

fn criterion_11() -> Criterion {
    let mut c = Criterion::new(11, "determinism across runs and thread counts");
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("fourcut.csv");
    std::fs::write(&csv, "0,1,2,1\n1,0,1,2\n2,1,0,1\n1,2,1,0\n").unwrap();
    let csv = csv.to_str().unwrap().to_string();
    let invocations: Vec<Vec<&str>> = vec![
        vec!["manifold", "--space", "circle", "--r", "1", "--t", "1,2", "--N", "3", "--method", "all", "--samples", "200000", "--seed", "7"],
        vec!["manifold", "--space", "interval", "--measure", "weight", "--t", "1", "--N", "3", "--method", "mc", "--samples", "100000", "--seed", "1"],
        vec!["weight-check", "--space", "sphere", "--t", "1", "--N", "4", "--samples", "100000", "--seed", "2"],
        vec!["length-spectrum", "--space", "torus", "--n", "2", "--samples", "100000", "--seed", "3"],
        vec!["interval-weight", "--L", "1", "--t", "1", "--N", "3", "--samples", "100000", "--seed", "4"],
        vec!["fekete-demo", "--m", "30,60", "--seed", "5"],
        vec!["finite", "--input", &csv, "--t-start", "0.5", "--t-stop", "3", "--t-count", "6", "--method", "inverse"],
    ];
    for args in &invocations {
        let (reference, code) = run_cli(args, "1");
        let label = args[..3].join(" ");
        c.check(code == 0 && !reference.is_empty(), format!("{label}: exit {code}, {} bytes", reference.len()));
        for threads in ["1", "4", "0"] {
            let (again, _) = run_cli(args, threads);
            c.check(again == reference, format!("{label}: MAGNILAB_THREADS={threads} byte-identical"));
        }
    }
    c
}

fn criterion_12() -> Criterion {
    let mut c = Criterion::new(12, "Fekete-surrogate demo");
    let ms = [50, 100, 200, 400];
    let exp = fekete_convergence_experiment(1.0, &ms, 2, 0).unwrap();
    for r in &exp.rows {
        c.note(format!("m = {}: empirical {:.10} target {:.10} |dev| {:.3e}", r.m, r.empirical, r.target, r.abs_dev));
    }
    let monotone = exp.rows.windows(2).all(|w| w[1].abs_dev < w[0].abs_dev);
    c.check(monotone, "|empirical - target| strictly decreasing over m = 50, 100, 200, 400".into());
    for m in ms {
        let cfg = minimal_energy_configuration(m, 0, 1.0).unwrap();
        let emp = empirical_partial_magnitude(&cfg, 1.0, 2).unwrap();
        let counting = neumann_partial(&shift_metric(&cfg.metric().unwrap(), (m as f64).ln()).unwrap(), 1.0, 2).unwrap();
        let d = (0..=2)
            .map(|n| (emp.partial_sum(n) - counting.partial_sum(n) / m as f64).abs())
            .fold(0.0, f64::max);
        c.check(d <= RESCALING, format!("m = {m}: (1/m) Mag(F_m, d_log m; N) vs empirical diff {d:.1e}"));
    }
    c
}

fn main() {
    let criteria: [fn() -> Criterion; 12] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
        criterion_11,
        criterion_12,
    ];
    let mut failed = Vec::new();
    for run in criteria {
        let c = run();
        if !c.print() {
            failed.push(c.id);
        }
    }
    println!();
    if failed.is_empty() {
        println!("acceptance: all criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
