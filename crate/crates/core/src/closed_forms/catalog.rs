use super::*;

/// One closed form compared against an independent evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub space: &'static str,
    pub n: usize,
    pub t: f64,
    pub closed_form: f64,
    pub oracle: f64,
    pub abs_diff: f64,
    pub citation: &'static str,
}

/// Default scales for the catalog dump.
pub const CATALOG_SCALES: [f64; 4] = [0.5, 1.0, 2.0, 5.0];

fn entry(
    space: &'static str,
    n: usize,
    t: f64,
    closed_form: f64,
    oracle: f64,
    citation: &'static str,
) -> CatalogEntry {
    CatalogEntry {
        space,
        n,
        t,
        closed_form,
        oracle,
        abs_diff: (closed_form - oracle).abs(),
        citation,
    }
}

/// All catalog formulas at each scale, unit radius and unit interval.
pub fn catalog(ts: &[f64]) -> Vec<CatalogEntry> {
    let mut out = Vec::new();
    for &t in ts {
        for n in 1..=3 {
            out.push(entry(
                "circle",
                n,
                t,
                circle_term(n, 1.0, t).expect("valid order"),
                circle_term_by_length_density(n, 1.0, t),
                "2πr(2(1-e^{-πrt})/t)^n vs length-density quadrature",
            ));
        }
        out.push(entry(
            "circle",
            3,
            t,
            circle_term_n3_printed(1.0, t),
            circle_term_by_length_density(3, 1.0, t),
            "four-bracket n=3 display as printed vs length-density quadrature",
        ));
        for n in 1..=2 {
            out.push(entry(
                "sphere",
                n,
                t,
                sphere_term(n, 1.0, t).expect("valid order"),
                sphere_term_by_quadrature(n, 1.0, t),
                "4πr²(2πr²(1+e^{-πrt})/(1+r²t²))^n vs nested quadrature",
            ));
        }
        out.push(entry(
            "sphere",
            2,
            t,
            sphere_term_n2_printed(1.0, t),
            sphere_term_by_quadrature(2, 1.0, t),
            "n=2 display as printed vs nested quadrature",
        ));
        out.push(entry(
            "torus",
            1,
            t,
            torus_first_term(t),
            torus_first_term_simpson(t, 200_000),
            "∫e^{-tl}F(l)dl adaptive vs composite Simpson",
        ));
        for n in 1..=3 {
            out.push(entry(
                "interval",
                n,
                t,
                interval_term(n, t, 1.0).expect("valid arguments"),
                interval_term_by_quadrature(n, t, 1.0),
                "alpha recursion (L=1) vs nested quadrature",
            ));
        }
        out.push(entry(
            "line-laplace",
            1,
            t,
            laplace_line_first_term(t),
            laplace_line_first_term_by_quadrature(t),
            "2(t+2)/(t+1)² vs 2-D quadrature",
        ));
        let g = gaussian_line_first_term(t);
        out.push(entry(
            "line-gauss",
            1,
            t,
            g.erfc_form,
            g.quadrature,
            "πe^{t²/2}erfc(t/√2) vs length-density quadrature",
        ));
        out.push(entry(
            "line-gauss",
            1,
            t,
            g.printed,
            g.quadrature,
            "πe^{-t²/2} as printed vs length-density quadrature",
        ));
        out.push(entry(
            "line-gauss",
            2,
            t,
            gaussian_line_second_term(t),
            gaussian_line_second_term_corrected(t),
            "reduced form (7s₁²+4s₂²)/3, cosh(10s₁s₂/3) as printed vs midpoint-integrated reduction",
        ));
    }
    out
}
