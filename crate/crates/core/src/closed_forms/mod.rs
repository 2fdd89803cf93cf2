//! Reference values for chain integrals on the circle, sphere, torus,
//! interval and weighted lines, each paired with an independent
//! quadrature oracle.

mod catalog;
mod circle_sphere;
mod interval;
mod line;
mod torus;

pub use catalog::{catalog, CatalogEntry, CATALOG_SCALES};
pub use circle_sphere::{
    circle_term, circle_term_by_length_density, circle_term_n3_printed, simplex_slice_volume,
    sphere_term, sphere_term_by_quadrature, sphere_term_n2_printed,
};
pub use interval::{
    interval_alpha, interval_alpha0, interval_alpha1, interval_alpha1_printed,
    interval_alpha_by_quadrature, interval_alpha_from_zero, interval_first_partial,
    interval_term, interval_term_by_quadrature,
};
pub use line::{
    gaussian_kernel_mass, gaussian_line_first_term, gaussian_line_second_term,
    gaussian_line_second_term_corrected, laplace_line_first_term,
    laplace_line_first_term_by_quadrature, GaussianFirstTerm,
};
pub use torus::{
    torus_cut_bounds, torus_cut_integral, torus_first_term, torus_first_term_simpson,
    torus_level_volume, TORUS_DIAMETER, TORUS_RHO,
};
