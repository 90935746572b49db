//! Numerical companions to the convergence analysis: ratio densities, the
//! case weight and its curvature expectation, dyadic upper bounds, process
//! derivatives and the spectral-initialization bounds.

mod case_weight;
mod curvature;
mod density;
mod derivatives;
mod dyadic;
mod geometry;
mod mc;
pub mod quad;
mod spectral;

pub use case_weight::{case_weight_f, one_minus_tanh, sup_case_weight, Supremum};
pub use curvature::{curvature_expectation_mc, curvature_expectation_quad, curvature_sample, QUAD_TOL};
pub use density::{joint_density_ut, marginal_density_u, JointDensity};
pub use derivatives::process_derivatives;
pub use dyadic::{bound_contour, dyadic_term, dyadic_upper_bound, linspace, w_antiderivative, BoundGrid, DyadicBranch};
pub use geometry::GeometryPoint;
pub use mc::McEstimate;
pub use spectral::{
    spectral_expectation_mc, spectral_gap_lower_bound, spectral_lambda1_upper_bound, SpectralBoundInputs, SpectralMc,
};

/// Points of the 5×5 validation grid, `ρ` outer and `cos θ` inner.
pub fn validation_grid() -> Vec<GeometryPoint> {
    let rhos = [0.05, 0.3, 0.5, 0.7, 0.95];
    let coss = [-0.9, -0.4, 0.0, 0.4, 0.9];
    rhos.iter()
        .flat_map(|&r| coss.iter().map(move |&c| GeometryPoint { rho: r, cos_theta: c }))
        .collect()
}
