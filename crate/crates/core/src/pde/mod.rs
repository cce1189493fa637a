//! Harmonic maps between annuli on log-polar grids.
//!
//! Fields live on an [`AnnulusGrid`] over `r₁ ≤ |z| ≤ r₂` and are
//! differentiated with fourth-order stencils in `(log r, θ)`.

mod checks;
mod grid;
mod map;
mod residual;
mod solver;
pub mod stencil;

pub use checks::{
    green_chain, laplacian_bound_check, laplacian_check_with, GreenChain, LaplacianCheck,
};
pub use grid::AnnulusGrid;
pub use map::{partials, AnnulusMap, Partials};
pub use residual::{
    harmonicity_residual, hopf_dbar, hopf_dbar_norm, hopf_differential, max_abs,
    max_harmonicity_residual, HOPF_MARGIN_ROWS,
};
pub use solver::{
    solve_dirichlet, solve_dirichlet_with, solve_raw, Orientation, SolveReport, SolverConfig,
};
