//! Dense complex linear algebra: LU solves, GMRES, condition numbers,
//! numerical-range coercivity estimates and power-law fits.

mod dense;
mod fit;
mod gmres;

pub use dense::{
    coercivity_constant, coercivity_constant_matrix, condition_number, condition_number_matrix, inverse,
    inverse_matrix, solve_dense, solve_matrix, DEFAULT_THETA_SAMPLES, SINGULAR_PIVOT_RATIO,
};
pub use fit::{fit_power_law, FitResult};
pub use gmres::{gmres, gmres_matrix, GmresReport, DEFAULT_MAX_ITERATIONS, DEFAULT_TOL};
