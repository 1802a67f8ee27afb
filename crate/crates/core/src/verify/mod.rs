//! Manufactured problems, error norms, convergence studies and the checks
//! that compare the discrete solutions of different schemes.

mod convergence;
mod equivalence;
mod example8;
mod norms;
mod problem;

pub use convergence::{
    fitted_rate, run_convergence, run_level, run_levels, ConvergenceReport, ErrorReport, FittedRates, EXACT_TOL,
};
pub use equivalence::{
    check_equivalence, compare_solutions, equation_residuals, EquivalenceReport, Verdict, EQUIVALENCE_TOL,
};
pub use example8::{check_wg_rewrite, example8_with, paper_example_8, Example8, RewriteReport};
pub use norms::{error_norms, ErrorNorms};
pub use problem::ManufacturedProblem;
