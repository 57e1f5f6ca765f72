pub mod convex;
pub mod fictitious;
pub mod lp;
pub mod matrix_game;

pub use convex::{convex_game_spread, solve_convex_linear_game, ConvexGameSolution, EpigraphPayoff};
pub use fictitious::{fictitious_play, FictitiousPlay};
pub use lp::{lp_solve, Bounds, LinearProgram, LpDiagnostics, LpSolution, LpStatus, Relation, Sense};
pub use matrix_game::{
    closed_form_2x2, equilibrium_spread, expected_payoff, solve_matrix_game, solve_matrix_rows,
    ClosedForm2x2, MatrixGameSolution,
};
