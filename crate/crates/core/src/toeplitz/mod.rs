//! Co-analytic Toeplitz operators: one-variable apply and solve, and the
//! reduction of the ball problem to one variable.

mod ball;
mod disk;
mod growth;
mod symbol;

pub use ball::{solve_toeplitz_ball, BallReport, BallSolution};
pub use disk::{apply_toeplitz, solve_toeplitz_disk, DiskSolution};
pub use growth::{growth_fit, growth_fit_points, GrowthFit};
pub use symbol::{plan_for_symbol, SymbolSeries, ToeplitzBallPlan};
