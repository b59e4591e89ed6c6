//! Exact mixed-integer linear programming.

pub mod branch;
pub mod lp_format;
pub mod model;
pub mod propagate;
pub mod scalar;
pub mod simplex;

pub use branch::{complete_exact, solve_milp, Arithmetic, MilpSolution, MilpStatus, SolveOptions, SolveStats};
pub use lp_format::{export_lp, import_solution, parse_solution, write_solution};
pub use model::{Constraint, MilpModel, Sense, VarId, VarKind, Variable};
pub use simplex::{certifies_infeasibility, solve_lp, LinearProgram, LpResult, LpRow, LpStatus, PivotRule, SimplexOptions};
