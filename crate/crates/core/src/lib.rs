//! Equioscillation of weighted sums of translates on `[0, 1]`.
//!
//! A problem fixes a kernel `K`, positive exponents `r_1..r_n` and an upper
//! semicontinuous field `J`. For nodes `0 <= y_1 <= … <= y_n <= 1` the weighted
//! sum `F(y, t) = J(t) + Σ r_j K(t - y_j)` has interval maxima `m_0..m_n`
//! between consecutive nodes. The crate computes those maxima, solves for
//! prescribed consecutive differences (zero differences give equioscillation),
//! brute-forces the minimax and maximin values on a grid, checks the
//! perturbation and intertwining statements, and applies all of it to
//! generalized algebraic polynomials and Chebyshev constants of interval unions.

pub mod applications;
pub mod catalog;
pub mod error;
pub mod ext;
pub mod field;
pub mod kernel;
pub mod nodes;
pub mod oracle;
pub mod perturbation;
pub mod problem;
mod schema;
pub mod solver;
pub mod translates;

pub use error::{Error, Result};
pub use ext::{ExtReal, NEG_INFINITY};
pub use field::{FieldFormula, FieldPiece, FieldSpec, SingularComponent, WeightExpr};
pub use kernel::{KernelFlags, KernelSpec};
pub use nodes::NodeSystem;
pub use problem::Problem;
pub use translates::{
    difference, eval_pure, eval_weighted, in_regularity_set, interval_maxima, maximize_on_interval, DifferenceVector,
    MaxStrategy, MaximaVector,
};
pub use solver::{
    initial_nodes, sandwich_check, solve_difference, solve_difference_with, solve_equioscillation,
    solve_equioscillation_with, RegularizationReport, SandwichCheck, SolveReport, SolverConfig,
};
pub use oracle::{grid_maximin, grid_minimax, grid_minimize, GridSearch, GridSpec, OracleResult};
pub use perturbation::{
    check_interval_perturbation, check_intertwining, check_partition_perturbation, check_strict_majorization_excluded,
    find_strict_majorization, perturb_partition, IntertwiningVerdict, IntervalClass, PartitionSpec,
};
pub use applications::{
    compare_constants, gap_eval, restricted_constant, snap_to_e, solve_bojanov, unrestricted_constant,
    verify_signed_equioscillation, GapProblem, GapSolution, IntervalUnion, WeightSpec,
};
pub use catalog::{example_problem, run_example, ExampleId, ExampleReport};
