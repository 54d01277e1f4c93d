//! Weighted generalized algebraic polynomials: extremal polynomials on an
//! interval and Chebyshev constants of finite unions of intervals.
//!
//! Taking logarithms turns `w(t) ∏|t - x_j|^{r_j}` into a sum of translates of
//! `log|t|` with field `log w`, after an affine map of the interval onto `[0, 1]`.

mod gap;
mod union;

pub use gap::{gap_eval, solve_bojanov, verify_signed_equioscillation, GapProblem, GapSolution, WeightPiece, WeightSpec};
pub use union::{
    compare_constants, restricted_constant, snap_to_e, unrestricted_constant, union_factor, ConstantComparison,
    IntervalUnion, UnionConstant,
};
