//! The commutative model: `L^p(ℝ⁺)` restricted to finite step functions.

mod centralizer;
mod step;

pub use centralizer::{
    kp_two_variable, kp_two_variable_pointwise, laziness_project, laziness_project_step, real_decomposition,
    symmetry_defect, CommCentralizer, StepMap, TwoVariableFn,
};
pub use step::{rank_function, rearrangement, Atom, LevelSet, RankFunction, StepFunction};
