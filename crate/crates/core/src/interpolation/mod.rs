//! Complex interpolation on the strip `0 ≤ ℜz ≤ 1`: the exponential class, boundary norms,
//! Rochberg-Weiss pairs, and Kosaki `L^p` spaces of a faithful state.

mod couple;
mod kosaki;
mod strip;

pub use couple::{
    boundary_norm, derivative_bound_check, rw_pair, sampled_boundary_norm, BoundaryNorm, Couple, Sampling,
};
pub use kosaki::{
    beta, change_of_state, cocycle, fan_estimate, kosaki_derivation_left, kosaki_derivation_right,
    kosaki_duality_pairing, kosaki_norm, KosakiDerivation, KosakiPair, Side, StateDensity,
};
pub use strip::{conformal_factor, conformal_factor_deriv, StripFunction, StripTerm};
