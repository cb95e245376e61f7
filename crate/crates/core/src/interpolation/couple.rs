use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kosaki::{kosaki_norm, Side, StateDensity};
use super::strip::StripFunction;
use crate::algebra::Element;
use crate::centralizers::NCCentralizer;
use crate::error::{Error, Result};
use crate::twisted_sum::TwistedPair;

/// A compatible couple `(X₀, X₁)` on the coefficient picture of one algebra.
#[derive(Debug, Clone, PartialEq)]
pub enum Couple {
    /// `(𝓜, ‖·‖_∞)` and `L¹(τ)`.
    MLOne,
    /// `𝓜φ` with `‖a‖_∞` and `𝓜_*` with `‖ad‖₁`.
    KosakiLeft(StateDensity),
    /// `φ𝓜` with `‖a‖_∞` and `𝓜_*` with `‖da‖₁`.
    KosakiRight(StateDensity),
}

impl Couple {
    pub fn name(&self) -> &'static str {
        match self {
            Self::MLOne => "M_L1",
            Self::KosakiLeft(_) => "kosaki_left",
            Self::KosakiRight(_) => "kosaki_right",
        }
    }

    /// Norm of endpoint `j ∈ {0, 1}`.
    pub fn endpoint_norm(&self, x: &Element, j: u8) -> Result<f64> {
        if j == 0 {
            return Ok(x.operator_norm());
        }
        match self {
            Self::MLOne => x.lp_norm(1.0),
            Self::KosakiLeft(d) => kosaki_norm(x, d, 1.0, Side::Left),
            Self::KosakiRight(d) => kosaki_norm(x, d, 1.0, Side::Right),
        }
    }

    /// Norm of `[X₀, X₁]_θ`, i.e. the (Kosaki) `L^{1/θ}` norm.
    pub fn theta_norm(&self, x: &Element, theta: f64) -> Result<f64> {
        let p = 1.0 / theta;
        match self {
            Self::MLOne => x.lp_norm(p),
            Self::KosakiLeft(d) => kosaki_norm(x, d, p, Side::Left),
            Self::KosakiRight(d) => kosaki_norm(x, d, p, Side::Right),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sampling {
    pub t_max: f64,
    pub t_step: f64,
}

impl Default for Sampling {
    fn default() -> Self {
        Self { t_max: 20.0, t_step: 1.0 / 64.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryNorm {
    /// Largest boundary norm over the sampled `t`.
    pub sampled: f64,
    /// Certified bound for `|t| > t_max`.
    pub tail: f64,
}

impl BoundaryNorm {
    pub fn value(&self) -> f64 {
        self.sampled.max(self.tail)
    }
}

/// Sampled `max_{j, t} ‖F(j + it)‖_j` without the tail; valid for any `λ`.
pub fn sampled_boundary_norm(f: &StripFunction, couple: &Couple, sampling: &Sampling) -> Result<f64> {
    if !(sampling.t_step > 0.0 && sampling.t_max >= 0.0) {
        return Err(Error::Precondition(format!("invalid sampling {sampling:?}")));
    }
    let n = (sampling.t_max / sampling.t_step).floor() as i64;
    (-n..=n)
        .into_par_iter()
        .map(|i| {
            let t = i as f64 * sampling.t_step;
            let a = couple.endpoint_norm(&f.eval(Complex64::new(0.0, t))?, 0)?;
            let b = couple.endpoint_norm(&f.eval(Complex64::new(1.0, t))?, 1)?;
            Ok(a.max(b))
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

/// `‖F‖_𝒢 = sup{‖F(j + it)‖_j}` by sampling `|t| ≤ t_max` plus the Gaussian tail envelope.
pub fn boundary_norm(f: &StripFunction, couple: &Couple, sampling: &Sampling) -> Result<BoundaryNorm> {
    if f.lambda() <= 0.0 {
        return Err(Error::NoDecay);
    }
    let sampled = sampled_boundary_norm(f, couple, sampling)?;
    let mut tail: f64 = 0.0;
    for j in [0u8, 1] {
        let norms = f.terms().iter().map(|t| couple.endpoint_norm(&t.coefficient, j)).collect::<Result<Vec<f64>>>()?;
        tail = tail.max(f.envelope(j as f64, sampling.t_max, &norms));
    }
    Ok(BoundaryNorm { sampled, tail })
}

/// `(‖F'(θ)‖_θ, (π/(2 sin πθ))·‖F‖_𝒢)` for `F` vanishing at `θ`.
pub fn derivative_bound_check(
    f: &StripFunction,
    couple: &Couple,
    theta: f64,
    sampling: &Sampling,
) -> Result<(f64, f64)> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::Precondition(format!("theta = {theta} must lie in (0, 1)")));
    }
    let z = Complex64::new(theta, 0.0);
    let norm = boundary_norm(f, couple, sampling)?.value();
    let at = couple.theta_norm(&f.eval(z)?, theta)?;
    if at > 1e-10 * norm {
        return Err(Error::Precondition(format!("F(theta) has norm {at:e}, not in the kernel of delta_theta")));
    }
    let lhs = couple.theta_norm(&f.deriv(z)?, theta)?;
    Ok((lhs, PI / (2.0 * (PI * theta).sin()) * norm))
}

/// Rochberg-Weiss pair `(F'(θ), F(θ))` in `L^p ⊕_Ω L^p`, `p = 1/θ`.
pub fn rw_pair(f: &StripFunction, omega: &NCCentralizer, theta: f64) -> Result<TwistedPair> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::Precondition(format!("theta = {theta} must lie in (0, 1)")));
    }
    let z = Complex64::new(theta, 0.0);
    TwistedPair::new(f.deriv(z)?, f.eval(z)?, omega.clone(), 1.0 / theta)
}
