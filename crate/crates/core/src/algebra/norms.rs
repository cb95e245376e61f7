//! Trace-weighted Schatten norms and the generalized singular value function μ(x).

use serde::{Deserialize, Serialize};

use super::Element;
use crate::error::{check_closed_exponent, Result};

/// `(Σ wᵢ (σᵢ/s)^p)^{1/p}·s` with `s = max σᵢ`, which avoids overflow for large `p`.
pub(crate) fn scaled_power_sum(terms: impl Iterator<Item = (f64, f64)> + Clone, p: f64) -> f64 {
    let s = terms.clone().fold(0.0f64, |a, (v, _)| a.max(v));
    if s == 0.0 {
        return 0.0;
    }
    let sum: f64 = terms.map(|(v, w)| w * (v / s).powf(p)).sum();
    s * sum.powf(1.0 / p)
}

impl Element {
    /// Singular values of every block, each list in decreasing order.
    pub fn singular_values(&self) -> Vec<Vec<f64>> {
        self.blocks
            .iter()
            .map(|m| {
                if m.nrows() == 1 {
                    return vec![m[(0, 0)].norm()];
                }
                let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
                s.sort_by(|a, b| b.total_cmp(a));
                s
            })
            .collect()
    }

    /// Operator norm `‖x‖_∞`.
    pub fn operator_norm(&self) -> f64 {
        self.singular_values().iter().flat_map(|s| s.first().copied()).fold(0.0, f64::max)
    }

    /// `‖x‖_p = τ(|x|^p)^{1/p}` for `p ∈ [1, ∞]`; `p = ∞` is the operator norm.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        check_closed_exponent(p)?;
        Ok(self.norm_unchecked(p))
    }

    pub(crate) fn norm_unchecked(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.operator_norm();
        }
        if p == 2.0 {
            let s: f64 = self.blocks.iter().zip(&self.algebra.blocks).map(|(m, b)| b.weight * m.norm_squared()).sum();
            return s.sqrt();
        }
        let sv = self.singular_values();
        let terms = sv.iter().zip(&self.algebra.blocks).flat_map(|(s, b)| s.iter().map(move |&v| (v, b.weight)));
        scaled_power_sum(terms, p)
    }

    /// Generalized singular value function `μ(x)`.
    pub fn mu(&self) -> MuFunction {
        let d = self.abs_decomposition();
        MuFunction {
            steps: d.values().iter().zip(d.widths()).map(|(&value, &width)| MuStep { value, width }).collect(),
        }
    }
}

/// One step of a decreasing step function on `ℝ⁺`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuStep {
    pub value: f64,
    pub width: f64,
}

/// Right-continuous decreasing step function `t ↦ μ_t(x)`; zero beyond the last step.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MuFunction {
    pub steps: Vec<MuStep>,
}

impl MuFunction {
    pub fn eval(&self, t: f64) -> f64 {
        let mut right = 0.0;
        for s in &self.steps {
            right += s.width;
            if t < right {
                return s.value;
            }
        }
        0.0
    }

    /// `τ(s(|x|))`, the measure of the support.
    pub fn support(&self) -> f64 {
        self.steps.iter().map(|s| s.width).sum()
    }

    /// `(∫ μ^p)^{1/p}`, or `μ(0)` for `p = ∞`.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        check_closed_exponent(p)?;
        if p.is_infinite() {
            return Ok(self.steps.first().map_or(0.0, |s| s.value));
        }
        Ok(scaled_power_sum(self.steps.iter().map(|s| (s.value, s.width)), p))
    }

    /// Whether the step values strictly decrease with positive widths.
    pub fn is_well_formed(&self) -> bool {
        self.steps.iter().all(|s| s.width > 0.0 && s.value > 0.0)
            && self.steps.windows(2).all(|w| w[0].value > w[1].value)
    }
}
