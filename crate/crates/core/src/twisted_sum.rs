//! The twisted sum `L^p ⊕_Ω L^p`: quasi-norm, module action, nontriviality witnesses and
//! the Kalton-Peck duality pairing.

use std::f64::consts::E;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{Algebra, Element};
use crate::centralizers::{kp_lipschitz, omega_p, NCCentralizer};
use crate::commutative::{CommCentralizer, StepFunction};
use crate::error::{check_closed_exponent, check_conjugate, check_open_exponent, conjugate, Error, Result};
use crate::random::Sampler;
use crate::scalar::ScalarFn;

/// A point `(g, f)` of `Y ⊕_Ω Z`.
#[derive(Debug, Clone)]
pub struct TwistedPair {
    pub g: Element,
    pub f: Element,
    pub centralizer: NCCentralizer,
    pub p: f64,
}

impl TwistedPair {
    pub fn new(g: Element, f: Element, centralizer: NCCentralizer, p: f64) -> Result<Self> {
        g.ensure_same_algebra(&f)?;
        check_closed_exponent(p)?;
        Ok(Self { g, f, centralizer, p })
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        self.g.algebra()
    }

    /// `‖g − Ωf‖_p + ‖f‖_p`.
    pub fn quasi_norm(&self) -> Result<f64> {
        let of = self.centralizer.apply(&self.f)?;
        Ok((&self.g - &of).norm_unchecked(self.p) + self.f.norm_unchecked(self.p))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { g: self.g.scale(c), f: self.f.scale(c), ..self.clone() }
    }

    /// Coordinatewise sum; the centralizer and exponent of `self` are kept.
    pub fn sum(&self, other: &TwistedPair) -> Result<Self> {
        self.g.ensure_same_algebra(&other.g)?;
        Ok(Self { g: &self.g + &other.g, f: &self.f + &other.f, ..self.clone() })
    }
}

/// `a(g, f)b = (agb, afb)`; `b = None` is the left action.
pub fn module_action(a: &Element, pair: &TwistedPair, b: Option<&Element>) -> Result<TwistedPair> {
    a.ensure_same_algebra(&pair.g)?;
    let (g, f) = match b {
        Some(b) => {
            b.ensure_same_algebra(&pair.g)?;
            (&(a * &pair.g) * b, &(a * &pair.f) * b)
        }
        None => (a * &pair.g, a * &pair.f),
    };
    Ok(TwistedPair { g, f, ..pair.clone() })
}

#[derive(Debug, Clone)]
pub struct Witness {
    pub f: Element,
    pub ratio: f64,
}

/// `f = Σ(n wᵢ)^{-1/p} eᵢ` on the diagonal algebra with `τ(eᵢ) = wᵢ`, against the diagonal
/// morphism `φᵢ = −log wᵢ`; the ratio `‖Ω_p f − φ(f)‖_p / ‖f‖_p` equals `log n`.
///
/// The diagonal algebra is evaluated as the step function with atoms of measure `wᵢ`, so
/// values spread over many orders of magnitude are never merged by spectral grouping.
pub fn nontriviality_witness(weights: &[f64], p: f64) -> Result<Witness> {
    if weights.is_empty() {
        return Err(Error::Precondition("at least one projection is required".into()));
    }
    check_open_exponent(p)?;
    let algebra = Algebra::diagonal(weights)?;
    let n = weights.len() as f64;
    let values: Vec<f64> = weights.iter().map(|w| (n * w).powf(-1.0 / p)).collect();
    let step = StepFunction::real(&values, weights)?;
    let omega = CommCentralizer::KaltonPeck { p }.apply(&step)?;
    let phi_f: Vec<Complex64> = values.iter().zip(weights).map(|(v, w)| Complex64::new(-w.ln() * v, 0.0)).collect();
    let ratio = (&omega - &step.with_values(&phi_f)?).norm_unchecked(p) / step.norm_unchecked(p);
    Ok(Witness { f: Element::real_diagonal(&algebra, &values)?, ratio })
}

/// `⟨(x, y), (v, w)⟩ = τ(xw − yv)` between `Z_q ⊕_Ω Z_q` and `Z_p ⊕_Ω Z_p`.
pub fn duality_pairing(xy: &TwistedPair, vw: &TwistedPair) -> Result<Complex64> {
    check_conjugate(xy.p, vw.p)?;
    xy.g.ensure_same_algebra(&vw.g)?;
    Ok((&(&xy.g * &vw.f) - &(&xy.f * &vw.g)).trace())
}

/// Observed `sup |⟨(x, y), (v, w)⟩|` over unit quasi-norm pairs for `Ω_q` and `Ω_p`.
///
/// Trial `i` takes a random unit `v ∈ L^p` with polar form `u|v|`, its norming functional
/// `D = |v|^{p−1}u*`, and the pairs `(Ω_p v + βv, v)` and `(Ω_q(γh) + αh, γh)` with
/// `h = (1−t)D + tG` for a random unit `G ∈ L^q`; both are rescaled to quasi-norm 1.
pub fn estimate_duality_constant(algebra: &Arc<Algebra>, p: f64, trials: usize, seed: u64) -> Result<f64> {
    check_open_exponent(p)?;
    if trials == 0 {
        return Err(Error::Precondition("at least one trial is required".into()));
    }
    let q = conjugate(p);
    let (omega_p_map, omega_q_map) = (NCCentralizer::OmegaP { p }, NCCentralizer::OmegaP { p: q });
    (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut s = Sampler::for_trial(seed, i);
            let v = s.ginibre(algebra);
            let v = v.scale_real(1.0 / v.norm_unchecked(p));
            let (u, m) = v.polar();
            let dual = &m.func_calc_real(|x| x.powf(p - 1.0))? * &u.adjoint();
            let g = s.ginibre(algebra);
            let g = g.scale_real(1.0 / g.norm_unchecked(q));
            let t = s.uniform(0.0, 1.0);
            let h = &dual.scale_real(1.0 - t) + &g.scale_real(t);
            let (alpha, beta, gamma) = (s.uniform(-3.0, 3.0), s.uniform(-3.0, 3.0), s.uniform(-3.0, 3.0));
            let f_q = h.scale_real(gamma);
            let xy = TwistedPair::new(&omega_p(&f_q, q)? + &h.scale_real(alpha), f_q, omega_q_map.clone(), q)?;
            let vw = TwistedPair::new(&omega_p(&v, p)? + &v.scale_real(beta), v, omega_p_map.clone(), p)?;
            let (nx, nv) = (xy.quasi_norm()?, vw.quasi_norm()?);
            if nx == 0.0 || nv == 0.0 {
                return Ok(0.0);
            }
            Ok(duality_pairing(&xy, &vw)?.norm() / (nx * nv))
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

/// Log-spaced square grid `[lo, hi]²` with `points` nodes per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Self { lo: 1e-6, hi: 1e6, points: 1000 }
    }
}

impl Grid {
    pub fn nodes(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.lo];
        }
        let (a, b) = (self.lo.ln(), self.hi.ln());
        (0..self.points).map(|i| (a + (b - a) * i as f64 / (self.points - 1) as f64).exp()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub max_ratio: f64,
    pub argmax: (f64, f64),
    pub violations: usize,
    pub evaluated: usize,
}

/// `|ts log(|t|^q/|s|^p)| / ((p/e)(|t|^q + |s|^p))`, zero when `ts = 0`.
pub fn elementary_ratio(p: f64, t: f64, s: f64) -> f64 {
    let q = conjugate(p);
    let (t, s) = (t.abs(), s.abs());
    if t == 0.0 || s == 0.0 {
        return 0.0;
    }
    let num = (t * s * (q * t.ln() - p * s.ln())).abs();
    num / ((p / E) * (t.powf(q) + s.powf(p)))
}

/// Maximum of [`elementary_ratio`] over the grid; violations are points with ratio `> 1`.
pub fn elementary_inequality_check(p: f64, grid: &Grid) -> Result<GridReport> {
    check_open_exponent(p)?;
    if grid.points == 0 || !(grid.lo > 0.0 && grid.hi >= grid.lo) {
        return Err(Error::Precondition(format!("invalid grid {grid:?}")));
    }
    let nodes = grid.nodes();
    let mut report = GridReport { max_ratio: 0.0, argmax: (nodes[0], nodes[0]), violations: 0, evaluated: 0 };
    for &t in &nodes {
        for &s in &nodes {
            let r = elementary_ratio(p, t, s);
            report.evaluated += 1;
            if r > 1.0 {
                report.violations += 1;
            }
            if r > report.max_ratio {
                report.max_ratio = r;
                report.argmax = (t, s);
            }
        }
    }
    Ok(report)
}

const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// `(|τ(Φ_q(y)w − yΦ_p(w))|, 2pL/e)` for diagonal positive `y`, `w` with `‖y‖_q = ‖w‖_p = 1`,
/// where `Φ_r(x) = x φ(r log(|x|/‖x‖_r))`.
pub fn sigma_elementary_duality_bound(y: &Element, w: &Element, p: f64, phi: &ScalarFn) -> Result<(f64, f64)> {
    check_open_exponent(p)?;
    if p > 2.0 {
        return Err(Error::Exponent(p, "(1, 2]"));
    }
    y.ensure_same_algebra(w)?;
    let q = conjugate(p);
    for (name, x, r) in [("y", y, q), ("w", w, p)] {
        if !x.is_diagonal() || x.diagonal_entries().iter().any(|v| v.im != 0.0 || v.re < 0.0) {
            return Err(Error::Precondition(format!("{name} must be diagonal and positive")));
        }
        let n = x.norm_unchecked(r);
        if (n - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::Precondition(format!("{name} has norm {n}, normalize first")));
        }
    }
    let lhs = (&(&kp_lipschitz(y, q, phi)? * w) - &(y * &kp_lipschitz(w, p, phi)?)).trace().norm();
    Ok((lhs, 2.0 * p * phi.lipschitz() / E))
}
