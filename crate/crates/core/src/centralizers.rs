//! Centralizers on `L^p(𝓜, τ)`: Kalton-Peck type maps built from the polar decomposition,
//! the spectral lift of lazy commutative centralizers, and constant estimators.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::algebra::{AbsDecomposition, Algebra, Element};
use crate::commutative::{CommCentralizer, StepFunction};
use crate::error::{check_open_exponent, Error, Result};
use crate::random::Sampler;
use crate::scalar::ScalarFn;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// Homogeneous maps `L^p(𝓜) → L^0(𝓜)`.
#[derive(Debug, Clone)]
pub enum NCCentralizer {
    /// `Ω_p(x) = p u|x| log(|x|/‖x‖_p)`.
    OmegaP { p: f64 },
    /// `u|x| φ(p log(|x|/‖x‖_p))`.
    Lipschitz { p: f64, phi: ScalarFn },
    /// `u|x| ı⁺(log(|x|/‖x‖_p))`.
    PhiPlus { p: f64 },
    /// `u|x| ı⁻(log(|x|/‖x‖_p))`.
    PhiMinus { p: f64 },
    /// Spectral lift `Φ_τ` of a lazy commutative centralizer.
    Lifted { inner: CommCentralizer },
}

impl NCCentralizer {
    pub fn phi_pm(p: f64, sign: Sign) -> Self {
        match sign {
            Sign::Plus => Self::PhiPlus { p },
            Sign::Minus => Self::PhiMinus { p },
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Self::OmegaP { .. } => "omega_p",
            Self::Lipschitz { .. } => "lipschitz",
            Self::PhiPlus { .. } => "phi_plus",
            Self::PhiMinus { .. } => "phi_minus",
            Self::Lifted { .. } => "lifted",
        }
    }

    pub fn p(&self) -> f64 {
        match self {
            Self::OmegaP { p } | Self::Lipschitz { p, .. } | Self::PhiPlus { p } | Self::PhiMinus { p } => *p,
            Self::Lifted { inner } => inner.p(),
        }
    }

    pub fn apply(&self, x: &Element) -> Result<Element> {
        match self {
            Self::OmegaP { p } => omega_p(x, *p),
            Self::Lipschitz { p, phi } => kp_lipschitz(x, *p, phi),
            Self::PhiPlus { p } => phi_pm(x, *p, Sign::Plus),
            Self::PhiMinus { p } => phi_pm(x, *p, Sign::Minus),
            Self::Lifted { inner } => lift_centralizer(inner, x, inner.p()),
        }
    }
}

/// `u · Σ_j σ_j g(log(σ_j/‖x‖_p)) e_j` over the nonzero singular values of `x`.
fn spectral_map(x: &Element, p: f64, g: impl Fn(f64) -> Complex64) -> Result<Element> {
    check_open_exponent(p)?;
    let d = x.abs_decomposition();
    if d.is_empty() {
        return Ok(Element::zeros(x.algebra()));
    }
    let n = decomposition_norm(&d, p);
    Ok(d.phased_apply(|s| s * g((s / n).ln())))
}

fn decomposition_norm(d: &AbsDecomposition, p: f64) -> f64 {
    crate::algebra::norms::scaled_power_sum(d.values().iter().copied().zip(d.widths().iter().copied()), p)
}

/// Kalton-Peck map `Ω_p(x) = p x log(|x|/‖x‖_p)`; `0·log 0 := 0`.
pub fn omega_p(x: &Element, p: f64) -> Result<Element> {
    spectral_map(x, p, |a| Complex64::new(p * a, 0.0))
}

/// `u|x| φ(p log(|x|/‖x‖_p))`.
pub fn kp_lipschitz(x: &Element, p: f64, phi: &ScalarFn) -> Result<Element> {
    spectral_map(x, p, |a| phi.eval(p * a))
}

/// `Φ^±(x) = u|x| ı^±(log(|x|/‖x‖_p))`, without a factor `p`.
pub fn phi_pm(x: &Element, p: f64, sign: Sign) -> Result<Element> {
    match sign {
        Sign::Plus => spectral_map(x, p, |a| Complex64::new(a.max(0.0), 0.0)),
        Sign::Minus => spectral_map(x, p, |a| Complex64::new(a.min(0.0), 0.0)),
    }
}

/// Commutative realization `ξ(|x|)`: atoms in decreasing singular-value order with widths `τ(e_j)`.
pub fn xi(d: &AbsDecomposition) -> StepFunction {
    StepFunction::real(d.values(), d.widths()).expect("widths are positive")
}

/// `Φ_τ(x) = u ξ⁻¹(Φ(ξ(|x|)))` for a lazy commutative `Φ`.
pub fn lift_centralizer(phi: &CommCentralizer, x: &Element, p: f64) -> Result<Element> {
    if !phi.is_lazy() {
        return Err(Error::NotLazy(phi.name().to_string()));
    }
    check_open_exponent(p)?;
    if phi.p() != p {
        return Err(Error::Precondition(format!("centralizer exponent {} differs from p = {p}", phi.p())));
    }
    let d = x.abs_decomposition();
    if d.is_empty() {
        return Ok(Element::zeros(x.algebra()));
    }
    let s = phi.apply(&xi(&d))?.values();
    Ok(d.phased_combine(&s))
}

/// `‖Ω(f+g) − Ωf − Ωg‖_p / (‖f‖_p + ‖g‖_p)`.
pub fn quasi_linearity_defect(omega: &NCCentralizer, f: &Element, g: &Element, p: f64) -> Result<f64> {
    f.ensure_same_algebra(g)?;
    let den = f.lp_norm(p)? + g.lp_norm(p)?;
    if den == 0.0 {
        return Ok(0.0);
    }
    let sum = f + g;
    let defect = &(&omega.apply(&sum)? - &omega.apply(f)?) - &omega.apply(g)?;
    Ok(defect.norm_unchecked(p) / den)
}

/// `‖Ω(axb) − aΩ(x)b‖_p / ‖x‖_p`.
pub fn bicentralizer_defect(omega: &NCCentralizer, a: &Element, x: &Element, b: &Element, p: f64) -> Result<f64> {
    a.ensure_same_algebra(x)?;
    b.ensure_same_algebra(x)?;
    let den = x.lp_norm(p)?;
    if den == 0.0 {
        return Ok(0.0);
    }
    let lhs = omega.apply(&(&(a * x) * b))?;
    let rhs = &(a * &omega.apply(x)?) * b;
    Ok((&lhs - &rhs).norm_unchecked(p) / den)
}

fn max_over_trials(trials: usize, trial: impl Fn(u64) -> Result<f64> + Send + Sync) -> Result<f64> {
    if trials == 0 {
        return Err(Error::Precondition("at least one trial is required".into()));
    }
    (0..trials as u64).into_par_iter().map(trial).try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

/// Lower bound for `Q[Ω]` by random search; trial `i` draws from substream `i` of `seed`.
pub fn estimate_q(omega: &NCCentralizer, algebra: &Arc<Algebra>, p: f64, trials: usize, seed: u64) -> Result<f64> {
    max_over_trials(trials, |i| {
        let mut s = Sampler::for_trial(seed, i);
        let f = s.ginibre(algebra);
        let g = s.ginibre(algebra).scale_real(s.log_uniform(1e-2, 1e2));
        quasi_linearity_defect(omega, &f, &g, p)
    })
}

/// Lower bound for the bicentralizer constant over random contractions `a`, `b`.
pub fn estimate_c(omega: &NCCentralizer, algebra: &Arc<Algebra>, p: f64, trials: usize, seed: u64) -> Result<f64> {
    max_over_trials(trials, |i| {
        let mut s = Sampler::for_trial(seed, i);
        let a = s.contraction(algebra);
        let x = s.ginibre(algebra);
        let b = s.contraction(algebra);
        bicentralizer_defect(omega, &a, &x, &b, p)
    })
}

/// `Σ_j e_j Ψ(x) e_j` over the spectral projections of Hermitian `x`.
pub fn commutant_correction(psi: &NCCentralizer, x: &Element) -> Result<Element> {
    let sd = x.spectral()?;
    Ok(sd.compress(&psi.apply(x)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Block, Matrix};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn dist(a: &Element, b: &Element) -> f64 {
        (a - b).max_abs_entry()
    }

    #[test]
    fn omega_on_projections() {
        let alg = Algebra::new(vec![Block::new(3, 0.7), Block::new(2, 1.3)]).unwrap();
        let p = 2.5;
        let e = Element::from_blocks(
            &alg,
            vec![
                Matrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0), c(1.0), c(0.0)])),
                Matrix::zeros(2, 2),
            ],
        )
        .unwrap();
        let te = e.trace().re;
        let f = e.scale_real(te.powf(-1.0 / p));
        let out = omega_p(&f, p).unwrap();
        assert!(dist(&out, &f.scale_real(-te.ln())) < 1e-14);

        let alg = Algebra::diagonal(&[1.0; 5]).unwrap();
        let f = Element::identity(&alg).scale_real(5f64.powf(-1.0 / p));
        assert!(dist(&omega_p(&f, p).unwrap(), &f.scale_real(-(5f64.ln()))) < 1e-14);
    }

    #[test]
    fn omega_vanishes_on_flat_spectrum() {
        let alg = Algebra::matrix(2, 0.5).unwrap();
        let mut s = Sampler::new(3);
        let u = s.unitary(&alg);
        let x = u.scale_real(2.0);
        assert!(omega_p(&x, 2.0).unwrap().max_abs_entry() < 1e-14);
        assert!(omega_p(&Element::zeros(&alg), 2.0).unwrap().is_zero());
    }

    #[test]
    fn lipschitz_reductions() {
        let alg = Algebra::new(vec![Block::new(3, 1.0), Block::new(1, 2.0)]).unwrap();
        let x = Sampler::new(5).ginibre(&alg);
        let p = 3.0;
        assert!(dist(&kp_lipschitz(&x, p, &ScalarFn::Identity).unwrap(), &omega_p(&x, p).unwrap()) < 1e-13);
        let k = Complex64::new(0.5, 2.0);
        assert!(dist(&kp_lipschitz(&x, p, &ScalarFn::Const(k)).unwrap(), &x.scale(k)) < 1e-13);
    }

    #[test]
    fn lipschitz_positive_part_entrywise() {
        let alg = Algebra::diagonal(&[1.0, 1.0]).unwrap();
        let n = 5f64.sqrt();
        let x = Element::real_diagonal(&alg, &[2.0 / n, 1.0 / n]).unwrap();
        let out = kp_lipschitz(&x, 2.0, &ScalarFn::PosPart).unwrap();
        let expected: Vec<f64> = [2.0 / n, 1.0 / n].iter().map(|&v| v * (2.0 * v.ln()).max(0.0)).collect();
        for (o, e) in out.diagonal_entries().iter().zip(expected) {
            assert!((o - c(e)).norm() < 1e-15);
        }
    }

    #[test]
    fn phi_pm_examples() {
        let alg = Algebra::diagonal(&[1.0, 2.0, 3.5]).unwrap();
        let x = Element::real_diagonal(&alg, &[0.3, 0.5, 0.2]).unwrap();
        let n = x.lp_norm(2.0).unwrap();
        let x = x.scale_real(1.0 / n);
        assert!(phi_pm(&x, 2.0, Sign::Plus).unwrap().is_zero());

        let y = Sampler::new(9).ginibre(&Algebra::matrix(3, 0.5).unwrap());
        let sum = &phi_pm(&y, 1.5, Sign::Plus).unwrap() + &phi_pm(&y, 1.5, Sign::Minus).unwrap();
        assert!(dist(&sum, &omega_p(&y, 1.5).unwrap().scale_real(1.0 / 1.5)) < 1e-13);

        let one = Element::identity(&Algebra::diagonal(&[1.0]).unwrap());
        assert!(phi_pm(&one, 3.0, Sign::Plus).unwrap().is_zero());
        assert!(phi_pm(&one, 3.0, Sign::Minus).unwrap().is_zero());
    }

    #[test]
    fn lift_examples() {
        let alg = Algebra::new(vec![Block::new(3, 1.0), Block::new(2, 0.5)]).unwrap();
        let x = Sampler::new(11).ginibre(&alg);
        let kp = CommCentralizer::KaltonPeck { p: 2.0 };
        assert!(dist(&lift_centralizer(&kp, &x, 2.0).unwrap(), &omega_p(&x, 2.0).unwrap()) < 1e-12);

        let alg = Algebra::matrix(2, 1.0).unwrap();
        let u = Sampler::new(12).unitary(&alg);
        let x = u.scale_real(2.0);
        assert!(dist(&lift_centralizer(&kp, &x, 2.0).unwrap(), &x.scale_real(-(2f64.ln()))) < 1e-13);

        let lazy_two = CommCentralizer::two_variable(2.0, |a, b| c(a + 0.1 * b));
        let d = Element::real_diagonal(&Algebra::diagonal(&[1.0, 2.0, 1.0]).unwrap(), &[3.0, 1.0, 2.0]).unwrap();
        let out = lift_centralizer(&lazy_two, &d, 2.0).unwrap();
        assert!(out.is_diagonal());

        let eager = CommCentralizer::custom("eager", 2.0, false, |f| Ok(f.clone()));
        assert!(matches!(lift_centralizer(&eager, &x, 2.0), Err(Error::NotLazy(_))));
    }

    #[test]
    fn constant_estimators() {
        let alg = Algebra::matrix(2, 1.0).unwrap();
        let linear = NCCentralizer::Lipschitz { p: 2.0, phi: ScalarFn::Const(c(3.0)) };
        assert!(estimate_q(&linear, &alg, 2.0, 20, 1).unwrap() < 1e-13);
        let omega = NCCentralizer::OmegaP { p: 2.0 };
        let q = estimate_q(&omega, &alg, 2.0, 20, 1).unwrap();
        assert!(q > 0.0);
        assert!(estimate_q(&omega, &alg, 2.0, 40, 1).unwrap() >= q);
        assert!(estimate_c(&omega, &alg, 2.0, 0, 1).is_err());

        let f = Sampler::new(2).ginibre(&alg);
        assert_eq!(quasi_linearity_defect(&omega, &f, &Element::zeros(&alg), 2.0).unwrap(), 0.0);
        let one = Element::identity(&alg);
        assert!(bicentralizer_defect(&omega, &one, &f, &one, 2.0).unwrap() < 1e-14);
    }

    #[test]
    fn diagonal_unitaries_commute_with_omega() {
        let alg = Algebra::diagonal(&[1.0, 1.0]).unwrap();
        let omega = NCCentralizer::OmegaP { p: 2.0 };
        let x = Element::diagonal(&alg, &[Complex64::new(0.3, 1.0), c(-2.0)]).unwrap();
        let a = Element::diagonal(&alg, &[Complex64::from_polar(1.0, 0.4), Complex64::from_polar(1.0, 2.0)]).unwrap();
        let b = Element::diagonal(&alg, &[Complex64::from_polar(1.0, -1.1), c(-1.0)]).unwrap();
        assert!(bicentralizer_defect(&omega, &a, &x, &b, 2.0).unwrap() < 1e-14);
    }

    #[test]
    fn commutant_correction_examples() {
        let alg = Algebra::matrix(2, 1.0).unwrap();
        let x = Element::real_diagonal(&alg, &[1.0, 2.0]).unwrap();
        let omega = NCCentralizer::OmegaP { p: 2.0 };
        assert!(dist(&commutant_correction(&omega, &x).unwrap(), &omega.apply(&x).unwrap()) < 1e-15);

        let y =
            Element::from_blocks(&alg, vec![Matrix::from_fn(2, 2, |i, j| Complex64::new(1.0 + i as f64, j as f64))])
                .unwrap();
        let compressed = x.spectral().unwrap().compress(&y);
        assert!(dist(&compressed, &Element::diagonal(&alg, &[c(1.0), Complex64::new(2.0, 1.0)]).unwrap()) < 1e-15);

        let full = NCCentralizer::Lifted { inner: CommCentralizer::custom("full", 2.0, true, |f| Ok(f.clone())) };
        let one = Element::identity(&alg);
        assert!(dist(&commutant_correction(&full, &one).unwrap(), &one) < 1e-15);

        let mut s = Sampler::new(4);
        let h = s.hermitian(&alg);
        let corrected = commutant_correction(&omega, &h).unwrap();
        for e in h.spectral().unwrap().projections() {
            assert!(corrected.commutator(&e).max_abs_entry() < 1e-12);
        }
        assert!(commutant_correction(&omega, &s.ginibre(&alg)).is_err());
    }
}
