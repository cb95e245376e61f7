use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::algebra::{Algebra, Element};
use crate::error::{Error, Result};

/// `φ(z) = (e^{iπz} − e^{iπθ}) / (e^{iπz} − e^{−iπθ})`, mapping the open strip onto the disc
/// with `φ(θ) = 0` and `|φ| = 1` on both boundary lines.
pub fn conformal_factor(z: Complex64, theta: f64) -> Complex64 {
    let w = (Complex64::i() * PI * z).exp();
    let a = Complex64::from_polar(1.0, PI * theta);
    (w - a) / (w - a.conj())
}

/// `φ'(z) = −2π sin(πθ) e^{iπz} / (e^{iπz} − e^{−iπθ})²`.
pub fn conformal_factor_deriv(z: Complex64, theta: f64) -> Complex64 {
    let w = (Complex64::i() * PI * z).exp();
    let den = w - Complex64::from_polar(1.0, -PI * theta);
    -2.0 * PI * (PI * theta).sin() * w / (den * den)
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta < 1.0 {
        Ok(())
    } else {
        Err(Error::Precondition(format!("theta = {theta} must lie in (0, 1)")))
    }
}

pub(crate) fn check_strip(z: Complex64) -> Result<()> {
    if (0.0..=1.0).contains(&z.re) && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::OutsideStrip(z))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StripTerm {
    pub rate: f64,
    pub coefficient: Element,
}

/// `F(z) = φ_θ(z)^k · exp(λz²) · Σᵢ exp(rᵢz) aᵢ`; the conformal power `k` is optional.
///
/// Since `ℜ(z²) = x² − t²`, the Gaussian factor decays along vertical lines when `λ > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct StripFunction {
    lambda: f64,
    terms: Vec<StripTerm>,
    conformal: Option<(f64, u32)>,
}

impl StripFunction {
    pub fn new(lambda: f64, terms: Vec<StripTerm>) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::Precondition(format!("lambda = {lambda} must be finite and nonnegative")));
        }
        let Some(first) = terms.first() else {
            return Err(Error::Precondition("a strip function needs at least one term".into()));
        };
        for t in &terms {
            first.coefficient.ensure_same_algebra(&t.coefficient)?;
            if !t.rate.is_finite() {
                return Err(Error::Precondition(format!("rate {} is not finite", t.rate)));
            }
        }
        Ok(Self { lambda, terms, conformal: None })
    }

    pub fn constant(a: Element) -> Self {
        Self { lambda: 0.0, terms: vec![StripTerm { rate: 0.0, coefficient: a }], conformal: None }
    }

    pub fn exponential(lambda: f64, rate: f64, a: Element) -> Result<Self> {
        Self::new(lambda, vec![StripTerm { rate, coefficient: a }])
    }

    /// `f^{pz} = Σ_j exp(p log σ_j · z) e_j` for positive `f`.
    pub fn power(f: &Element, p: f64) -> Result<Self> {
        let sd = f.spectral()?;
        if sd.values().first().is_some_and(|&v| v < -sd.tolerance()) {
            return Err(Error::Precondition("f must be positive semidefinite".into()));
        }
        let terms: Vec<StripTerm> = sd
            .values()
            .iter()
            .enumerate()
            .filter(|&(_, &v)| v > sd.tolerance())
            .map(|(j, &v)| StripTerm { rate: p * v.ln(), coefficient: sd.projection(j) })
            .collect();
        if terms.is_empty() {
            return Ok(Self::constant(Element::zeros(f.algebra())));
        }
        Self::new(0.0, terms)
    }

    /// Multiplies by `φ_θ(z)^power`, which vanishes to order `power` at `θ`.
    pub fn with_conformal(mut self, theta: f64, power: u32) -> Result<Self> {
        check_theta(theta)?;
        if let Some((t, k)) = self.conformal {
            if t != theta {
                return Err(Error::Precondition(format!("conformal factors at {t} and {theta} cannot be combined")));
            }
            self.conformal = Some((theta, k + power));
        } else if power > 0 {
            self.conformal = Some((theta, power));
        }
        Ok(self)
    }

    /// `E(z) − exp(λ(z² − θ²)) E(θ)`, which stays in the exponential class and vanishes at `θ`.
    pub fn vanishing_at(&self, theta: f64) -> Result<Self> {
        check_theta(theta)?;
        if self.conformal.is_some() {
            return Err(Error::Precondition("subtraction is defined for the plain exponential class".into()));
        }
        let at = self.eval(Complex64::new(theta, 0.0))?;
        let mut terms = self.terms.clone();
        terms.push(StripTerm { rate: 0.0, coefficient: at.scale_real(-(-self.lambda * theta * theta).exp()) });
        Ok(Self { terms, ..self.clone() })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn terms(&self) -> &[StripTerm] {
        &self.terms
    }

    pub fn conformal(&self) -> Option<(f64, u32)> {
        self.conformal
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        self.terms[0].coefficient.algebra()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let terms =
            self.terms.iter().map(|t| StripTerm { rate: t.rate, coefficient: t.coefficient.scale(c) }).collect();
        Self { terms, ..self.clone() }
    }

    fn combine(&self, weights: impl Iterator<Item = Complex64>) -> Element {
        let mut out = Element::zeros(self.algebra());
        for (t, w) in self.terms.iter().zip(weights) {
            out = &out + &t.coefficient.scale(w);
        }
        out
    }

    /// Scalar weight of term `i` in the exponential part at `z`.
    fn weights(&self, z: Complex64) -> impl Iterator<Item = Complex64> + '_ {
        let g = self.lambda * z * z;
        self.terms.iter().map(move |t| (g + t.rate * z).exp())
    }

    fn conformal_power(&self, z: Complex64) -> (Complex64, Complex64) {
        match self.conformal {
            None => (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
            Some((theta, k)) => {
                let phi = conformal_factor(z, theta);
                let dphi = conformal_factor_deriv(z, theta);
                (phi.powu(k), (k as f64) * phi.powu(k - 1) * dphi)
            }
        }
    }

    pub fn eval(&self, z: Complex64) -> Result<Element> {
        check_strip(z)?;
        let (c, _) = self.conformal_power(z);
        Ok(self.combine(self.weights(z).map(|w| w * c)))
    }

    pub fn deriv(&self, z: Complex64) -> Result<Element> {
        check_strip(z)?;
        let (c, dc) = self.conformal_power(z);
        let two_lz = 2.0 * self.lambda * z;
        let w = self.weights(z).zip(&self.terms).map(|(w, t)| w * (dc + c * (two_lz + t.rate)));
        Ok(self.combine(w))
    }

    /// `e^{λ(j² − t²)} Σᵢ ‖aᵢ‖ e^{rᵢ j}` bound on `‖F(j + it)‖` given term norms `‖aᵢ‖`.
    pub(crate) fn envelope(&self, j: f64, t: f64, norms: &[f64]) -> f64 {
        let s: f64 = self.terms.iter().zip(norms).map(|(term, n)| n * (term.rate * j).exp()).sum();
        (self.lambda * (j * j - t * t)).exp() * s
    }
}
