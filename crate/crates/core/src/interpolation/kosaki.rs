use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{Element, SpectralData};
use crate::error::{check_closed_exponent, check_conjugate, check_open_exponent, conjugate, Error, Result};

const MASS_TOLERANCE: f64 = 1e-12;
const REPRODUCTION_TOLERANCE: f64 = 1e-10;
const BOUNDARY_TOLERANCE: f64 = 1e-8;

/// Density `d > 0` of the faithful positive functional `φ(x) = τ(dx)`.
#[derive(Debug, Clone)]
pub struct StateDensity {
    d: Element,
    mass: f64,
    spectral: Arc<SpectralData>,
}

impl PartialEq for StateDensity {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d
    }
}

impl StateDensity {
    /// Positive functional with mass `τ(d)`.
    pub fn new(d: Element) -> Result<Self> {
        let mass = d.trace().re;
        Self::with_mass(d, mass)
    }

    /// Rejects `d` unless it is positive definite with `τ(d) = mass`.
    pub fn with_mass(d: Element, mass: f64) -> Result<Self> {
        let spectral = d.spectral()?;
        let min = spectral.values().first().copied().unwrap_or(0.0);
        if min <= 0.0 {
            return Err(Error::NotPositiveDefinite(min));
        }
        let t = d.trace().re;
        if !(mass > 0.0) || (t - mass).abs() > MASS_TOLERANCE * mass {
            return Err(Error::Precondition(format!("density has trace {t}, declared mass {mass}")));
        }
        Ok(Self { d, mass, spectral: Arc::new(spectral) })
    }

    /// Normalizes a positive definite element to a state.
    pub fn state(d: Element) -> Result<Self> {
        let t = d.trace().re;
        if !(t > 0.0) {
            return Err(Error::NotPositiveDefinite(t));
        }
        Self::with_mass(d.scale_real(1.0 / t), 1.0)
    }

    /// `τ(1)⁻¹·1`, the tracial state.
    pub fn tracial(algebra: &Arc<crate::Algebra>) -> Result<Self> {
        Self::state(Element::identity(algebra))
    }

    pub fn density(&self) -> &Element {
        &self.d
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// `d^z` on the principal branch.
    pub fn power(&self, z: Complex64) -> Element {
        self.spectral.apply(|v| (z * v.ln()).exp())
    }

    pub fn power_real(&self, s: f64) -> Element {
        self.spectral.apply(|v| Complex64::new(v.powf(s), 0.0))
    }

    pub fn log(&self) -> Element {
        self.spectral.apply(|v| Complex64::new(v.ln(), 0.0))
    }

    /// `φ(x) = τ(dx)`.
    pub fn functional(&self, x: &Element) -> Complex64 {
        (&self.d * x).trace()
    }
}

/// Side of the embedding `a ↦ aφ` (left) or `a ↦ φa` (right).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

/// Kosaki `L^p` norm: `‖a d^{1/p}‖_p` (left) or `‖d^{1/p} a‖_p` (right); `p = ∞` gives `‖a‖_∞`.
pub fn kosaki_norm(a: &Element, d: &StateDensity, p: f64, side: Side) -> Result<f64> {
    check_closed_exponent(p)?;
    a.ensure_same_algebra(&d.d)?;
    if p.is_infinite() {
        return Ok(a.operator_norm());
    }
    let dp = d.power_real(1.0 / p);
    let k = match side {
        Side::Left => a * &dp,
        Side::Right => &dp * a,
    };
    Ok(k.norm_unchecked(p))
}

/// Output of a Kosaki derivation together with its admissibility certificate.
#[derive(Debug, Clone)]
pub struct KosakiDerivation {
    /// `Ω(a)` as a density, homogeneously rescaled to the input.
    pub density: Element,
    /// The Kosaki norm of the input.
    pub norm: f64,
    /// Relative error of `G(θ)` against the normalized input density.
    pub reproduction_error: f64,
    /// Largest sampled boundary norm of the normalized extremal `G`.
    pub boundary_max: f64,
}

fn boundary_samples() -> impl Iterator<Item = f64> {
    (-16..=16).map(|i| i as f64 * 0.25)
}

fn zero_derivation(a: &Element) -> KosakiDerivation {
    KosakiDerivation { density: Element::zeros(a.algebra()), norm: 0.0, reproduction_error: 0.0, boundary_max: 0.0 }
}

fn certify(d: KosakiDerivation) -> Result<KosakiDerivation> {
    if !(d.reproduction_error <= REPRODUCTION_TOLERANCE) {
        return Err(Error::Admissibility(format!("G(theta) misses the input by {:e}", d.reproduction_error)));
    }
    if !(d.boundary_max <= 1.0 + BOUNDARY_TOLERANCE) {
        return Err(Error::Admissibility(format!("boundary norm {} exceeds 1", d.boundary_max)));
    }
    Ok(d)
}

fn relative_gap(x: &Element, y: &Element) -> f64 {
    (x - y).operator_norm() / y.operator_norm().max(f64::MIN_POSITIVE)
}

/// Left Kosaki derivation `Ω^ℓ_p(aφ) = G'(1/p)` in the density picture.
///
/// With `k = a d^{1/p} = v|k|` normalized, `G(z) = v|k|^{pz} d^{1−z}` satisfies `G(1/p) = ad`,
/// `‖G(it)d^{-1}‖_∞ ≤ 1` and `‖G(1+it)‖₁ ≤ 1`; both facts are re-checked numerically.
pub fn kosaki_derivation_left(a: &Element, d: &StateDensity, p: f64) -> Result<KosakiDerivation> {
    check_open_exponent(p)?;
    let norm = kosaki_norm(a, d, p, Side::Left)?;
    if norm == 0.0 {
        return Ok(zero_derivation(a));
    }
    let theta = 1.0 / p;
    let a1 = a.scale_real(1.0 / norm);
    let k = &a1 * &d.power_real(theta);
    let kd = k.abs_decomposition();
    let rest = d.power_real(1.0 - theta);
    let klogk = kd.phased_apply(|s| Complex64::new(p * s * s.ln(), 0.0));
    let g_prime = &(&klogk - &(&k * &d.log())) * &rest;

    let g_theta = &k * &rest;
    let reproduction_error = relative_gap(&g_theta, &(&a1 * &d.d));
    let mut boundary_max: f64 = 0.0;
    for t in boundary_samples() {
        let it = Complex64::new(0.0, t);
        let rot = kd.phased_apply(|s| (it * p * s.ln()).exp());
        let b0 = &rot * &d.power(-it);
        let g1 = &kd.phased_apply(|s| Complex64::new(s.powf(p), 0.0) * (it * p * s.ln()).exp()) * &d.power(-it);
        boundary_max = boundary_max.max(b0.operator_norm()).max(g1.norm_unchecked(1.0));
    }
    certify(KosakiDerivation { density: g_prime.scale_real(norm), norm, reproduction_error, boundary_max })
}

/// Right Kosaki derivation `Ω^r_q(φb) = G'(1/q)` with `k = d^{1/q} b = u|k|` normalized and
/// `G(z) = d^{1−z} u|k|^{qz}`.
pub fn kosaki_derivation_right(b: &Element, d: &StateDensity, q: f64) -> Result<KosakiDerivation> {
    check_open_exponent(q)?;
    let norm = kosaki_norm(b, d, q, Side::Right)?;
    if norm == 0.0 {
        return Ok(zero_derivation(b));
    }
    let theta = 1.0 / q;
    let b1 = b.scale_real(1.0 / norm);
    let k = &d.power_real(theta) * &b1;
    let kd = k.abs_decomposition();
    let rest = d.power_real(1.0 - theta);
    let klogk = kd.phased_apply(|s| Complex64::new(q * s * s.ln(), 0.0));
    let g_prime = &rest * &(&klogk - &(&d.log() * &k));

    let g_theta = &rest * &k;
    let reproduction_error = relative_gap(&g_theta, &(&d.d * &b1));
    let mut boundary_max: f64 = 0.0;
    for t in boundary_samples() {
        let it = Complex64::new(0.0, t);
        let b0 = &d.power(-it) * &kd.phased_apply(|s| (it * q * s.ln()).exp());
        let g1 = &d.power(-it) * &kd.phased_apply(|s| Complex64::new(s.powf(q), 0.0) * (it * q * s.ln()).exp());
        boundary_max = boundary_max.max(b0.operator_norm()).max(g1.norm_unchecked(1.0));
    }
    certify(KosakiDerivation { density: g_prime.scale_real(norm), norm, reproduction_error, boundary_max })
}

/// `(Dφ₀ : Dφ₁)_z = d₀^z d₁^{−z}`.
pub fn cocycle(d0: &StateDensity, d1: &StateDensity, z: Complex64) -> Result<Element> {
    d0.d.ensure_same_algebra(&d1.d)?;
    Ok(&d0.power(z) * &d1.power(-z))
}

/// Change of state `aφ₀ ↦ (a d₀^{1/p} d₁^{−1/p})φ₁` on left Kosaki `L^p`.
pub fn change_of_state(a: &Element, d0: &StateDensity, d1: &StateDensity, p: f64) -> Result<Element> {
    check_open_exponent(p)?;
    a.ensure_same_algebra(&d0.d)?;
    d0.d.ensure_same_algebra(&d1.d)?;
    if d0 == d1 {
        return Ok(a.clone());
    }
    Ok(&(a * &d0.power_real(1.0 / p)) * &d1.power_real(-1.0 / p))
}

/// `β(aφ, φb) = φ(ba) = τ(dba)` on coefficients.
pub fn beta(a: &Element, b: &Element, d: &StateDensity) -> Result<Complex64> {
    a.ensure_same_algebra(b)?;
    a.ensure_same_algebra(&d.d)?;
    Ok((&(&d.d * b) * a).trace())
}

/// A point `(f', f)` of a Kosaki twisted sum, given by coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct KosakiPair {
    pub derivative: Element,
    pub value: Element,
    pub p: f64,
    pub side: Side,
}

/// `u(g', g)(f', f) = β(f, g') + β(f', g)` for a left pair `f` and a right pair `g`.
pub fn kosaki_duality_pairing(f: &KosakiPair, g: &KosakiPair, d: &StateDensity) -> Result<Complex64> {
    if f.side != Side::Left || g.side != Side::Right {
        return Err(Error::Precondition("pair a left module element with a right one".into()));
    }
    check_conjugate(f.p, g.p)?;
    Ok(beta(&f.value, &g.derivative, d)? + beta(&f.derivative, &g.value, d)?)
}

/// `(|β(Ω^ℓ_p f, g) − β(f, Ω^r_q g)|, (π/sin πθ)‖f‖_p‖g‖_q)` with `θ = 1/p`.
pub fn fan_estimate(a: &Element, b: &Element, d: &StateDensity, p: f64) -> Result<(f64, f64)> {
    let q = conjugate(p);
    let left = kosaki_derivation_left(a, d, p)?;
    let right = kosaki_derivation_right(b, d, q)?;
    // β against a density: β(Dφ^{-1}, b) = τ(bD) and β(a, φ^{-1}D') = τ(D'a).
    let lhs = ((b * &left.density).trace() - (&right.density * a).trace()).norm();
    let rhs = PI / (PI / p).sin() * left.norm * right.norm;
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Algebra, Block};
    use crate::centralizers::omega_p;
    use crate::random::Sampler;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn density_validation() {
        let alg = Algebra::matrix(2, 1.0).unwrap();
        assert!(StateDensity::new(Element::real_diagonal(&alg, &[1.0, 0.0]).unwrap()).is_err());
        assert!(StateDensity::with_mass(Element::identity(&alg), 1.0).is_err());
        let s = StateDensity::tracial(&alg).unwrap();
        assert!((s.mass() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn kosaki_norm_examples() {
        let alg = Algebra::new(vec![Block::new(2, 1.0), Block::new(1, 3.0)]).unwrap();
        let mut s = Sampler::new(1);
        let a = s.ginibre(&alg);
        let d = StateDensity::new(s.density(&alg)).unwrap();
        assert_eq!(kosaki_norm(&a, &d, f64::INFINITY, Side::Left).unwrap(), a.operator_norm());
        let one = kosaki_norm(&a, &d, 1.0, Side::Left).unwrap();
        assert!((one - (&a * d.density()).lp_norm(1.0).unwrap()).abs() < 1e-13);

        let alg = Algebra::diagonal(&[1.0, 2.0, 0.5]).unwrap();
        let w = [0.2, 0.3, 0.1];
        let d = StateDensity::new(Element::real_diagonal(&alg, &w).unwrap()).unwrap();
        let av = [Complex64::new(1.0, 2.0), c(-0.5), c(3.0)];
        let a = Element::diagonal(&alg, &av).unwrap();
        let p = 2.5;
        let tw = [1.0, 2.0, 0.5];
        let oracle: f64 = (0..3).map(|i| tw[i] * w[i] * av[i].norm().powf(p)).sum::<f64>().powf(1.0 / p);
        assert!((kosaki_norm(&a, &d, p, Side::Left).unwrap() - oracle).abs() < 1e-13);
        assert!((kosaki_norm(&a, &d, p, Side::Right).unwrap() - oracle).abs() < 1e-13);
    }

    #[test]
    fn tracial_derivation_is_kalton_peck() {
        let alg = Algebra::new(vec![Block::new(2, 0.25), Block::new(2, 0.25)]).unwrap();
        let mut s = Sampler::new(2);
        let d = StateDensity::new(Element::identity(&alg)).unwrap();
        for p in [1.5, 2.0, 3.0] {
            let a = s.ginibre(&alg);
            let left = kosaki_derivation_left(&a, &d, p).unwrap();
            let om = omega_p(&a, p).unwrap();
            assert!((&left.density - &om).max_abs_entry() < 1e-10 * om.max_abs_entry());
            let q = conjugate(p);
            let right = kosaki_derivation_right(&a, &d, q).unwrap();
            let om = omega_p(&a, q).unwrap();
            assert!((&right.density - &om).max_abs_entry() < 1e-10 * om.max_abs_entry());
        }
    }

    #[test]
    fn tracial_derivation_with_mass() {
        let alg = Algebra::matrix(3, 1.0).unwrap();
        let mut s = Sampler::new(3);
        let d = StateDensity::tracial(&alg).unwrap();
        let cst: f64 = 1.0 / 3.0;
        let a = s.positive_definite(&alg);
        let p = 2.0;
        let left = kosaki_derivation_left(&a, &d, p).unwrap();
        let rho = a.scale_real(cst.powf(1.0 / p));
        let expected = (&omega_p(&rho, p).unwrap() - &rho.scale_real(cst.ln())).scale_real(cst.powf(1.0 - 1.0 / p));
        assert!((&left.density - &expected).max_abs_entry() < 1e-10);
    }

    #[test]
    fn commuting_derivation_is_atomwise() {
        let alg = Algebra::diagonal(&[1.0, 1.0, 2.0]).unwrap();
        let w = [0.1, 0.5, 0.2];
        let d = StateDensity::new(Element::real_diagonal(&alg, &w).unwrap()).unwrap();
        let p = 3.0;
        let raw = Element::real_diagonal(&alg, &[0.5, 2.0, 1.0]).unwrap();
        let a = raw.scale_real(1.0 / kosaki_norm(&raw, &d, p, Side::Left).unwrap());
        let out = kosaki_derivation_left(&a, &d, p).unwrap();
        for ((o, f), wi) in out.density.diagonal_entries().iter().zip(a.diagonal_entries()).zip(w) {
            assert!((o.re - p * f.re * f.re.ln() * wi).abs() < 1e-13);
        }
        let alg = Algebra::diagonal(&[1.0; 4]).unwrap();
        let d = StateDensity::tracial(&alg).unwrap();
        let flat = Element::identity(&alg).scale_real(0.7);
        assert!(kosaki_derivation_left(&flat, &d, 2.0).unwrap().density.max_abs_entry() < 1e-14);
        assert!(kosaki_derivation_left(&Element::zeros(&alg), &d, 2.0).unwrap().density.is_zero());
    }

    #[test]
    fn extremal_is_admissible_for_noncommuting_density() {
        let alg = Algebra::matrix(4, 1.0).unwrap();
        let mut s = Sampler::new(4);
        let d = StateDensity::new(s.density(&alg)).unwrap();
        let a = s.ginibre(&alg);
        let out = kosaki_derivation_left(&a, &d, 1.7).unwrap();
        assert!(out.reproduction_error < 1e-12 && out.boundary_max <= 1.0 + 1e-10);
        let out = kosaki_derivation_right(&a, &d, 2.4).unwrap();
        assert!(out.reproduction_error < 1e-12 && out.boundary_max <= 1.0 + 1e-10);
    }

    #[test]
    fn cocycle_examples() {
        let alg = Algebra::matrix(3, 1.0).unwrap();
        let mut s = Sampler::new(5);
        let d0 = StateDensity::new(s.density(&alg)).unwrap();
        let d1 = StateDensity::new(s.density(&alg)).unwrap();
        let d2 = StateDensity::new(s.density(&alg)).unwrap();
        let z = Complex64::new(0.3, 1.1);
        let id = Element::identity(&alg);
        assert!((&cocycle(&d0, &d0, z).unwrap() - &id).max_abs_entry() < 1e-13);
        let u = cocycle(&d0, &d1, Complex64::new(0.0, 2.0)).unwrap();
        assert!((&(&u.adjoint() * &u) - &id).max_abs_entry() < 1e-12);
        assert!((u.operator_norm() - 1.0).abs() < 1e-12);
        let chain = &cocycle(&d0, &d1, z).unwrap() * &cocycle(&d1, &d2, z).unwrap();
        assert!((&chain - &cocycle(&d0, &d2, z).unwrap()).max_abs_entry() < 1e-11);
    }

    #[test]
    fn change_of_state_examples() {
        let alg = Algebra::matrix(4, 1.0).unwrap();
        let mut s = Sampler::new(6);
        let d0 = StateDensity::new(s.density(&alg)).unwrap();
        let d1 = StateDensity::new(s.density(&alg)).unwrap();
        let a = s.ginibre(&alg);
        assert_eq!(change_of_state(&a, &d0, &d0.clone(), 2.0).unwrap(), a);
        let p = 3.0;
        let moved = change_of_state(&a, &d0, &d1, p).unwrap();
        let n0 = kosaki_norm(&a, &d0, p, Side::Left).unwrap();
        let n1 = kosaki_norm(&moved, &d1, p, Side::Left).unwrap();
        assert!((n0 - n1).abs() < 1e-10 * n0);
        let b = s.ginibre(&alg);
        let lhs = change_of_state(&(&b * &a), &d0, &d1, p).unwrap();
        assert!((&lhs - &(&b * &moved)).max_abs_entry() < 1e-12 * lhs.max_abs_entry());
    }

    #[test]
    fn pairing_examples() {
        let alg = Algebra::matrix(3, 1.0).unwrap();
        let mut s = Sampler::new(7);
        let d = StateDensity::new(s.density(&alg)).unwrap();
        let (f1, f0, g1, g0, cc) =
            (s.ginibre(&alg), s.ginibre(&alg), s.ginibre(&alg), s.ginibre(&alg), s.ginibre(&alg));
        let f = KosakiPair { derivative: f1.clone(), value: f0.clone(), p: 3.0, side: Side::Left };
        let g = KosakiPair { derivative: g1.clone(), value: Element::zeros(&alg), p: 1.5, side: Side::Right };
        let u = kosaki_duality_pairing(&f, &g, &d).unwrap();
        assert!((u - beta(&f0, &g1, &d).unwrap()).norm() < 1e-14);
        let lhs = beta(&(&cc * &f0), &g0, &d).unwrap();
        let rhs = beta(&f0, &(&g0 * &cc), &d).unwrap();
        assert!((lhs - rhs).norm() < 1e-12 * lhs.norm().max(1.0));
        let bad = KosakiPair { p: 2.0, ..g.clone() };
        assert!(kosaki_duality_pairing(&f, &bad, &d).is_err());
    }
}
