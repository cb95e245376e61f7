use std::ops::{Add, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::norms::scaled_power_sum;
use crate::error::{check_closed_exponent, Error, Result};

/// One atom `value·1_A` with `|A| = measure`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "AtomRepr", into = "AtomRepr")]
pub struct Atom {
    pub value: Complex64,
    pub measure: f64,
}

#[derive(Serialize, Deserialize)]
struct AtomRepr {
    re: f64,
    #[serde(default)]
    im: f64,
    measure: f64,
}

impl From<AtomRepr> for Atom {
    fn from(a: AtomRepr) -> Self {
        Atom { value: Complex64::new(a.re, a.im), measure: a.measure }
    }
}

impl From<Atom> for AtomRepr {
    fn from(a: Atom) -> Self {
        AtomRepr { re: a.value.re, im: a.value.im, measure: a.measure }
    }
}

impl Atom {
    pub fn new(value: Complex64, measure: f64) -> Self {
        Self { value, measure }
    }

    pub fn real(value: f64, measure: f64) -> Self {
        Self { value: Complex64::new(value, 0.0), measure }
    }
}

/// A σ-simple function on `ℝ⁺`: atoms laid consecutively from 0 in list order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StepRepr", into = "StepRepr")]
pub struct StepFunction {
    atoms: Vec<Atom>,
}

#[derive(Serialize, Deserialize)]
struct StepRepr {
    atoms: Vec<Atom>,
}

impl TryFrom<StepRepr> for StepFunction {
    type Error = Error;

    fn try_from(r: StepRepr) -> Result<Self> {
        StepFunction::new(r.atoms)
    }
}

impl From<StepFunction> for StepRepr {
    fn from(f: StepFunction) -> Self {
        StepRepr { atoms: f.atoms }
    }
}

/// Atoms sharing one value of `|f|`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSet {
    pub modulus: f64,
    pub atoms: Vec<usize>,
    /// `λ{|f| > modulus}`.
    pub above: f64,
    pub measure: f64,
}

impl StepFunction {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        for (i, a) in atoms.iter().enumerate() {
            if !(a.measure > 0.0 && a.measure.is_finite()) {
                return Err(Error::Precondition(format!("atom {i} has measure {}", a.measure)));
            }
            if !(a.value.re.is_finite() && a.value.im.is_finite()) {
                return Err(Error::Precondition(format!("atom {i} has a non-finite value")));
            }
        }
        Ok(Self { atoms })
    }

    pub fn from_parts(values: &[Complex64], measures: &[f64]) -> Result<Self> {
        if values.len() != measures.len() {
            return Err(Error::Shape(format!("{} values for {} measures", values.len(), measures.len())));
        }
        Self::new(values.iter().zip(measures).map(|(&v, &m)| Atom::new(v, m)).collect())
    }

    pub fn real(values: &[f64], measures: &[f64]) -> Result<Self> {
        let v: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_parts(&v, measures)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn values(&self) -> Vec<Complex64> {
        self.atoms.iter().map(|a| a.value).collect()
    }

    pub fn measures(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.measure).collect()
    }

    pub fn total_measure(&self) -> f64 {
        self.atoms.iter().map(|a| a.measure).sum()
    }

    /// Left endpoint of every atom.
    pub fn starts(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.atoms
            .iter()
            .map(|a| {
                let s = acc;
                acc += a.measure;
                s
            })
            .collect()
    }

    /// Value at position `t`; zero beyond the support.
    pub fn eval(&self, t: f64) -> Complex64 {
        let mut right = 0.0;
        for a in &self.atoms {
            right += a.measure;
            if t < right {
                return a.value;
            }
        }
        Complex64::new(0.0, 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.iter().all(|a| a.value == Complex64::new(0.0, 0.0))
    }

    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        check_closed_exponent(p)?;
        Ok(self.norm_unchecked(p))
    }

    pub(crate) fn norm_unchecked(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.atoms.iter().fold(0.0, |m, a| m.max(a.value.norm()));
        }
        // Summing in sorted order makes the norm exactly rearrangement invariant.
        let mut terms: Vec<(f64, f64)> = self.atoms.iter().map(|a| (a.value.norm(), a.measure)).collect();
        terms.sort_by(|a, b| b.0.total_cmp(&a.0).then(b.1.total_cmp(&a.1)));
        scaled_power_sum(terms.into_iter(), p)
    }

    /// Same atoms, values replaced by `f(value)`.
    pub fn map_values(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self { atoms: self.atoms.iter().map(|a| Atom::new(f(a.value), a.measure)).collect() }
    }

    /// Same atoms with new values.
    pub fn with_values(&self, values: &[Complex64]) -> Result<Self> {
        Self::from_parts(values, &self.measures())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map_values(|v| v * c)
    }

    pub fn re(&self) -> Self {
        self.map_values(|v| Complex64::new(v.re, 0.0))
    }

    pub fn im(&self) -> Self {
        self.map_values(|v| Complex64::new(v.im, 0.0))
    }

    pub fn same_partition(&self, other: &StepFunction) -> bool {
        self.len() == other.len() && self.atoms.iter().zip(&other.atoms).all(|(a, b)| a.measure == b.measure)
    }

    /// `f∘π`: atom `i` of the result carries the value of atom `perm[i]`. Only atoms of
    /// equal measure may be exchanged, so the permutation comes from a measure-preserving
    /// automorphism of `ℝ⁺`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.len())?;
        for (i, &j) in perm.iter().enumerate() {
            if self.atoms[i].measure != self.atoms[j].measure {
                return Err(Error::InvalidPermutation(format!(
                    "atoms {i} and {j} have measures {} and {}",
                    self.atoms[i].measure, self.atoms[j].measure
                )));
            }
        }
        Ok(Self { atoms: perm.iter().map(|&j| self.atoms[j]).collect() })
    }

    /// Level sets of `|f|`, ordered by decreasing modulus. Equal moduli are detected exactly.
    pub fn level_sets(&self) -> Vec<LevelSet> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| self.atoms[b].value.norm().total_cmp(&self.atoms[a].value.norm()));
        let mut sets: Vec<LevelSet> = Vec::new();
        let mut above = 0.0;
        for i in order {
            let m = self.atoms[i].value.norm();
            match sets.last_mut() {
                Some(s) if s.modulus == m => {
                    s.atoms.push(i);
                    s.measure += self.atoms[i].measure;
                }
                _ => {
                    if let Some(s) = sets.last() {
                        above += s.measure;
                    }
                    sets.push(LevelSet { modulus: m, atoms: vec![i], above, measure: self.atoms[i].measure });
                }
            }
        }
        for s in &mut sets {
            s.atoms.sort_unstable();
        }
        sets
    }
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::InvalidPermutation(format!("length {} for {n} atoms", perm.len())));
    }
    let mut seen = vec![false; n];
    for &j in perm {
        if j >= n || std::mem::replace(&mut seen[j], true) {
            return Err(Error::InvalidPermutation(format!("{perm:?} is not a permutation")));
        }
    }
    Ok(())
}

fn zip_values(a: &StepFunction, b: &StepFunction, op: impl Fn(Complex64, Complex64) -> Complex64) -> StepFunction {
    assert!(a.same_partition(b), "step functions live on different partitions");
    StepFunction {
        atoms: a.atoms.iter().zip(&b.atoms).map(|(x, y)| Atom::new(op(x.value, y.value), x.measure)).collect(),
    }
}

impl Add for &StepFunction {
    type Output = StepFunction;
    fn add(self, rhs: Self) -> StepFunction {
        zip_values(self, rhs, |a, b| a + b)
    }
}

impl Sub for &StepFunction {
    type Output = StepFunction;
    fn sub(self, rhs: Self) -> StepFunction {
        zip_values(self, rhs, |a, b| a - b)
    }
}

/// `r_f` restricted to the atoms: on atom `i`, `r_f(t) = offsets[i] + (t − starts[i])`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankFunction {
    pub offsets: Vec<f64>,
    pub starts: Vec<f64>,
    pub measures: Vec<f64>,
}

impl RankFunction {
    pub fn eval(&self, t: f64) -> Option<f64> {
        (0..self.offsets.len())
            .find(|&i| t >= self.starts[i] && t < self.starts[i] + self.measures[i])
            .map(|i| self.offsets[i] + (t - self.starts[i]))
    }

    /// `r_f` at the right end of every atom.
    pub fn right_endpoints(&self) -> Vec<f64> {
        self.offsets.iter().zip(&self.measures).map(|(o, m)| o + m).collect()
    }
}

/// `r_f(t) = λ{s : |f(s)| > |f(t)|} + λ{s ≤ t : |f(s)| = |f(t)|}`.
pub fn rank_function(f: &StepFunction) -> RankFunction {
    let mut offsets = vec![0.0; f.len()];
    for set in f.level_sets() {
        let mut acc = set.above;
        for &i in &set.atoms {
            offsets[i] = acc;
            acc += f.atoms[i].measure;
        }
    }
    RankFunction { offsets, starts: f.starts(), measures: f.measures() }
}

/// Decreasing rearrangement of `|f|`, equal values merged into one atom.
pub fn rearrangement(f: &StepFunction) -> StepFunction {
    let atoms = f.level_sets().into_iter().map(|s| Atom::real(s.modulus, s.measure)).collect();
    StepFunction { atoms }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step(values: &[f64], measures: &[f64]) -> StepFunction {
        StepFunction::real(values, measures).unwrap()
    }

    #[test]
    fn rank_function_examples() {
        let r = rank_function(&step(&[3.0, 1.0, 2.0], &[1.0, 1.0, 1.0]));
        assert_eq!(r.right_endpoints(), vec![1.0, 3.0, 2.0]);
        let r = rank_function(&step(&[5.0], &[1.0]));
        assert_eq!(r.eval(0.25), Some(0.25));
        let r = rank_function(&step(&[2.0, 2.0], &[1.0, 2.0]));
        assert_eq!(r.right_endpoints(), vec![1.0, 3.0]);
    }

    /// `r_f` at the right end of atom `i` from the defining set measures, summed over all
    /// pairs of atoms.
    #[test]
    fn rank_function_matches_set_measure_oracle() {
        let f = step(&[2.0, -3.0, 2.0, 0.5, -2.0], &[0.5, 1.0, 2.0, 0.25, 1.5]);
        let starts = f.starts();
        let r = rank_function(&f);
        for i in 0..f.len() {
            let ti = starts[i] + f.atoms[i].measure;
            let vi = f.atoms[i].value.norm();
            let mut oracle = 0.0;
            for (j, a) in f.atoms.iter().enumerate() {
                let vj = a.value.norm();
                if vj > vi {
                    oracle += a.measure;
                } else if vj == vi {
                    oracle += (ti.min(starts[j] + a.measure) - starts[j]).max(0.0);
                }
            }
            assert_eq!(r.right_endpoints()[i], oracle);
        }
    }

    #[test]
    fn rearrangement_examples() {
        let r = rearrangement(&step(&[1.0, 3.0, 2.0], &[1.0, 1.0, 1.0]));
        assert_eq!(r, step(&[3.0, 2.0, 1.0], &[1.0, 1.0, 1.0]));
        let dec = step(&[3.0, 2.0], &[1.0, 4.0]);
        assert_eq!(rearrangement(&dec), dec);
        assert_eq!(rearrangement(&step(&[2.0, 2.0], &[1.0, 1.0])), step(&[2.0], &[2.0]));
    }

    #[test]
    fn permutation_must_preserve_measure() {
        let f = step(&[1.0, 2.0, 3.0], &[1.0, 1.0, 2.0]);
        assert_eq!(f.permute(&[1, 0, 2]).unwrap(), step(&[2.0, 1.0, 3.0], &[1.0, 1.0, 2.0]));
        assert!(matches!(f.permute(&[2, 1, 0]), Err(Error::InvalidPermutation(_))));
        assert!(f.permute(&[0, 0, 2]).is_err());
    }

    #[test]
    fn serde_shape() {
        let f = StepFunction::from_parts(&[Complex64::new(1.0, -2.0)], &[0.5]).unwrap();
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(json, r#"{"atoms":[{"re":1.0,"im":-2.0,"measure":0.5}]}"#);
        let back: StepFunction = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f);
        assert!(serde_json::from_str::<StepFunction>(r#"{"atoms":[{"re":1.0,"measure":0.0}]}"#).is_err());
    }

    #[test]
    fn norms() {
        let f = step(&[3.0, -4.0], &[1.0, 1.0]);
        assert_eq!(f.lp_norm(2.0).unwrap(), 5.0);
        assert_eq!(f.lp_norm(f64::INFINITY).unwrap(), 4.0);
        assert!(f.lp_norm(0.9).is_err());
    }
}
