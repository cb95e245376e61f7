use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::step::{rank_function, StepFunction};
use crate::error::{check_open_exponent, Error, Result};
use crate::quadrature::integrate;
use crate::scalar::ScalarFn;

pub type TwoVariableFn = Arc<dyn Fn(f64, f64) -> Complex64 + Send + Sync>;
pub type StepMap = Arc<dyn Fn(&StepFunction) -> Result<StepFunction> + Send + Sync>;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Homogeneous maps on step functions.
#[derive(Clone)]
pub enum CommCentralizer {
    /// `Ω_p(f) = p f log(|f|/‖f‖_p)`.
    KaltonPeck {
        p: f64,
    },
    /// `f φ(p log(|f|/‖f‖_p))`.
    Lipschitz {
        p: f64,
        phi: ScalarFn,
    },
    /// `f φ(log(|f|/‖f‖_p), log r_f)`, made lazy by averaging over level sets of `|f|`.
    TwoVariable {
        p: f64,
        phi: TwoVariableFn,
    },
    /// `f ı⁺(log(|f|/‖f‖_p))` with `ı⁺(t) = max(0, t)`.
    PhiPlus {
        p: f64,
    },
    /// `f ı⁻(log(|f|/‖f‖_p))` with `ı⁻(t) = min(0, t)`.
    PhiMinus {
        p: f64,
    },
    Custom {
        name: String,
        p: f64,
        lazy: bool,
        map: StepMap,
    },
}

impl fmt::Debug for CommCentralizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Lipschitz { p, phi } => write!(f, "lipschitz(p={p}, phi={phi})"),
            _ => write!(f, "{}(p={})", self.name(), self.p()),
        }
    }
}

impl CommCentralizer {
    pub fn two_variable(p: f64, phi: impl Fn(f64, f64) -> Complex64 + Send + Sync + 'static) -> Self {
        Self::TwoVariable { p, phi: Arc::new(phi) }
    }

    pub fn custom(
        name: impl Into<String>,
        p: f64,
        lazy: bool,
        map: impl Fn(&StepFunction) -> Result<StepFunction> + Send + Sync + 'static,
    ) -> Self {
        Self::Custom { name: name.into(), p, lazy, map: Arc::new(map) }
    }

    pub fn name(&self) -> &str {
        match self {
            Self::KaltonPeck { .. } => "kalton_peck",
            Self::Lipschitz { .. } => "lipschitz",
            Self::TwoVariable { .. } => "two_variable",
            Self::PhiPlus { .. } => "phi_plus",
            Self::PhiMinus { .. } => "phi_minus",
            Self::Custom { name, .. } => name,
        }
    }

    pub fn p(&self) -> f64 {
        match self {
            Self::KaltonPeck { p }
            | Self::Lipschitz { p, .. }
            | Self::TwoVariable { p, .. }
            | Self::PhiPlus { p }
            | Self::PhiMinus { p }
            | Self::Custom { p, .. } => *p,
        }
    }

    /// Whether `Φ(f)` is constant on the level sets of `f`.
    pub fn is_lazy(&self) -> bool {
        match self {
            Self::Custom { lazy, .. } => *lazy,
            _ => true,
        }
    }

    pub fn apply(&self, f: &StepFunction) -> Result<StepFunction> {
        let p = self.p();
        check_open_exponent(p)?;
        let out = match self {
            Self::KaltonPeck { p } => atomwise(f, *p, |a| Complex64::new(p * a, 0.0)),
            Self::Lipschitz { p, phi } => atomwise(f, *p, |a| phi.eval(p * a)),
            Self::PhiPlus { p } => atomwise(f, *p, |a| Complex64::new(a.max(0.0), 0.0)),
            Self::PhiMinus { p } => atomwise(f, *p, |a| Complex64::new(a.min(0.0), 0.0)),
            Self::TwoVariable { p, phi } => kp_two_variable(f, *p, phi.as_ref(), true)?,
            Self::Custom { map, .. } => map(f)?,
        };
        if !out.same_partition(f) {
            return Err(Error::Shape(format!("centralizer `{}` changed the atom partition", self.name())));
        }
        Ok(out)
    }
}

/// `fᵢ·g(log(|fᵢ|/‖f‖_p))` on every atom, with `0·g(−∞) := 0`.
fn atomwise(f: &StepFunction, p: f64, g: impl Fn(f64) -> Complex64) -> StepFunction {
    let n = f.norm_unchecked(p);
    if n == 0.0 {
        return f.map_values(|_| ZERO);
    }
    f.map_values(|v| if v == ZERO { ZERO } else { v * g((v.norm() / n).ln()) })
}

fn average_tolerance(width: f64) -> f64 {
    1e-14 * width.max(1e-300)
}

/// Mean of `φ(a, log s)` over `s ∈ [lo, lo + width]`.
fn log_rank_mean(phi: &(dyn Fn(f64, f64) -> Complex64 + Send + Sync), a: f64, lo: f64, width: f64) -> Complex64 {
    let scale = 1.0 + phi(a, (lo + 0.5 * width).ln()).norm();
    integrate(|s| phi(a, s.ln()), lo, lo + width, average_tolerance(width) * scale) / width
}

/// Two-variable Kalton-Peck map `f·φ(log(|f|/‖f‖_p), log r_f)`.
///
/// With `lazy`, the multiplier is averaged over each level set of `|f|`; since `r_f` maps a
/// level set measure-preservingly onto `[M, M + W]` (`M = λ{|f| > a}`, `W` its measure) the
/// average is `(1/W)∫_M^{M+W} φ(a, log s) ds`. Otherwise it is averaged over each atom
/// separately, where `r_f` runs through `[mᵢ, mᵢ + |Aᵢ|]`.
pub fn kp_two_variable(
    f: &StepFunction,
    p: f64,
    phi: &(dyn Fn(f64, f64) -> Complex64 + Send + Sync),
    lazy: bool,
) -> Result<StepFunction> {
    check_open_exponent(p)?;
    let n = f.norm_unchecked(p);
    let mut values = vec![ZERO; f.len()];
    if n == 0.0 {
        return f.with_values(&values);
    }
    if lazy {
        for set in f.level_sets() {
            if set.modulus == 0.0 {
                continue;
            }
            let m = log_rank_mean(phi, (set.modulus / n).ln(), set.above, set.measure);
            for &i in &set.atoms {
                values[i] = f.atoms()[i].value * m;
            }
        }
    } else {
        let r = rank_function(f);
        for (i, atom) in f.atoms().iter().enumerate() {
            if atom.value != ZERO {
                let a = (atom.value.norm() / n).ln();
                values[i] = atom.value * log_rank_mean(phi, a, r.offsets[i], atom.measure);
            }
        }
    }
    f.with_values(&values)
}

/// The raw pointwise expression `t ↦ f(t)·φ(log(|f(t)|/‖f‖_p), log r_f(t))`.
pub fn kp_two_variable_pointwise<'a>(
    f: &'a StepFunction,
    p: f64,
    phi: &'a (dyn Fn(f64, f64) -> Complex64 + Send + Sync),
) -> impl Fn(f64) -> Complex64 + 'a {
    let n = f.norm_unchecked(p);
    let r = rank_function(f);
    move |t| {
        let v = f.eval(t);
        match r.eval(t) {
            Some(rt) if v != ZERO => v * phi((v.norm() / n).ln(), rt.ln()),
            _ => ZERO,
        }
    }
}

/// `E^{𝒜(|f|)}(g)`: averages the pointwise expression `g` over every level set of `|f|`.
pub fn laziness_project(g: impl Fn(f64) -> Complex64, f: &StepFunction) -> Result<StepFunction> {
    let starts = f.starts();
    let mut values = vec![ZERO; f.len()];
    for set in f.level_sets() {
        let total: Complex64 = set
            .atoms
            .iter()
            .map(|&i| {
                let w = f.atoms()[i].measure;
                let scale = 1.0 + g(starts[i] + 0.5 * w).norm();
                integrate(&g, starts[i], starts[i] + w, average_tolerance(w) * scale)
            })
            .sum();
        let mean = total / set.measure;
        for &i in &set.atoms {
            values[i] = mean;
        }
    }
    f.with_values(&values)
}

/// [`laziness_project`] for a step function `g` on the same atoms as `f`.
pub fn laziness_project_step(g: &StepFunction, f: &StepFunction) -> Result<StepFunction> {
    if !g.same_partition(f) {
        return Err(Error::Shape("expression and input live on different partitions".into()));
    }
    let mut values = vec![ZERO; f.len()];
    for set in f.level_sets() {
        let total: Complex64 = set.atoms.iter().map(|&i| g.atoms()[i].value * g.atoms()[i].measure).sum();
        let mean = total / set.measure;
        for &i in &set.atoms {
            values[i] = mean;
        }
    }
    f.with_values(&values)
}

/// `‖Φ(f∘π) − (Φf)∘π‖_p / ‖f‖_p` for a permutation of equal-measure atoms.
pub fn symmetry_defect(phi: &CommCentralizer, f: &StepFunction, perm: &[usize]) -> Result<f64> {
    let moved = f.permute(perm)?;
    let n = f.lp_norm(phi.p())?;
    if n == 0.0 {
        return Ok(0.0);
    }
    let lhs = phi.apply(&moved)?;
    let rhs = phi.apply(f)?.permute(perm)?;
    Ok((&lhs - &rhs).norm_unchecked(phi.p()) / n)
}

/// `Φ₁(f) = ℜΦ(ℜf) + iℜΦ(ℑf)` and `Φ₂(f) = ℑΦ(ℜf) − iℑΦ(ℑf)`.
pub fn real_decomposition(phi: &CommCentralizer) -> (CommCentralizer, CommCentralizer) {
    let (p, lazy) = (phi.p(), phi.is_lazy());
    let a = Arc::new(phi.clone());
    let b = a.clone();
    let one = CommCentralizer::custom(format!("re[{}]", phi.name()), p, lazy, move |f| {
        let (x, y) = (a.apply(&f.re())?, a.apply(&f.im())?);
        x.with_values(&x.values().iter().zip(y.values()).map(|(u, v)| Complex64::new(u.re, v.re)).collect::<Vec<_>>())
    });
    let two = CommCentralizer::custom(format!("im[{}]", phi.name()), p, lazy, move |f| {
        let (x, y) = (b.apply(&f.re())?, b.apply(&f.im())?);
        x.with_values(&x.values().iter().zip(y.values()).map(|(u, v)| Complex64::new(u.im, -v.im)).collect::<Vec<_>>())
    });
    (one, two)
}
