//! Lipschitz scalar functions `ℝ → ℂ` that parameterize Kalton-Peck type centralizers.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Error;

type ScalarClosure = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// A named Lipschitz function, or a closure with a declared Lipschitz constant.
#[derive(Clone)]
pub enum ScalarFn {
    Identity,
    Const(Complex64),
    PosPart,
    NegPart,
    Clip(f64, f64),
    Custom { name: String, lipschitz: f64, f: ScalarClosure },
}

impl ScalarFn {
    pub fn custom(
        name: impl Into<String>,
        lipschitz: f64,
        f: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self::Custom { name: name.into(), lipschitz, f: Arc::new(f) }
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let r = |v: f64| Complex64::new(v, 0.0);
        match self {
            Self::Identity => r(t),
            Self::Const(c) => *c,
            Self::PosPart => r(t.max(0.0)),
            Self::NegPart => r(t.min(0.0)),
            Self::Clip(a, b) => r(t.clamp(*a, *b)),
            Self::Custom { f, .. } => f(t),
        }
    }

    pub fn lipschitz(&self) -> f64 {
        match self {
            Self::Const(_) => 0.0,
            Self::Clip(a, b) if a == b => 0.0,
            Self::Custom { lipschitz, .. } => *lipschitz,
            _ => 1.0,
        }
    }

    /// Whether `φ` is constant, which makes the induced centralizer linear.
    pub fn is_constant(&self) -> bool {
        self.lipschitz() == 0.0
    }
}

/// Custom closures compare equal only when they share the same allocation.
impl PartialEq for ScalarFn {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Self::Identity, Self::Identity) | (Self::PosPart, Self::PosPart) | (Self::NegPart, Self::NegPart) => true,
            (Self::Const(a), Self::Const(b)) => a == b,
            (Self::Clip(a, b), Self::Clip(c, d)) => a == c && b == d,
            (Self::Custom { name: n1, lipschitz: l1, f: f1 }, Self::Custom { name: n2, lipschitz: l2, f: f2 }) => {
                n1 == n2 && l1 == l2 && Arc::ptr_eq(f1, f2)
            }
            _ => false,
        }
    }
}

impl fmt::Debug for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Identity => write!(f, "identity"),
            Self::Const(c) if c.im == 0.0 => write!(f, "const({})", c.re),
            Self::Const(c) => write!(f, "const({},{})", c.re, c.im),
            Self::PosPart => write!(f, "pos_part"),
            Self::NegPart => write!(f, "neg_part"),
            Self::Clip(a, b) => write!(f, "clip({a},{b})"),
            Self::Custom { name, .. } => write!(f, "{name}"),
        }
    }
}

impl FromStr for ScalarFn {
    type Err = Error;

    /// Parses `identity`, `const(c)`, `const(re,im)`, `pos_part`, `neg_part`, `clip(a,b)`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let bad = || Error::Precondition(format!("unknown scalar function `{s}`"));
        let (name, args) = match s.find('(') {
            Some(i) if s.ends_with(')') => (&s[..i], Some(&s[i + 1..s.len() - 1])),
            Some(_) => return Err(bad()),
            None => (s, None),
        };
        let nums = |a: &str| -> Result<Vec<f64>, Error> {
            a.split(',').map(|x| x.trim().parse::<f64>().map_err(|_| bad())).collect()
        };
        match (name.trim(), args) {
            ("identity", None) => Ok(Self::Identity),
            ("pos_part", None) => Ok(Self::PosPart),
            ("neg_part", None) => Ok(Self::NegPart),
            ("const", Some(a)) => match nums(a)?.as_slice() {
                [re] => Ok(Self::Const(Complex64::new(*re, 0.0))),
                [re, im] => Ok(Self::Const(Complex64::new(*re, *im))),
                _ => Err(bad()),
            },
            ("clip", Some(a)) => match nums(a)?.as_slice() {
                [lo, hi] if lo <= hi => Ok(Self::Clip(*lo, *hi)),
                _ => Err(bad()),
            },
            _ => Err(bad()),
        }
    }
}

impl Serialize for ScalarFn {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ScalarFn {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
