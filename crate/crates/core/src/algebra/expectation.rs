use num_complex::Complex64;

use super::Element;
use crate::error::{Error, Result};

const PROJECTION_TOLERANCE: f64 = 1e-10;

/// `E(x) = Σᵢ (τ(x eᵢ)/τ(eᵢ)) eᵢ` onto the abelian subalgebra spanned by `partition`.
///
/// The projections must be mutually orthogonal with positive trace; they need not sum
/// to the identity.
pub fn conditional_expectation(x: &Element, partition: &[Element]) -> Result<Element> {
    for (i, e) in partition.iter().enumerate() {
        x.ensure_same_algebra(e)?;
        let defect = (&(e * e) - e).max_abs_entry().max((e - &e.adjoint()).max_abs_entry());
        if defect > PROJECTION_TOLERANCE {
            return Err(Error::InvalidPartition(format!("entry {i} is not a projection (defect {defect:e})")));
        }
        if e.trace().re <= PROJECTION_TOLERANCE {
            return Err(Error::InvalidPartition(format!("entry {i} has zero trace")));
        }
        for (j, f) in partition.iter().enumerate().skip(i + 1) {
            let overlap = (e * f).max_abs_entry();
            if overlap > PROJECTION_TOLERANCE {
                return Err(Error::InvalidPartition(format!("entries {i} and {j} overlap ({overlap:e})")));
            }
        }
    }
    let mut out = Element::zeros(x.algebra());
    for e in partition {
        let coeff: Complex64 = (x * e).trace() / e.trace().re;
        out = &out + &e.scale(coeff);
    }
    Ok(out)
}

impl Element {
    pub fn conditional_expectation(&self, partition: &[Element]) -> Result<Element> {
        conditional_expectation(self, partition)
    }
}
