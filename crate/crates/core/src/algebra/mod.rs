//! Finite-dimensional semifinite von Neumann algebras.
//!
//! An [`Algebra`] is a finite direct sum of full matrix blocks `M_{n_1} ⊕ … ⊕ M_{n_k}`
//! equipped with the faithful trace `τ(x) = Σ_k w_k Tr(x_k)`. Every finite-dimensional
//! von Neumann algebra with a faithful trace has this form, so the model is exact rather
//! than an approximation. [`Element`]s are block-diagonal complex matrices.

mod expectation;
pub(crate) mod norms;
mod spectral;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use expectation::conditional_expectation;
pub use norms::{MuFunction, MuStep};
pub use spectral::{AbsDecomposition, SpectralData};

pub type Matrix = DMatrix<Complex64>;

/// Relative tolerance under which two eigenvalues are treated as one spectral value.
pub const GROUPING_TOLERANCE: f64 = 1e-9;

/// Relative tolerance for the Hermitian test applied before functional calculus.
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

/// One matrix summand `M_dim` carrying trace weight `weight`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub dim: usize,
    pub weight: f64,
}

impl Block {
    pub fn new(dim: usize, weight: f64) -> Self {
        Self { dim, weight }
    }
}

/// A finite direct sum of weighted matrix blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Algebra {
    blocks: Vec<Block>,
}

impl Algebra {
    /// Validates the block list; every weight must be strictly positive.
    pub fn new(blocks: Vec<Block>) -> Result<Arc<Self>> {
        if blocks.iter().map(|b| b.dim).sum::<usize>() == 0 {
            return Err(Error::InvalidAlgebra("total dimension must be at least 1".into()));
        }
        for (k, b) in blocks.iter().enumerate() {
            if b.dim == 0 {
                return Err(Error::InvalidAlgebra(format!("block {k} has dimension 0")));
            }
            if !(b.weight > 0.0 && b.weight.is_finite()) {
                return Err(Error::InvalidAlgebra(format!("block {k} has non-positive weight {}", b.weight)));
            }
        }
        Ok(Arc::new(Self { blocks }))
    }

    /// A single `dim × dim` block with weight `weight`.
    pub fn matrix(dim: usize, weight: f64) -> Result<Arc<Self>> {
        Self::new(vec![Block::new(dim, weight)])
    }

    /// The commutative algebra `ℓ^∞_n` with atoms of the given trace weights.
    pub fn diagonal(weights: &[f64]) -> Result<Arc<Self>> {
        Self::new(weights.iter().map(|&w| Block::new(1, w)).collect())
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Sum of the block dimensions.
    pub fn total_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.dim).sum()
    }

    /// `τ(1)`.
    pub fn total_mass(&self) -> f64 {
        self.blocks.iter().map(|b| b.weight * b.dim as f64).sum()
    }

    /// Smallest trace of a nonzero projection (the smallest block weight).
    pub fn min_projection_trace(&self) -> f64 {
        self.blocks.iter().map(|b| b.weight).fold(f64::INFINITY, f64::min)
    }
}

pub(crate) fn same_algebra(a: &Arc<Algebra>, b: &Arc<Algebra>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// A block-diagonal complex matrix living in a fixed [`Algebra`].
#[derive(Clone, PartialEq)]
pub struct Element {
    algebra: Arc<Algebra>,
    blocks: Vec<Matrix>,
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Element").field("algebra", &self.algebra.blocks).field("blocks", &self.blocks).finish()
    }
}

impl Element {
    pub fn zeros(algebra: &Arc<Algebra>) -> Self {
        let blocks = algebra.blocks.iter().map(|b| Matrix::zeros(b.dim, b.dim)).collect();
        Self { algebra: algebra.clone(), blocks }
    }

    pub fn identity(algebra: &Arc<Algebra>) -> Self {
        let blocks = algebra.blocks.iter().map(|b| Matrix::identity(b.dim, b.dim)).collect();
        Self { algebra: algebra.clone(), blocks }
    }

    pub fn from_blocks(algebra: &Arc<Algebra>, blocks: Vec<Matrix>) -> Result<Self> {
        if blocks.len() != algebra.num_blocks() {
            return Err(Error::Shape(format!("expected {} blocks, got {}", algebra.num_blocks(), blocks.len())));
        }
        for (k, (m, b)) in blocks.iter().zip(&algebra.blocks).enumerate() {
            if m.nrows() != b.dim || m.ncols() != b.dim {
                return Err(Error::Shape(format!(
                    "block {k} is {}x{}, expected {}x{}",
                    m.nrows(),
                    m.ncols(),
                    b.dim,
                    b.dim
                )));
            }
        }
        Ok(Self { algebra: algebra.clone(), blocks })
    }

    /// Element whose block diagonals, read in block order, are `values`.
    pub fn diagonal(algebra: &Arc<Algebra>, values: &[Complex64]) -> Result<Self> {
        if values.len() != algebra.total_dim() {
            return Err(Error::Shape(format!(
                "expected {} diagonal entries, got {}",
                algebra.total_dim(),
                values.len()
            )));
        }
        let mut it = values.iter();
        let blocks = algebra
            .blocks
            .iter()
            .map(|b| {
                let mut m = Matrix::zeros(b.dim, b.dim);
                for i in 0..b.dim {
                    m[(i, i)] = *it.next().expect("length checked");
                }
                m
            })
            .collect();
        Ok(Self { algebra: algebra.clone(), blocks })
    }

    pub fn real_diagonal(algebra: &Arc<Algebra>, values: &[f64]) -> Result<Self> {
        let v: Vec<Complex64> = values.iter().map(|&r| Complex64::new(r, 0.0)).collect();
        Self::diagonal(algebra, &v)
    }

    /// Rank-one diagonal projection onto the `index`-th basis vector (global numbering).
    pub fn basis_projection(algebra: &Arc<Algebra>, index: usize) -> Result<Self> {
        let n = algebra.total_dim();
        if index >= n {
            return Err(Error::Shape(format!("index {index} out of range for dimension {n}")));
        }
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        v[index] = Complex64::new(1.0, 0.0);
        Self::diagonal(algebra, &v)
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    pub fn blocks(&self) -> &[Matrix] {
        &self.blocks
    }

    pub fn block(&self, k: usize) -> &Matrix {
        &self.blocks[k]
    }

    pub fn into_blocks(self) -> Vec<Matrix> {
        self.blocks
    }

    /// Global diagonal, read block by block.
    pub fn diagonal_entries(&self) -> Vec<Complex64> {
        self.blocks.iter().flat_map(|m| (0..m.nrows()).map(move |i| m[(i, i)])).collect()
    }

    pub fn same_algebra_as(&self, other: &Element) -> bool {
        same_algebra(&self.algebra, &other.algebra)
    }

    pub(crate) fn ensure_same_algebra(&self, other: &Element) -> Result<()> {
        if self.same_algebra_as(other) {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch)
        }
    }

    pub(crate) fn map_blocks(&self, f: impl Fn(&Matrix) -> Matrix) -> Self {
        Self { algebra: self.algebra.clone(), blocks: self.blocks.iter().map(f).collect() }
    }

    fn zip_blocks(&self, other: &Element, f: impl Fn(&Matrix, &Matrix) -> Matrix) -> Self {
        assert!(self.same_algebra_as(other), "elements live in different algebras");
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect();
        Self { algebra: self.algebra.clone(), blocks }
    }

    pub fn adjoint(&self) -> Self {
        self.map_blocks(|m| m.adjoint())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map_blocks(|m| m * c)
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    /// `τ(x) = Σ_k w_k Tr(x_k)`.
    pub fn trace(&self) -> Complex64 {
        self.blocks.iter().zip(&self.algebra.blocks).map(|(m, b)| m.trace() * b.weight).sum()
    }

    /// `xy − yx`.
    pub fn commutator(&self, other: &Element) -> Self {
        self.zip_blocks(other, |a, b| a * b - b * a)
    }

    /// Largest entry modulus over all blocks.
    pub fn max_abs_entry(&self) -> f64 {
        self.blocks.iter().flat_map(|m| m.iter()).map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(|m| m.iter().all(|z| *z == Complex64::new(0.0, 0.0)))
    }

    /// Relative Hermitian defect `max|x − x*| / max|x|` (0 for `x = 0`).
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self.max_abs_entry();
        if scale == 0.0 {
            return 0.0;
        }
        let d = self
            .blocks
            .iter()
            .map(|m| (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        d / scale
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_defect() <= HERMITIAN_TOLERANCE
    }

    pub(crate) fn ensure_hermitian(&self) -> Result<()> {
        let d = self.hermitian_defect();
        if d <= HERMITIAN_TOLERANCE {
            Ok(())
        } else {
            Err(Error::NotHermitian(d))
        }
    }

    /// Whether every block is diagonal (off-diagonal entries exactly zero).
    pub fn is_diagonal(&self) -> bool {
        self.blocks
            .iter()
            .all(|m| (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| i == j || m[(i, j)] == Complex64::new(0.0, 0.0))))
    }
}

impl Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        self.zip_blocks(rhs, |a, b| a + b)
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        self.zip_blocks(rhs, |a, b| a - b)
    }
}

impl Mul for &Element {
    type Output = Element;
    fn mul(self, rhs: &Element) -> Element {
        self.zip_blocks(rhs, |a, b| a * b)
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.map_blocks(|m| -m)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Element> for Element {
            type Output = Element;
            fn $m(self, rhs: Element) -> Element {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Element> for Element {
            type Output = Element;
            fn $m(self, rhs: &Element) -> Element {
                (&self).$m(rhs)
            }
        }
        impl $tr<Element> for &Element {
            type Output = Element;
            fn $m(self, rhs: Element) -> Element {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn trace_of_two_weighted_atoms() {
        let alg = Algebra::diagonal(&[1.0, 2.0]).unwrap();
        let x = Element::real_diagonal(&alg, &[3.0, 1.0]).unwrap();
        assert_eq!(x.trace(), c(5.0));
    }

    #[test]
    fn trace_of_identity_counts_weighted_dimension() {
        let alg = Algebra::new(vec![Block::new(2, 1.0), Block::new(1, 3.0)]).unwrap();
        assert_eq!(Element::identity(&alg).trace(), c(5.0));
        assert_eq!(alg.total_mass(), 5.0);
    }

    #[test]
    fn nilpotent_is_traceless() {
        let alg = Algebra::matrix(2, 1.0).unwrap();
        let m = Matrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]);
        let x = Element::from_blocks(&alg, vec![m]).unwrap();
        assert_eq!(x.trace(), c(0.0));
    }

    #[test]
    fn rejects_degenerate_algebras() {
        assert!(Algebra::new(vec![]).is_err());
        assert!(Algebra::diagonal(&[1.0, 0.0]).is_err());
        assert!(Algebra::diagonal(&[1.0, -2.0]).is_err());
        assert!(Algebra::new(vec![Block::new(0, 1.0)]).is_err());
    }

    #[test]
    fn shape_checks() {
        let alg = Algebra::matrix(2, 1.0).unwrap();
        assert!(Element::from_blocks(&alg, vec![Matrix::zeros(3, 3)]).is_err());
        assert!(Element::diagonal(&alg, &[c(1.0)]).is_err());
    }

    #[test]
    fn adjoint_is_involutive() {
        let alg = Algebra::matrix(2, 1.0).unwrap();
        let m = Matrix::from_row_slice(2, 2, &[Complex64::new(1.0, 2.0), c(3.0), Complex64::new(0.0, -1.0), c(4.0)]);
        let x = Element::from_blocks(&alg, vec![m]).unwrap();
        assert_eq!(x.adjoint().adjoint(), x);
        assert!(!x.is_hermitian());
        assert!((&x + &x.adjoint()).is_hermitian());
    }
}
