//! Spectral decompositions: Hermitian functional calculus and the polar / singular-value
//! picture `x = u|x|`.

use std::sync::Arc;

use num_complex::Complex64;

use super::{Algebra, Element, Matrix, GROUPING_TOLERANCE};
use crate::error::Result;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Chain-groups `values` (any order): members of a group are within `tol` of a neighbour.
/// Returns the group means in ascending order and the group of every input value.
fn group_values(values: &[f64], tol: f64) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut means = Vec::new();
    let mut group_of = vec![0; values.len()];
    let mut sum = 0.0;
    let mut count = 0usize;
    let mut last = f64::NEG_INFINITY;
    for &i in &order {
        let v = values[i];
        if count > 0 && v - last > tol {
            means.push(sum / count as f64);
            sum = 0.0;
            count = 0;
        }
        group_of[i] = means.len();
        sum += v;
        count += 1;
        last = v;
    }
    if count > 0 {
        means.push(sum / count as f64);
    }
    (means, group_of)
}

/// `V diag(d) V*`.
fn conjugate_diag(v: &Matrix, d: &[Complex64]) -> Matrix {
    let mut scaled = v.clone();
    for (j, &dj) in d.iter().enumerate() {
        scaled.column_mut(j).iter_mut().for_each(|z| *z *= dj);
    }
    scaled * v.adjoint()
}

/// `W diag(d) V*`.
fn outer_diag(w: &Matrix, v: &Matrix, d: &[Complex64]) -> Matrix {
    let mut scaled = w.clone();
    for (j, &dj) in d.iter().enumerate() {
        scaled.column_mut(j).iter_mut().for_each(|z| *z *= dj);
    }
    scaled * v.adjoint()
}

/// Spectral resolution `x = Σ_j λ_j e_j` of a Hermitian element, with eigenvalues closer
/// than `1e-9·‖x‖_∞` merged into a single spectral projection.
#[derive(Debug, Clone)]
pub struct SpectralData {
    algebra: Arc<Algebra>,
    values: Vec<f64>,
    tolerance: f64,
    vectors: Vec<Matrix>,
    groups: Vec<Vec<usize>>,
}

impl SpectralData {
    /// Fails with [`crate::Error::NotHermitian`] unless `x = x*` within tolerance.
    pub fn of(x: &Element) -> Result<Self> {
        x.ensure_hermitian()?;
        let mut vectors = Vec::with_capacity(x.blocks.len());
        let mut raw = Vec::new();
        for m in &x.blocks {
            if m.nrows() == 1 {
                raw.push(m[(0, 0)].re);
                vectors.push(Matrix::from_element(1, 1, ONE));
                continue;
            }
            let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
            let eig = h.symmetric_eigen();
            raw.extend(eig.eigenvalues.iter().copied());
            vectors.push(eig.eigenvectors);
        }
        let scale = raw.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let tolerance = GROUPING_TOLERANCE * scale;
        let (values, flat) = group_values(&raw, tolerance);
        let mut groups = Vec::with_capacity(vectors.len());
        let mut it = flat.into_iter();
        for v in &vectors {
            groups.push(it.by_ref().take(v.ncols()).collect());
        }
        Ok(Self { algebra: x.algebra.clone(), values, tolerance, vectors, groups })
    }

    /// Distinct spectral values in increasing order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Spectral projection attached to `values()[j]`.
    pub fn projection(&self, j: usize) -> Element {
        self.assemble_groups(|g| if g == j { ONE } else { ZERO })
    }

    pub fn projections(&self) -> Vec<Element> {
        (0..self.values.len()).map(|j| self.projection(j)).collect()
    }

    /// `f(x) = Σ_j f(λ_j) e_j`.
    pub fn apply(&self, f: impl Fn(f64) -> Complex64) -> Element {
        let fv: Vec<Complex64> = self.values.iter().map(|&v| f(v)).collect();
        self.assemble_groups(|g| fv[g])
    }

    /// `Σ_j s_j e_j` for per-projection coefficients `s`.
    pub fn combine(&self, s: &[Complex64]) -> Element {
        assert_eq!(s.len(), self.values.len(), "one coefficient per spectral projection");
        self.assemble_groups(|g| s[g])
    }

    pub fn reconstruct(&self) -> Element {
        self.apply(|v| Complex64::new(v, 0.0))
    }

    /// `Σ_j e_j y e_j`: the part of `y` commuting with every spectral projection.
    pub fn compress(&self, y: &Element) -> Element {
        assert!(super::same_algebra(&self.algebra, &y.algebra), "elements live in different algebras");
        let blocks = y
            .blocks
            .iter()
            .zip(self.vectors.iter().zip(&self.groups))
            .map(|(m, (v, g))| {
                let mut inner = v.adjoint() * m * v;
                for i in 0..g.len() {
                    for k in 0..g.len() {
                        if g[i] != g[k] {
                            inner[(i, k)] = ZERO;
                        }
                    }
                }
                v * inner * v.adjoint()
            })
            .collect();
        Element { algebra: self.algebra.clone(), blocks }
    }

    fn assemble_groups(&self, coeff: impl Fn(usize) -> Complex64) -> Element {
        let blocks = self
            .vectors
            .iter()
            .zip(&self.groups)
            .map(|(v, g)| {
                let d: Vec<Complex64> = g.iter().map(|&j| coeff(j)).collect();
                conjugate_diag(v, &d)
            })
            .collect();
        Element { algebra: self.algebra.clone(), blocks }
    }
}

/// Singular-value picture of an arbitrary element: `x = u|x|`, `|x| = Σ_j σ_j e_j`, with
/// `σ_1 > σ_2 > … > 0` and the kernel of `|x|` kept separately.
///
/// Built from a per-block SVD `x_k = W_k Σ_k V_k*`, so `|x_k| = V_k Σ_k V_k*` and the
/// phase is `u_k = Σ_{σ_i > 0} w_i v_i*`. Singular values below `1e-9·‖x‖_∞` are treated
/// as kernel.
#[derive(Debug, Clone)]
pub struct AbsDecomposition {
    algebra: Arc<Algebra>,
    values: Vec<f64>,
    widths: Vec<f64>,
    tolerance: f64,
    left: Vec<Matrix>,
    right: Vec<Matrix>,
    groups: Vec<Vec<Option<usize>>>,
}

impl AbsDecomposition {
    pub fn of(x: &Element) -> Self {
        let mut left = Vec::with_capacity(x.blocks.len());
        let mut right = Vec::with_capacity(x.blocks.len());
        let mut raw: Vec<(f64, usize)> = Vec::new();
        for (k, m) in x.blocks.iter().enumerate() {
            if m.nrows() == 1 {
                let z = m[(0, 0)];
                let r = z.norm();
                let phase = if r > 0.0 { z / r } else { ONE };
                raw.push((r, k));
                left.push(Matrix::from_element(1, 1, phase));
                right.push(Matrix::from_element(1, 1, ONE));
                continue;
            }
            let svd = m.clone().svd(true, true);
            let w = svd.u.expect("requested U");
            let v = svd.v_t.expect("requested V*").adjoint();
            raw.extend(svd.singular_values.iter().map(|&s| (s, k)));
            left.push(w);
            right.push(v);
        }
        let smax = raw.iter().fold(0.0f64, |a, &(s, _)| a.max(s));
        let tolerance = GROUPING_TOLERANCE * smax;
        let positive: Vec<f64> = raw.iter().map(|&(s, _)| s).filter(|&s| s > tolerance).collect();
        let (ascending, group_of) = group_values(&positive, tolerance);
        let n = ascending.len();
        // Re-index so that group 0 carries the largest singular value.
        let values: Vec<f64> = ascending.iter().rev().copied().collect();
        let mut widths = vec![0.0; n];
        let mut groups: Vec<Vec<Option<usize>>> = left.iter().map(|w| Vec::with_capacity(w.ncols())).collect();
        let mut pos = group_of.into_iter();
        for &(s, k) in &raw {
            if s > tolerance {
                let g = n - 1 - pos.next().expect("one group per positive value");
                widths[g] += x.algebra.blocks[k].weight;
                groups[k].push(Some(g));
            } else {
                groups[k].push(None);
            }
        }
        Self { algebra: x.algebra.clone(), values, widths, tolerance, left, right, groups }
    }

    /// Distinct nonzero singular values, strictly decreasing.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `τ(e_j)` for each spectral projection of `|x|` (kernel excluded).
    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `|x| = (x*x)^{1/2}`.
    pub fn abs(&self) -> Element {
        self.abs_apply(|s| Complex64::new(s, 0.0))
    }

    /// The partial isometry `u` of the polar decomposition; it vanishes on `ker|x|`.
    pub fn phase(&self) -> Element {
        self.phased_combine(&vec![ONE; self.values.len()])
    }

    /// `f(|x|)`, with `f(0)` applied on the kernel.
    pub fn abs_apply(&self, f: impl Fn(f64) -> Complex64) -> Element {
        let fv: Vec<Complex64> = self.values.iter().map(|&s| f(s)).collect();
        let f0 = f(0.0);
        let blocks = self
            .right
            .iter()
            .zip(&self.groups)
            .map(|(v, g)| {
                let d: Vec<Complex64> = g.iter().map(|j| j.map_or(f0, |j| fv[j])).collect();
                conjugate_diag(v, &d)
            })
            .collect();
        Element { algebra: self.algebra.clone(), blocks }
    }

    /// `u · Σ_j s_j e_j` for per-projection coefficients `s` (kernel contributes nothing).
    pub fn phased_combine(&self, s: &[Complex64]) -> Element {
        assert_eq!(s.len(), self.values.len(), "one coefficient per spectral projection");
        let blocks = self
            .left
            .iter()
            .zip(self.right.iter().zip(&self.groups))
            .map(|(w, (v, g))| {
                let d: Vec<Complex64> = g.iter().map(|j| j.map_or(ZERO, |j| s[j])).collect();
                outer_diag(w, v, &d)
            })
            .collect();
        Element { algebra: self.algebra.clone(), blocks }
    }

    /// `u · f(|x|)` where only the nonzero spectrum of `|x|` is used.
    pub fn phased_apply(&self, f: impl Fn(f64) -> Complex64) -> Element {
        let s: Vec<Complex64> = self.values.iter().map(|&v| f(v)).collect();
        self.phased_combine(&s)
    }

    /// Spectral projection of `|x|` attached to `values()[j]`.
    pub fn projection(&self, j: usize) -> Element {
        self.projection_where(|g| g == Some(j))
    }

    /// Projection onto `ker |x|`.
    pub fn kernel_projection(&self) -> Element {
        self.projection_where(|g| g.is_none())
    }

    fn projection_where(&self, pick: impl Fn(Option<usize>) -> bool) -> Element {
        let blocks = self
            .right
            .iter()
            .zip(&self.groups)
            .map(|(v, g)| {
                let d: Vec<Complex64> = g.iter().map(|&j| if pick(j) { ONE } else { ZERO }).collect();
                conjugate_diag(v, &d)
            })
            .collect();
        Element { algebra: self.algebra.clone(), blocks }
    }
}

impl Element {
    /// Hermitian spectral resolution; see [`SpectralData`].
    pub fn spectral(&self) -> Result<SpectralData> {
        SpectralData::of(self)
    }

    /// Functional calculus `f(x)` for Hermitian `x`.
    pub fn func_calc(&self, f: impl Fn(f64) -> Complex64) -> Result<Element> {
        Ok(SpectralData::of(self)?.apply(f))
    }

    /// Real-valued functional calculus.
    pub fn func_calc_real(&self, f: impl Fn(f64) -> f64) -> Result<Element> {
        self.func_calc(|t| Complex64::new(f(t), 0.0))
    }

    pub fn abs_decomposition(&self) -> AbsDecomposition {
        AbsDecomposition::of(self)
    }

    /// `|x| = (x*x)^{1/2}`.
    pub fn abs(&self) -> Element {
        self.abs_decomposition().abs()
    }

    /// Polar decomposition `x = u|x|`; returns `(u, |x|)`.
    pub fn polar(&self) -> (Element, Element) {
        let d = self.abs_decomposition();
        (d.phase(), d.abs())
    }
}
