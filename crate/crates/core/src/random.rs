//! Seeded samplers for random algebras and elements.
//!
//! Every random experiment derives one ChaCha stream per trial from a master seed, so a
//! trial's draw depends only on `(seed, trial)` and never on scheduling.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::algebra::{Algebra, Block, Element, Matrix};

#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Independent substream for trial `index` of an experiment seeded with `seed`.
    pub fn for_trial(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        Self { rng }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Standard complex Gaussian (`E|z|² = 1`).
    pub fn complex_normal(&mut self) -> Complex64 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Complex64::new(self.normal() * s, self.normal() * s)
    }

    /// Log-uniform positive number in `[lo, hi]`.
    pub fn log_uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.uniform(lo.ln(), hi.ln()).exp()
    }

    pub fn ginibre_matrix(&mut self, n: usize) -> Matrix {
        DMatrix::from_fn(n, n, |_, _| self.complex_normal())
    }

    /// Random algebra with `1..=max_blocks` blocks of dimension `1..=max_dim` and
    /// log-uniform weights in `[0.25, 4]`.
    pub fn algebra(&mut self, max_blocks: usize, max_dim: usize) -> Arc<Algebra> {
        let k = 1 + self.index(max_blocks);
        let blocks = (0..k).map(|_| Block::new(1 + self.index(max_dim), self.log_uniform(0.25, 4.0))).collect();
        Algebra::new(blocks).expect("positive weights and dimensions")
    }

    /// Ginibre element: independent standard complex Gaussian entries in every block.
    pub fn ginibre(&mut self, algebra: &Arc<Algebra>) -> Element {
        let blocks = algebra.blocks().iter().map(|b| self.ginibre_matrix(b.dim)).collect();
        Element::from_blocks(algebra, blocks).expect("shapes match")
    }

    /// `(g + g*)/2` for Ginibre `g`.
    pub fn hermitian(&mut self, algebra: &Arc<Algebra>) -> Element {
        let g = self.ginibre(algebra);
        (&g + &g.adjoint()).scale_real(0.5)
    }

    /// `g g* + ε·1`, positive definite.
    pub fn positive_definite(&mut self, algebra: &Arc<Algebra>) -> Element {
        let g = self.ginibre(algebra);
        let eps = Element::identity(algebra).scale_real(0.05);
        &(&g * &g.adjoint()) + &eps
    }

    /// Density matrix of a faithful state: positive definite with `τ(d) = 1`.
    pub fn density(&mut self, algebra: &Arc<Algebra>) -> Element {
        let d = self.positive_definite(algebra);
        let t = d.trace().re;
        d.scale_real(1.0 / t)
    }

    /// Haar-distributed unitary (QR of a Ginibre matrix with phase correction).
    pub fn unitary(&mut self, algebra: &Arc<Algebra>) -> Element {
        let blocks = algebra
            .blocks()
            .iter()
            .map(|b| {
                let qr = self.ginibre_matrix(b.dim).qr();
                let r = qr.r();
                let mut q = qr.q();
                for j in 0..b.dim {
                    let d = r[(j, j)];
                    let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
                    q.column_mut(j).iter_mut().for_each(|z| *z *= phase);
                }
                q
            })
            .collect();
        Element::from_blocks(algebra, blocks).expect("shapes match")
    }

    /// Normal element `u diag(z) u*` with complex Gaussian spectrum.
    pub fn normal_element(&mut self, algebra: &Arc<Algebra>) -> Element {
        let u = self.unitary(algebra);
        let z: Vec<Complex64> = (0..algebra.total_dim()).map(|_| self.complex_normal()).collect();
        let d = Element::diagonal(algebra, &z).expect("length matches");
        &(&u * &d) * &u.adjoint()
    }

    /// Contraction: Ginibre element rescaled to operator norm `≤ 1`.
    pub fn contraction(&mut self, algebra: &Arc<Algebra>) -> Element {
        let g = self.ginibre(algebra);
        let n = g.operator_norm();
        g.scale_real(self.uniform(0.25, 1.0) / n)
    }

    /// Positive diagonal entries, log-uniform in `[lo, hi]`.
    pub fn positive_diagonal(&mut self, algebra: &Arc<Algebra>, lo: f64, hi: f64) -> Element {
        let v: Vec<f64> = (0..algebra.total_dim()).map(|_| self.log_uniform(lo, hi)).collect();
        Element::real_diagonal(algebra, &v).expect("length matches")
    }

    /// Random permutation of `0..n` (Fisher-Yates).
    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut p: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = self.index(i + 1);
            p.swap(i, j);
        }
        p
    }
}
