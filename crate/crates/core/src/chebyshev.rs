//! Gauss-Chebyshev rule in the form used by every analytic integral here:
//!
//! ```text
//! ∫_{s1}^{s2} f(x) dx ≈ π (s2 - s1) / (2N) · Σ_n sqrt(1 - ν_n²) f(χ_n)
//! ν_n = cos((2n - 1) π / (2N)),  χ_n = (s2 - s1) ν_n / 2 + (s2 + s1) / 2
//! ```

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const DEFAULT_ORDER: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::ZeroOrder);
        }
        let n = order as f64;
        let (nodes, weights) = (1..=order)
            .map(|k| {
                let angle = (2.0 * k as f64 - 1.0) * PI / (2.0 * n);
                // sqrt(1 - cos²) == sin on (0, π), without the cancellation.
                (angle.cos(), angle.sin())
            })
            .unzip();
        Ok(QuadratureRule { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Approximates `∫_{s1}^{s2} f`. An empty interval gives exactly 0.
    pub fn integrate<F>(&self, s1: f64, s2: f64, mut f: F) -> Result<f64>
    where
        F: FnMut(f64) -> f64,
    {
        if s2 < s1 || !s1.is_finite() || !s2.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "integration bounds [{s1}, {s2}] are not an ordered finite interval"
            )));
        }
        if s2 == s1 {
            return Ok(0.0);
        }
        let half = 0.5 * (s2 - s1);
        let mid = 0.5 * (s2 + s1);
        let mut sum = 0.0;
        for (&nu, &w) in self.nodes.iter().zip(&self.weights) {
            let x = half * nu + mid;
            let y = f(x);
            if !y.is_finite() {
                return Err(Error::NonFinite { at: x });
            }
            sum += w * y;
        }
        Ok(PI * (s2 - s1) / (2.0 * self.order() as f64) * sum)
    }
}

impl Default for QuadratureRule {
    fn default() -> Self {
        QuadratureRule::new(DEFAULT_ORDER).expect("default order is positive")
    }
}
