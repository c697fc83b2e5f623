use std::num::NonZeroUsize;

use gauss_quad::GaussHermite;

use crate::error::{domain, Result};

pub const DEFAULT_NODES: usize = 33;

/// Gauss–Hermite rule for expectations under the standard normal law,
/// `E[g(W)] ≈ Σ w_k g(ξ_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    /// Rule with `n` nodes; `n` must be odd so that 0 is a node.
    ///
    /// Nodes are sorted and symmetrized, the centre node is set to exactly 0
    /// and the weights are normalized to unit sum, so odd moments vanish up
    /// to rounding.
    pub fn gauss_hermite(n: usize) -> Result<Self> {
        if n.is_multiple_of(2) {
            return domain(format!("quadrature node count must be odd, got {n}"));
        }
        let rule = GaussHermite::new(NonZeroUsize::new(n).unwrap());
        let mut pairs: Vec<(f64, f64)> = rule
            .as_node_weight_pairs()
            .iter()
            .map(|&(x, w)| (x * std::f64::consts::SQRT_2, w))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for k in 0..n / 2 {
            let (lo, hi) = (pairs[k], pairs[n - 1 - k]);
            let x = 0.5 * (hi.0 - lo.0);
            let w = 0.5 * (hi.1 + lo.1);
            nodes[k] = -x;
            nodes[n - 1 - k] = x;
            weights[k] = w;
            weights[n - 1 - k] = w;
        }
        weights[n / 2] = pairs[n / 2].1;
        if weights.iter().any(|&w| !(w > 0.0)) {
            return domain("quadrature produced a nonpositive weight");
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        Ok(QuadratureRule { nodes, weights })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn expect(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * g(x))
            .sum()
    }
}

impl Default for QuadratureRule {
    fn default() -> Self {
        Self::gauss_hermite(DEFAULT_NODES).expect("default rule is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_moments() {
        let q = QuadratureRule::default();
        assert_eq!(q.len(), 33);
        assert_eq!(q.nodes()[16], 0.0);
        assert!((q.expect(|_| 1.0) - 1.0).abs() < 1e-15);
        assert!(q.expect(|x| x).abs() < 1e-15);
        assert!((q.expect(|x| x * x) - 1.0).abs() < 1e-13);
        assert!((q.expect(|x| x.powi(4)) - 3.0).abs() < 1e-12);
        assert!((q.expect(|x| x.powi(6)) - 15.0).abs() < 1e-11);
        // E[exp(θW)] = exp(θ²/2)
        assert!((q.expect(|x| (1.5 * x).exp()) - (1.125f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn even_count_is_rejected() {
        assert!(QuadratureRule::gauss_hermite(10).is_err());
    }
}
