use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

use crate::config::BoxConfig;
use crate::error::{Error, Result};
use crate::C64;

pub const DEFAULT_PANELS: usize = 32;
pub const DEFAULT_NODES_PER_PANEL: usize = 64;

/// Composite Gauss-Legendre rule on the box.
///
/// Nodes are stored panel by panel in increasing order, so a slice of
/// samples taken at [`Quadrature::nodes`] can be interpolated inside each
/// panel with the barycentric weights of the reference rule.
#[derive(Debug, Clone)]
pub struct Quadrature {
    cfg: BoxConfig,
    panels: usize,
    nodes_per_panel: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    reference: Vec<f64>,
    bary: Vec<f64>,
}

impl Quadrature {
    pub fn new(cfg: BoxConfig, panels: usize, nodes_per_panel: usize) -> Result<Self> {
        if panels == 0 || nodes_per_panel == 0 || panels * nodes_per_panel < 256 {
            return Err(Error::Config(format!(
                "quadrature needs at least 256 nodes, got {panels} x {nodes_per_panel}"
            )));
        }
        let rule = GaussLegendre::new(NonZeroUsize::new(nodes_per_panel).expect("nonzero"));
        let mut pairs: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let reference: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let bary: Vec<f64> = pairs
            .iter()
            .enumerate()
            .map(|(j, &(x, w))| {
                let s = ((1.0 - x * x) * w).sqrt();
                if j % 2 == 0 {
                    s
                } else {
                    -s
                }
            })
            .collect();

        let width = cfg.l / panels as f64;
        let mut nodes = Vec::with_capacity(panels * nodes_per_panel);
        let mut weights = Vec::with_capacity(panels * nodes_per_panel);
        for p in 0..panels {
            let lo = -cfg.half() + p as f64 * width;
            let mid = lo + 0.5 * width;
            for &(x, w) in &pairs {
                nodes.push(mid + 0.5 * width * x);
                weights.push(0.5 * width * w);
            }
        }
        Ok(Self {
            cfg,
            panels,
            nodes_per_panel,
            nodes,
            weights,
            reference,
            bary,
        })
    }

    /// 32 panels of 64 nodes.
    pub fn standard(cfg: BoxConfig) -> Self {
        Self::new(cfg, DEFAULT_PANELS, DEFAULT_NODES_PER_PANEL).expect("default rule is valid")
    }

    pub fn config(&self) -> BoxConfig {
        self.cfg
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    pub fn nodes_per_panel(&self) -> usize {
        self.nodes_per_panel
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: Fn(f64) -> C64>(&self, f: F) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += f(x) * w;
        }
        acc
    }

    pub fn integrate_real<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| f(x) * w)
            .sum()
    }

    /// Weighted sum of precomputed samples at the nodes.
    pub fn sum_samples(&self, samples: &[C64]) -> C64 {
        samples
            .iter()
            .zip(&self.weights)
            .fold(C64::new(0.0, 0.0), |acc, (v, &w)| acc + v * w)
    }

    /// Barycentric interpolation of node samples at `x` using the panel containing `x`.
    pub fn interpolate(&self, samples: &[C64], x: f64) -> C64 {
        let width = self.cfg.l / self.panels as f64;
        let p = (((x + self.cfg.half()) / width).floor() as isize).clamp(0, self.panels as isize - 1)
            as usize;
        let mid = -self.cfg.half() + (p as f64 + 0.5) * width;
        let t = (x - mid) / (0.5 * width);
        let base = p * self.nodes_per_panel;
        let mut num = C64::new(0.0, 0.0);
        let mut den = 0.0;
        for (j, (&xj, &bj)) in self.reference.iter().zip(&self.bary).enumerate() {
            let d = t - xj;
            if d == 0.0 {
                return samples[base + j];
            }
            let c = bj / d;
            num += samples[base + j] * c;
            den += c;
        }
        num / den
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_length() {
        let cfg = BoxConfig::new(1.0, 2.5).unwrap();
        let q = Quadrature::standard(cfg);
        let total: f64 = q.weights().iter().sum();
        assert!((total - 2.5).abs() <= 1e-14 * 2.5);
        assert_eq!(q.nodes().len(), 2048);
    }

    #[test]
    fn rejects_small_rules() {
        assert!(Quadrature::new(BoxConfig::default(), 2, 8).is_err());
    }

    #[test]
    fn interpolation_is_exact_for_low_degree() {
        let q = Quadrature::new(BoxConfig::default(), 16, 16).unwrap();
        let f = |x: f64| C64::new(x * x * x - 0.5 * x, x.cos());
        let samples: Vec<C64> = q.nodes().iter().map(|&x| f(x)).collect();
        for &x in &[-0.5, -0.31, 0.0, 0.123, 0.5] {
            let v = q.interpolate(&samples, x);
            assert!((v - f(x)).norm() < 1e-13, "x={x}");
        }
    }
}
