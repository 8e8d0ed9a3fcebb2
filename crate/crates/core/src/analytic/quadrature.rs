//! Expectations over a unit-mean exponential power gain.
//!
//! Tail products `prod_j Q(sqrt(a_j gamma))` are not smooth in `gamma` at the
//! origin (they expand in powers of `sqrt(gamma)`), which stalls ordinary
//! Gauss-Laguerre. With `gamma = (tau s)^2` the expectation becomes
//!
//! ```text
//! E[f(gamma)] = int_0^inf f(tau^2 s^2) 2 tau^2 s exp(-tau^2 s^2) ds
//! ```
//!
//! whose integrand is entire in `s`. It is evaluated with the generalized
//! Gauss-Laguerre rule for the weight `s exp(-s)`. `tau` is chosen from the
//! product's decay rate so that the integrand has unit scale in `s` at any
//! SNR.

use super::q_function;

pub const DEFAULT_NODES: usize = 64;

// tau^2 = SCALE / (1 + decay); tuned on E[Q(sqrt(a gamma))] over a in [0, 1e6].
const SCALE: f64 = 0.3;

/// Generalized Gauss-Laguerre nodes and weights for `x^alpha exp(-x)` on
/// `[0, inf)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLaguerre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLaguerre {
    /// Newton iteration on the Laguerre recurrence from asymptotic starting
    /// guesses.
    ///
    /// # Panics
    ///
    /// If `n == 0`, `alpha <= -1` or a root fails to converge.
    pub fn new(n: usize, alpha: f64) -> Self {
        assert!(n > 0, "rule needs at least one node");
        assert!(alpha > -1.0, "alpha must exceed -1");
        let nf = n as f64;
        let norm = (libm::lgamma(alpha + nf) - libm::lgamma(nf)).exp();
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        let mut z = 0.0;
        for i in 0..n {
            z = match i {
                0 => (1.0 + alpha) * (3.0 + 0.92 * alpha) / (1.0 + 2.4 * nf + 1.8 * alpha),
                1 => z + (15.0 + 6.25 * alpha) / (1.0 + 0.9 * alpha + 2.5 * nf),
                _ => {
                    let ai = (i - 1) as f64;
                    z + ((1.0 + 2.55 * ai) / (1.9 * ai) + 1.26 * ai * alpha / (1.0 + 3.5 * ai)) * (z - nodes[i - 2])
                        / (1.0 + 0.3 * alpha)
                }
            };
            let mut converged = false;
            let (mut p2, mut dp) = (0.0, 0.0);
            for _ in 0..200 {
                let (mut p1, mut p0) = (1.0, 0.0);
                for j in 1..=n {
                    let jf = j as f64;
                    let p = ((2.0 * jf - 1.0 + alpha - z) * p1 - (jf - 1.0 + alpha) * p0) / jf;
                    p0 = p1;
                    p1 = p;
                }
                p2 = p0;
                dp = (nf * p1 - (nf + alpha) * p2) / z;
                let step = p1 / dp;
                z -= step;
                if step.abs() <= 1e-13 * z.abs() {
                    converged = true;
                    break;
                }
            }
            assert!(converged, "Gauss-Laguerre root {i} of {n} did not converge");
            nodes.push(z);
            weights.push(-norm / (dp * nf * p2));
        }
        Self { nodes, weights }
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

    /// `int_0^inf x^alpha exp(-x) f(x) dx`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Expectation of functions of `gamma ~ Exp(1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentialAverager {
    rule: GaussLaguerre,
    // w_i * exp(x_i), folded once
    scaled_weights: Vec<f64>,
}

impl ExponentialAverager {
    pub fn new(nodes: usize) -> Self {
        let rule = GaussLaguerre::new(nodes, 1.0);
        let scaled_weights = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&x, &w)| w * x.exp())
            .collect();
        Self { rule, scaled_weights }
    }

    pub fn nodes(&self) -> usize {
        self.rule.len()
    }

    /// `E[f(gamma)]` where `f` decays at least like `exp(-decay * gamma / 2)`.
    ///
    /// `f` must be a smooth function of `sqrt(gamma)` for full accuracy.
    pub fn expect<F: Fn(f64) -> f64>(&self, decay: f64, f: F) -> f64 {
        let tau2 = SCALE / (1.0 + decay.max(0.0));
        self.rule
            .nodes
            .iter()
            .zip(&self.scaled_weights)
            .map(|(&s, &w)| {
                let gamma = tau2 * s * s;
                w * 2.0 * tau2 * (-gamma).exp() * f(gamma)
            })
            .sum()
    }

    /// `E[prod_j Q(sqrt(a_j gamma))^(p_j)]` for factors `(a_j, p_j)`.
    pub fn expect_q_product(&self, factors: &[(f64, u32)]) -> f64 {
        let decay: f64 = factors.iter().map(|&(a, p)| a * p as f64).sum();
        self.expect(decay, |gamma| {
            factors
                .iter()
                .map(|&(a, p)| q_function((a * gamma).sqrt()).powi(p as i32))
                .product()
        })
    }
}

impl Default for ExponentialAverager {
    fn default() -> Self {
        Self::new(DEFAULT_NODES)
    }
}
