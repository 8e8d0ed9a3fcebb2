//! Exact bit error rate of Gray-coded square M-QAM over AWGN, written as a
//! weighted sum of Gaussian tail terms
//! `P_b = sum_i C_i Q(sqrt(c_i * snr))`, `snr = E_s/N_0`.
//!
//! The weights follow the closed-form bit-position expansion of Cho and Yoon
//! (IEEE Trans. Commun., 2002): for `sqrt(M)` levels per axis and bit
//! position `k = 1..log2 sqrt(M)`,
//!
//! ```text
//! P_b(k) = 1/sqrt(M) * sum_{i=0}^{(1-2^-k) sqrt(M) - 1} (-1)^floor(i 2^(k-1)/sqrt(M))
//!          * (2^(k-1) - floor(i 2^(k-1)/sqrt(M) + 1/2)) * 2 Q((2i+1) sqrt(3 snr/(M-1)))
//! ```
//!
//! averaged over the `log2 sqrt(M)` positions.

use super::q_function;
use crate::config::SUPPORTED_QAM_ORDERS;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct QamBerConstants {
    order: usize,
    weights: Vec<f64>,
    scales: Vec<f64>,
}

impl QamBerConstants {
    pub fn for_order(order: usize) -> Result<Self> {
        if !SUPPORTED_QAM_ORDERS.contains(&order) {
            return Err(Error::UnsupportedOrder(order));
        }
        let side = 1usize << (order.trailing_zeros() / 2);
        let positions = side.trailing_zeros() as usize;
        let mut weights = vec![0.0; side - 1];
        for k in 1..=positions {
            let half_span = 1usize << (k - 1);
            let terms = side - (side >> k);
            for (i, w) in weights.iter_mut().enumerate().take(terms) {
                let ratio = (i * half_span) as f64 / side as f64;
                let sign = if (ratio.floor() as usize).is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                };
                let mult = half_span as f64 - (ratio + 0.5).floor();
                *w += sign * mult * 2.0 / (side as f64 * positions as f64);
            }
        }
        let scales = (0..side - 1)
            .map(|i| 3.0 * ((2 * i + 1) * (2 * i + 1)) as f64 / (order as f64 - 1.0))
            .collect();
        Ok(Self { order, weights, scales })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of tail terms.
    pub fn theta(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn terms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.weights.iter().copied().zip(self.scales.iter().copied())
    }
}

/// AWGN bit error rate of the QAM symbol at instantaneous SNR `gamma * rho`.
pub fn qam_awgn_ber(gamma: f64, rho: f64, constants: &QamBerConstants) -> f64 {
    let snr = gamma * rho;
    constants
        .terms()
        .map(|(weight, scale)| weight * q_function((scale * snr).sqrt()))
        .sum()
}
