//! Joint maximum-likelihood detection of the active index and QAM symbol.
//!
//! Within a cluster, hypothesis `(alpha, s)` predicts `h(alpha) s` on
//! subcarrier `alpha` and noise only elsewhere. Dropping the common
//! `sum_k |y(k)|^2` term, its negative log-likelihood is
//! `|y(alpha) - h(alpha) s|^2 - |y(alpha)|^2`.

use crate::bits::BitBuffer;
use crate::channel::ChannelRealization;
use crate::codec::{disassemble_block, ClusterActivation};
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::modem::QamConstellation;
use crate::ComplexSample;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterDecision {
    /// 1-based active position.
    pub alpha_hat: usize,
    pub symbol_label_hat: usize,
    pub metric: f64,
}

/// Exhaustive search over all `N M` hypotheses; ties go to the lowest
/// `(alpha, label)`.
///
/// # Panics
///
/// If `y` and `h` differ in length or are empty.
pub fn detect_cluster(y: &[ComplexSample], h: &[ComplexSample], constellation: &QamConstellation) -> ClusterDecision {
    assert_eq!(y.len(), h.len(), "received and channel vectors differ in length");
    assert!(!y.is_empty(), "empty cluster");
    let mut best = ClusterDecision {
        alpha_hat: 0,
        symbol_label_hat: 0,
        metric: f64::INFINITY,
    };
    for (k, (&yk, &hk)) in y.iter().zip(h).enumerate() {
        let (label, dist) = constellation.nearest(yk, hk);
        let metric = dist - yk.norm_sqr();
        if metric < best.metric {
            best = ClusterDecision {
                alpha_hat: k + 1,
                symbol_label_hat: label,
                metric,
            };
        }
    }
    best
}

/// Per-cluster decisions for a whole block.
pub fn detect_block_decisions(
    y: &[ComplexSample],
    channel: &ChannelRealization,
    cfg: &SystemConfig,
    constellation: &QamConstellation,
) -> Result<Vec<ClusterDecision>> {
    for len in [y.len(), channel.gains.len()] {
        if len != cfg.n_subcarriers {
            return Err(Error::LengthMismatch {
                expected: cfg.n_subcarriers,
                actual: len,
            });
        }
    }
    Ok(y.chunks_exact(cfg.cluster_size)
        .zip(channel.gains.chunks_exact(cfg.cluster_size))
        .map(|(yc, hc)| detect_cluster(yc, hc, constellation))
        .collect())
}

/// Detects every cluster and maps the decisions back to bits.
pub fn detect_block(
    y: &[ComplexSample],
    channel: &ChannelRealization,
    cfg: &SystemConfig,
    constellation: &QamConstellation,
) -> Result<BitBuffer> {
    let decisions = detect_block_decisions(y, channel, cfg, constellation)?;
    Ok(decisions_to_bits(&decisions, cfg))
}

pub fn decisions_to_bits(decisions: &[ClusterDecision], cfg: &SystemConfig) -> BitBuffer {
    let activations: Vec<_> = decisions
        .iter()
        .enumerate()
        .map(|(beta, d)| ClusterActivation::new(beta + 1, d.alpha_hat, cfg.cluster_size).expect("alpha within cluster"))
        .collect();
    let labels: Vec<_> = decisions.iter().map(|d| d.symbol_label_hat).collect();
    disassemble_block(&activations, &labels, cfg)
}
