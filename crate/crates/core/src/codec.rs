//! Index keying: per-cluster active-subcarrier selection and block
//! (dis)assembly.
//!
//! Bit layout of a block: clusters in order, each contributing `log2 N`
//! index bits followed by `log2 M` symbol bits. Indices are 1-based
//! throughout, matching `i = (cluster - 1) N + alpha`.

use crate::bits::{bits_to_uint, BitBuffer};
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::modem::QamConstellation;
use crate::ComplexSample;

/// Bijection between `log2 N` index bits and the active position `alpha`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum IndexLabeling {
    /// `alpha - 1` is the natural binary value of the bits.
    #[default]
    NaturalBinary,
    /// `alpha - 1` is the reflected-Gray decode of the bits.
    Gray,
}

impl IndexLabeling {
    pub fn alpha_from_bits(self, bits: &[bool], cluster_size: usize) -> Result<usize> {
        let width = index_width(cluster_size);
        if bits.len() != width {
            return Err(Error::BitCount {
                expected: width,
                actual: bits.len(),
            });
        }
        let word = bits_to_uint(bits);
        let position = match self {
            IndexLabeling::NaturalBinary => word,
            IndexLabeling::Gray => {
                let mut p = word;
                let mut s = word >> 1;
                while s != 0 {
                    p ^= s;
                    s >>= 1;
                }
                p
            }
        };
        Ok(position + 1)
    }

    pub fn bits_from_alpha(self, alpha: usize, cluster_size: usize) -> Result<BitBuffer> {
        check_alpha(alpha, cluster_size)?;
        let position = alpha - 1;
        let word = match self {
            IndexLabeling::NaturalBinary => position,
            IndexLabeling::Gray => position ^ (position >> 1),
        };
        Ok(BitBuffer::from_uint(word, index_width(cluster_size)))
    }

    /// Hamming distance between the binary images of two indices.
    pub fn hamming(self, alpha: usize, alpha_tilde: usize, cluster_size: usize) -> Result<usize> {
        let a = self.bits_from_alpha(alpha, cluster_size)?;
        let b = self.bits_from_alpha(alpha_tilde, cluster_size)?;
        Ok(a.hamming(&b))
    }
}

fn index_width(cluster_size: usize) -> usize {
    cluster_size.trailing_zeros() as usize
}

fn check_alpha(alpha: usize, cluster_size: usize) -> Result<()> {
    if alpha == 0 || alpha > cluster_size {
        return Err(Error::IndexOutOfRange { alpha, cluster_size });
    }
    Ok(())
}

/// Natural-binary index mapping: `alpha = 1 + value(bits)`.
pub fn map_index_bits(bits: &[bool], cluster_size: usize) -> Result<usize> {
    IndexLabeling::NaturalBinary.alpha_from_bits(bits, cluster_size)
}

/// `log2 N`-bit natural binary image of `alpha - 1`.
pub fn index_to_binary(alpha: usize, cluster_size: usize) -> Result<BitBuffer> {
    IndexLabeling::NaturalBinary.bits_from_alpha(alpha, cluster_size)
}

/// Hamming distance between natural binary index images.
pub fn hamming(alpha: usize, alpha_tilde: usize, cluster_size: usize) -> Result<usize> {
    IndexLabeling::NaturalBinary.hamming(alpha, alpha_tilde, cluster_size)
}

/// Active subcarrier of one cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClusterActivation {
    pub cluster_id: usize,
    pub alpha: usize,
    pub global_index: usize,
}

impl ClusterActivation {
    pub fn new(cluster_id: usize, alpha: usize, cluster_size: usize) -> Result<Self> {
        check_alpha(alpha, cluster_size)?;
        if cluster_id == 0 {
            return Err(Error::InvalidArgument("cluster ids start at 1".into()));
        }
        Ok(Self {
            cluster_id,
            alpha,
            global_index: (cluster_id - 1) * cluster_size + alpha,
        })
    }

    /// Zero-based position in the block's sample vector.
    pub fn offset(&self) -> usize {
        self.global_index - 1
    }
}

/// Frequency-domain block with exactly one nonzero sample per cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct OfdmBlock {
    pub samples: Vec<ComplexSample>,
    pub activations: Vec<ClusterActivation>,
    pub payload_symbols: Vec<usize>,
}

impl OfdmBlock {
    pub fn active_count(&self) -> usize {
        self.samples.iter().filter(|s| s.norm_sqr() != 0.0).count()
    }
}

pub fn assemble_block(bits: &[bool], cfg: &SystemConfig, constellation: &QamConstellation) -> Result<OfdmBlock> {
    let expected = cfg.bits_per_block().total;
    if bits.len() != expected {
        return Err(Error::BitCount {
            expected,
            actual: bits.len(),
        });
    }
    let (ib, sb) = (cfg.index_bits_per_cluster(), cfg.symbol_bits_per_cluster());
    let mut samples = vec![ComplexSample::new(0.0, 0.0); cfg.n_subcarriers];
    let mut activations = Vec::with_capacity(cfg.n_clusters);
    let mut payload_symbols = Vec::with_capacity(cfg.n_clusters);
    for (beta, segment) in bits.chunks_exact(ib + sb).enumerate() {
        let alpha = cfg.index_labeling.alpha_from_bits(&segment[..ib], cfg.cluster_size)?;
        let activation = ClusterActivation::new(beta + 1, alpha, cfg.cluster_size)?;
        let label = constellation.label_of(&segment[ib..])?;
        samples[activation.offset()] = constellation.point(label);
        activations.push(activation);
        payload_symbols.push(label);
    }
    Ok(OfdmBlock {
        samples,
        activations,
        payload_symbols,
    })
}

/// Inverse of [`assemble_block`]: rebuilds the bit buffer from per-cluster
/// indices and symbol labels.
///
/// # Panics
///
/// If the slices do not hold one entry per cluster.
pub fn disassemble_block(activations: &[ClusterActivation], symbol_labels: &[usize], cfg: &SystemConfig) -> BitBuffer {
    assert_eq!(activations.len(), cfg.n_clusters, "one activation per cluster");
    assert_eq!(symbol_labels.len(), cfg.n_clusters, "one symbol per cluster");
    let sb = cfg.symbol_bits_per_cluster();
    let mut out = BitBuffer::with_capacity(cfg.bits_per_block().total);
    for (act, &label) in activations.iter().zip(symbol_labels) {
        let index_bits = cfg
            .index_labeling
            .bits_from_alpha(act.alpha, cfg.cluster_size)
            .expect("activation holds a valid alpha");
        out.extend_from_slice(&index_bits);
        out.push_uint(label, sb);
    }
    out
}
