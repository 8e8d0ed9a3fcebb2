//! System configuration for one MCIK-OFDM operating point.

use crate::codec::IndexLabeling;
use crate::error::{Error, Result};

/// QAM orders with a Gray-coded square constellation.
pub const SUPPORTED_QAM_ORDERS: [usize; 4] = [4, 16, 64, 256];

/// One operating point: `N_c` subcarriers in `n` clusters of `N`, square
/// M-QAM, and the SNR `E_s/N_0` in dB.
///
/// Symbols have unit average energy, so the noise power per subcarrier is
/// `N_0 = 10^(-snr_db/10)`. `snr_db = +inf` gives a noiseless link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    pub n_subcarriers: usize,
    pub cluster_size: usize,
    pub n_clusters: usize,
    pub qam_order: usize,
    pub snr_db: f64,
    pub index_labeling: IndexLabeling,
}

/// Bits carried by one OFDM block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockBits {
    /// Index bits, `n log2 N`.
    pub index: usize,
    /// Symbol bits, `n log2 M`.
    pub symbol: usize,
    pub total: usize,
}

impl SystemConfig {
    /// Builds and validates a configuration with natural-binary index labels.
    pub fn new(
        n_subcarriers: usize,
        cluster_size: usize,
        n_clusters: usize,
        qam_order: usize,
        snr_db: f64,
    ) -> Result<Self> {
        Self {
            n_subcarriers,
            cluster_size,
            n_clusters,
            qam_order,
            snr_db,
            index_labeling: IndexLabeling::NaturalBinary,
        }
        .validate()
    }

    /// Returns `self` unchanged if every invariant holds.
    pub fn validate(self) -> Result<Self> {
        if self.n_clusters == 0
            || self.cluster_size == 0
            || self.n_clusters.checked_mul(self.cluster_size) != Some(self.n_subcarriers)
        {
            return Err(Error::DimensionMismatch {
                n_subcarriers: self.n_subcarriers,
                cluster_size: self.cluster_size,
                n_clusters: self.n_clusters,
            });
        }
        if self.cluster_size < 2 || !self.cluster_size.is_power_of_two() {
            return Err(Error::ClusterSize(self.cluster_size));
        }
        if !SUPPORTED_QAM_ORDERS.contains(&self.qam_order) {
            return Err(Error::UnsupportedOrder(self.qam_order));
        }
        if self.snr_db.is_nan() || self.snr_db == f64::NEG_INFINITY {
            return Err(Error::InvalidSnr(self.snr_db));
        }
        Ok(self)
    }

    pub fn with_snr_db(self, snr_db: f64) -> Self {
        Self { snr_db, ..self }
    }

    pub fn with_index_labeling(self, index_labeling: IndexLabeling) -> Self {
        Self { index_labeling, ..self }
    }

    /// `log2 N`.
    pub fn index_bits_per_cluster(&self) -> usize {
        self.cluster_size.trailing_zeros() as usize
    }

    /// `log2 M`.
    pub fn symbol_bits_per_cluster(&self) -> usize {
        self.qam_order.trailing_zeros() as usize
    }

    pub fn bits_per_cluster(&self) -> usize {
        self.index_bits_per_cluster() + self.symbol_bits_per_cluster()
    }

    pub fn bits_per_block(&self) -> BlockBits {
        let index = self.n_clusters * self.index_bits_per_cluster();
        let symbol = self.n_clusters * self.symbol_bits_per_cluster();
        BlockBits {
            index,
            symbol,
            total: index + symbol,
        }
    }

    /// Linear SNR `rho = E_s/N_0`.
    pub fn snr_linear(&self) -> f64 {
        10f64.powf(self.snr_db / 10.0)
    }

    /// Noise power per subcarrier for unit-energy symbols.
    pub fn noise_power(&self) -> f64 {
        10f64.powf(-self.snr_db / 10.0)
    }
}
