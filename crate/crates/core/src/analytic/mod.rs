//! Closed-form union-bound BER of MCIK-OFDM.
//!
//! Per cluster with power gain `gamma` and linear SNR `rho`, every index
//! pairwise error has probability `q = Q(sqrt(gamma rho / 2))`. The expected
//! bit errors split into an index part
//!
//! ```text
//! me0 = (1/N) sum_a sum_{a' != a} q H(a, a') = (N/2) log2(N) q
//! ```
//!
//! and a symbol part
//!
//! ```text
//! me1 = (log2 M / N) sum_a [ sum_{a' != a} q/2 + (1 - prod_{a' != a} q) P(gamma) ]
//!     = log2 M [ (N-1) q / 2 + (1 - q^(N-1)) P(gamma) ]
//! ```
//!
//! with `P` the AWGN BER of the QAM symbol. The block bound divides the sum
//! over clusters by the bits per block `m_t`. Dropping the correct-detection
//! term `(1 - q^(N-1)) P` gives the conditional bound.

mod qam;
pub mod quadrature;

use rand::Rng;
use rand_distr::Exp1;
use rayon::prelude::*;

use crate::channel::RngStream;
use crate::config::SystemConfig;
use crate::error::{Error, Result};

pub use qam::{qam_awgn_ber, QamBerConstants};
pub use quadrature::{ExponentialAverager, GaussLaguerre};

/// Gaussian tail probability `Q(x) = erfc(x / sqrt 2) / 2`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x * std::f64::consts::FRAC_1_SQRT_2)
}

/// Index pairwise error probability `Q(sqrt(gamma rho / 2))`.
pub fn pep_conditional(gamma: f64, rho: f64) -> Result<f64> {
    if gamma.is_nan() || rho.is_nan() || gamma < 0.0 || rho < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "PEP needs non-negative gain and SNR, got gamma={gamma}, rho={rho}"
        )));
    }
    Ok(pep(gamma, rho))
}

fn pep(gamma: f64, rho: f64) -> f64 {
    q_function((0.5 * gamma * rho).sqrt())
}

/// How the probability of detecting the right index is expressed in the
/// symbol-error term.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum CorrectDetection {
    /// `1 - prod_{a' != a} PEP`.
    #[default]
    Product,
    /// `1 - sum_{a' != a} PEP`, the union-bound complement (unclipped).
    UnionComplement,
}

impl CorrectDetection {
    fn factor(self, q: f64, cluster_size: usize) -> f64 {
        let others = (cluster_size - 1) as f64;
        match self {
            CorrectDetection::Product => 1.0 - q.powi(cluster_size as i32 - 1),
            CorrectDetection::UnionComplement => 1.0 - others * q,
        }
    }
}

/// Expected index-bit errors of one cluster.
pub fn me0_cluster(gamma: f64, rho: f64, cluster_size: usize) -> f64 {
    let log2n = cluster_size.trailing_zeros() as f64;
    0.5 * cluster_size as f64 * log2n * pep(gamma, rho)
}

/// Expected symbol-bit errors of one cluster.
pub fn me1_cluster(
    gamma: f64,
    rho: f64,
    cluster_size: usize,
    constants: &QamBerConstants,
    variant: CorrectDetection,
) -> f64 {
    let q = pep(gamma, rho);
    let log2m = constants.order().trailing_zeros() as f64;
    let misdetected = 0.5 * (cluster_size - 1) as f64 * q;
    log2m * (misdetected + variant.factor(q, cluster_size) * qam_awgn_ber(gamma, rho, constants))
}

/// Instantaneous power gains `|h(i_beta)|^2` of the active subcarriers.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingVector(Vec<f64>);

impl FadingVector {
    pub fn new(gamma: Vec<f64>) -> Result<Self> {
        if let Some(&g) = gamma.iter().find(|g| g.is_nan() || **g < 0.0) {
            return Err(Error::InvalidArgument(format!("fading gain {g} is negative or NaN")));
        }
        Ok(Self(gamma))
    }

    /// Same gain on every cluster.
    pub fn uniform(gamma: f64, n_clusters: usize) -> Result<Self> {
        Self::new(vec![gamma; n_clusters])
    }

    pub fn gains(&self) -> &[f64] {
        &self.0
    }
}

fn check_clusters(gammas: &FadingVector, cfg: &SystemConfig) -> Result<()> {
    if gammas.0.len() != cfg.n_clusters {
        return Err(Error::LengthMismatch {
            expected: cfg.n_clusters,
            actual: gammas.0.len(),
        });
    }
    Ok(())
}

/// Bound restricted to index mis-detection (no correct-detection term).
pub fn ber_bound_conditional(gammas: &FadingVector, cfg: &SystemConfig) -> Result<f64> {
    check_clusters(gammas, cfg)?;
    let rho = cfg.snr_linear();
    let log2m = cfg.symbol_bits_per_cluster() as f64;
    let half_others = 0.5 * (cfg.cluster_size - 1) as f64;
    let total: f64 = gammas
        .0
        .iter()
        .map(|&g| me0_cluster(g, rho, cfg.cluster_size) + log2m * half_others * pep(g, rho))
        .sum();
    Ok(total / cfg.bits_per_block().total as f64)
}

/// Full bound `sum_beta (me0 + me1) / m_t`.
pub fn ber_bound(
    gammas: &FadingVector,
    cfg: &SystemConfig,
    constants: &QamBerConstants,
    variant: CorrectDetection,
) -> Result<f64> {
    check_clusters(gammas, cfg)?;
    check_constants(cfg, constants)?;
    let rho = cfg.snr_linear();
    let total: f64 = gammas
        .0
        .iter()
        .map(|&g| me0_cluster(g, rho, cfg.cluster_size) + me1_cluster(g, rho, cfg.cluster_size, constants, variant))
        .sum();
    Ok(total / cfg.bits_per_block().total as f64)
}

fn check_constants(cfg: &SystemConfig, constants: &QamBerConstants) -> Result<()> {
    if constants.order() != cfg.qam_order {
        return Err(Error::InvalidArgument(format!(
            "QAM constants for M={} used with M={}",
            constants.order(),
            cfg.qam_order
        )));
    }
    Ok(())
}

/// Strategy for the expectation over Rayleigh fading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Averaging {
    Quadrature { nodes: usize },
    MonteCarlo { samples: usize, seed: u64 },
}

impl Default for Averaging {
    fn default() -> Self {
        Averaging::Quadrature {
            nodes: quadrature::DEFAULT_NODES,
        }
    }
}

/// An averaged value with its Monte Carlo standard error (zero for
/// quadrature).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

/// Bound averaged over i.i.d. unit-mean exponential gains at `cfg.snr_db`.
pub fn average_ber_bound(
    cfg: &SystemConfig,
    constants: &QamBerConstants,
    method: Averaging,
    variant: CorrectDetection,
) -> Result<Estimate> {
    check_constants(cfg, constants)?;
    match method {
        Averaging::Quadrature { nodes } => {
            if nodes == 0 {
                return Err(Error::InvalidArgument("quadrature needs at least one node".into()));
            }
            let avg = ExponentialAverager::new(nodes);
            Ok(Estimate {
                value: average_bound_quadrature(cfg, constants, variant, &avg),
                stderr: 0.0,
            })
        }
        Averaging::MonteCarlo { samples, seed } => average_bound_monte_carlo(cfg, constants, variant, samples, seed),
    }
}

/// Quadrature average reusing a precomputed rule.
///
/// Every cluster term has the same distribution, so the block average is the
/// single-cluster expectation over the bits per cluster. That expectation is
/// linear in a handful of tail products, each averaged at its own scale.
pub fn average_bound_quadrature(
    cfg: &SystemConfig,
    constants: &QamBerConstants,
    variant: CorrectDetection,
    avg: &ExponentialAverager,
) -> f64 {
    let rho = cfg.snr_linear();
    let n = cfg.cluster_size;
    let others = (n - 1) as f64;
    let log2n = cfg.index_bits_per_cluster() as f64;
    let log2m = cfg.symbol_bits_per_cluster() as f64;
    let a_pep = 0.5 * rho;

    let e_q = avg.expect_q_product(&[(a_pep, 1)]);
    let mut e_p = 0.0;
    let mut e_cross = 0.0;
    for (weight, scale) in constants.terms() {
        let a_sym = scale * rho;
        e_p += weight * avg.expect_q_product(&[(a_sym, 1)]);
        e_cross += weight
            * match variant {
                CorrectDetection::Product => avg.expect_q_product(&[(a_pep, n as u32 - 1), (a_sym, 1)]),
                CorrectDetection::UnionComplement => others * avg.expect_q_product(&[(a_pep, 1), (a_sym, 1)]),
            };
    }
    let me0 = 0.5 * n as f64 * log2n * e_q;
    let me1 = log2m * (0.5 * others * e_q + e_p - e_cross);
    (me0 + me1) / cfg.bits_per_cluster() as f64
}

fn average_bound_monte_carlo(
    cfg: &SystemConfig,
    constants: &QamBerConstants,
    variant: CorrectDetection,
    samples: usize,
    seed: u64,
) -> Result<Estimate> {
    if samples < 2 {
        return Err(Error::InvalidArgument(
            "Monte Carlo averaging needs at least two samples".into(),
        ));
    }
    let values: Vec<f64> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngStream::new(seed, i);
            let gammas = FadingVector((0..cfg.n_clusters).map(|_| rng.sample::<f64, _>(Exp1)).collect());
            ber_bound(&gammas, cfg, constants, variant).expect("dimensions checked")
        })
        .collect();
    let n = samples as f64;
    let mean = pairwise_sum(&values) / n;
    let var = pairwise_sum(&values.iter().map(|v| (v - mean) * (v - mean)).collect::<Vec<_>>()) / (n - 1.0);
    Ok(Estimate {
        value: mean,
        stderr: (var / n).sqrt(),
    })
}

fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 32 {
        v.iter().sum()
    } else {
        let (a, b) = v.split_at(v.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}
