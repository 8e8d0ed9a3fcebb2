//! Quasi-static Rayleigh fading per subcarrier plus complex AWGN.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::codec::OfdmBlock;
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::ComplexSample;

/// Deterministic random stream addressed by `(seed, stream_id)`.
///
/// Backed by ChaCha8 with the stream id as the cipher nonce, so every
/// `(seed, stream_id)` pair names an independent sequence that can be
/// regenerated on any worker.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self { seed, stream_id, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Circularly-symmetric complex Gaussian with total variance `variance`.
    pub fn complex_gaussian(&mut self, variance: f64) -> ComplexSample {
        let sigma = (variance / 2.0).sqrt();
        let re: f64 = StandardNormal.sample(&mut self.rng);
        let im: f64 = StandardNormal.sample(&mut self.rng);
        ComplexSample::new(sigma * re, sigma * im)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Per-subcarrier gains `h(k)` for one block interval.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub gains: Vec<ComplexSample>,
}

impl ChannelRealization {
    pub fn new(gains: Vec<ComplexSample>) -> Self {
        Self { gains }
    }

    /// Power gains `|h(k)|^2`.
    pub fn power_gains(&self) -> Vec<f64> {
        self.gains.iter().map(|h| h.norm_sqr()).collect()
    }
}

/// Draws `CN(0, 1)` gains for all `N_c` subcarriers, advancing `rng`.
///
/// Inactive subcarriers get gains too: the receiver evaluates hypotheses in
/// which they carry the symbol.
pub fn draw_channel(rng: &mut RngStream, cfg: &SystemConfig) -> ChannelRealization {
    ChannelRealization {
        gains: (0..cfg.n_subcarriers).map(|_| rng.complex_gaussian(1.0)).collect(),
    }
}

/// `y(k) = h(k) s(k) + n(k)` with `n(k) ~ CN(0, noise_power)`.
pub fn apply_channel(
    block: &OfdmBlock,
    channel: &ChannelRealization,
    noise_power: f64,
    rng: &mut RngStream,
) -> Result<Vec<ComplexSample>> {
    if noise_power.is_nan() || noise_power < 0.0 {
        return Err(Error::NegativeNoisePower(noise_power));
    }
    if channel.gains.len() != block.samples.len() {
        return Err(Error::LengthMismatch {
            expected: block.samples.len(),
            actual: channel.gains.len(),
        });
    }
    Ok(block
        .samples
        .iter()
        .zip(&channel.gains)
        .map(|(&s, &h)| {
            let faded = h * s;
            if noise_power == 0.0 {
                faded
            } else {
                faded + rng.complex_gaussian(noise_power)
            }
        })
        .collect())
}
