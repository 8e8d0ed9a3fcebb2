//! Monte Carlo BER estimation and SNR sweeps.
//!
//! Block `b` of a run draws its bits, channel and noise from
//! `RngStream::new(seed, b)`, so any block can be regenerated in isolation.
//! Blocks are grouped in fixed-size batches and evaluated a wave of batches
//! at a time; batch results are folded in index order and the run stops after
//! the first batch at which the error target is met. The outcome depends only
//! on `(cfg, stop, seed)`, never on the number of worker threads.

use rayon::prelude::*;

use crate::analytic::{average_ber_bound, Averaging, CorrectDetection, QamBerConstants};
use crate::bits::BitBuffer;
use crate::channel::{apply_channel, draw_channel, ChannelRealization, RngStream};
use crate::codec::assemble_block;
use crate::config::SystemConfig;
use crate::detector::{decisions_to_bits, detect_block_decisions};
use crate::error::{Error, Result};
use crate::modem::QamConstellation;

const WAVE_BATCHES: u64 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StoppingRule {
    pub min_bit_errors: u64,
    pub max_blocks: u64,
}

impl Default for StoppingRule {
    fn default() -> Self {
        Self {
            min_bit_errors: 500,
            max_blocks: 2_000_000,
        }
    }
}

impl StoppingRule {
    pub fn validate(self) -> Result<Self> {
        if self.min_bit_errors == 0 || self.max_blocks == 0 {
            return Err(Error::InvalidArgument(
                "stopping rule needs positive min_bit_errors and max_blocks".into(),
            ));
        }
        Ok(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialStats {
    pub blocks: u64,
    pub total_bits: u64,
    /// Errors on index bit positions.
    pub index_bit_errors: u64,
    /// Errors on symbol bit positions.
    pub symbol_bit_errors: u64,
    pub ber: f64,
    pub stderr: f64,
}

impl TrialStats {
    fn from_counts(c: Counts, bits_per_block: u64) -> Self {
        let total_bits = c.blocks * bits_per_block;
        let errors = c.index_bit_errors + c.symbol_bit_errors;
        let (ber, stderr) = if total_bits == 0 {
            (0.0, 0.0)
        } else {
            let p = errors as f64 / total_bits as f64;
            (p, (p * (1.0 - p) / total_bits as f64).sqrt())
        };
        Self {
            blocks: c.blocks,
            total_bits,
            index_bit_errors: c.index_bit_errors,
            symbol_bit_errors: c.symbol_bit_errors,
            ber,
            stderr,
        }
    }

    pub fn bit_errors(&self) -> u64 {
        self.index_bit_errors + self.symbol_bit_errors
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Counts {
    blocks: u64,
    index_bit_errors: u64,
    symbol_bit_errors: u64,
}

impl Counts {
    fn merge(self, o: Counts) -> Counts {
        Counts {
            blocks: self.blocks + o.blocks,
            index_bit_errors: self.index_bit_errors + o.index_bit_errors,
            symbol_bit_errors: self.symbol_bit_errors + o.symbol_bit_errors,
        }
    }

    fn errors(&self) -> u64 {
        self.index_bit_errors + self.symbol_bit_errors
    }
}

/// Execution knobs that do not change results.
#[derive(Debug, Clone, PartialEq)]
pub struct SimOptions {
    /// Worker threads; 0 uses the global rayon pool.
    pub workers: usize,
    /// Blocks per batch. Part of the stopping granularity, so it does affect
    /// results when the error target is reached mid-run.
    pub batch_blocks: u64,
    /// Fixed channel used for every block instead of fresh fading draws.
    pub frozen_channel: Option<ChannelRealization>,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            workers: 0,
            batch_blocks: 256,
            frozen_channel: None,
        }
    }
}

/// Splits bit mismatches by role: `(index errors, symbol errors)`.
pub fn count_bit_errors(tx: &[bool], rx: &[bool], cfg: &SystemConfig) -> (u64, u64) {
    assert_eq!(tx.len(), rx.len(), "transmitted and recovered lengths differ");
    let ib = cfg.index_bits_per_cluster();
    let mut index = 0;
    let mut symbol = 0;
    for (t, r) in tx
        .chunks_exact(cfg.bits_per_cluster())
        .zip(rx.chunks_exact(cfg.bits_per_cluster()))
    {
        for (k, (a, b)) in t.iter().zip(r).enumerate() {
            if a != b {
                if k < ib {
                    index += 1;
                } else {
                    symbol += 1;
                }
            }
        }
    }
    (index, symbol)
}

struct PointRunner<'a> {
    cfg: &'a SystemConfig,
    constellation: QamConstellation,
    noise_power: f64,
    seed: u64,
    frozen: Option<&'a ChannelRealization>,
}

impl PointRunner<'_> {
    fn block(&self, index: u64) -> Counts {
        let cfg = self.cfg;
        let mut rng = RngStream::new(self.seed, index);
        let bits = BitBuffer::random(&mut rng, cfg.bits_per_block().total);
        let block = assemble_block(&bits, cfg, &self.constellation).expect("bit count matches config");
        let drawn;
        let channel = match self.frozen {
            Some(h) => h,
            None => {
                drawn = draw_channel(&mut rng, cfg);
                &drawn
            }
        };
        let y = apply_channel(&block, channel, self.noise_power, &mut rng).expect("noise power is non-negative");
        let decisions = detect_block_decisions(&y, channel, cfg, &self.constellation).expect("lengths match config");
        let rx = decisions_to_bits(&decisions, cfg);
        let (index_bit_errors, symbol_bit_errors) = count_bit_errors(&bits, &rx, cfg);
        Counts {
            blocks: 1,
            index_bit_errors,
            symbol_bit_errors,
        }
    }

    fn batch(&self, range: std::ops::Range<u64>) -> Counts {
        range.map(|b| self.block(b)).fold(Counts::default(), Counts::merge)
    }
}

pub fn run_point(cfg: &SystemConfig, stop: StoppingRule, seed: u64) -> Result<TrialStats> {
    run_point_with(cfg, stop, seed, &SimOptions::default())
}

pub fn run_point_with(cfg: &SystemConfig, stop: StoppingRule, seed: u64, opts: &SimOptions) -> Result<TrialStats> {
    let cfg = cfg.validate()?;
    let stop = stop.validate()?;
    if opts.batch_blocks == 0 {
        return Err(Error::InvalidArgument("batch size must be positive".into()));
    }
    if let Some(h) = &opts.frozen_channel {
        if h.gains.len() != cfg.n_subcarriers {
            return Err(Error::LengthMismatch {
                expected: cfg.n_subcarriers,
                actual: h.gains.len(),
            });
        }
    }
    let runner = PointRunner {
        cfg: &cfg,
        constellation: QamConstellation::new(cfg.qam_order)?,
        noise_power: cfg.noise_power(),
        seed,
        frozen: opts.frozen_channel.as_ref(),
    };
    let counts = if opts.workers == 0 {
        drive(&runner, stop, opts.batch_blocks)
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.workers)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
        pool.install(|| drive(&runner, stop, opts.batch_blocks))
    };
    Ok(TrialStats::from_counts(counts, cfg.bits_per_block().total as u64))
}

fn drive(runner: &PointRunner<'_>, stop: StoppingRule, batch_blocks: u64) -> Counts {
    let n_batches = stop.max_blocks.div_ceil(batch_blocks);
    let mut acc = Counts::default();
    let mut next = 0;
    while next < n_batches {
        let wave_end = (next + WAVE_BATCHES).min(n_batches);
        let results: Vec<Counts> = (next..wave_end)
            .into_par_iter()
            .map(|b| {
                let start = b * batch_blocks;
                runner.batch(start..(start + batch_blocks).min(stop.max_blocks))
            })
            .collect();
        for c in results {
            acc = acc.merge(c);
            if acc.errors() >= stop.min_bit_errors {
                return acc;
            }
        }
        next = wave_end;
    }
    acc
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Mode {
    Analytic,
    Simulate,
    #[default]
    Both,
}

impl Mode {
    pub fn analytic(self) -> bool {
        matches!(self, Mode::Analytic | Mode::Both)
    }

    pub fn simulate(self) -> bool {
        matches!(self, Mode::Simulate | Mode::Both)
    }
}

/// One SNR point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerPoint {
    pub snr_db: f64,
    /// Fading-averaged union bound.
    pub bound: Option<f64>,
    pub sim: Option<TrialStats>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOptions {
    pub mode: Mode,
    pub averaging: Averaging,
    pub correct_detection: CorrectDetection,
    pub sim: SimOptions,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            mode: Mode::Both,
            averaging: Averaging::default(),
            correct_detection: CorrectDetection::default(),
            sim: SimOptions::default(),
        }
    }
}

/// Evaluates every SNR in `snr_list` with the same seed.
pub fn run_sweep(
    cfg: &SystemConfig,
    snr_list: &[f64],
    stop: StoppingRule,
    seed: u64,
    opts: &SweepOptions,
) -> Result<Vec<BerPoint>> {
    if snr_list.is_empty() {
        return Err(Error::InvalidArgument("empty SNR list".into()));
    }
    let constants = QamBerConstants::for_order(cfg.qam_order)?;
    snr_list
        .iter()
        .map(|&snr_db| {
            let point_cfg = cfg.with_snr_db(snr_db).validate()?;
            let bound = if opts.mode.analytic() {
                Some(average_ber_bound(&point_cfg, &constants, opts.averaging, opts.correct_detection)?.value)
            } else {
                None
            };
            let sim = if opts.mode.simulate() {
                Some(run_point_with(&point_cfg, stop, seed, &opts.sim)?)
            } else {
                None
            };
            Ok(BerPoint { snr_db, bound, sim })
        })
        .collect()
}
