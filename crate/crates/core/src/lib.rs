//! Multi-carrier index keying OFDM (MCIK-OFDM) link simulator and BER bound
//! evaluator.
//!
//! Each OFDM block of `N_c` subcarriers is split into `n` clusters of `N`
//! subcarriers. In every cluster exactly one subcarrier is active: its
//! position carries `log2 N` bits and the M-QAM symbol placed on it carries
//! `log2 M` more. The crate provides
//!
//! - the transmitter chain ([`modem`], [`codec`]),
//! - a quasi-static Rayleigh channel with AWGN ([`channel`]),
//! - a joint maximum-likelihood receiver ([`detector`]),
//! - closed-form union-bound BER expressions and their average over fading
//!   ([`analytic`]),
//! - a reproducible, parallel Monte Carlo engine ([`monte_carlo`]),
//! - the command-line front end and CSV interchange ([`cli`]).

pub mod analytic;
pub mod bits;
pub mod channel;
pub mod cli;
pub mod codec;
pub mod config;
pub mod detector;
pub mod error;
pub mod modem;
pub mod monte_carlo;

pub use bits::BitBuffer;
pub use config::{BlockBits, SystemConfig};
pub use error::{Error, Result};

/// Complex baseband value used for symbols, channel gains, noise and
/// received samples.
pub type ComplexSample = num_complex::Complex64;
