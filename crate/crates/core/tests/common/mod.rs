#![allow(dead_code)]

use mcik::analytic::{qam_awgn_ber, CorrectDetection, QamBerConstants};
use mcik::channel::RngStream;
use mcik::modem::QamConstellation;
use mcik::BitBuffer;
use rayon::prelude::*;

/// `Q(x)` straight from erfc, kept separate from the crate's helper.
pub fn q(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

pub fn pep(gamma: f64, rho: f64) -> f64 {
    q((gamma * rho / 2.0).sqrt())
}

/// Natural-binary label distance of 1-based indices.
pub fn index_distance(a: usize, b: usize) -> u32 {
    ((a - 1) ^ (b - 1)).count_ones()
}

/// `(1/N) sum_a sum_{a' != a} q H(a, a')`, literally.
pub fn me0_literal(gamma: f64, rho: f64, n: usize) -> f64 {
    let q = pep(gamma, rho);
    let mut total = 0.0;
    for a in 1..=n {
        for b in 1..=n {
            if a != b {
                total += q * index_distance(a, b) as f64;
            }
        }
    }
    total / n as f64
}

/// `(log2 M / N) sum_a [ sum_{a' != a} q/2 + (1 - prod_{a' != a} q) P ]`,
/// with the union variant replacing the product by a sum.
pub fn me1_literal(gamma: f64, rho: f64, n: usize, k: &QamBerConstants, variant: CorrectDetection) -> f64 {
    let q = pep(gamma, rho);
    let p = qam_awgn_ber(gamma, rho, k);
    let log2m = (k.order() as f64).log2();
    let mut total = 0.0;
    for a in 1..=n {
        let mut half_sum = 0.0;
        let mut prod = 1.0;
        let mut sum = 0.0;
        for _ in (1..=n).filter(|&b| b != a) {
            half_sum += q / 2.0;
            prod *= q;
            sum += q;
        }
        let correct = match variant {
            CorrectDetection::Product => 1.0 - prod,
            CorrectDetection::UnionComplement => 1.0 - sum,
        };
        total += half_sum + correct * p;
    }
    log2m * total / n as f64
}

/// Triple sum over clusters, indices and competitors, normalised by bits per block.
pub fn ber_bound_literal(gammas: &[f64], rho: f64, n: usize, k: &QamBerConstants, variant: CorrectDetection) -> f64 {
    let log2n = (n as f64).log2();
    let log2m = (k.order() as f64).log2();
    let mt = gammas.len() as f64 * (log2n + log2m);
    let total: f64 = gammas
        .iter()
        .map(|&g| me0_literal(g, rho, n) + me1_literal(g, rho, n, k, variant))
        .sum();
    total / mt
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Brute-force AWGN bit error rate of the QAM modem at `E_s/N_0 = rho`.
/// Returns `(errors, bits)`.
pub fn qam_awgn_count(order: usize, rho: f64, symbols: u64, seed: u64) -> (u64, u64) {
    const CHUNK: u64 = 4096;
    let con = QamConstellation::new(order).unwrap();
    let bps = con.bits_per_symbol();
    let n0 = 1.0 / rho;
    let chunks = symbols.div_ceil(CHUNK);
    let errors: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = RngStream::new(seed, c);
            let h = mcik::ComplexSample::new(1.0, 0.0);
            let mut errs = 0u64;
            for _ in c * CHUNK..((c + 1) * CHUNK).min(symbols) {
                let bits = BitBuffer::random(&mut rng, bps);
                let y = con.modulate(&bits).unwrap() + rng.complex_gaussian(n0);
                let (_, rx) = con.demodulate_ml(y, h).unwrap();
                errs += bits.hamming(&rx) as u64;
            }
            errs
        })
        .sum();
    (errors, symbols * bps as u64)
}

/// Linear SNR at which the exact QAM BER equals `target`.
pub fn qam_snr_for_ber(k: &QamBerConstants, target: f64) -> f64 {
    let (mut lo, mut hi) = (-10.0f64, 50.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if qam_awgn_ber(1.0, 10f64.powf(mid / 10.0), k) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    10f64.powf(0.5 * (lo + hi) / 10.0)
}
