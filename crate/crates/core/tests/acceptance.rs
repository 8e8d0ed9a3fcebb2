//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::*;
use mcik::analytic::{
    average_ber_bound, me0_cluster, me1_cluster, qam_awgn_ber, Averaging, CorrectDetection, ExponentialAverager,
    QamBerConstants,
};
use mcik::channel::RngStream;
use mcik::cli::data_row;
use mcik::monte_carlo::{run_point_with, run_sweep, BerPoint, SimOptions, StoppingRule, SweepOptions};
use mcik::SystemConfig;
use rand::Rng;
use rand_distr::Exp1;

const CONFIGS: [(usize, usize); 3] = [(2, 64), (4, 32), (8, 16)];
const SEED: u64 = 2024;

struct Sweep {
    n: usize,
    cfg: SystemConfig,
    points: Vec<BerPoint>,
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn bound_at(cfg: &SystemConfig, k: &QamBerConstants, snr_db: f64) -> f64 {
    average_ber_bound(
        &cfg.with_snr_db(snr_db),
        k,
        Averaging::default(),
        CorrectDetection::Product,
    )
    .unwrap()
    .value
}

/// SNR (dB) at which the averaged bound falls to `ber`.
fn bound_snr_for(cfg: &SystemConfig, k: &QamBerConstants, ber: f64) -> f64 {
    let (mut lo, mut hi) = (-20.0, 100.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if bound_at(cfg, k, mid) > ber {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Horizontal gaps `(snr_sim, gap_db)` at points with `0 < BER <= 1e-3`.
fn gaps(sweep: &Sweep) -> Vec<(f64, f64)> {
    let k = QamBerConstants::for_order(sweep.cfg.qam_order).unwrap();
    sweep
        .points
        .iter()
        .filter_map(|p| {
            let s = p.sim?;
            (s.ber > 0.0 && s.ber <= 1e-3).then(|| (p.snr_db, bound_snr_for(&sweep.cfg, &k, s.ber) - p.snr_db))
        })
        .collect()
}

fn fmt_gaps(g: &[(f64, f64)]) -> String {
    g.iter()
        .map(|(x, d)| format!("{x:.0}dB:{d:.2}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn run_sweeps() -> Vec<Sweep> {
    let snrs: Vec<f64> = (0..=8).map(|i| 5.0 * i as f64).collect();
    CONFIGS
        .iter()
        .map(|&(n, clusters)| {
            let cfg = SystemConfig::new(128, n, clusters, 4, 0.0).unwrap();
            let points = run_sweep(&cfg, &snrs, StoppingRule::default(), SEED, &SweepOptions::default()).unwrap();
            Sweep { n, cfg, points }
        })
        .collect()
}

fn bound_tightness(sweeps: &[Sweep]) -> Outcome {
    let g = gaps(&sweeps[0]);
    let within = !g.is_empty() && g.iter().all(|&(_, d)| d <= 1.5);
    let non_increasing = g.windows(2).all(|w| w[1].1 <= w[0].1);
    outcome(
        within && non_increasing,
        format!(
            "(N,n,M)=(2,64,4) gap<=1.5dB {within}, non-increasing {non_increasing}; gaps [{}]",
            fmt_gaps(&g)
        ),
    )
}

fn configuration_trend(sweeps: &[Sweep]) -> Outcome {
    let high: Vec<Option<(f64, f64)>> = sweeps.iter().map(|s| gaps(s).last().copied()).collect();
    let detail = sweeps
        .iter()
        .zip(&high)
        .map(|(s, h)| match h {
            Some((x, d)) => format!("N={}: {d:.2}dB@{x:.0}dB", s.n),
            None => format!("N={}: none", s.n),
        })
        .collect::<Vec<_>>()
        .join(", ");
    let pass = high.iter().all(Option::is_some) && high.windows(2).all(|w| w[1].unwrap().1 >= w[0].unwrap().1);
    outcome(pass, format!("high-SNR gap weakly increasing in N: {detail}"))
}

fn upper_bound(sweeps: &[Sweep]) -> Outcome {
    let mut checked = 0;
    let mut violations = Vec::new();
    for s in sweeps {
        for p in &s.points {
            let (sim, bound) = (p.sim.unwrap(), p.bound.unwrap());
            if sim.ber <= 1e-2 {
                checked += 1;
                if bound < sim.ber - 3.0 * sim.stderr {
                    violations.push(format!(
                        "N={} {}dB bound {bound:.3e} sim {:.3e}",
                        s.n, p.snr_db, sim.ber
                    ));
                }
            }
        }
    }
    outcome(
        violations.is_empty() && checked > 0,
        format!("{checked} points checked, violations: [{}]", violations.join("; ")),
    )
}

fn oracle_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for m in [4, 16] {
        let k = QamBerConstants::for_order(m).unwrap();
        for n in [2, 4, 8, 16] {
            for i in 0..100 {
                let mut rng = RngStream::new(31 + m as u64, i);
                let gamma: f64 = rng.sample(Exp1);
                let rho = 10f64.powf(rng.random_range(-0.5..4.0));
                worst = worst.max(rel_err(me0_cluster(gamma, rho, n), me0_literal(gamma, rho, n)));
                for v in [CorrectDetection::Product, CorrectDetection::UnionComplement] {
                    worst = worst.max(rel_err(
                        me1_cluster(gamma, rho, n, &k, v),
                        me1_literal(gamma, rho, n, &k, v),
                    ));
                }
                count += 1;
            }
        }
    }
    outcome(
        worst <= 1e-12,
        format!("{count} (gamma, rho) cases, worst relative error {worst:.2e}"),
    )
}

fn fading_average() -> Outcome {
    let avg = ExponentialAverager::default();
    let mut worst_abs: f64 = 0.0;
    for rho in [1.0f64, 10.0, 100.0] {
        let got = avg.expect_q_product(&[(rho / 2.0, 1)]);
        worst_abs = worst_abs.max((got - 0.5 * (1.0 - (rho / (4.0 + rho)).sqrt())).abs());
    }
    let k = QamBerConstants::for_order(4).unwrap();
    let mut worst_sigma: f64 = 0.0;
    for (n, clusters) in CONFIGS {
        for snr_db in [0.0, 10.0, 20.0, 30.0] {
            let cfg = SystemConfig::new(128, n, clusters, 4, snr_db).unwrap();
            let quad = bound_at(&cfg, &k, snr_db);
            let mc = average_ber_bound(
                &cfg,
                &k,
                Averaging::MonteCarlo {
                    samples: 100_000,
                    seed: SEED,
                },
                CorrectDetection::Product,
            )
            .unwrap();
            worst_sigma = worst_sigma.max((mc.value - quad).abs() / mc.stderr);
        }
    }
    outcome(
        worst_abs <= 1e-6 && worst_sigma <= 3.0,
        format!("closed-form max |err| {worst_abs:.2e}, Monte Carlo max deviation {worst_sigma:.2} sigma"),
    )
}

fn qam_correctness() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for m in [4, 16, 64] {
        let k = QamBerConstants::for_order(m).unwrap();
        for target in [1e-2, 1e-3] {
            let rho = qam_snr_for_ber(&k, target);
            let (errors, bits) = qam_awgn_count(m, rho, (4_000.0 / target) as u64, SEED + m as u64);
            let p = errors as f64 / bits as f64;
            let se = (p * (1.0 - p) / bits as f64).sqrt();
            let z = (p - qam_awgn_ber(1.0, rho, &k)).abs() / se;
            worst = worst.max(z);
            parts.push(format!("M={m}@{target:.0e}:{z:.2}"));
        }
    }
    outcome(worst <= 3.0, format!("deviation in sigma [{}]", parts.join(" ")))
}

fn determinism() -> Outcome {
    let mut noiseless = Vec::new();
    for (n, clusters) in CONFIGS {
        let cfg = SystemConfig::new(128, n, clusters, 4, f64::INFINITY).unwrap();
        let stop = StoppingRule {
            min_bit_errors: 1,
            max_blocks: 100_000,
        };
        let s = run_point_with(&cfg, stop, SEED, &SimOptions::default()).unwrap();
        noiseless.push((s.blocks, s.bit_errors()));
    }
    let clean = noiseless.iter().all(|&(b, e)| b == 100_000 && e == 0);

    let cfg = SystemConfig::new(128, 4, 32, 4, 0.0).unwrap();
    let stop = StoppingRule {
        min_bit_errors: 500,
        max_blocks: 200_000,
    };
    let rows = |workers: usize| {
        let opts = SweepOptions {
            sim: SimOptions {
                workers,
                ..SimOptions::default()
            },
            ..SweepOptions::default()
        };
        run_sweep(&cfg, &[0.0, 10.0, 20.0, 30.0], stop, SEED, &opts)
            .unwrap()
            .iter()
            .map(data_row)
            .collect::<Vec<_>>()
            .join("\n")
    };
    let reference = rows(1);
    let identical = [2, 4, 8].into_iter().all(|w| rows(w) == reference);
    outcome(
        clean && identical,
        format!("noiseless (blocks, errors) {noiseless:?}; CSV rows identical for 1/2/4/8 workers {identical}"),
    )
}

fn main() -> ExitCode {
    let started = Instant::now();
    let sweeps = run_sweeps();
    for s in &sweeps {
        eprintln!("sweep N={} n={}:", s.n, s.cfg.n_clusters);
        for p in &s.points {
            let sim = p.sim.unwrap();
            eprintln!(
                "  {:>4.0} dB  bound {:.4e}  sim {:.4e} +- {:.1e}  ({} errors, {} blocks)",
                p.snr_db,
                p.bound.unwrap(),
                sim.ber,
                sim.stderr,
                sim.bit_errors(),
                sim.blocks
            );
        }
    }
    let results = [
        ("bound tightness", bound_tightness(&sweeps)),
        ("configuration trend", configuration_trend(&sweeps)),
        ("upper-bound property", upper_bound(&sweeps)),
        ("oracle equivalence", oracle_equivalence()),
        ("fading-average cross-check", fading_average()),
        ("QAM correctness", qam_correctness()),
        ("determinism and roundtrip", determinism()),
    ];
    println!();
    for (name, o) in &results {
        println!("[{}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    let failed = results.iter().filter(|(_, o)| !o.pass).count();
    println!(
        "\nacceptance: {} passed, {failed} failed ({:.0} s)",
        results.len() - failed,
        started.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
