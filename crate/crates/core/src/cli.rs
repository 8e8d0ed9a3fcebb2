//! Command-line plan resolution and the CSV result format.
//!
//! Options come from flags, then from an optional `key=value` config file,
//! then from defaults. The seed additionally falls back to `MCIK_SEED`.
//!
//! Output CSV:
//!
//! ```text
//! # key=value manifest lines
//! snr_db,ber_bound,ber_sim,stderr_sim,index_bit_errors,symbol_bit_errors,total_bits,blocks
//! ```
//!
//! Real values use 17 significant digits in scientific notation; columns not
//! produced by the selected mode are left empty.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Parser;

use crate::analytic::{quadrature::DEFAULT_NODES, Averaging, CorrectDetection};
use crate::codec::IndexLabeling;
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::monte_carlo::{run_sweep, BerPoint, Mode, SimOptions, StoppingRule, SweepOptions, TrialStats};

pub const CSV_HEADER: &str = "snr_db,ber_bound,ber_sim,stderr_sim,index_bit_errors,symbol_bit_errors,total_bits,blocks";
pub const SEED_ENV: &str = "MCIK_SEED";
const DEFAULT_SEED: u64 = 1;
const DEFAULT_MC_SAMPLES: usize = 100_000;

#[derive(Debug, Clone, Default, Parser)]
#[command(name = "mcik", version, about = "MCIK-OFDM BER bound and Monte Carlo sweep")]
pub struct Args {
    /// Total subcarriers N_c (defaults to cluster size x clusters)
    #[arg(long)]
    pub nc: Option<String>,
    /// Subcarriers per cluster N (power of two)
    #[arg(long)]
    pub cluster_size: Option<String>,
    /// Number of clusters n
    #[arg(long)]
    pub clusters: Option<String>,
    /// QAM order M: 4, 16, 64 or 256
    #[arg(long)]
    pub qam: Option<String>,
    /// First SNR (dB)
    #[arg(long, allow_hyphen_values = true)]
    pub snr_start: Option<String>,
    /// Last SNR (dB), inclusive
    #[arg(long, allow_hyphen_values = true)]
    pub snr_stop: Option<String>,
    /// SNR step (dB)
    #[arg(long)]
    pub snr_step: Option<String>,
    /// analytic, simulate or both
    #[arg(long)]
    pub mode: Option<String>,
    /// Bit errors to collect per simulated point
    #[arg(long)]
    pub min_errors: Option<String>,
    /// Block cap per simulated point
    #[arg(long)]
    pub max_blocks: Option<String>,
    /// Random seed (falls back to MCIK_SEED)
    #[arg(long)]
    pub seed: Option<String>,
    /// Fading average of the bound: quadrature or mc
    #[arg(long)]
    pub avg: Option<String>,
    /// Quadrature nodes
    #[arg(long)]
    pub nodes: Option<String>,
    /// Fading draws for --avg mc
    #[arg(long)]
    pub mc_samples: Option<String>,
    /// Correct-detection term: product or union
    #[arg(long)]
    pub correct_detection: Option<String>,
    /// Index bit labeling: natural or gray
    #[arg(long)]
    pub index_labeling: Option<String>,
    /// Worker threads (0 = all cores)
    #[arg(long)]
    pub workers: Option<String>,
    /// Output CSV path (standard output when omitted)
    #[arg(long)]
    pub out: Option<String>,
    /// key=value config file; flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Fully resolved run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunPlan {
    pub cfg: SystemConfig,
    pub snr_start: f64,
    pub snr_stop: f64,
    pub snr_step: f64,
    pub stop: StoppingRule,
    pub seed: u64,
    pub sweep: SweepOptions,
    pub out: Option<PathBuf>,
}

impl RunPlan {
    pub fn snr_list(&self) -> Vec<f64> {
        snr_grid(self.snr_start, self.snr_stop, self.snr_step)
    }

    pub fn manifest(&self, timestamp: &str) -> RunManifest {
        let mut entries = vec![
            ("tool".to_string(), format!("mcik {}", env!("CARGO_PKG_VERSION"))),
            ("timestamp".to_string(), timestamp.to_string()),
        ];
        let mut push = |k: &str, v: String| entries.push((k.to_string(), v));
        push("nc", self.cfg.n_subcarriers.to_string());
        push("cluster-size", self.cfg.cluster_size.to_string());
        push("clusters", self.cfg.n_clusters.to_string());
        push("qam", self.cfg.qam_order.to_string());
        push("snr-start", self.snr_start.to_string());
        push("snr-stop", self.snr_stop.to_string());
        push("snr-step", self.snr_step.to_string());
        push("mode", mode_name(self.sweep.mode).to_string());
        push("seed", self.seed.to_string());
        push("min-errors", self.stop.min_bit_errors.to_string());
        push("max-blocks", self.stop.max_blocks.to_string());
        match self.sweep.averaging {
            Averaging::Quadrature { nodes } => {
                push("avg", "quadrature".into());
                push("nodes", nodes.to_string());
            }
            Averaging::MonteCarlo { samples, .. } => {
                push("avg", "mc".into());
                push("mc-samples", samples.to_string());
            }
        }
        push(
            "correct-detection",
            match self.sweep.correct_detection {
                CorrectDetection::Product => "product",
                CorrectDetection::UnionComplement => "union",
            }
            .into(),
        );
        push(
            "index-labeling",
            match self.cfg.index_labeling {
                IndexLabeling::NaturalBinary => "natural",
                IndexLabeling::Gray => "gray",
            }
            .into(),
        );
        RunManifest { entries }
    }

    pub fn execute(&self) -> Result<Vec<BerPoint>> {
        run_sweep(&self.cfg, &self.snr_list(), self.stop, self.seed, &self.sweep)
    }
}

/// Self-description written ahead of the data rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunManifest {
    pub entries: Vec<(String, String)>,
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Analytic => "analytic",
        Mode::Simulate => "simulate",
        Mode::Both => "both",
    }
}

/// `start, start + step, ...` up to `stop` inclusive (with a small tolerance).
pub fn snr_grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    (0..count).map(|k| start + k as f64 * step).collect()
}

/// Parses a `key=value` file; `#` starts a comment line. Keys accept `_` or
/// `-` separators.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::InvalidArgument(format!("config line {}: expected key=value", lineno + 1)))?;
        map.insert(k.trim().replace('_', "-"), v.trim().to_string());
    }
    Ok(map)
}

const KNOWN_KEYS: [&str; 19] = [
    "nc",
    "cluster-size",
    "clusters",
    "qam",
    "snr-start",
    "snr-stop",
    "snr-step",
    "mode",
    "min-errors",
    "max-blocks",
    "seed",
    "avg",
    "nodes",
    "mc-samples",
    "correct-detection",
    "index-labeling",
    "workers",
    "out",
    // written into manifests, ignored on input
    "tool",
];

struct Sources<'a> {
    file: &'a BTreeMap<String, String>,
}

impl Sources<'_> {
    fn get<T: FromStr>(&self, flag: &Option<String>, key: &str) -> Result<Option<T>> {
        let raw = match flag {
            Some(v) => Some(v.as_str()),
            None => self.file.get(key).map(String::as_str),
        };
        raw.map(|v| {
            v.parse::<T>()
                .map_err(|_| Error::InvalidArgument(format!("invalid value {v:?} for {key}")))
        })
        .transpose()
    }
}

/// Resolves flags, config file contents and the seed environment fallback.
pub fn resolve(args: &Args, file: &BTreeMap<String, String>, env_seed: Option<&str>) -> Result<RunPlan> {
    if let Some(k) = file
        .keys()
        .find(|k| !KNOWN_KEYS.contains(&k.as_str()) && k.as_str() != "timestamp")
    {
        return Err(Error::InvalidArgument(format!("unknown config key {k:?}")));
    }
    let src = Sources { file };
    let cluster_size: usize = src.get(&args.cluster_size, "cluster-size")?.unwrap_or(2);
    let nc: Option<usize> = src.get(&args.nc, "nc")?;
    let clusters: usize = match src.get(&args.clusters, "clusters")? {
        Some(c) => c,
        None => nc.map_or(64, |nc| nc / cluster_size.max(1)),
    };
    let nc = nc.unwrap_or(cluster_size * clusters);
    let qam: usize = src.get(&args.qam, "qam")?.unwrap_or(4);
    let snr_start: f64 = src.get(&args.snr_start, "snr-start")?.unwrap_or(0.0);
    let snr_stop: f64 = src.get(&args.snr_stop, "snr-stop")?.unwrap_or(40.0);
    let snr_step: f64 = src.get(&args.snr_step, "snr-step")?.unwrap_or(5.0);
    if !(snr_start.is_finite() && snr_stop.is_finite() && snr_step.is_finite()) {
        return Err(Error::InvalidArgument("SNR range must be finite".into()));
    }
    if snr_step <= 0.0 || snr_stop < snr_start {
        return Err(Error::InvalidArgument(
            "SNR range needs snr-step > 0 and snr-stop >= snr-start".into(),
        ));
    }
    let mode = match src.get::<String>(&args.mode, "mode")?.as_deref() {
        None | Some("both") => Mode::Both,
        Some("analytic") => Mode::Analytic,
        Some("simulate") => Mode::Simulate,
        Some(other) => return Err(Error::InvalidArgument(format!("unknown mode {other:?}"))),
    };
    let stop = StoppingRule {
        min_bit_errors: src.get(&args.min_errors, "min-errors")?.unwrap_or(500),
        max_blocks: src.get(&args.max_blocks, "max-blocks")?.unwrap_or(2_000_000),
    }
    .validate()?;
    let seed = match src.get::<u64>(&args.seed, "seed")? {
        Some(s) => s,
        None => match env_seed {
            Some(v) => v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("invalid {SEED_ENV} value {v:?}")))?,
            None => DEFAULT_SEED,
        },
    };
    let nodes: usize = src.get(&args.nodes, "nodes")?.unwrap_or(DEFAULT_NODES);
    let mc_samples: usize = src.get(&args.mc_samples, "mc-samples")?.unwrap_or(DEFAULT_MC_SAMPLES);
    let averaging = match src.get::<String>(&args.avg, "avg")?.as_deref() {
        None | Some("quadrature") => {
            if nodes == 0 {
                return Err(Error::InvalidArgument("nodes must be positive".into()));
            }
            Averaging::Quadrature { nodes }
        }
        Some("mc") => {
            if mc_samples < 2 {
                return Err(Error::InvalidArgument("mc-samples must be at least 2".into()));
            }
            Averaging::MonteCarlo {
                samples: mc_samples,
                seed,
            }
        }
        Some(other) => return Err(Error::InvalidArgument(format!("unknown averaging {other:?}"))),
    };
    let correct_detection = match src
        .get::<String>(&args.correct_detection, "correct-detection")?
        .as_deref()
    {
        None | Some("product") => CorrectDetection::Product,
        Some("union") => CorrectDetection::UnionComplement,
        Some(other) => return Err(Error::InvalidArgument(format!("unknown correct-detection {other:?}"))),
    };
    let index_labeling = match src.get::<String>(&args.index_labeling, "index-labeling")?.as_deref() {
        None | Some("natural") => IndexLabeling::NaturalBinary,
        Some("gray") => IndexLabeling::Gray,
        Some(other) => return Err(Error::InvalidArgument(format!("unknown index-labeling {other:?}"))),
    };
    let workers: usize = src.get(&args.workers, "workers")?.unwrap_or(0);
    let out: Option<String> = src.get(&args.out, "out")?;
    let cfg = SystemConfig::new(nc, cluster_size, clusters, qam, snr_start)?.with_index_labeling(index_labeling);
    Ok(RunPlan {
        cfg,
        snr_start,
        snr_stop,
        snr_step,
        stop,
        seed,
        sweep: SweepOptions {
            mode,
            averaging,
            correct_detection,
            sim: SimOptions {
                workers,
                ..SimOptions::default()
            },
        },
        out: out.map(PathBuf::from),
    })
}

/// Parses argv, reads the config file if given, and resolves the plan.
pub fn parse_args<I, T>(argv: I) -> Result<RunPlan>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = Args::try_parse_from(argv).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let file = match &args.config {
        Some(path) => parse_config_text(&std::fs::read_to_string(path)?)?,
        None => BTreeMap::new(),
    };
    resolve(&args, &file, std::env::var(SEED_ENV).ok().as_deref())
}

fn real(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes manifest comments, header and one row per point.
pub fn write_csv<W: Write>(mut w: W, points: &[BerPoint], manifest: &RunManifest) -> Result<()> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("no points to write".into()));
    }
    for (k, v) in &manifest.entries {
        writeln!(w, "# {k}={v}")?;
    }
    writeln!(w, "{CSV_HEADER}")?;
    for p in points {
        writeln!(w, "{}", data_row(p))?;
    }
    w.flush()?;
    Ok(())
}

pub fn data_row(p: &BerPoint) -> String {
    let bound = p.bound.map(real).unwrap_or_default();
    let sim = match &p.sim {
        Some(s) => format!(
            "{},{},{},{},{},{}",
            real(s.ber),
            real(s.stderr),
            s.index_bit_errors,
            s.symbol_bit_errors,
            s.total_bits,
            s.blocks
        ),
        None => ",,,,,".to_string(),
    };
    format!("{},{bound},{sim}", real(p.snr_db))
}

pub fn emit_csv(path: &Path, points: &[BerPoint], manifest: &RunManifest) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    write_csv(std::io::BufWriter::new(file), points, manifest)
}

/// Reads a result CSV back into points and manifest entries.
pub fn read_csv<R: Read>(r: R) -> Result<(Vec<BerPoint>, RunManifest)> {
    let mut text = String::new();
    std::io::BufReader::new(r).read_to_string(&mut text)?;
    let entries = text
        .lines()
        .filter_map(|l| l.strip_prefix("# "))
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Csv(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.join(",") != CSV_HEADER {
        return Err(Error::Csv(format!("unexpected header {:?}", header.join(","))));
    }
    let mut points = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::Csv(e.to_string()))?;
        let field = |i: usize| rec.get(i).unwrap_or("");
        fn opt<T: FromStr>(s: &str) -> Result<Option<T>> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|_| Error::Csv(format!("bad number {s:?}")))
            }
        }
        let snr_db: f64 = opt(field(0))?.ok_or_else(|| Error::Csv("missing snr_db".into()))?;
        let bound = opt(field(1))?;
        let sim = match (
            opt::<f64>(field(2))?,
            opt::<f64>(field(3))?,
            opt::<u64>(field(4))?,
            opt::<u64>(field(5))?,
            opt::<u64>(field(6))?,
            opt::<u64>(field(7))?,
        ) {
            (Some(ber), Some(stderr), Some(ie), Some(se), Some(total_bits), Some(blocks)) => Some(TrialStats {
                blocks,
                total_bits,
                index_bit_errors: ie,
                symbol_bit_errors: se,
                ber,
                stderr,
            }),
            (None, None, None, None, None, None) => None,
            _ => return Err(Error::Csv(format!("partial simulation columns at {snr_db} dB"))),
        };
        points.push(BerPoint { snr_db, bound, sim });
    }
    Ok((points, RunManifest { entries }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(argv: &[&str]) -> Result<RunPlan> {
        let args = Args::try_parse_from(std::iter::once("mcik").chain(argv.iter().copied()))
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        resolve(&args, &BTreeMap::new(), None)
    }

    #[test]
    fn reference_configuration_from_flags() {
        let p = plan(&["--nc", "128", "--cluster-size", "2", "--clusters", "64", "--qam", "4"]).unwrap();
        assert_eq!(
            (
                p.cfg.n_subcarriers,
                p.cfg.cluster_size,
                p.cfg.n_clusters,
                p.cfg.qam_order
            ),
            (128, 2, 64, 4)
        );
        assert_eq!(p.out, None);
        assert_eq!(p.snr_list().len(), 9);
        assert_eq!(p.sweep.mode, Mode::Both);
    }

    #[test]
    fn invalid_values_are_errors() {
        assert!(matches!(plan(&["--cluster-size", "3"]), Err(Error::ClusterSize(3))));
        assert!(plan(&["--mode", "fast"]).is_err());
        assert!(plan(&["--qam", "x"]).is_err());
        assert!(plan(&["--snr-step", "0"]).is_err());
        assert!(plan(&["--snr-start", "10", "--snr-stop", "0"]).is_err());
        assert!(plan(&["--min-errors", "0"]).is_err());
        assert!(plan(&["--nc", "100", "--cluster-size", "4", "--clusters", "32"]).is_err());
        assert!(plan(&["--bogus", "1"]).is_err());
    }

    #[test]
    fn flags_override_file_and_env_is_fallback() {
        let file = parse_config_text("# comment\nqam = 16\ncluster_size=4\nclusters=8\nseed=5\n").unwrap();
        let args = Args::try_parse_from(["mcik", "--qam", "64"]).unwrap();
        let p = resolve(&args, &file, Some("99")).unwrap();
        assert_eq!(p.cfg.qam_order, 64);
        assert_eq!(p.cfg.cluster_size, 4);
        assert_eq!(p.cfg.n_subcarriers, 32);
        assert_eq!(p.seed, 5);
        let p = resolve(&Args::default(), &BTreeMap::new(), Some("99")).unwrap();
        assert_eq!(p.seed, 99);
        assert!(resolve(&Args::default(), &BTreeMap::new(), Some("x")).is_err());
        let bad = parse_config_text("colour=red").unwrap();
        assert!(resolve(&Args::default(), &bad, None).is_err());
        assert!(parse_config_text("no equals sign").is_err());
    }

    #[test]
    fn negative_snr_flags() {
        let p = plan(&["--snr-start", "-5", "--snr-stop", "5", "--snr-step", "2.5"]).unwrap();
        assert_eq!(p.snr_list(), vec![-5.0, -2.5, 0.0, 2.5, 5.0]);
    }

    #[test]
    fn grid_includes_endpoint() {
        assert_eq!(snr_grid(0.0, 40.0, 5.0).len(), 9);
        assert_eq!(snr_grid(0.0, 1.0, 0.1).len(), 11);
        assert_eq!(snr_grid(3.0, 3.0, 1.0), vec![3.0]);
    }

    #[test]
    fn analytic_rows_leave_sim_columns_empty() {
        let p = BerPoint {
            snr_db: 10.0,
            bound: Some(0.25),
            sim: None,
        };
        assert_eq!(data_row(&p), "1.0000000000000000e1,2.5000000000000000e-1,,,,,,");
    }

    #[test]
    fn manifest_is_valid_config() {
        let p = plan(&["--cluster-size", "8", "--clusters", "16", "--avg", "mc", "--seed", "3"]).unwrap();
        let text: String = p
            .manifest("now")
            .entries
            .iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect();
        let again = resolve(&Args::default(), &parse_config_text(&text).unwrap(), None).unwrap();
        assert_eq!(again, p);
    }

    #[test]
    fn csv_roundtrip_and_errors() {
        let points = vec![
            BerPoint {
                snr_db: 0.0,
                bound: Some(0.278_710_215_514_455_9),
                sim: Some(TrialStats {
                    blocks: 512,
                    total_bits: 98_304,
                    index_bit_errors: 9000,
                    symbol_bit_errors: 19_000,
                    ber: 28_000.0 / 98_304.0,
                    stderr: 1.0 / 3.0,
                }),
            },
            BerPoint {
                snr_db: 2.5,
                bound: None,
                sim: None,
            },
        ];
        let manifest = RunManifest {
            entries: vec![("seed".into(), "1".into())],
        };
        let mut buf = Vec::new();
        write_csv(&mut buf, &points, &manifest).unwrap();
        let (back, m) = read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, points);
        assert_eq!(m, manifest);
        assert!(write_csv(Vec::new(), &[], &manifest).is_err());
        assert!(read_csv("a,b\n1,2\n".as_bytes()).is_err());
        assert!(read_csv(format!("{CSV_HEADER}\n1e0,,1e-1,,,,,\n").as_bytes()).is_err());
    }
}
