use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {n_subcarriers} subcarriers != {n_clusters} clusters x {cluster_size}")]
    DimensionMismatch {
        n_subcarriers: usize,
        cluster_size: usize,
        n_clusters: usize,
    },
    #[error("cluster size {0} is not a power of two >= 2")]
    ClusterSize(usize),
    #[error("unsupported QAM order {0} (expected 4, 16, 64 or 256)")]
    UnsupportedOrder(usize),
    #[error("invalid SNR {0} dB")]
    InvalidSnr(f64),
    #[error("expected {expected} bits, got {actual}")]
    BitCount { expected: usize, actual: usize },
    #[error("index {alpha} outside 1..={cluster_size}")]
    IndexOutOfRange { alpha: usize, cluster_size: usize },
    #[error("channel gain is zero")]
    ZeroChannelGain,
    #[error("negative noise power {0}")]
    NegativeNoisePower(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("{0}")]
    Io(String),
    #[error("malformed CSV: {0}")]
    Csv(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
