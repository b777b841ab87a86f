use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),
    #[error("codebook of {columns} columns x {rows} rows needs {bytes} bytes, budget is {budget}")]
    MemoryBudget {
        rows: usize,
        columns: usize,
        bytes: usize,
        budget: usize,
    },
    #[error("message index {index} out of range for {columns} codewords")]
    MessageOutOfRange { index: usize, columns: usize },
    #[error("gain list has {gains} entries for {messages} messages")]
    GainCount { messages: usize, gains: usize },
    #[error("gamma has length {got}, codebook has {expected} columns")]
    GammaLength { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecoderError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("covariance is not positive definite")]
    NotPositiveDefinite,
    #[error("rank-one update denominator {0} is not positive")]
    InverseDrift(f64),
    #[error("step {step} would make gamma[{index}] negative")]
    NegativeStep { index: usize, step: f64 },
    #[error("invalid decoder settings: {0}")]
    Settings(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TreeError {
    #[error("invalid parity profile: {0}")]
    Profile(String),
    #[error("payload {payload:#x} does not fit in {bits} bits")]
    PayloadWidth { payload: u128, bits: u32 },
    #[error("expected {expected} slot lists, got {got}")]
    SlotCount { expected: usize, got: usize },
    #[error("stage {stage} needs {extensions} path extensions, cap is {cap}")]
    PathOverflow {
        stage: usize,
        extensions: u64,
        cap: u64,
    },
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("failed to read config {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("failed to parse config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Decoder(#[from] DecoderError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("output error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("worker pool: {0}")]
    Pool(String),
}
