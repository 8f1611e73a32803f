use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum WalshError {
    #[error("frequency index must be positive")]
    ZeroFrequency,
    #[error("depth {depth} exceeds the cap {cap} for the {backend} backend")]
    DepthCap { depth: u32, cap: u32, backend: &'static str },
    #[error("depth {depth} too small: need at least {need}")]
    DepthTooSmall { depth: u32, need: u32 },
    #[error("depth mismatch: {left} vs {right}")]
    DepthMismatch { left: u32, right: u32 },
    #[error("bit level {level} violates the reduction precondition for n={n}")]
    BadReduction { n: u64, level: u32 },
    #[error("index {index} out of range for depth {depth}")]
    IndexOutOfRange { index: u64, depth: u32 },
    #[error("invalid t specification: {0}")]
    ParseT(String),
    #[error("invalid block parameter: {0}")]
    BadBlockParameter(String),
    #[error("p must be positive, got {0}")]
    BadExponent(f64),
    #[error("Young function precondition fails: Q(2^(2A)) < 2^(2A) at A={0}")]
    OrliczPrecondition(u32),
}
