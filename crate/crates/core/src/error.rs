use std::io;

use thiserror::Error;

/// Every failure the toolkit can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("key must be 5..=16 octets, got {0}")]
    InvalidKeyLength(usize),
    #[error("invalid hex key: {0}")]
    InvalidHex(String),
    #[error("rounds must be in 1..=16, got {0}")]
    InvalidRounds(u32),
    #[error("key bit index {index} out of range for a {bits}-bit key")]
    InvalidBitIndex { index: usize, bits: usize },
    #[error("bound must be at least 1")]
    ZeroBound,
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),
    #[error("corrupt header: {0}")]
    CorruptHeader(String),
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("pixel count {0} is not a multiple of 8")]
    NotBlockAligned(usize),
    #[error("invalid PKCS#7 padding")]
    BadPadding,
    #[error("histogram is empty")]
    EmptyHistogram,
    #[error("variance of {0} is zero")]
    DegenerateVariance(&'static str),
    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { need: usize, got: usize },
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// Stable identifier printed on the diagnostic stream by the CLI.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidKeyLength(_) => "InvalidKeyLength",
            Error::InvalidHex(_) => "InvalidHex",
            Error::InvalidRounds(_) => "InvalidRounds",
            Error::InvalidBitIndex { .. } => "InvalidBitIndex",
            Error::ZeroBound => "ZeroBound",
            Error::UnsupportedFormat(_) => "UnsupportedFormat",
            Error::CorruptHeader(_) => "CorruptHeader",
            Error::SizeMismatch(_) => "SizeMismatch",
            Error::NotBlockAligned(_) => "NotBlockAligned",
            Error::BadPadding => "BadPadding",
            Error::EmptyHistogram => "EmptyHistogram",
            Error::DegenerateVariance(_) => "DegenerateVariance",
            Error::TooFewSamples { .. } => "TooFewSamples",
            Error::Io(_) => "IoError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
