use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("ring parameter mismatch: operands live in different rings")]
    RingMismatch,
    #[error("invalid ring parameters: {0}")]
    InvalidRing(String),
    #[error("no primitive {order}-th root of unity modulo q; use schoolbook multiplication")]
    NoRootOfUnity { order: usize },
    #[error("invalid scheme parameters: {0}")]
    InvalidParams(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("value {value} does not fit in {digits} integer digits of base {base}")]
    EncodingOverflow { value: f64, digits: usize, base: u64 },
    #[error("relinearization key does not match the ciphertext parameters")]
    RelinKeyMismatch,
    #[error("serialization error: {0}")]
    Serialization(String),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, Error>;
