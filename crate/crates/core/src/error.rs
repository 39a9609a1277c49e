use thiserror::Error;

use crate::bilinear::CounterexampleReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus {0} is composite")]
    CompositeModulus(u32),
    #[error("modulus {0} is larger than 256")]
    ModulusTooLarge(u32),
    #[error("modulus {0} is smaller than 2")]
    ModulusTooSmall(u32),
    #[error("field mismatch: expected p={expected}, got p={actual}")]
    FieldMismatch { expected: u16, actual: u16 },
    #[error("element {value} is not reduced modulo {p}")]
    InvalidElement { value: u64, p: u16 },

    #[error("key overflow: {p}^{len} does not fit in 64 bits")]
    KeyOverflow { p: u16, len: usize },
    #[error("key {key} out of range for {len} elements over F_{p}")]
    KeyOutOfRange { key: u64, len: usize, p: u16 },

    #[error("table needs {required} bytes, cap is {cap} bytes")]
    MemCapExceeded { required: u64, cap: u64 },
    #[error("base matrix is {rows}x{cols}, expected square")]
    NonSquareBase { rows: usize, cols: usize },
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("naive transform of length {len} exceeds guard {guard}")]
    GuardExceeded { len: usize, guard: usize },
    #[error("incompatible table: {0}")]
    IncompatibleTable(String),
    #[error("length {0} is not a power of two")]
    LengthNotPowerOfTwo(usize),
    #[error("operation requires F_2, got F_{0}")]
    WrongField(u16),
    #[error("table spot-check failed: {0}")]
    SpotCheckFailed(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("identity does not hold: {0}")]
    UnverifiedIdentity(CounterexampleReport),

    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
