use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Where in a compressed stream a decode failure happened.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamPosition {
    pub group: u64,
    pub slot: u8,
}

impl std::fmt::Display for StreamPosition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "group {} slot {}", self.group, self.slot)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("FASTA parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("record '{id}' (line {line}) has no sequence data")]
    EmptyRecord { id: String, line: usize },

    #[error("invalid base {found:?} at position {position}")]
    InvalidBase { position: usize, found: char },

    #[error("range {start}..{end} is out of bounds for a sequence of {len} bases")]
    OutOfRange { start: u64, end: u64, len: u64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("reference of {len} bases is shorter than k={k}")]
    ReferenceTooShort { len: usize, k: usize },

    #[error("cannot size an index for {keys} keys")]
    CapacityOverflow { keys: u64 },

    #[error("reference checksum does not match the one recorded in the {what}")]
    ChecksumMismatch { what: &'static str },

    #[error("corrupt stream at {at}: {reason}")]
    CorruptStream { at: StreamPosition, reason: String },

    #[error("corrupt file: {0}")]
    CorruptFile(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: u64, right: u64 },

    #[error("compressed size is zero")]
    ZeroCompressedSize,

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn corrupt(group: u64, slot: u8, reason: impl Into<String>) -> Self {
        Error::CorruptStream {
            at: StreamPosition { group, slot },
            reason: reason.into(),
        }
    }

    /// True for errors caused by damaged or truncated input data.
    pub fn is_corruption(&self) -> bool {
        matches!(self, Error::CorruptStream { .. } | Error::CorruptFile(_))
    }
}
