//! Reference-based DNA compression built around fixed-width k-mer matching.
//!
//! A target sequence is scanned in fixed strides; each position's k-mer is
//! looked up in a cuckoo-hash index over the reference. Matches become 32-bit
//! reference offsets (or header-only continuations), misses are stored as
//! 2-bit packed literals, and everything is grouped sixteen tokens behind a
//! shared 32-bit header. Containers add a chunk index for random access.

pub mod bench;
pub mod compress;
pub mod container;
pub mod decompress;
pub mod error;
pub mod fasta;
pub mod hash;
pub mod index;
pub mod sequence;
pub mod shd;
pub mod synth;
pub mod wide;

pub use compress::{
    compress, compression_ratio, encode_groups, CompressParams, Compressed, Token, TokenKind,
};
pub use container::{
    build_chunk_index, compress_to_container, write_container, ChunkEntry, ChunkIndex, Container,
    ContainerParams, RecordInput,
};
pub use decompress::{decompress, CompressedStream, DecodeMode, DecodeState, GroupStream};
pub use error::{Error, Result};
pub use fasta::{parse_fasta, AmbiguityPolicy, FastaRecord};
pub use index::{Candidate, IndexParams, Orientation, Prefilter, Reference, ReferenceIndex};
pub use sequence::{BaseCode, Kmer, PackedSequence};
pub use shd::{edit_distance, shd, ShdConfig, ShdVerdict};
