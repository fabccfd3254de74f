//! Fixed-k, fixed-stride matching against a [`ReferenceIndex`] and the grouped
//! header encoding of the resulting token stream.
//!
//! The scan walks the target left to right. At each position the k-mer there is
//! looked up in both orientations; a verified hit consumes `k` bases as a match
//! (or as a payload-free continuation when it sits right next to the previous
//! match in the reference), a miss consumes `s` bases verbatim.
//!
//! Tokens are grouped sixteen at a time behind one 32-bit header carrying a
//! 2-bit code per token:
//!
//! ```text
//! 00 verbatim (payload: 16 packed bases)
//! 01 forward match (payload: reference offset)
//! 10 reverse-complement match (payload: reference offset)
//! 11 continuation (no payload)
//! ```

use crate::error::{Error, Result};
use crate::index::{Orientation, QueryStats, Reference, ReferenceIndex};
use crate::sequence::PackedSequence;

pub const SLOTS_PER_GROUP: usize = 16;
/// Stride whose verbatim payload is exactly one 32-bit word.
pub const CONTAINER_STRIDE: usize = 16;
pub const DEFAULT_K: usize = 64;
pub const DEFAULT_CHUNK_GROUPS: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum TokenKind {
    Verbatim = 0b00,
    ForwardMatch = 0b01,
    ReverseMatch = 0b10,
    Continuation = 0b11,
}

impl TokenKind {
    pub const ALL: [TokenKind; 4] = [
        TokenKind::Verbatim,
        TokenKind::ForwardMatch,
        TokenKind::ReverseMatch,
        TokenKind::Continuation,
    ];

    #[inline]
    pub fn from_code(code: u32) -> TokenKind {
        Self::ALL[(code & 0b11) as usize]
    }

    #[inline]
    pub fn code(self) -> u32 {
        self as u32
    }

    pub fn has_payload(self) -> bool {
        self != TokenKind::Continuation
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Token {
    /// 16 bases, base i in bits `2i+1..2i`.
    Verbatim(u32),
    ForwardMatch(u32),
    ReverseMatch(u32),
    Continuation,
}

impl Token {
    pub fn kind(&self) -> TokenKind {
        match self {
            Token::Verbatim(_) => TokenKind::Verbatim,
            Token::ForwardMatch(_) => TokenKind::ForwardMatch,
            Token::ReverseMatch(_) => TokenKind::ReverseMatch,
            Token::Continuation => TokenKind::Continuation,
        }
    }

    pub fn payload(&self) -> Option<u32> {
        match *self {
            Token::Verbatim(w) | Token::ForwardMatch(w) | Token::ReverseMatch(w) => Some(w),
            Token::Continuation => None,
        }
    }

    /// Bases this token expands to.
    pub fn bases(&self, k: usize, s: usize) -> usize {
        match self {
            Token::Verbatim(_) => s,
            _ => k,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompressParams {
    pub k: usize,
    pub s: usize,
    /// When set, continuation chains are cut every `chunk_groups` groups so
    /// each chunk decodes without predecessor state.
    pub chunk_groups: Option<u32>,
    pub use_prefilter: bool,
}

impl Default for CompressParams {
    fn default() -> Self {
        CompressParams {
            k: DEFAULT_K,
            s: CONTAINER_STRIDE,
            chunk_groups: Some(DEFAULT_CHUNK_GROUPS),
            use_prefilter: true,
        }
    }
}

impl CompressParams {
    pub fn new(k: usize, s: usize) -> Self {
        CompressParams {
            k,
            s,
            ..Default::default()
        }
    }

    pub fn with_chunk_groups(mut self, g: Option<u32>) -> Self {
        self.chunk_groups = g;
        self
    }

    pub fn with_prefilter(mut self, on: bool) -> Self {
        self.use_prefilter = on;
        self
    }

    /// Any width combination the matcher can run with.
    pub fn validate_general(&self) -> Result<()> {
        if self.k == 0 || self.s == 0 {
            return Err(Error::InvalidParams("k and s must be positive".into()));
        }
        if !self.k.is_multiple_of(self.s) {
            return Err(Error::InvalidParams(format!(
                "s={} must divide k={}",
                self.s, self.k
            )));
        }
        if self.k > u16::MAX as usize {
            return Err(Error::InvalidParams(format!("k={} too large", self.k)));
        }
        if self.chunk_groups == Some(0) {
            return Err(Error::InvalidParams(
                "chunk granularity must be >= 1".into(),
            ));
        }
        Ok(())
    }

    /// The fixed 32-bit word format: s = 16 and k <= 64.
    pub fn validate(&self) -> Result<()> {
        self.validate_general()?;
        if self.s != CONTAINER_STRIDE {
            return Err(Error::InvalidParams(format!(
                "the 32-bit group format requires s=16, got s={}",
                self.s
            )));
        }
        if self.k > 64 {
            return Err(Error::InvalidParams(format!(
                "the 32-bit group format requires k<=64, got k={}",
                self.k
            )));
        }
        Ok(())
    }
}

/// Continuation bookkeeping: orientation of the last match and the reference
/// offset a continuation would have to hit.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MatchState {
    expected: Option<(Orientation, u32)>,
}

impl MatchState {
    pub fn expected(&self) -> Option<(Orientation, u32)> {
        self.expected
    }

    pub fn reset(&mut self) {
        self.expected = None;
    }

    /// Records a verified match and reports whether it continues the previous one.
    pub fn advance(&mut self, orientation: Orientation, offset: u32, k: usize) -> bool {
        let continues = self.expected == Some((orientation, offset));
        self.expected = match orientation {
            Orientation::Forward => offset.checked_add(k as u32).map(|o| (orientation, o)),
            // nothing precedes an offset below k
            Orientation::ReverseComplement => {
                offset.checked_sub(k as u32).map(|o| (orientation, o))
            }
        };
        continues
    }
}

/// Width-independent scan output. Verbatim tokens point back into the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanToken {
    Verbatim { start: usize },
    ForwardMatch(u32),
    ReverseMatch(u32),
    Continuation,
}

impl ScanToken {
    pub fn kind(&self) -> TokenKind {
        match self {
            ScanToken::Verbatim { .. } => TokenKind::Verbatim,
            ScanToken::ForwardMatch(_) => TokenKind::ForwardMatch,
            ScanToken::ReverseMatch(_) => TokenKind::ReverseMatch,
            ScanToken::Continuation => TokenKind::Continuation,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TokenHistogram {
    pub counts: [u64; 4],
}

impl TokenHistogram {
    pub fn add(&mut self, kind: TokenKind) {
        self.counts[kind as usize] += 1;
    }

    pub fn get(&self, kind: TokenKind) -> u64 {
        self.counts[kind as usize]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn of<'a>(kinds: impl IntoIterator<Item = &'a Token>) -> Self {
        let mut h = TokenHistogram::default();
        for t in kinds {
            h.add(t.kind());
        }
        h
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScanOutput {
    pub tokens: Vec<ScanToken>,
    pub histogram: TokenHistogram,
    pub queries: QueryStats,
}

/// The matching loop, for any `k`/`s` with `s | k`.
pub fn scan(
    target: &PackedSequence,
    index: &ReferenceIndex,
    reference: &Reference,
    params: &CompressParams,
) -> Result<ScanOutput> {
    params.validate_general()?;
    if index.k() != params.k {
        return Err(Error::InvalidParams(format!(
            "index built with k={} but compressing with k={}",
            index.k(),
            params.k
        )));
    }
    if index.ref_checksum() != reference.checksum() {
        return Err(Error::ChecksumMismatch { what: "index" });
    }
    let (k, s) = (params.k, params.s);
    let n = target.len();
    let chunk_tokens = params.chunk_groups.map(|g| g as usize * SLOTS_PER_GROUP);

    let mut out = ScanOutput {
        tokens: Vec::with_capacity(n / s + 1),
        ..Default::default()
    };
    let mut state = MatchState::default();
    let mut p = 0usize;
    while p < n {
        if chunk_tokens.is_some_and(|c| out.tokens.len().is_multiple_of(c)) {
            state.reset();
        }
        let mut found = None;
        if p + k <= n {
            let kmer = target.kmer_unchecked(p, k);
            found = index.query_with(reference, &kmer, params.use_prefilter, &mut out.queries);
        }
        let token = match found {
            Some(c) => {
                let continues = state.advance(c.orientation, c.offset, k);
                p += k;
                match (continues, c.orientation) {
                    (true, _) => ScanToken::Continuation,
                    (false, Orientation::Forward) => ScanToken::ForwardMatch(c.offset),
                    (false, Orientation::ReverseComplement) => ScanToken::ReverseMatch(c.offset),
                }
            }
            None => {
                let t = ScanToken::Verbatim { start: p };
                p += s;
                t
            }
        };
        out.histogram.add(token.kind());
        out.tokens.push(token);
    }
    Ok(out)
}

/// Packs up to 16 bases at `start` into a verbatim word, padding past the end with A.
pub fn verbatim_word(target: &PackedSequence, start: usize) -> u32 {
    let n = (target.len() - start).min(CONTAINER_STRIDE);
    target.bits_at(start, n) as u32
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Compressed {
    pub tokens: Vec<Token>,
    /// True length of the target; token expansion may exceed it by padding.
    pub base_count: u64,
    pub histogram: TokenHistogram,
    pub queries: QueryStats,
}

/// Compresses `target` into 32-bit-word tokens (s = 16, k <= 64).
pub fn compress(
    target: &PackedSequence,
    index: &ReferenceIndex,
    reference: &Reference,
    params: &CompressParams,
) -> Result<Compressed> {
    params.validate()?;
    let scanned = scan(target, index, reference, params)?;
    let tokens = scanned
        .tokens
        .iter()
        .map(|t| match *t {
            ScanToken::Verbatim { start } => Token::Verbatim(verbatim_word(target, start)),
            ScanToken::ForwardMatch(o) => Token::ForwardMatch(o),
            ScanToken::ReverseMatch(o) => Token::ReverseMatch(o),
            ScanToken::Continuation => Token::Continuation,
        })
        .collect();
    Ok(Compressed {
        tokens,
        base_count: target.len() as u64,
        histogram: scanned.histogram,
        queries: scanned.queries,
    })
}

/// Serialized size of one group holding `tokens` (padding included).
pub fn group_size(tokens: &[Token]) -> usize {
    let continuations = tokens
        .iter()
        .filter(|t| t.kind() == TokenKind::Continuation)
        .count();
    4 + 4 * (SLOTS_PER_GROUP - continuations)
}

pub fn group_header(tokens: &[Token]) -> u32 {
    debug_assert!(tokens.len() <= SLOTS_PER_GROUP);
    tokens
        .iter()
        .enumerate()
        .fold(0u32, |h, (i, t)| h | (t.kind().code() << (2 * i)))
}

/// Writes the group stream: per group a LE header word then LE payload words.
/// A short final group is filled with verbatim-A slots.
pub fn encode_groups_into(tokens: &[Token], out: &mut Vec<u8>) {
    for group in tokens.chunks(SLOTS_PER_GROUP) {
        out.extend_from_slice(&group_header(group).to_le_bytes());
        for t in group {
            if let Some(w) = t.payload() {
                out.extend_from_slice(&w.to_le_bytes());
            }
        }
        for _ in group.len()..SLOTS_PER_GROUP {
            out.extend_from_slice(&0u32.to_le_bytes());
        }
    }
}

pub fn encode_groups(tokens: &[Token]) -> Vec<u8> {
    let mut out = Vec::with_capacity(tokens.len() * 4 + tokens.len() / 4 + 4);
    encode_groups_into(tokens, &mut out);
    out
}

pub fn group_count(tokens: usize) -> u64 {
    tokens.div_ceil(SLOTS_PER_GROUP) as u64
}

/// Bases per compressed byte, against a one-byte-per-base ASCII baseline.
pub fn compression_ratio(original_bases: u64, compressed_bytes: u64) -> Result<f64> {
    if compressed_bytes == 0 {
        return Err(Error::ZeroCompressedSize);
    }
    Ok(original_bases as f64 / compressed_bytes as f64)
}
