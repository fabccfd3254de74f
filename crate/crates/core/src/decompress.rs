//! Group decoder. Rebuilds a target from its group stream and the reference.

use crate::compress::{TokenKind, CONTAINER_STRIDE, SLOTS_PER_GROUP};
use crate::error::{Error, Result};
use crate::index::{Checksum, Orientation, Reference};
use crate::sequence::{PackedSequence, SequenceBuilder};

/// Decoder state carried across slots and groups.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DecodeState {
    /// Orientation and reference offset of the last match or continuation.
    pub last: Option<(Orientation, u32)>,
    pub bases_emitted: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DecodeMode {
    /// One slot per step.
    Slot,
    /// Whole-group and 4-slot fast paths for runs of verbatims or continuations.
    #[default]
    Batched,
}

/// Number of payload words that follow `header`.
#[inline]
pub fn payload_words(header: u32) -> usize {
    // a slot is a continuation iff both of its bits are set
    let both = header & (header >> 1) & 0x5555_5555;
    SLOTS_PER_GROUP - both.count_ones() as usize
}

/// Bases produced by a group with this header.
#[inline]
pub fn header_bases(header: u32, k: usize) -> u64 {
    let verbatim = (!header & (!header >> 1) & 0x5555_5555).count_ones() as u64;
    verbatim * CONTAINER_STRIDE as u64 + (SLOTS_PER_GROUP as u64 - verbatim) * k as u64
}

fn check_span(reference: &Reference, offset: u64, len: u64, group: u64, slot: u8) -> Result<()> {
    if offset + len > reference.len() as u64 {
        return Err(Error::corrupt(
            group,
            slot,
            format!(
                "reference span {offset}..{} beyond reference length {}",
                offset + len,
                reference.len()
            ),
        ));
    }
    Ok(())
}

fn emit_forward(out: &mut SequenceBuilder, reference: &Reference, offset: u32, len: usize) {
    out.extend_from(reference.seq(), offset as usize, len);
}

fn emit_reverse(out: &mut SequenceBuilder, reference: &Reference, offset: u32, len: usize) {
    let kmer = reference.seq().kmer_unchecked(offset as usize, len);
    out.push_kmer(&kmer.reverse_complement());
}

#[inline]
fn next_word(payload: &[u32], used: &mut usize, group: u64, slot: u8) -> Result<u32> {
    let w = *payload
        .get(*used)
        .ok_or_else(|| Error::corrupt(group, slot, "payload exhausted"))?;
    *used += 1;
    Ok(w)
}

fn decode_slot(
    kind: TokenKind,
    payload: &[u32],
    used: &mut usize,
    reference: &Reference,
    state: &mut DecodeState,
    k: usize,
    out: &mut SequenceBuilder,
    group: u64,
    slot: u8,
) -> Result<()> {
    match kind {
        TokenKind::Verbatim => {
            let w = next_word(payload, used, group, slot)?;
            out.push_bits(w as u64, CONTAINER_STRIDE);
            state.bases_emitted += CONTAINER_STRIDE as u64;
        }
        TokenKind::ForwardMatch | TokenKind::ReverseMatch => {
            let o = next_word(payload, used, group, slot)?;
            check_span(reference, o as u64, k as u64, group, slot)?;
            let orientation = if kind == TokenKind::ForwardMatch {
                emit_forward(out, reference, o, k);
                Orientation::Forward
            } else {
                emit_reverse(out, reference, o, k);
                Orientation::ReverseComplement
            };
            state.last = Some((orientation, o));
            state.bases_emitted += k as u64;
        }
        TokenKind::Continuation => {
            let Some((orientation, last)) = state.last else {
                return Err(Error::corrupt(
                    group,
                    slot,
                    "continuation without a preceding match",
                ));
            };
            let o = match orientation {
                Orientation::Forward => last.checked_add(k as u32),
                Orientation::ReverseComplement => last.checked_sub(k as u32),
            }
            .ok_or_else(|| Error::corrupt(group, slot, "continuation runs off the reference"))?;
            check_span(reference, o as u64, k as u64, group, slot)?;
            match orientation {
                Orientation::Forward => emit_forward(out, reference, o, k),
                Orientation::ReverseComplement => emit_reverse(out, reference, o, k),
            }
            state.last = Some((orientation, o));
            state.bases_emitted += k as u64;
        }
    }
    Ok(())
}

/// Decodes one group's slots 0..16 in order. `payload` holds the words after
/// the header; returns how many of them were consumed.
pub fn decode_group(
    header: u32,
    payload: &[u32],
    reference: &Reference,
    state: &mut DecodeState,
    k: usize,
    out: &mut SequenceBuilder,
    group: u64,
    mode: DecodeMode,
) -> Result<usize> {
    let mut used = 0usize;
    let mut slot = 0usize;
    if mode == DecodeMode::Batched {
        if header == 0 && payload.len() >= SLOTS_PER_GROUP {
            push_words(out, &payload[..SLOTS_PER_GROUP]);
            state.bases_emitted += (SLOTS_PER_GROUP * CONTAINER_STRIDE) as u64;
            return Ok(SLOTS_PER_GROUP);
        }
        if header == u32::MAX && continuation_run(reference, state, k, SLOTS_PER_GROUP, out) {
            return Ok(0);
        }
    }
    while slot < SLOTS_PER_GROUP {
        if mode == DecodeMode::Batched && slot.is_multiple_of(4) {
            let window = (header >> (2 * slot)) & 0xFF;
            if window == 0 && payload.len() >= used + 4 {
                push_words(out, &payload[used..used + 4]);
                used += 4;
                state.bases_emitted += 4 * CONTAINER_STRIDE as u64;
                slot += 4;
                continue;
            }
            if window == 0xFF && continuation_run(reference, state, k, 4, out) {
                slot += 4;
                continue;
            }
        }
        let kind = TokenKind::from_code(header >> (2 * slot));
        decode_slot(
            kind, payload, &mut used, reference, state, k, out, group, slot as u8,
        )?;
        slot += 1;
    }
    Ok(used)
}

fn push_words(out: &mut SequenceBuilder, words: &[u32]) {
    for pair in words.chunks(2) {
        let lo = pair[0] as u64;
        let hi = pair.get(1).map_or(0, |&w| w as u64);
        out.push_bits(lo | hi << 32, pair.len() * CONTAINER_STRIDE);
    }
}

/// Emits `n` consecutive continuations as one reference span. Returns false
/// (emitting nothing) when the run cannot be taken in one piece, leaving the
/// slot-by-slot path to decode it or report the precise error.
fn continuation_run(
    reference: &Reference,
    state: &mut DecodeState,
    k: usize,
    n: usize,
    out: &mut SequenceBuilder,
) -> bool {
    let Some((orientation, last)) = state.last else {
        return false;
    };
    let span = (n * k) as u64;
    let last = last as u64;
    let ref_len = reference.len() as u64;
    match orientation {
        Orientation::Forward => {
            let start = last + k as u64;
            if start + span > ref_len {
                return false;
            }
            out.extend_from(reference.seq(), start as usize, span as usize);
            state.last = Some((orientation, (last + span) as u32));
        }
        Orientation::ReverseComplement => {
            if last < span {
                return false;
            }
            let start = last - span;
            emit_reverse(out, reference, start as u32, span as usize);
            state.last = Some((orientation, start as u32));
        }
    }
    state.bases_emitted += span;
    true
}

/// A borrowed group stream plus the footer fields needed to decode it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupStream<'a> {
    pub k: usize,
    pub total_bases: u64,
    pub ref_checksum: &'a Checksum,
    pub group_count: u64,
    pub bytes: &'a [u8],
}

/// An owned compressed record: group bytes plus footer metadata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressedStream {
    pub k: u16,
    pub s: u16,
    pub total_bases: u64,
    pub ref_checksum: Checksum,
    pub group_count: u64,
    pub groups: Vec<u8>,
}

impl CompressedStream {
    pub fn from_tokens(
        compressed: &crate::compress::Compressed,
        k: usize,
        ref_checksum: Checksum,
    ) -> Self {
        CompressedStream {
            k: k as u16,
            s: CONTAINER_STRIDE as u16,
            total_bases: compressed.base_count,
            ref_checksum,
            group_count: crate::compress::group_count(compressed.tokens.len()),
            groups: crate::compress::encode_groups(&compressed.tokens),
        }
    }

    pub fn view(&self) -> GroupStream<'_> {
        GroupStream {
            k: self.k as usize,
            total_bases: self.total_bases,
            ref_checksum: &self.ref_checksum,
            group_count: self.group_count,
            bytes: &self.groups,
        }
    }

    pub fn compressed_len(&self) -> usize {
        self.groups.len()
    }
}

/// Walks groups in a byte buffer, starting from an arbitrary group boundary.
pub struct GroupDecoder<'a> {
    bytes: &'a [u8],
    pos: usize,
    group: u64,
    k: usize,
    reference: &'a Reference,
    pub state: DecodeState,
    mode: DecodeMode,
    words: Vec<u32>,
}

impl<'a> GroupDecoder<'a> {
    pub fn new(bytes: &'a [u8], k: usize, reference: &'a Reference, mode: DecodeMode) -> Self {
        GroupDecoder {
            bytes,
            pos: 0,
            group: 0,
            k,
            reference,
            state: DecodeState::default(),
            mode,
            words: Vec::with_capacity(SLOTS_PER_GROUP),
        }
    }

    /// Positions the decoder at `byte_offset`, which must be the start of group `group`.
    pub fn seek(&mut self, byte_offset: usize, group: u64) {
        self.pos = byte_offset;
        self.group = group;
        self.state = DecodeState::default();
    }

    pub fn byte_position(&self) -> usize {
        self.pos
    }

    pub fn group(&self) -> u64 {
        self.group
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.bytes.len()
    }

    /// Decodes the next group into `out`, returning the bases it produced.
    pub fn next_group(&mut self, out: &mut SequenceBuilder) -> Result<u64> {
        let g = self.group;
        let header = read_u32(self.bytes, self.pos)
            .ok_or_else(|| Error::corrupt(g, 0, "stream ends inside a group header"))?;
        let n = payload_words(header);
        let body = self.pos + 4;
        let end = body + 4 * n;
        if end > self.bytes.len() {
            return Err(Error::corrupt(g, 0, "stream ends inside a group payload"));
        }
        self.words.clear();
        self.words.extend(
            self.bytes[body..end]
                .chunks_exact(4)
                .map(|c| u32::from_le_bytes(c.try_into().unwrap())),
        );
        let before = self.state.bases_emitted;
        let used = decode_group(
            header,
            &self.words,
            self.reference,
            &mut self.state,
            self.k,
            out,
            g,
            self.mode,
        )?;
        debug_assert_eq!(used, n);
        self.pos = end;
        self.group += 1;
        Ok(self.state.bases_emitted - before)
    }
}

#[inline]
pub(crate) fn read_u32(bytes: &[u8], at: usize) -> Option<u32> {
    bytes
        .get(at..at.checked_add(4)?)
        .map(|b| u32::from_le_bytes(b.try_into().unwrap()))
}

pub fn decompress(stream: GroupStream<'_>, reference: &Reference) -> Result<PackedSequence> {
    decompress_with(stream, reference, DecodeMode::Batched)
}

pub fn decompress_with(
    stream: GroupStream<'_>,
    reference: &Reference,
    mode: DecodeMode,
) -> Result<PackedSequence> {
    if stream.ref_checksum != reference.checksum() {
        return Err(Error::ChecksumMismatch {
            what: "compressed stream",
        });
    }
    if stream.k == 0 {
        return Err(Error::CorruptFile("k is zero".into()));
    }
    if stream.group_count > (stream.bytes.len() / 4) as u64 {
        return Err(Error::corrupt(0, 0, "group count exceeds the stream size"));
    }
    let max_per_group = header_bases(u32::MAX, stream.k).max(header_bases(0, stream.k));
    if stream.total_bases > stream.group_count.saturating_mul(max_per_group) {
        return Err(Error::CorruptFile(format!(
            "{} groups cannot hold {} bases",
            stream.group_count, stream.total_bases
        )));
    }
    let mut out = SequenceBuilder::with_capacity(stream.total_bases as usize);
    let mut dec = GroupDecoder::new(stream.bytes, stream.k, reference, mode);
    let mut last_group_bases = 0;
    for _ in 0..stream.group_count {
        last_group_bases = dec.next_group(&mut out)?;
    }
    if !dec.at_end() {
        return Err(Error::corrupt(
            stream.group_count,
            0,
            "trailing bytes after the last group",
        ));
    }
    let emitted = dec.state.bases_emitted;
    let before_last = emitted - last_group_bases;
    let fits = if stream.group_count == 0 {
        stream.total_bases == 0
    } else {
        before_last < stream.total_bases && stream.total_bases <= emitted
    };
    if !fits {
        return Err(Error::corrupt(
            stream.group_count,
            0,
            format!(
                "stream decodes to {emitted} bases, inconsistent with the recorded {}",
                stream.total_bases
            ),
        ));
    }
    out.truncate(stream.total_bases as usize);
    Ok(out.finish())
}
