//! `.bnc` container: compressed records plus a per-record chunk index keyed by
//! decompressed base offset.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! header (58 bytes)
//!   magic "BNCC" | version u16 | k u16 | s u16 | reference sha256 [32]
//!   record count u64 | index blob offset u64
//! record table, per record
//!   id length u16 | id (UTF-8) | base count u64 | group count u64 | byte offset u64
//! group payload region (records back to back, in table order)
//! index blob
//!   chunk granularity u32
//!   per record: entry count u64, entries of (base offset u64, group u64, byte offset u64)
//!   (entry byte offsets are relative to the record's first group)
//! trailer: sha256 of every preceding byte
//! ```

use std::io::{Read, Write};

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::compress::{
    compress, encode_groups_into, group_count, group_size, CompressParams, Compressed, Token,
    TokenKind, CONTAINER_STRIDE, SLOTS_PER_GROUP,
};
use crate::decompress::{
    decompress, header_bases, payload_words, read_u32, DecodeMode, GroupDecoder, GroupStream,
};
use crate::error::{Error, Result};
use crate::index::{Checksum, Reference, ReferenceIndex};
use crate::sequence::{PackedSequence, SequenceBuilder};

pub const CONTAINER_MAGIC: &[u8; 4] = b"BNCC";
pub const CONTAINER_VERSION: u16 = 1;
pub const HEADER_LEN: usize = 58;
const TRAILER_LEN: usize = 32;
const RECORD_FIXED_LEN: usize = 2 + 24;
const ENTRY_LEN: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChunkEntry {
    pub base_offset: u64,
    pub group: u64,
    pub byte_offset: u64,
}

/// Sorted entry points into a record; every entry starts with clean decoder state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChunkIndex {
    entries: Vec<ChunkEntry>,
}

impl ChunkIndex {
    pub fn entries(&self) -> &[ChunkEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Greatest entry whose base offset is <= `base_offset`.
    pub fn predecessor(&self, base_offset: u64) -> &ChunkEntry {
        let i = self
            .entries
            .partition_point(|e| e.base_offset <= base_offset);
        // entry 0 has key 0, so i >= 1
        &self.entries[i.saturating_sub(1)]
    }
}

/// What the chunk index needs to know about one group.
#[derive(Debug, Clone, Copy)]
struct GroupSummary {
    bases: u64,
    bytes: u64,
    first_match: Option<TokenKind>,
}

fn summarize_tokens(tokens: &[Token], k: usize) -> Vec<GroupSummary> {
    tokens
        .chunks(SLOTS_PER_GROUP)
        .map(|g| GroupSummary {
            bases: g.iter().map(|t| t.bases(k, CONTAINER_STRIDE) as u64).sum(),
            bytes: group_size(g) as u64,
            first_match: g
                .iter()
                .map(Token::kind)
                .find(|&k| k != TokenKind::Verbatim),
        })
        .collect()
}

fn summarize_header(header: u32, k: usize) -> GroupSummary {
    GroupSummary {
        bases: header_bases(header, k),
        bytes: 4 + 4 * payload_words(header) as u64,
        first_match: (0..SLOTS_PER_GROUP)
            .map(|i| TokenKind::from_code(header >> (2 * i)))
            .find(|&k| k != TokenKind::Verbatim),
    }
}

fn index_from_summaries(groups: &[GroupSummary], granularity: u32) -> ChunkIndex {
    // a group boundary is state-clean when the next non-verbatim token is not a continuation
    let mut clean = vec![true; groups.len() + 1];
    for g in (0..groups.len()).rev() {
        clean[g] = match groups[g].first_match {
            Some(kind) => kind != TokenKind::Continuation,
            None => clean[g + 1],
        };
    }
    let mut entries = vec![ChunkEntry {
        base_offset: 0,
        group: 0,
        byte_offset: 0,
    }];
    let (mut bases, mut bytes) = (0u64, 0u64);
    for (g, summary) in groups.iter().enumerate() {
        if g > 0 && g % granularity as usize == 0 && clean[g] {
            entries.push(ChunkEntry {
                base_offset: bases,
                group: g as u64,
                byte_offset: bytes,
            });
        }
        bases += summary.bases;
        bytes += summary.bytes;
    }
    ChunkIndex { entries }
}

/// One entry every `granularity` groups, wherever decoding can start without
/// predecessor state. Entry keys are cumulative decompressed base offsets.
pub fn build_chunk_index(tokens: &[Token], k: usize, granularity: u32) -> ChunkIndex {
    index_from_summaries(&summarize_tokens(tokens, k), granularity.max(1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContainerParams {
    pub k: usize,
    pub s: usize,
    pub chunk_groups: u32,
}

impl ContainerParams {
    pub fn new(k: usize, chunk_groups: u32) -> Self {
        ContainerParams {
            k,
            s: CONTAINER_STRIDE,
            chunk_groups,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.s != CONTAINER_STRIDE {
            return Err(Error::InvalidParams(format!(
                "container version 1 requires s=16, got {}",
                self.s
            )));
        }
        if self.k == 0 || self.k > 64 || !self.k.is_multiple_of(self.s) {
            return Err(Error::InvalidParams(format!(
                "k={} must be a multiple of 16 and at most 64",
                self.k
            )));
        }
        if self.chunk_groups == 0 {
            return Err(Error::InvalidParams(
                "chunk granularity must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RecordInput<'a> {
    pub id: &'a str,
    pub tokens: &'a [Token],
    pub base_count: u64,
}

fn check_base_count(groups: &[GroupSummary], base_count: u64) -> bool {
    match groups.split_last() {
        None => base_count == 0,
        Some((last, rest)) => {
            let before: u64 = rest.iter().map(|g| g.bases).sum();
            before < base_count && base_count <= before + last.bases
        }
    }
}

pub fn write_container<W: Write>(
    records: &[RecordInput<'_>],
    params: &ContainerParams,
    ref_checksum: &Checksum,
    mut sink: W,
) -> Result<()> {
    params.validate()?;
    let mut summaries = Vec::with_capacity(records.len());
    for r in records {
        if r.id.len() > u16::MAX as usize {
            return Err(Error::InvalidParams(format!(
                "record id of {} bytes too long",
                r.id.len()
            )));
        }
        let s = summarize_tokens(r.tokens, params.k);
        // the token expansion of the last group (without padding) must cover the count
        let token_bases: u64 = s.iter().map(|g| g.bases).sum();
        let last_token_bases = r
            .tokens
            .last()
            .map_or(0, |t| t.bases(params.k, params.s) as u64);
        let ok = if r.tokens.is_empty() {
            r.base_count == 0
        } else {
            token_bases - last_token_bases < r.base_count && r.base_count <= token_bases
        };
        if !ok {
            return Err(Error::InvalidParams(format!(
                "record '{}': {} tokens expand to {token_bases} bases, inconsistent with base count {}",
                r.id,
                r.tokens.len(),
                r.base_count
            )));
        }
        summaries.push(s);
    }

    let table_len: usize = records.iter().map(|r| RECORD_FIXED_LEN + r.id.len()).sum();
    let payload_len: u64 = summaries.iter().flatten().map(|g| g.bytes).sum();
    let payload_start = (HEADER_LEN + table_len) as u64;
    let index_offset = payload_start + payload_len;

    let mut out = Vec::with_capacity((index_offset as usize) + 64);
    out.extend_from_slice(CONTAINER_MAGIC);
    out.extend_from_slice(&CONTAINER_VERSION.to_le_bytes());
    out.extend_from_slice(&(params.k as u16).to_le_bytes());
    out.extend_from_slice(&(params.s as u16).to_le_bytes());
    out.extend_from_slice(ref_checksum);
    out.extend_from_slice(&(records.len() as u64).to_le_bytes());
    out.extend_from_slice(&index_offset.to_le_bytes());
    debug_assert_eq!(out.len(), HEADER_LEN);

    let mut offset = payload_start;
    for (r, s) in records.iter().zip(&summaries) {
        out.extend_from_slice(&(r.id.len() as u16).to_le_bytes());
        out.extend_from_slice(r.id.as_bytes());
        out.extend_from_slice(&r.base_count.to_le_bytes());
        out.extend_from_slice(&group_count(r.tokens.len()).to_le_bytes());
        out.extend_from_slice(&offset.to_le_bytes());
        offset += s.iter().map(|g| g.bytes).sum::<u64>();
    }
    for r in records {
        encode_groups_into(r.tokens, &mut out);
    }
    debug_assert_eq!(out.len() as u64, index_offset);

    out.extend_from_slice(&params.chunk_groups.to_le_bytes());
    for s in &summaries {
        let idx = index_from_summaries(s, params.chunk_groups);
        out.extend_from_slice(&(idx.entries.len() as u64).to_le_bytes());
        for e in &idx.entries {
            out.extend_from_slice(&e.base_offset.to_le_bytes());
            out.extend_from_slice(&e.group.to_le_bytes());
            out.extend_from_slice(&e.byte_offset.to_le_bytes());
        }
    }
    let digest: [u8; 32] = Sha256::digest(&out).into();
    out.extend_from_slice(&digest);
    sink.write_all(&out)?;
    Ok(())
}

/// Compresses each `(id, sequence)` pair and writes them as one container.
///
/// Without a chunk granularity only the start of each record is indexed.
pub fn compress_to_container<W: Write>(
    records: &[(&str, &PackedSequence)],
    index: &ReferenceIndex,
    reference: &Reference,
    params: &CompressParams,
    sink: W,
) -> Result<Vec<Compressed>> {
    params.validate()?;
    // records compress independently; collect keeps table order
    let compressed = records
        .par_iter()
        .map(|(_, seq)| compress(seq, index, reference, params))
        .collect::<Result<Vec<_>>>()?;
    let inputs: Vec<RecordInput<'_>> = records
        .iter()
        .zip(&compressed)
        .map(|((id, _), c)| RecordInput {
            id,
            tokens: &c.tokens,
            base_count: c.base_count,
        })
        .collect();
    let cparams = ContainerParams::new(params.k, params.chunk_groups.unwrap_or(u32::MAX));
    write_container(&inputs, &cparams, reference.checksum(), sink)?;
    Ok(compressed)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContainerRecord {
    pub id: String,
    pub base_count: u64,
    pub group_count: u64,
    /// Absolute file offset of the record's first group.
    pub byte_offset: u64,
    pub byte_len: u64,
    pub chunks: ChunkIndex,
}

/// A parsed, fully validated container held in memory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Container {
    bytes: Vec<u8>,
    k: usize,
    s: usize,
    ref_checksum: Checksum,
    chunk_groups: u32,
    records: Vec<ContainerRecord>,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    end: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        let stop = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.end)
            .ok_or_else(|| Error::CorruptFile(format!("truncated while reading {what}")))?;
        let s = &self.bytes[self.pos..stop];
        self.pos = stop;
        Ok(s)
    }

    fn u16(&mut self, what: &str) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().unwrap()))
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }
}

fn corrupt<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::CorruptFile(msg.into()))
}

impl Container {
    pub fn read<R: Read>(mut r: R) -> Result<Self> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        Container::from_bytes(bytes)
    }

    pub fn from_bytes(bytes: Vec<u8>) -> Result<Self> {
        if bytes.len() < HEADER_LEN + 4 + TRAILER_LEN {
            return corrupt("file too short to be a container");
        }
        if &bytes[..4] != CONTAINER_MAGIC {
            return corrupt("not a .bnc container (bad magic)");
        }
        let body_end = bytes.len() - TRAILER_LEN;
        let digest: [u8; 32] = Sha256::digest(&bytes[..body_end]).into();
        if digest[..] != bytes[body_end..] {
            return corrupt("content digest mismatch");
        }
        let mut c = Cursor {
            bytes: &bytes,
            pos: 4,
            end: body_end,
        };
        let version = c.u16("version")?;
        if version != CONTAINER_VERSION {
            return corrupt(format!("unsupported container version {version}"));
        }
        let k = c.u16("k")? as usize;
        let s = c.u16("s")? as usize;
        let params = ContainerParams {
            k,
            s,
            chunk_groups: 1,
        };
        params
            .validate()
            .map_err(|e| Error::CorruptFile(format!("bad header parameters: {e}")))?;
        let ref_checksum: Checksum = c.take(32, "reference checksum")?.try_into().unwrap();
        let record_count = c.u64("record count")?;
        let index_offset = c.u64("index offset")?;
        if record_count > (body_end / RECORD_FIXED_LEN) as u64 {
            return corrupt(format!("implausible record count {record_count}"));
        }
        if index_offset < HEADER_LEN as u64 || index_offset > body_end as u64 {
            return corrupt(format!("index offset {index_offset} out of bounds"));
        }

        let mut table = Vec::with_capacity(record_count as usize);
        c.end = index_offset as usize;
        for _ in 0..record_count {
            let id_len = c.u16("record id length")? as usize;
            let id = std::str::from_utf8(c.take(id_len, "record id")?)
                .map_err(|_| Error::CorruptFile("record id is not UTF-8".into()))?
                .to_string();
            let base_count = c.u64("base count")?;
            let group_count = c.u64("group count")?;
            let byte_offset = c.u64("byte offset")?;
            table.push((id, base_count, group_count, byte_offset));
        }

        // records must tile the payload region exactly, in order
        let mut expected_start = c.pos as u64;
        let mut records = Vec::with_capacity(table.len());
        let mut summaries = Vec::with_capacity(table.len());
        for (i, (id, base_count, group_count, byte_offset)) in table.iter().enumerate() {
            if *byte_offset != expected_start {
                return corrupt(format!(
                    "record {i} starts at {byte_offset}, expected {expected_start}"
                ));
            }
            let end = table.get(i + 1).map_or(index_offset, |next| next.3);
            if end < *byte_offset || end > index_offset {
                return corrupt(format!("record {i} has an invalid byte range"));
            }
            let region = &bytes[*byte_offset as usize..end as usize];
            let groups = walk_groups(region, *group_count, k)
                .map_err(|m| Error::CorruptFile(format!("record {i}: {m}")))?;
            if !check_base_count(&groups, *base_count) {
                return corrupt(format!(
                    "record {i}: base count {base_count} inconsistent with its groups"
                ));
            }
            summaries.push(groups);
            records.push(ContainerRecord {
                id: id.clone(),
                base_count: *base_count,
                group_count: *group_count,
                byte_offset: *byte_offset,
                byte_len: end - byte_offset,
                chunks: ChunkIndex { entries: vec![] },
            });
            expected_start = end;
        }
        if expected_start != index_offset {
            return corrupt("payload region does not end at the index blob");
        }

        let mut c = Cursor {
            bytes: &bytes,
            pos: index_offset as usize,
            end: body_end,
        };
        let chunk_groups = c.u32("chunk granularity")?;
        if chunk_groups == 0 {
            return corrupt("chunk granularity is zero");
        }
        for (rec, groups) in records.iter_mut().zip(&summaries) {
            let n = c.u64("index entry count")?;
            if n > ((c.end - c.pos) / ENTRY_LEN) as u64 {
                return corrupt("index entry count exceeds the blob");
            }
            let mut entries = Vec::with_capacity(n as usize);
            for _ in 0..n {
                entries.push(ChunkEntry {
                    base_offset: c.u64("entry")?,
                    group: c.u64("entry")?,
                    byte_offset: c.u64("entry")?,
                });
            }
            let expected = index_from_summaries(groups, chunk_groups);
            if entries != expected.entries {
                return corrupt(format!(
                    "chunk index of record '{}' does not match its groups",
                    rec.id
                ));
            }
            rec.chunks = expected;
        }
        if c.pos != body_end {
            return corrupt("trailing bytes after the index blob");
        }

        Ok(Container {
            bytes,
            k,
            s,
            ref_checksum,
            chunk_groups,
            records,
        })
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn ref_checksum(&self) -> &Checksum {
        &self.ref_checksum
    }

    pub fn chunk_groups(&self) -> u32 {
        self.chunk_groups
    }

    pub fn records(&self) -> &[ContainerRecord] {
        &self.records
    }

    fn record(&self, i: usize) -> Result<&ContainerRecord> {
        self.records
            .get(i)
            .ok_or_else(|| Error::InvalidParams(format!("no record {i}")))
    }

    fn region(&self, rec: &ContainerRecord) -> &[u8] {
        &self.bytes[rec.byte_offset as usize..(rec.byte_offset + rec.byte_len) as usize]
    }

    pub fn stream(&self, i: usize) -> Result<GroupStream<'_>> {
        let rec = self.record(i)?;
        Ok(GroupStream {
            k: self.k,
            total_bases: rec.base_count,
            ref_checksum: &self.ref_checksum,
            group_count: rec.group_count,
            bytes: self.region(rec),
        })
    }

    pub fn decompress_record(&self, i: usize, reference: &Reference) -> Result<PackedSequence> {
        decompress(self.stream(i)?, reference)
    }

    /// Bases `offset..offset + length` of record `i`, decoding from the nearest
    /// chunk entry at or before `offset`.
    pub fn extract_range(
        &self,
        i: usize,
        reference: &Reference,
        offset: u64,
        length: u64,
    ) -> Result<PackedSequence> {
        let rec = self.record(i)?;
        let end = offset
            .checked_add(length)
            .filter(|&e| e <= rec.base_count)
            .ok_or(Error::OutOfRange {
                start: offset,
                end: offset.saturating_add(length),
                len: rec.base_count,
            })?;
        if reference.checksum() != &self.ref_checksum {
            return Err(Error::ChecksumMismatch { what: "container" });
        }
        if length == 0 {
            return Ok(PackedSequence::new());
        }
        let entry = *rec.chunks.predecessor(offset);
        let skip = (offset - entry.base_offset) as usize;
        let need = skip + length as usize;
        let mut dec = GroupDecoder::new(self.region(rec), self.k, reference, DecodeMode::Batched);
        dec.seek(entry.byte_offset as usize, entry.group);
        let mut out = SequenceBuilder::with_capacity(need + 1024);
        while out.len() < need {
            if dec.group() >= rec.group_count {
                return Err(Error::corrupt(
                    dec.group(),
                    0,
                    "record ends before the requested range",
                ));
            }
            dec.next_group(&mut out)?;
        }
        debug_assert!(entry.base_offset + out.len() as u64 >= end);
        out.finish().slice(skip, length as usize)
    }
}

/// Validates a record's group region and summarizes each group.
fn walk_groups(region: &[u8], group_count: u64, k: usize) -> Result<Vec<GroupSummary>, String> {
    if group_count > (region.len() / 4) as u64 {
        return Err(format!(
            "group count {group_count} exceeds the payload size"
        ));
    }
    let mut out = Vec::with_capacity(group_count as usize);
    let mut pos = 0usize;
    for g in 0..group_count {
        let header = read_u32(region, pos).ok_or(format!("group {g} header truncated"))?;
        let summary = summarize_header(header, k);
        pos += summary.bytes as usize;
        if pos > region.len() {
            return Err(format!("group {g} payload truncated"));
        }
        out.push(summary);
    }
    if pos != region.len() {
        return Err(format!(
            "{} bytes of payload left after {group_count} groups",
            region.len() - pos
        ));
    }
    Ok(out)
}
