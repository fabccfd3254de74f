//! Width-generalized group encoding, used only to measure ratios for strides
//! other than 16. Not container-compatible.
//!
//! Same 2-bit header codes and 16-slot groups as the container format, but a
//! verbatim payload takes `ceil(2s/8)` bytes instead of one 32-bit word. Match
//! offsets stay 32 bits. The final group is not padded; decoding stops once
//! the recorded number of bases has been produced.

use crate::compress::{ScanOutput, ScanToken, TokenKind, SLOTS_PER_GROUP};
use crate::error::{Error, Result};
use crate::index::{Orientation, Reference};
use crate::sequence::{PackedSequence, SequenceBuilder};

pub fn verbatim_bytes(s: usize) -> usize {
    (2 * s).div_ceil(8)
}

/// Encoded size without materializing the bytes.
pub fn encoded_len(scan: &ScanOutput, s: usize) -> usize {
    let h = &scan.histogram;
    4 * scan.tokens.len().div_ceil(SLOTS_PER_GROUP)
        + verbatim_bytes(s) * h.get(TokenKind::Verbatim) as usize
        + 4 * (h.get(TokenKind::ForwardMatch) + h.get(TokenKind::ReverseMatch)) as usize
}

pub fn encode(target: &PackedSequence, scan: &ScanOutput, s: usize) -> Vec<u8> {
    let vb = verbatim_bytes(s);
    let mut out = Vec::with_capacity(encoded_len(scan, s));
    for group in scan.tokens.chunks(SLOTS_PER_GROUP) {
        let header = group
            .iter()
            .enumerate()
            .fold(0u32, |h, (i, t)| h | (t.kind().code() << (2 * i)));
        out.extend_from_slice(&header.to_le_bytes());
        for t in group {
            match *t {
                ScanToken::Verbatim { start } => {
                    let n = (target.len() - start).min(s);
                    let mut bytes = target.kmer_unchecked(start, n).packed_bytes().to_vec();
                    bytes.resize(vb, 0);
                    out.extend_from_slice(&bytes);
                }
                ScanToken::ForwardMatch(o) | ScanToken::ReverseMatch(o) => {
                    out.extend_from_slice(&o.to_le_bytes())
                }
                ScanToken::Continuation => {}
            }
        }
    }
    out
}

fn take<'a>(bytes: &'a [u8], pos: &mut usize, n: usize, group: u64, slot: u8) -> Result<&'a [u8]> {
    let b = bytes
        .get(*pos..*pos + n)
        .ok_or_else(|| Error::corrupt(group, slot, "payload exhausted"))?;
    *pos += n;
    Ok(b)
}

pub fn decode(
    bytes: &[u8],
    k: usize,
    s: usize,
    total_bases: usize,
    reference: &Reference,
) -> Result<PackedSequence> {
    let vb = verbatim_bytes(s);
    let mut out = SequenceBuilder::with_capacity(total_bases);
    let mut pos = 0usize;
    let mut last: Option<(Orientation, u32)> = None;
    let mut group = 0u64;
    while out.len() < total_bases {
        let header = u32::from_le_bytes(take(bytes, &mut pos, 4, group, 0)?.try_into().unwrap());
        for slot in 0..SLOTS_PER_GROUP {
            if out.len() >= total_bases {
                break;
            }
            let kind = TokenKind::from_code(header >> (2 * slot));
            let (orientation, o) = match kind {
                TokenKind::Verbatim => {
                    let b = take(bytes, &mut pos, vb, group, slot as u8)?;
                    let mut padded = [0u8; 8];
                    let mut left = s;
                    for chunk in b.chunks(8) {
                        padded.fill(0);
                        padded[..chunk.len()].copy_from_slice(chunk);
                        let n = left.min(32);
                        out.push_bits(u64::from_le_bytes(padded), n);
                        left -= n;
                    }
                    continue;
                }
                TokenKind::ForwardMatch | TokenKind::ReverseMatch => {
                    let o = u32::from_le_bytes(
                        take(bytes, &mut pos, 4, group, slot as u8)?
                            .try_into()
                            .unwrap(),
                    );
                    let orientation = if kind == TokenKind::ForwardMatch {
                        Orientation::Forward
                    } else {
                        Orientation::ReverseComplement
                    };
                    (orientation, Some(o))
                }
                TokenKind::Continuation => {
                    let (orientation, prev) = last.ok_or_else(|| {
                        Error::corrupt(group, slot as u8, "continuation without a preceding match")
                    })?;
                    let o = match orientation {
                        Orientation::Forward => prev.checked_add(k as u32),
                        Orientation::ReverseComplement => prev.checked_sub(k as u32),
                    };
                    (orientation, o)
                }
            };
            let o = o
                .filter(|&o| o as usize + k <= reference.len())
                .ok_or_else(|| Error::corrupt(group, slot as u8, "offset outside the reference"))?;
            let kmer = reference.seq().kmer_unchecked(o as usize, k);
            match orientation {
                Orientation::Forward => out.push_kmer(&kmer),
                Orientation::ReverseComplement => out.push_kmer(&kmer.reverse_complement()),
            }
            last = Some((orientation, o));
        }
        group += 1;
    }
    if pos != bytes.len() {
        return Err(Error::corrupt(group, 0, "trailing bytes"));
    }
    out.truncate(total_bases);
    Ok(out.finish())
}
