//! Nucleotide alphabet, 2-bit packing, k-mers and reverse complement.
//!
//! Bases are stored four to a byte, position 0 in the lowest two bits:
//!
//! ```text
//! "ACGT" -> 0b11_10_01_00 = 0xE4
//! ```
//!
//! The same little-endian order is used inside [`Kmer`] words, so the low
//! nibble of a k-mer holds its first two bases.

use std::fmt;
use std::io::{Read, Write};

use smallvec::SmallVec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum BaseCode {
    A = 0b00,
    C = 0b01,
    G = 0b10,
    T = 0b11,
}

impl BaseCode {
    pub const ALL: [BaseCode; 4] = [BaseCode::A, BaseCode::C, BaseCode::G, BaseCode::T];

    #[inline]
    pub fn from_bits(bits: u8) -> BaseCode {
        Self::ALL[(bits & 0b11) as usize]
    }

    #[inline]
    pub fn from_ascii(byte: u8) -> Option<BaseCode> {
        match byte {
            b'A' | b'a' => Some(BaseCode::A),
            b'C' | b'c' => Some(BaseCode::C),
            b'G' | b'g' => Some(BaseCode::G),
            b'T' | b't' => Some(BaseCode::T),
            _ => None,
        }
    }

    #[inline]
    pub fn bits(self) -> u8 {
        self as u8
    }

    #[inline]
    pub fn to_ascii(self) -> u8 {
        b"ACGT"[self as usize]
    }

    /// A<->T, C<->G. With this code assignment that is a 2-bit NOT.
    #[inline]
    pub fn complement(self) -> BaseCode {
        BaseCode::from_bits(!self.bits())
    }
}

#[inline]
fn base_mask(n: usize) -> u64 {
    if n >= 32 {
        u64::MAX
    } else {
        (1u64 << (2 * n)) - 1
    }
}

/// Immutable 2-bit packed nucleotide sequence.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct PackedSequence {
    data: Vec<u8>,
    len: usize,
}

impl PackedSequence {
    pub fn new() -> Self {
        Self::default()
    }

    /// Packs an ACGT string (either case). Anything else is rejected with its position.
    pub fn from_ascii(ascii: &[u8]) -> Result<Self> {
        let mut data = vec![0u8; ascii.len().div_ceil(4)];
        for (i, &b) in ascii.iter().enumerate() {
            let code = BaseCode::from_ascii(b).ok_or(Error::InvalidBase {
                position: i,
                found: b as char,
            })?;
            data[i >> 2] |= code.bits() << ((i & 3) * 2);
        }
        Ok(PackedSequence {
            data,
            len: ascii.len(),
        })
    }

    /// Wraps an existing packed buffer, checking the length and padding invariants.
    pub fn from_raw_parts(data: Vec<u8>, len: usize) -> Result<Self> {
        if data.len() != len.div_ceil(4) {
            return Err(Error::CorruptFile(format!(
                "{} packed bytes cannot hold exactly {} bases",
                data.len(),
                len
            )));
        }
        if !len.is_multiple_of(4) {
            let last = data[data.len() - 1];
            if last >> ((len % 4) * 2) != 0 {
                return Err(Error::CorruptFile(
                    "unused bits of the final packed byte are not zero".into(),
                ));
            }
        }
        Ok(PackedSequence { data, len })
    }

    pub fn from_bases(bases: impl IntoIterator<Item = BaseCode>) -> Self {
        let mut builder = SequenceBuilder::new();
        for b in bases {
            builder.push(b);
        }
        builder.finish()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn as_bytes(&self) -> &[u8] {
        &self.data
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.data
    }

    #[inline]
    pub fn base(&self, i: usize) -> BaseCode {
        assert!(i < self.len, "base index {i} out of range ({})", self.len);
        BaseCode::from_bits(self.data[i >> 2] >> ((i & 3) * 2))
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = BaseCode> + '_ {
        (0..self.len).map(move |i| BaseCode::from_bits(self.data[i >> 2] >> ((i & 3) * 2)))
    }

    pub fn to_ascii(&self) -> Vec<u8> {
        self.iter().map(BaseCode::to_ascii).collect()
    }

    pub fn to_ascii_string(&self) -> String {
        // ACGT only, always valid UTF-8
        String::from_utf8(self.to_ascii()).unwrap()
    }

    /// Up to 32 bases starting at `offset`, packed into the low bits of a u64.
    ///
    /// Caller guarantees `offset + n <= len` and `n <= 32`.
    #[inline]
    pub(crate) fn bits_at(&self, offset: usize, n: usize) -> u64 {
        debug_assert!(n <= 32 && offset + n <= self.len);
        if n == 0 {
            return 0;
        }
        let byte = offset >> 2;
        let shift = (offset & 3) * 2;
        let end = (byte + 9).min(self.data.len());
        let mut buf = [0u8; 16];
        buf[..end - byte].copy_from_slice(&self.data[byte..end]);
        ((u128::from_le_bytes(buf) >> shift) as u64) & base_mask(n)
    }

    fn check_range(&self, start: usize, k: usize) -> Result<()> {
        match start.checked_add(k) {
            Some(end) if end <= self.len => Ok(()),
            _ => Err(Error::OutOfRange {
                start: start as u64,
                end: (start as u64).saturating_add(k as u64),
                len: self.len as u64,
            }),
        }
    }

    /// The k-mer of width `k` starting at `offset`.
    pub fn kmer_at(&self, offset: usize, k: usize) -> Result<Kmer> {
        self.check_range(offset, k)?;
        Ok(self.kmer_unchecked(offset, k))
    }

    #[inline]
    pub(crate) fn kmer_unchecked(&self, offset: usize, k: usize) -> Kmer {
        let mut words = SmallVec::new();
        let mut done = 0;
        while done < k {
            let n = (k - done).min(32);
            words.push(self.bits_at(offset + done, n));
            done += n;
        }
        Kmer { words, k }
    }

    /// Reverse complement of the `k` bases starting at `start`.
    pub fn reverse_complement(&self, start: usize, k: usize) -> Result<Kmer> {
        Ok(self.kmer_at(start, k)?.reverse_complement())
    }

    pub fn slice(&self, start: usize, len: usize) -> Result<PackedSequence> {
        self.check_range(start, len)?;
        let mut out = SequenceBuilder::with_capacity(len);
        out.extend_from(self, start, len);
        Ok(out.finish())
    }

    /// Reverse complement of the whole sequence.
    pub fn reverse_complemented(&self) -> PackedSequence {
        PackedSequence::from_bases((0..self.len).rev().map(|i| self.base(i).complement()))
    }

    /// Writes the `.2bit-raw` form: u64 LE base count followed by the packed bytes.
    pub fn write_2bit_raw<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&(self.len as u64).to_le_bytes())?;
        w.write_all(&self.data)?;
        Ok(())
    }

    pub fn read_2bit_raw<R: Read>(mut r: R) -> Result<Self> {
        let mut len = [0u8; 8];
        r.read_exact(&mut len)?;
        let len = u64::from_le_bytes(len);
        let len = usize::try_from(len)
            .map_err(|_| Error::CorruptFile(format!("base count {len} too large")))?;
        let mut data = Vec::new();
        r.read_to_end(&mut data)?;
        PackedSequence::from_raw_parts(data, len)
    }
}

impl fmt::Debug for PackedSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const SHOW: usize = 48;
        let shown: String = self
            .iter()
            .take(SHOW)
            .map(|b| b.to_ascii() as char)
            .collect();
        let more = if self.len > SHOW { "..." } else { "" };
        write!(f, "PackedSequence({} bp: {shown}{more})", self.len)
    }
}

impl fmt::Display for PackedSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            write!(f, "{}", b.to_ascii() as char)?;
        }
        Ok(())
    }
}

/// Append-only packer used by the parser and the decoder.
#[derive(Debug, Default, Clone)]
pub struct SequenceBuilder {
    data: Vec<u8>,
    len: usize,
}

impl SequenceBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bases: usize) -> Self {
        SequenceBuilder {
            data: Vec::with_capacity(bases.div_ceil(4)),
            len: 0,
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn push(&mut self, base: BaseCode) {
        let shift = (self.len & 3) * 2;
        if shift == 0 {
            self.data.push(base.bits());
        } else {
            *self.data.last_mut().unwrap() |= base.bits() << shift;
        }
        self.len += 1;
    }

    /// Appends `n <= 32` bases taken from the low bits of `bits`.
    pub fn push_bits(&mut self, bits: u64, n: usize) {
        debug_assert!(n <= 32);
        let mut bits = bits & base_mask(n);
        let mut n = n;
        // fill the partial byte first, then whole bytes
        while n > 0 && self.len & 3 != 0 {
            self.push(BaseCode::from_bits(bits as u8));
            bits >>= 2;
            n -= 1;
        }
        while n >= 4 {
            self.data.push(bits as u8);
            bits >>= 8;
            self.len += 4;
            n -= 4;
        }
        for _ in 0..n {
            self.push(BaseCode::from_bits(bits as u8));
            bits >>= 2;
        }
    }

    pub fn push_kmer(&mut self, kmer: &Kmer) {
        let mut left = kmer.k;
        for &w in &kmer.words {
            let n = left.min(32);
            self.push_bits(w, n);
            left -= n;
        }
    }

    /// Copies `len` bases of `src` starting at `start`. Range must be valid.
    pub fn extend_from(&mut self, src: &PackedSequence, start: usize, len: usize) {
        let mut done = 0;
        while done < len {
            let n = (len - done).min(32);
            self.push_bits(src.bits_at(start + done, n), n);
            done += n;
        }
    }

    /// Drops bases past `len`.
    pub fn truncate(&mut self, len: usize) {
        if len >= self.len {
            return;
        }
        self.data.truncate(len.div_ceil(4));
        if !len.is_multiple_of(4) {
            let last = self.data.last_mut().unwrap();
            *last &= (1u8 << ((len % 4) * 2)) - 1;
        }
        self.len = len;
    }

    pub fn finish(self) -> PackedSequence {
        PackedSequence {
            data: self.data,
            len: self.len,
        }
    }
}

/// A packed k-mer of arbitrary width.
///
/// Base `i` lives in word `i / 32` at bits `2*(i%32)..`. Bits above `2k` are zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Kmer {
    words: SmallVec<[u64; 2]>,
    k: usize,
}

impl Kmer {
    pub fn from_ascii(ascii: &[u8]) -> Result<Self> {
        let seq = PackedSequence::from_ascii(ascii)?;
        Ok(seq.kmer_unchecked(0, seq.len()))
    }

    /// Builds a k-mer (k <= 64) from a packed value; bits above 2k must be zero.
    pub fn from_u128(packed: u128, k: usize) -> Result<Self> {
        if k > 64 {
            return Err(Error::InvalidParams(format!(
                "k={k} does not fit in 128 bits"
            )));
        }
        if k < 64 && packed >> (2 * k) != 0 {
            return Err(Error::InvalidParams(format!(
                "packed value has bits set above base {k}"
            )));
        }
        let mut words = SmallVec::new();
        if k > 0 {
            words.push(packed as u64);
        }
        if k > 32 {
            words.push((packed >> 64) as u64);
        }
        Ok(Kmer { words, k })
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// The packed value, for k <= 64.
    pub fn as_u128(&self) -> Option<u128> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0] as u128),
            2 => Some(self.words[0] as u128 | (self.words[1] as u128) << 64),
            _ => None,
        }
    }

    /// Low four bits of the packed value (first two bases).
    #[inline]
    pub fn low_nibble(&self) -> u8 {
        self.words.first().map_or(0, |w| (*w & 0xF) as u8)
    }

    pub fn base(&self, i: usize) -> BaseCode {
        assert!(i < self.k);
        BaseCode::from_bits((self.words[i / 32] >> ((i % 32) * 2)) as u8)
    }

    /// Little-endian packed bytes, `ceil(k/4)` of them. This is the hashed form.
    pub fn packed_bytes(&self) -> SmallVec<[u8; 16]> {
        let mut out: SmallVec<[u8; 16]> = SmallVec::new();
        for w in &self.words {
            out.extend_from_slice(&w.to_le_bytes());
        }
        out.truncate(self.k.div_ceil(4));
        out
    }

    pub fn reverse_complement(&self) -> Kmer {
        let n = self.words.len();
        if n == 0 {
            return self.clone();
        }
        let mut out: SmallVec<[u64; 2]> = self.words.iter().rev().map(|&w| rc_word(w)).collect();
        // the padded tail of the last word turned into leading T's; shift them out
        let pad_bits = (32 * n - self.k) * 2;
        shift_right(&mut out, pad_bits);
        let last = self.k - 32 * (n - 1);
        out[n - 1] &= base_mask(last);
        Kmer {
            words: out,
            k: self.k,
        }
    }

    pub fn to_ascii(&self) -> Vec<u8> {
        (0..self.k).map(|i| self.base(i).to_ascii()).collect()
    }
}

impl fmt::Debug for Kmer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Kmer({})", String::from_utf8_lossy(&self.to_ascii()))
    }
}

/// Complements all 32 bases of a word and reverses their order.
#[inline]
fn rc_word(w: u64) -> u64 {
    let r = (!w).reverse_bits();
    ((r >> 1) & 0x5555_5555_5555_5555) | ((r & 0x5555_5555_5555_5555) << 1)
}

fn shift_right(words: &mut [u64], bits: usize) {
    if bits == 0 {
        return;
    }
    let n = words.len();
    let (wshift, bshift) = (bits / 64, bits % 64);
    for i in 0..n {
        let src = i + wshift;
        let lo = if src < n { words[src] } else { 0 };
        let hi = if src + 1 < n { words[src + 1] } else { 0 };
        words[i] = if bshift == 0 {
            lo
        } else {
            (lo >> bshift) | (hi << (64 - bshift))
        };
    }
}

/// Anything k-mers can be read from by offset: a plain packed sequence, or
/// the byte-aligned shifted copies.
pub trait KmerSource {
    fn base_len(&self) -> usize;

    /// Caller guarantees `offset + k <= base_len()`.
    fn kmer_unchecked(&self, offset: usize, k: usize) -> Kmer;

    fn kmer_equals(&self, offset: usize, kmer: &Kmer) -> bool {
        offset
            .checked_add(kmer.k())
            .is_some_and(|end| end <= self.base_len())
            && self.kmer_unchecked(offset, kmer.k()) == *kmer
    }
}

impl KmerSource for PackedSequence {
    #[inline]
    fn base_len(&self) -> usize {
        self.len
    }

    #[inline]
    fn kmer_unchecked(&self, offset: usize, k: usize) -> Kmer {
        PackedSequence::kmer_unchecked(self, offset, k)
    }
}

/// Four copies of a packed sequence, copy `r` starting at base `r`, so that
/// every k-mer is byte-aligned in exactly one copy and compares with memcmp.
#[derive(Clone, Debug)]
pub struct ShiftedCopies {
    copies: [Vec<u8>; 4],
    len: usize,
}

impl ShiftedCopies {
    pub fn new(seq: &PackedSequence) -> Self {
        let copies = std::array::from_fn(|r| {
            if r >= seq.len() {
                Vec::new()
            } else {
                let mut b = SequenceBuilder::with_capacity(seq.len() - r);
                b.extend_from(seq, r, seq.len() - r);
                b.finish().into_bytes()
            }
        });
        ShiftedCopies {
            copies,
            len: seq.len(),
        }
    }

    /// Byte-aligned view of the bases starting at `offset`.
    #[inline]
    fn aligned(&self, offset: usize) -> &[u8] {
        let r = offset & 3;
        &self.copies[r][(offset - r) >> 2..]
    }
}

impl KmerSource for ShiftedCopies {
    fn base_len(&self) -> usize {
        self.len
    }

    fn kmer_unchecked(&self, offset: usize, k: usize) -> Kmer {
        let bytes = &self.aligned(offset)[..k.div_ceil(4)];
        let mut words: SmallVec<[u64; 2]> = bytes
            .chunks(8)
            .map(|c| {
                let mut b = [0u8; 8];
                b[..c.len()].copy_from_slice(c);
                u64::from_le_bytes(b)
            })
            .collect();
        if let Some(last) = words.last_mut() {
            let tail = k - 32 * (k.div_ceil(32) - 1);
            *last &= base_mask(tail);
        }
        Kmer { words, k }
    }

    fn kmer_equals(&self, offset: usize, kmer: &Kmer) -> bool {
        let k = kmer.k();
        if offset.checked_add(k).is_none_or(|end| end > self.len) {
            return false;
        }
        let want = kmer.packed_bytes();
        let have = &self.aligned(offset)[..want.len()];
        let full = k / 4;
        if have[..full] != want[..full] {
            return false;
        }
        // a partial final byte may carry the following bases
        k.is_multiple_of(4) || (have[full] & ((1u8 << ((k % 4) * 2)) - 1)) == want[full]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pack(s: &str) -> PackedSequence {
        PackedSequence::from_ascii(s.as_bytes()).unwrap()
    }

    #[test]
    fn pack_layout() {
        assert_eq!(pack("ACGT").as_bytes(), &[0xE4]);
        assert_eq!(pack("AAAA").as_bytes(), &[0x00]);
        let empty = pack("");
        assert_eq!(empty.len(), 0);
        assert!(empty.as_bytes().is_empty());
        assert_eq!(pack("acgt"), pack("ACGT"));
    }

    #[test]
    fn pack_rejects_non_acgt_with_position() {
        match PackedSequence::from_ascii(b"ACNT") {
            Err(Error::InvalidBase { position, found }) => {
                assert_eq!(position, 2);
                assert_eq!(found, 'N');
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn raw_parts_validate_padding() {
        assert!(PackedSequence::from_raw_parts(vec![0xE4], 4).is_ok());
        assert!(PackedSequence::from_raw_parts(vec![0x14], 2).is_err());
        assert!(PackedSequence::from_raw_parts(vec![0x00, 0x00], 4).is_err());
    }

    #[test]
    fn complement_is_bitwise_not() {
        let table = [
            (BaseCode::A, BaseCode::T),
            (BaseCode::C, BaseCode::G),
            (BaseCode::G, BaseCode::C),
            (BaseCode::T, BaseCode::A),
        ];
        for (b, c) in table {
            assert_eq!(b.complement(), c);
            assert_eq!(!b.bits() & 0b11, c.bits());
        }
    }

    #[test]
    fn reverse_complement_examples() {
        for (input, want) in [("ACGT", "ACGT"), ("AAAA", "TTTT"), ("AACG", "CGTT")] {
            let rc = pack(input).reverse_complement(0, 4).unwrap();
            assert_eq!(rc.to_ascii(), want.as_bytes());
        }
    }

    #[test]
    fn kmer_at_examples() {
        let s = pack("ACGTACGT");
        assert_eq!(s.kmer_at(0, 4).unwrap(), Kmer::from_ascii(b"ACGT").unwrap());
        assert_eq!(s.kmer_at(4, 4).unwrap(), Kmer::from_ascii(b"ACGT").unwrap());
        // oracle: unpack to ASCII, then substring
        let t = pack("ACGTAC");
        let ascii = t.to_ascii();
        assert_eq!(
            t.kmer_at(2, 4).unwrap(),
            Kmer::from_ascii(&ascii[2..6]).unwrap()
        );
        assert!(t.kmer_at(3, 4).is_err());
        assert!(t.kmer_at(usize::MAX, 4).is_err());
    }

    #[test]
    fn kmer_low_nibble_is_first_two_bases() {
        let k = Kmer::from_ascii(b"GTAAAAAA").unwrap();
        assert_eq!(k.low_nibble(), 0b11_10);
    }

    #[test]
    fn u128_view_matches_layout() {
        let k = Kmer::from_ascii(b"ACGT").unwrap();
        assert_eq!(k.as_u128(), Some(0xE4));
        assert_eq!(Kmer::from_u128(0xE4, 4).unwrap(), k);
        assert!(Kmer::from_u128(0x1E4, 4).is_err());
    }

    #[test]
    fn builder_truncate_clears_bits() {
        let mut b = SequenceBuilder::new();
        b.push_bits(0xFFFF, 8);
        b.truncate(5);
        let s = b.finish();
        assert_eq!(s.as_bytes(), &[0xFF, 0x03]);
        assert_eq!(s.to_ascii(), b"TTTTT");
    }

    #[test]
    fn two_bit_raw_round_trip() {
        let s = pack("ACGTTGCAA");
        let mut buf = Vec::new();
        s.write_2bit_raw(&mut buf).unwrap();
        assert_eq!(&buf[..8], &9u64.to_le_bytes());
        assert_eq!(PackedSequence::read_2bit_raw(&buf[..]).unwrap(), s);
        assert!(PackedSequence::read_2bit_raw(&buf[..10]).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn dna(max: usize) -> impl Strategy<Value = String> {
            proptest::string::string_regex(&format!("[ACGT]{{0,{max}}}")).unwrap()
        }

        fn rc_ascii(s: &[u8]) -> Vec<u8> {
            s.iter()
                .rev()
                .map(|&b| match b {
                    b'A' => b'T',
                    b'C' => b'G',
                    b'G' => b'C',
                    _ => b'A',
                })
                .collect()
        }

        proptest! {
            #[test]
            fn pack_unpack_round_trip(s in dna(300)) {
                let p = pack(&s);
                prop_assert_eq!(p.as_bytes().len(), s.len().div_ceil(4));
                prop_assert_eq!(p.to_ascii(), s.as_bytes());
            }

            #[test]
            fn kmer_at_matches_substring(s in dna(300), a in 0usize..300, b in 0usize..300) {
                let p = pack(&s);
                let (o, k) = (a.min(s.len()), b % 257);
                if o + k <= s.len() {
                    let got = p.kmer_at(o, k).unwrap();
                    prop_assert_eq!(got.to_ascii(), &s.as_bytes()[o..o + k]);
                    prop_assert_eq!(got, Kmer::from_ascii(&s.as_bytes()[o..o + k]).unwrap());
                } else {
                    prop_assert!(p.kmer_at(o, k).is_err());
                }
            }

            #[test]
            fn reverse_complement_involution(s in dna(200)) {
                let p = pack(&s);
                let k = p.kmer_at(0, s.len()).unwrap();
                let rc = k.reverse_complement();
                prop_assert_eq!(rc.to_ascii(), rc_ascii(s.as_bytes()));
                prop_assert_eq!(rc.reverse_complement(), k);
                prop_assert_eq!(p.reverse_complemented().to_ascii(), rc_ascii(s.as_bytes()));
            }

            #[test]
            fn shifted_copies_agree(s in dna(200), o in 0usize..200, k in 1usize..100) {
                let p = pack(&s);
                let copies = ShiftedCopies::new(&p);
                if o + k <= s.len() {
                    let direct = p.kmer_at(o, k).unwrap();
                    prop_assert_eq!(copies.kmer_unchecked(o, k), direct.clone());
                    prop_assert!(copies.kmer_equals(o, &direct));
                    prop_assert!(p.kmer_equals(o, &direct));
                    let other = direct.reverse_complement();
                    prop_assert_eq!(copies.kmer_equals(o, &other), p.kmer_equals(o, &other));
                }
            }

            #[test]
            fn slice_matches_substring(s in dna(200), a in 0usize..200, n in 0usize..200) {
                let p = pack(&s);
                if a + n <= s.len() {
                    prop_assert_eq!(p.slice(a, n).unwrap().to_ascii(), &s.as_bytes()[a..a + n]);
                }
            }
        }
    }
}
