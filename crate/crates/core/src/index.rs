//! Cuckoo-hash k-mer offset table over a reference, with the 4-bit prefilter.
//!
//! Slots hold only 32-bit reference offsets. A slot's key is recovered by reading
//! the reference at that offset, both when verifying a lookup and when a key has
//! to be displaced during construction.

use std::io::{Read, Write};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::hash::hash_kmer;
use crate::sequence::{Kmer, KmerSource, PackedSequence, ShiftedCopies};

pub const EMPTY_SLOT: u32 = u32::MAX;
pub const DEFAULT_SEEDS: [u64; 2] = [0x9e37_79b9_7f4a_7c15, 0xc2b2_ae3d_27d4_eb4f];
pub const MAX_DISPLACEMENTS: usize = 500;

const INDEX_MAGIC: &[u8; 4] = b"BIDX";
const INDEX_VERSION: u16 = 1;
const INDEX_HEADER_LEN: usize = 4 + 2 + 2 + 4 + 8 + 16 + 32;
/// 2^34 slots would already be a 64 GiB table.
const MAX_CAPACITY: u64 = 1 << 34;

pub type Checksum = [u8; 32];

/// SHA-256 over the base count (u64 LE) followed by the packed bytes.
pub fn reference_checksum(seq: &PackedSequence) -> Checksum {
    let mut h = Sha256::new();
    h.update((seq.len() as u64).to_le_bytes());
    h.update(seq.as_bytes());
    h.finalize().into()
}

/// A reference sequence together with its digest and, optionally, the
/// byte-aligned shifted copies used for faster verification.
#[derive(Debug, Clone)]
pub struct Reference {
    seq: PackedSequence,
    checksum: Checksum,
    shifted: Option<ShiftedCopies>,
}

impl Reference {
    pub fn new(seq: PackedSequence) -> Self {
        let checksum = reference_checksum(&seq);
        Reference {
            seq,
            checksum,
            shifted: None,
        }
    }

    pub fn with_shifted_copies(seq: PackedSequence) -> Self {
        let mut r = Reference::new(seq);
        r.shifted = Some(ShiftedCopies::new(&r.seq));
        r
    }

    pub fn seq(&self) -> &PackedSequence {
        &self.seq
    }

    pub fn checksum(&self) -> &Checksum {
        &self.checksum
    }

    pub fn len(&self) -> usize {
        self.seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }
}

impl KmerSource for Reference {
    fn base_len(&self) -> usize {
        self.seq.len()
    }

    fn kmer_unchecked(&self, offset: usize, k: usize) -> Kmer {
        match &self.shifted {
            Some(s) => s.kmer_unchecked(offset, k),
            None => self.seq.kmer_unchecked(offset, k),
        }
    }

    fn kmer_equals(&self, offset: usize, kmer: &Kmer) -> bool {
        match &self.shifted {
            Some(s) => s.kmer_equals(offset, kmer),
            None => self.seq.kmer_equals(offset, kmer),
        }
    }
}

/// One nibble per cuckoo slot, two per byte, low nibble first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilterTable {
    nibbles: Vec<u8>,
}

impl FilterTable {
    fn new(capacity: usize) -> Self {
        FilterTable {
            nibbles: vec![0; capacity.div_ceil(2)],
        }
    }

    #[inline]
    pub fn get(&self, slot: usize) -> u8 {
        (self.nibbles[slot >> 1] >> ((slot & 1) * 4)) & 0xF
    }

    fn set(&mut self, slot: usize, v: u8) {
        let shift = (slot & 1) * 4;
        let b = &mut self.nibbles[slot >> 1];
        *b = (*b & !(0xF << shift)) | ((v & 0xF) << shift);
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.nibbles
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prefilter {
    Pass,
    Reject,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Forward,
    ReverseComplement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Candidate {
    pub orientation: Orientation,
    pub offset: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexParams {
    pub k: usize,
    pub sampling_stride: usize,
    pub seeds: [u64; 2],
}

impl IndexParams {
    pub fn new(k: usize) -> Self {
        IndexParams {
            k,
            sampling_stride: 1,
            seeds: DEFAULT_SEEDS,
        }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.sampling_stride = stride;
        self
    }
}

impl Default for IndexParams {
    fn default() -> Self {
        IndexParams::new(64)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildStats {
    /// Offsets visited.
    pub attempts: u64,
    /// k-mers already present at an earlier offset.
    pub duplicates: u64,
    /// Keys dropped after hitting the displacement limit.
    pub skipped: u64,
    pub occupied: u64,
    pub capacity: u64,
}

impl BuildStats {
    pub fn load_factor(&self) -> f64 {
        self.occupied as f64 / self.capacity as f64
    }
}

/// Probe counters, used to report how much work the prefilter saves.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QueryStats {
    pub probes: u64,
    pub prefilter_rejects: u64,
    pub verifications: u64,
    pub hits: u64,
}

impl QueryStats {
    pub fn merge(&mut self, other: &QueryStats) {
        self.probes += other.probes;
        self.prefilter_rejects += other.prefilter_rejects;
        self.verifications += other.verifications;
        self.hits += other.hits;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceIndex {
    slots: Vec<u32>,
    seeds: [u64; 2],
    k: usize,
    sampling_stride: usize,
    ref_checksum: Checksum,
    filter: FilterTable,
}

enum Insert {
    Placed,
    Duplicate,
    Skipped,
}

impl ReferenceIndex {
    pub fn build(reference: &Reference, params: IndexParams) -> Result<(Self, BuildStats)> {
        let IndexParams {
            k,
            sampling_stride,
            seeds,
        } = params;
        if k == 0 || k > u16::MAX as usize {
            return Err(Error::InvalidParams(format!("k={k} must be in 1..=65535")));
        }
        if sampling_stride == 0 || sampling_stride > u32::MAX as usize {
            return Err(Error::InvalidParams("sampling stride must be >= 1".into()));
        }
        let len = reference.len();
        if len < k {
            return Err(Error::ReferenceTooShort { len, k });
        }
        if len as u64 >= u32::MAX as u64 {
            return Err(Error::InvalidParams(format!(
                "reference of {len} bases does not fit 32-bit offsets"
            )));
        }
        let positions = ((len - k) / sampling_stride + 1) as u64;
        let capacity = positions
            .checked_mul(2)
            .and_then(u64::checked_next_power_of_two)
            .filter(|&c| c <= MAX_CAPACITY)
            .ok_or(Error::CapacityOverflow { keys: positions })?;

        let mut index = ReferenceIndex {
            slots: vec![EMPTY_SLOT; capacity as usize],
            seeds,
            k,
            sampling_stride,
            ref_checksum: *reference.checksum(),
            filter: FilterTable::new(capacity as usize),
        };
        let mut stats = BuildStats {
            capacity,
            ..BuildStats::default()
        };
        for offset in (0..=len - k).step_by(sampling_stride) {
            stats.attempts += 1;
            match index.insert(reference, offset as u32) {
                Insert::Placed => {}
                Insert::Duplicate => stats.duplicates += 1,
                Insert::Skipped => stats.skipped += 1,
            }
        }
        for slot in 0..index.slots.len() {
            let off = index.slots[slot];
            if off != EMPTY_SLOT {
                stats.occupied += 1;
                let nib = reference.kmer_unchecked(off as usize, k).low_nibble();
                index.filter.set(slot, nib);
            }
        }
        Ok((index, stats))
    }

    #[inline]
    fn slot_pair(&self, key: &Kmer) -> [usize; 2] {
        let mask = self.slots.len() as u64 - 1;
        [
            (hash_kmer(key, self.seeds[0]) & mask) as usize,
            (hash_kmer(key, self.seeds[1]) & mask) as usize,
        ]
    }

    fn insert(&mut self, reference: &Reference, offset: u32) -> Insert {
        let key = reference.kmer_unchecked(offset as usize, self.k);
        let pair = self.slot_pair(&key);
        for &s in &pair {
            let held = self.slots[s];
            if held != EMPTY_SLOT && reference.kmer_equals(held as usize, &key) {
                return Insert::Duplicate;
            }
        }
        for &s in &pair {
            if self.slots[s] == EMPTY_SLOT {
                self.slots[s] = offset;
                return Insert::Placed;
            }
        }
        let mut homeless = offset;
        let mut pos = pair[0];
        for _ in 0..MAX_DISPLACEMENTS {
            std::mem::swap(&mut homeless, &mut self.slots[pos]);
            let evicted = reference.kmer_unchecked(homeless as usize, self.k);
            let [a, b] = self.slot_pair(&evicted);
            pos = if a == pos { b } else { a };
            if self.slots[pos] == EMPTY_SLOT {
                self.slots[pos] = homeless;
                return Insert::Placed;
            }
        }
        Insert::Skipped
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn sampling_stride(&self) -> usize {
        self.sampling_stride
    }

    pub fn seeds(&self) -> [u64; 2] {
        self.seeds
    }

    pub fn capacity(&self) -> usize {
        self.slots.len()
    }

    pub fn slots(&self) -> &[u32] {
        &self.slots
    }

    pub fn filter(&self) -> &FilterTable {
        &self.filter
    }

    pub fn ref_checksum(&self) -> &Checksum {
        &self.ref_checksum
    }

    pub fn occupied(&self) -> usize {
        self.slots.iter().filter(|&&s| s != EMPTY_SLOT).count()
    }

    pub fn load_factor(&self) -> f64 {
        self.occupied() as f64 / self.capacity() as f64
    }

    #[inline]
    pub fn prefilter_check(&self, slot: usize, low4: u8) -> Prefilter {
        if self.filter.get(slot) == low4 & 0xF {
            Prefilter::Pass
        } else {
            Prefilter::Reject
        }
    }

    /// Looks `target` up in both orientations. Probe order is h1(t), h2(t),
    /// h1(rc t), h2(rc t); the first verified probe wins.
    pub fn query<R: KmerSource>(&self, reference: &R, target: &Kmer) -> Option<Candidate> {
        self.query_with(reference, target, true, &mut QueryStats::default())
    }

    pub fn query_with<R: KmerSource>(
        &self,
        reference: &R,
        target: &Kmer,
        use_prefilter: bool,
        stats: &mut QueryStats,
    ) -> Option<Candidate> {
        if target.k() != self.k {
            return None;
        }
        let rc = target.reverse_complement();
        for (orientation, key) in [
            (Orientation::Forward, target),
            (Orientation::ReverseComplement, &rc),
        ] {
            let low4 = key.low_nibble();
            for slot in self.slot_pair(key) {
                stats.probes += 1;
                if use_prefilter && self.prefilter_check(slot, low4) == Prefilter::Reject {
                    stats.prefilter_rejects += 1;
                    continue;
                }
                let held = self.slots[slot];
                if held == EMPTY_SLOT {
                    continue;
                }
                stats.verifications += 1;
                if reference.kmer_equals(held as usize, key) {
                    stats.hits += 1;
                    return Some(Candidate {
                        orientation,
                        offset: held,
                    });
                }
            }
        }
        None
    }

    /// Checks every structural invariant against the reference the index claims to cover.
    pub fn verify(&self, reference: &Reference) -> Result<()> {
        if reference.checksum() != &self.ref_checksum {
            return Err(Error::ChecksumMismatch { what: "index" });
        }
        let len = reference.len();
        if len < self.k {
            return Err(Error::ReferenceTooShort { len, k: self.k });
        }
        let mut occupied = 0usize;
        for (slot, &off) in self.slots.iter().enumerate() {
            if off == EMPTY_SLOT {
                if self.filter.get(slot) != 0 {
                    return Err(Error::CorruptFile(format!(
                        "empty slot {slot} has a nonzero nibble"
                    )));
                }
                continue;
            }
            occupied += 1;
            let off = off as usize;
            if off > len - self.k || !off.is_multiple_of(self.sampling_stride) {
                return Err(Error::CorruptFile(format!(
                    "slot {slot} holds bad offset {off}"
                )));
            }
            let key = reference.kmer_unchecked(off, self.k);
            if !self.slot_pair(&key).contains(&slot) {
                return Err(Error::CorruptFile(format!(
                    "slot {slot} is not a hash position of its key"
                )));
            }
            if self.filter.get(slot) != key.low_nibble() {
                return Err(Error::CorruptFile(format!(
                    "slot {slot} has a stale nibble"
                )));
            }
        }
        if occupied * 2 > self.slots.len() {
            return Err(Error::CorruptFile("load factor above 0.5".into()));
        }
        Ok(())
    }

    pub fn save<W: Write>(&self, mut w: W) -> Result<()> {
        let mut header = Vec::with_capacity(INDEX_HEADER_LEN);
        header.extend_from_slice(INDEX_MAGIC);
        header.extend_from_slice(&INDEX_VERSION.to_le_bytes());
        header.extend_from_slice(&(self.k as u16).to_le_bytes());
        header.extend_from_slice(&(self.sampling_stride as u32).to_le_bytes());
        header.extend_from_slice(&(self.slots.len() as u64).to_le_bytes());
        header.extend_from_slice(&self.seeds[0].to_le_bytes());
        header.extend_from_slice(&self.seeds[1].to_le_bytes());
        header.extend_from_slice(&self.ref_checksum);
        w.write_all(&header)?;
        let mut buf = Vec::with_capacity(64 * 1024);
        for chunk in self.slots.chunks(16 * 1024) {
            buf.clear();
            for s in chunk {
                buf.extend_from_slice(&s.to_le_bytes());
            }
            w.write_all(&buf)?;
        }
        w.write_all(self.filter.as_bytes())?;
        Ok(())
    }

    pub fn load<R: Read>(mut r: R) -> Result<Self> {
        let mut header = [0u8; INDEX_HEADER_LEN];
        r.read_exact(&mut header)
            .map_err(|_| Error::CorruptFile("index header truncated".into()))?;
        if &header[0..4] != INDEX_MAGIC {
            return Err(Error::CorruptFile("not a .bidx index (bad magic)".into()));
        }
        let u16_at = |o: usize| u16::from_le_bytes(header[o..o + 2].try_into().unwrap());
        let u32_at = |o: usize| u32::from_le_bytes(header[o..o + 4].try_into().unwrap());
        let u64_at = |o: usize| u64::from_le_bytes(header[o..o + 8].try_into().unwrap());
        let version = u16_at(4);
        if version != INDEX_VERSION {
            return Err(Error::CorruptFile(format!(
                "unsupported index version {version}"
            )));
        }
        let k = u16_at(6) as usize;
        let sampling_stride = u32_at(8) as usize;
        let capacity = u64_at(12);
        let seeds = [u64_at(20), u64_at(28)];
        let ref_checksum: Checksum = header[36..68].try_into().unwrap();
        if k == 0 || sampling_stride == 0 {
            return Err(Error::CorruptFile(
                "k and sampling stride must be nonzero".into(),
            ));
        }
        if capacity < 2 || !capacity.is_power_of_two() || capacity > MAX_CAPACITY {
            return Err(Error::CorruptFile(format!("bad capacity {capacity}")));
        }
        let capacity = capacity as usize;
        let mut raw = Vec::new();
        r.read_to_end(&mut raw)?;
        let want = capacity * 4 + capacity.div_ceil(2);
        if raw.len() != want {
            return Err(Error::CorruptFile(format!(
                "index body is {} bytes, expected {want}",
                raw.len()
            )));
        }
        let slots = raw[..capacity * 4]
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let filter = FilterTable {
            nibbles: raw[capacity * 4..].to_vec(),
        };
        Ok(ReferenceIndex {
            slots,
            seeds,
            k,
            sampling_stride,
            ref_checksum,
            filter,
        })
    }
}
