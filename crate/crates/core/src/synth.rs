//! Seeded synthetic references, mutated targets and error-bearing reads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::sequence::{BaseCode, PackedSequence, SequenceBuilder};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_base<R: Rng>(rng: &mut R) -> BaseCode {
    BaseCode::from_bits(rng.random::<u8>())
}

pub fn random_sequence<R: Rng>(rng: &mut R, len: usize) -> PackedSequence {
    let mut b = SequenceBuilder::with_capacity(len);
    let mut left = len;
    while left > 0 {
        let n = left.min(32);
        b.push_bits(rng.random::<u64>(), n);
        left -= n;
    }
    b.finish()
}

/// Per-base event rates applied when copying a sequence.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MutationRates {
    pub substitution: f64,
    pub insertion: f64,
    pub deletion: f64,
}

impl MutationRates {
    pub fn snp(rate: f64) -> Self {
        MutationRates {
            substitution: rate,
            ..Default::default()
        }
    }

    /// Splits `rate` evenly between substitutions, insertions and deletions.
    pub fn mixed(rate: f64) -> Self {
        MutationRates {
            substitution: rate / 3.0,
            insertion: rate / 3.0,
            deletion: rate / 3.0,
        }
    }

    pub fn total(&self) -> f64 {
        self.substitution + self.insertion + self.deletion
    }
}

/// Interspersed repeat families: a reference made of fixed-length segments,
/// each either fresh random sequence or a diverged copy of one of `families`
/// templates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepeatModel {
    pub families: usize,
    pub unit_len: usize,
    /// Mixed mutation rate applied to each copy of a template.
    pub divergence: f64,
    /// Probability that a segment is a repeat copy.
    pub fraction: f64,
}

impl Default for RepeatModel {
    fn default() -> Self {
        RepeatModel {
            families: 10,
            unit_len: 2000,
            divergence: 0.05,
            fraction: 0.5,
        }
    }
}

pub fn repetitive_sequence<R: Rng>(rng: &mut R, len: usize, model: &RepeatModel) -> PackedSequence {
    let unit = model.unit_len.max(1);
    let templates: Vec<PackedSequence> = (0..model.families)
        .map(|_| random_sequence(rng, unit))
        .collect();
    let mut out = SequenceBuilder::with_capacity(len + unit);
    while out.len() < len {
        let seg = if !templates.is_empty() && rng.random_bool(model.fraction.clamp(0.0, 1.0)) {
            let t = &templates[rng.random_range(0..templates.len())];
            mutate(rng, t, MutationRates::mixed(model.divergence))
        } else {
            random_sequence(rng, unit)
        };
        out.extend_from(&seg, 0, seg.len());
    }
    out.truncate(len);
    out.finish()
}

/// Copies `src` applying independent per-base substitutions, insertions and deletions.
pub fn mutate<R: Rng>(rng: &mut R, src: &PackedSequence, rates: MutationRates) -> PackedSequence {
    let mut out = SequenceBuilder::with_capacity(src.len() + src.len() / 16);
    for base in src.iter() {
        let x: f64 = rng.random();
        if x < rates.deletion {
            continue;
        }
        if x < rates.deletion + rates.insertion {
            out.push(random_base(rng));
            out.push(base);
        } else if x < rates.total() {
            let shift = rng.random_range(1..4u8);
            out.push(BaseCode::from_bits(base.bits() ^ shift));
        } else {
            out.push(base);
        }
    }
    out.finish()
}

/// A read sampled from `reference`, optionally reverse-complemented, with errors.
pub fn sample_read<R: Rng>(
    rng: &mut R,
    reference: &PackedSequence,
    len: usize,
    rates: MutationRates,
    allow_reverse: bool,
) -> PackedSequence {
    let len = len.min(reference.len());
    let start = rng.random_range(0..=reference.len() - len);
    let mut read = reference.slice(start, len).expect("in range");
    if allow_reverse && rng.random_bool(0.5) {
        read = read.reverse_complemented();
    }
    mutate(rng, &read, rates)
}

/// Concatenation of `pieces` reference segments (some reverse-complemented)
/// interleaved with unrelated random sequence.
pub fn splice<R: Rng>(
    rng: &mut R,
    reference: &PackedSequence,
    pieces: usize,
    max_piece: usize,
) -> PackedSequence {
    let mut out = SequenceBuilder::new();
    for _ in 0..pieces {
        let len = rng.random_range(1..=max_piece.min(reference.len()).max(1));
        let seg = sample_read(rng, reference, len, MutationRates::default(), true);
        out.extend_from(&seg, 0, seg.len());
        let junk_len = rng.random_range(0..max_piece / 4 + 1);
        let junk = random_sequence(rng, junk_len);
        out.extend_from(&junk, 0, junk.len());
    }
    out.finish()
}
