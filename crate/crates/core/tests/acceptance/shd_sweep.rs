use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use strider_core::synth;
use strider_core::{edit_distance, shd, PackedSequence, ShdConfig};

use super::Outcome;

const E_VALUES: [usize; 3] = [1, 2, 5];

#[derive(Default, Clone, Copy)]
struct Tally {
    eligible: u64,
    rejected: u64,
    /// Rejections of eligible pairs with two-base amendment switched on (informational).
    amended_rejected: u64,
}

impl Tally {
    fn merge(mut self, o: Tally) -> Tally {
        self.eligible += o.eligible;
        self.rejected += o.rejected;
        self.amended_rejected += o.amended_rejected;
        self
    }
}

fn pack(s: &[u8]) -> PackedSequence {
    PackedSequence::from_ascii(s).unwrap()
}

fn judge(read: &[u8], refseg: &[u8], e: usize) -> Tally {
    if edit_distance(read, refseg) > e {
        return Tally::default();
    }
    let (r, s) = (pack(read), pack(refseg));
    let plain = shd(&r, &s, &ShdConfig::new(e)).unwrap();
    let amended = shd(&r, &s, &ShdConfig::new(e).with_amend_run(2)).unwrap();
    Tally {
        eligible: 1,
        rejected: !plain.accepted as u64,
        amended_rejected: !amended.accepted as u64,
    }
}

/// Every string of length `len` over `alphabet`, as an index-to-string map.
fn nth_string(alphabet: &[u8], len: usize, mut n: u64) -> Vec<u8> {
    let a = alphabet.len() as u64;
    (0..len)
        .map(|_| {
            let c = alphabet[(n % a) as usize];
            n /= a;
            c
        })
        .collect()
}

fn count(alphabet: &[u8], len: usize) -> u64 {
    (alphabet.len() as u64).pow(len as u32)
}

/// All (read, refseg) pairs over `alphabet` of length `len`.
fn all_pairs(alphabet: &[u8], len: usize, e: usize) -> Tally {
    let n = count(alphabet, len);
    (0..n)
        .into_par_iter()
        .map(|i| {
            let a = nth_string(alphabet, len, i);
            (0..n)
                .map(|j| judge(&a, &nth_string(alphabet, len, j), e))
                .fold(Tally::default(), Tally::merge)
        })
        .reduce(Tally::default, Tally::merge)
}

/// Every read over `alphabet` against one fixed reference segment.
fn all_reads(alphabet: &[u8], refseg: &[u8], e: usize) -> Tally {
    (0..count(alphabet, refseg.len()))
        .into_par_iter()
        .map(|i| judge(&nth_string(alphabet, refseg.len(), i), refseg, e))
        .reduce(Tally::default, Tally::merge)
}

fn random_subset<R: Rng>(rng: &mut R, size: usize) -> Vec<u8> {
    let mut letters = *b"ACGT";
    letters.shuffle(rng);
    letters[..size].to_vec()
}

fn exhaustive(e: usize, seed: u64) -> Tally {
    let mut rng = synth::rng(seed);
    let mut t = Tally::default();
    // complete pair space: full alphabet up to length 5, random 2-letter subsets up to 8
    for len in 1..=5 {
        t = t.merge(all_pairs(b"ACGT", len, e));
    }
    for len in 6..=8 {
        t = t.merge(all_pairs(&random_subset(&mut rng, 2), len, e));
    }
    // lengths 9..=12: all reads against sampled segments
    for len in 9..=12 {
        for round in 0..24 {
            let size = if round < 20 { 2 } else { 3 };
            let alphabet = random_subset(&mut rng, size);
            let refseg: Vec<u8> = (0..len)
                .map(|_| alphabet[rng.random_range(0..size)])
                .collect();
            t = t.merge(all_reads(&alphabet, &refseg, e));
        }
    }
    t
}

/// Applies up to `e` random edits and restores the original length.
fn near_read<R: Rng>(rng: &mut R, refseg: &[u8], alphabet: &[u8], e: usize) -> Vec<u8> {
    let mut read = refseg.to_vec();
    let pick = |rng: &mut R| alphabet[rng.random_range(0..alphabet.len())];
    for _ in 0..rng.random_range(0..=e) {
        if read.is_empty() {
            read.push(pick(rng));
            continue;
        }
        let p = rng.random_range(0..read.len());
        match rng.random_range(0..3) {
            0 => read[p] = pick(rng),
            1 => read.insert(p, pick(rng)),
            _ => {
                read.remove(p);
            }
        }
    }
    read.truncate(refseg.len());
    while read.len() < refseg.len() {
        read.push(pick(rng));
    }
    read
}

fn randomized(e: usize, seed: u64, wanted: u64) -> Tally {
    let mut rng = synth::rng(seed);
    let mut t = Tally::default();
    while t.eligible < wanted {
        let len = rng.random_range(1..=256);
        let size = rng.random_range(2..=4);
        let alphabet = random_subset(&mut rng, size);
        let refseg: Vec<u8> = (0..len)
            .map(|_| alphabet[rng.random_range(0..alphabet.len())])
            .collect();
        let read = near_read(&mut rng, &refseg, &alphabet, e);
        t = t.merge(judge(&read, &refseg, e));
    }
    t
}

/// Reference and read for the three-mask illustration: the read carries a
/// C->T substitution at position 1 and an inserted C at position 8.
pub const FIGURE_REF: &[u8] = b"ACGTTGCAAGTC";
pub const FIGURE_READ: &[u8] = b"ATGTTGCACAGT";

fn figure_count(amend_run: usize) -> usize {
    let cfg = ShdConfig {
        accept_threshold: FIGURE_REF.len(),
        ..ShdConfig::new(1).with_amend_run(amend_run)
    };
    shd(&pack(FIGURE_READ), &pack(FIGURE_REF), &cfg)
        .unwrap()
        .ones_count
}

pub fn no_false_reject() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    let mut amended_parts = Vec::new();
    for (i, &e) in E_VALUES.iter().enumerate() {
        let ex = exhaustive(e, 100 + i as u64);
        let rnd = randomized(e, 200 + i as u64, 10_000);
        pass &= ex.rejected == 0 && rnd.rejected == 0 && rnd.eligible >= 10_000;
        parts.push(format!(
            "e={e}: {}+{} pairs, {} rejected",
            ex.eligible,
            rnd.eligible,
            ex.rejected + rnd.rejected
        ));
        amended_parts.push(format!(
            "e={e}:{}",
            ex.amended_rejected + rnd.amended_rejected
        ));
    }
    let fig = (figure_count(0), figure_count(2));
    pass &= fig == (2, 2);
    Outcome::new(
        pass,
        format!(
            "{}; figure example ones_count={} (amended {}); with amend_run=2 the same pairs see {} false rejects",
            parts.join(", "),
            fig.0,
            fig.1,
            amended_parts.join(" ")
        ),
    )
}
