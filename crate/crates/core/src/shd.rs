//! Shifted Hamming Distance pre-alignment filter.
//!
//! For an edit threshold `e` the reference segment is compared against the read
//! at every shift in `-e..=e`, giving `2e+1` mismatch masks (1 = mismatch).
//! Short runs of matches inside each mask are amended to mismatches, the masks
//! are ANDed, and the surviving ones are counted. A pair is accepted when that
//! count is at most the threshold.

use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sequence::PackedSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShdConfig {
    /// Edit-distance threshold; `2e+1` shifted copies are compared.
    pub e: usize,
    /// Zero runs of at most this length, with ones on both sides, become ones.
    /// Off by default: any nonzero run can reject pairs within distance `e`.
    pub amend_run: usize,
    pub accept_threshold: usize,
}

impl ShdConfig {
    pub fn new(e: usize) -> Self {
        ShdConfig {
            e,
            amend_run: 0,
            accept_threshold: e,
        }
    }

    pub fn with_amend_run(mut self, run: usize) -> Self {
        self.amend_run = run;
        self
    }

    pub fn shifted_copies(&self) -> usize {
        2 * self.e + 1
    }
}

impl Default for ShdConfig {
    fn default() -> Self {
        ShdConfig::new(5)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShdVerdict {
    /// Surviving ones, saturated at `accept_threshold + 1`.
    pub ones_count: usize,
    pub accepted: bool,
}

/// Mismatch mask of `read` against `refseg` shifted by `shift`.
/// Positions whose shifted partner falls outside the segment count as matches.
fn mismatch_mask(read: &[u8], refseg: &[u8], shift: isize, mask: &mut [u8]) {
    let n = read.len() as isize;
    for (i, m) in mask.iter_mut().enumerate() {
        let j = i as isize + shift;
        *m = if (0..n).contains(&j) {
            (read[i] != refseg[j as usize]) as u8
        } else {
            0
        };
    }
}

/// Turns zero runs of length <= `max_run` that sit between two ones into ones.
fn amend(mask: &mut [u8], max_run: usize) {
    if max_run == 0 {
        return;
    }
    let n = mask.len();
    let mut i = 0;
    while i < n {
        if mask[i] != 0 {
            i += 1;
            continue;
        }
        let start = i;
        while i < n && mask[i] == 0 {
            i += 1;
        }
        let bounded = start > 0 && i < n;
        if bounded && i - start <= max_run {
            mask[start..i].fill(1);
        }
    }
}

fn shd_bases(read: &[u8], refseg: &[u8], cfg: &ShdConfig) -> ShdVerdict {
    let n = read.len();
    let mut combined = vec![1u8; n];
    let mut mask = vec![0u8; n];
    let e = cfg.e as isize;
    for shift in -e..=e {
        mismatch_mask(read, refseg, shift, &mut mask);
        amend(&mut mask, cfg.amend_run);
        for (c, m) in combined.iter_mut().zip(&mask) {
            *c &= *m;
        }
    }
    let cap = cfg.accept_threshold.saturating_add(1);
    let mut ones = 0usize;
    for &b in &combined {
        ones += b as usize;
        if ones >= cap {
            break;
        }
    }
    ShdVerdict {
        ones_count: ones,
        accepted: ones <= cfg.accept_threshold,
    }
}

pub fn shd(read: &PackedSequence, refseg: &PackedSequence, cfg: &ShdConfig) -> Result<ShdVerdict> {
    if read.len() != refseg.len() {
        return Err(Error::LengthMismatch {
            left: read.len() as u64,
            right: refseg.len() as u64,
        });
    }
    if read.is_empty() {
        return Err(Error::InvalidParams(
            "SHD needs sequences of at least one base".into(),
        ));
    }
    let a: Vec<u8> = read.iter().map(|b| b.bits()).collect();
    let b: Vec<u8> = refseg.iter().map(|b| b.bits()).collect();
    Ok(shd_bases(&a, &b, cfg))
}

/// Levenshtein distance (unit costs), two-row dynamic programming.
pub fn edit_distance(a: &[u8], b: &[u8]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, &ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let sub = prev[j] + (ca != cb) as usize;
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FilterSummary {
    pub pairs: u64,
    pub accepted: u64,
    pub bases: u64,
    pub seconds: f64,
}

impl FilterSummary {
    pub fn accept_rate(&self) -> f64 {
        if self.pairs == 0 {
            0.0
        } else {
            self.accepted as f64 / self.pairs as f64
        }
    }

    pub fn bases_per_sec(&self) -> f64 {
        if self.seconds > 0.0 {
            self.bases as f64 / self.seconds
        } else {
            0.0
        }
    }
}

/// Filters `reads[i]` against `refsegs[i]` in parallel; verdicts keep input order.
pub fn filter_stream(
    reads: &[PackedSequence],
    refsegs: &[PackedSequence],
    cfg: &ShdConfig,
) -> Result<(Vec<ShdVerdict>, FilterSummary)> {
    if reads.len() != refsegs.len() {
        return Err(Error::LengthMismatch {
            left: reads.len() as u64,
            right: refsegs.len() as u64,
        });
    }
    let start = Instant::now();
    let verdicts = reads
        .par_iter()
        .zip(refsegs.par_iter())
        .map(|(r, s)| shd(r, s, cfg))
        .collect::<Result<Vec<_>>>()?;
    let summary = FilterSummary {
        pairs: verdicts.len() as u64,
        accepted: verdicts.iter().filter(|v| v.accepted).count() as u64,
        bases: reads.iter().map(|r| r.len() as u64).sum(),
        seconds: start.elapsed().as_secs_f64(),
    };
    Ok((verdicts, summary))
}
