//! Parameter sweeps over (k, s) and their reports.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;

use crate::compress::{scan, CompressParams, TokenHistogram, TokenKind};
use crate::error::{Error, Result};
use crate::fasta::{parse_fasta, AmbiguityPolicy};
use crate::index::{IndexParams, Reference, ReferenceIndex};
use crate::sequence::{PackedSequence, SequenceBuilder};
use crate::synth::{self, MutationRates, RepeatModel};
use crate::wide;

pub const DEFAULT_K_VALUES: [usize; 5] = [16, 32, 64, 128, 256];
pub const DEFAULT_S_VALUES: [usize; 5] = [4, 8, 16, 32, 64];

#[derive(Debug, Clone, PartialEq)]
pub enum SyntheticKind {
    /// Target is the reference itself.
    SelfCompression,
    /// One target: the whole reference with per-base mutations.
    Mutated(MutationRates),
    /// Reads sampled from either strand, each with per-base errors.
    Reads {
        count: usize,
        len: usize,
        rates: MutationRates,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub reference_len: usize,
    /// Uniform random reference when `None`.
    pub repeats: Option<RepeatModel>,
    pub kind: SyntheticKind,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSource {
    Files { target: PathBuf, reference: PathBuf },
    Synthetic(SyntheticSpec),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub source: DatasetSource,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub k_values: Vec<usize>,
    pub s_values: Vec<usize>,
    pub datasets: Vec<Dataset>,
    /// Synthetic datasets draw a fresh seed per trial; file datasets repeat.
    pub trials: usize,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            k_values: DEFAULT_K_VALUES.to_vec(),
            s_values: DEFAULT_S_VALUES.to_vec(),
            datasets: Vec::new(),
            trials: 1,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.k_values.contains(&0) || self.s_values.contains(&0) || self.trials == 0 {
            return Err(Error::InvalidParams(
                "k values, s values and trials must be positive".into(),
            ));
        }
        Ok(())
    }

    /// (k, s) pairs that are evaluated: s <= k and s | k.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for &k in &self.k_values {
            for &s in &self.s_values {
                if s <= k && k % s == 0 {
                    out.push((k, s));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub dataset: String,
    pub k: usize,
    pub s: usize,
    pub trials: usize,
    /// Mean ratio over trials; `None` when the row failed.
    pub ratio: Option<f64>,
    pub bases: u64,
    pub compressed_bytes: u64,
    pub seconds: f64,
    pub histogram: TokenHistogram,
    /// Placeholder column for ratios of third-party tools.
    pub external_ratio: Option<f64>,
    pub error: Option<String>,
}

impl BenchRow {
    pub fn throughput(&self) -> f64 {
        if self.seconds > 0.0 {
            self.bases as f64 / self.seconds
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

fn load_fasta(path: &PathBuf) -> Result<Vec<PackedSequence>> {
    let bytes = std::fs::read(path)?;
    Ok(parse_fasta(&bytes, AmbiguityPolicy::ReplaceWithA)?
        .into_iter()
        .map(|r| r.seq)
        .collect())
}

/// Joins records into one sequence.
pub fn concatenate(seqs: &[PackedSequence]) -> PackedSequence {
    let mut b = SequenceBuilder::with_capacity(seqs.iter().map(|s| s.len()).sum());
    for s in seqs {
        b.extend_from(s, 0, s.len());
    }
    b.finish()
}

/// Reference and targets for one trial of a dataset.
pub fn materialize(
    source: &DatasetSource,
    trial: usize,
) -> Result<(PackedSequence, Vec<PackedSequence>)> {
    match source {
        DatasetSource::Files { target, reference } => {
            let reference = concatenate(&load_fasta(reference)?);
            Ok((reference, load_fasta(target)?))
        }
        DatasetSource::Synthetic(spec) => {
            let mut rng = synth::rng(spec.seed.wrapping_add(trial as u64 * 0x9e37_79b9));
            let reference = match &spec.repeats {
                Some(model) => synth::repetitive_sequence(&mut rng, spec.reference_len, model),
                None => synth::random_sequence(&mut rng, spec.reference_len),
            };
            let targets = match &spec.kind {
                SyntheticKind::SelfCompression => vec![reference.clone()],
                SyntheticKind::Mutated(rates) => vec![synth::mutate(&mut rng, &reference, *rates)],
                SyntheticKind::Reads { count, len, rates } => (0..*count)
                    .map(|_| synth::sample_read(&mut rng, &reference, *len, *rates, true))
                    .collect(),
            };
            Ok((reference, targets))
        }
    }
}

struct Cell {
    ratio: f64,
    bases: u64,
    bytes: u64,
    seconds: f64,
    histogram: TokenHistogram,
}

fn measure(
    reference: &Reference,
    targets: &[PackedSequence],
    k: usize,
    pairs: &[(usize, usize)],
) -> Result<Vec<((usize, usize), Cell)>> {
    let (index, _) = ReferenceIndex::build(reference, IndexParams::new(k))?;
    let mut out = Vec::new();
    for &(pk, s) in pairs.iter().filter(|(pk, _)| *pk == k) {
        let params = CompressParams::new(pk, s).with_chunk_groups(None);
        let start = Instant::now();
        let mut cell = Cell {
            ratio: 0.0,
            bases: 0,
            bytes: 0,
            seconds: 0.0,
            histogram: TokenHistogram::default(),
        };
        for t in targets {
            let scanned = scan(t, &index, reference, &params)?;
            cell.bytes += wide::encoded_len(&scanned, s) as u64;
            cell.bases += t.len() as u64;
            for kind in TokenKind::ALL {
                cell.histogram.counts[kind as usize] += scanned.histogram.get(kind);
            }
        }
        cell.seconds = start.elapsed().as_secs_f64();
        cell.ratio = crate::compress::compression_ratio(cell.bases, cell.bytes)?;
        out.push(((pk, s), cell));
    }
    Ok(out)
}

/// Evaluates every (k, s) pair on every dataset. Failures become error rows.
pub fn run_sweep(spec: &SweepSpec) -> Result<BenchReport> {
    spec.validate()?;
    let pairs = spec.pairs();
    let mut ks: Vec<usize> = pairs.iter().map(|p| p.0).collect();
    ks.dedup();

    let mut rows = Vec::new();
    for ds in &spec.datasets {
        // trial x k jobs run in parallel; results are folded back in (k, s) order
        let jobs: Vec<(usize, usize)> = (0..spec.trials)
            .flat_map(|t| ks.iter().map(move |&k| (t, k)))
            .collect();
        let loaded: Vec<Result<(Reference, Vec<PackedSequence>)>> = (0..spec.trials)
            .into_par_iter()
            .map(|t| materialize(&ds.source, t).map(|(r, ts)| (Reference::new(r), ts)))
            .collect();
        let results: Vec<Result<Vec<((usize, usize), Cell)>>> = jobs
            .par_iter()
            .map(|&(t, k)| match &loaded[t] {
                Ok((r, targets)) => measure(r, targets, k, &pairs),
                Err(e) => Err(Error::InvalidParams(format!("dataset unavailable: {e}"))),
            })
            .collect();

        for &(k, s) in &pairs {
            let mut row = BenchRow {
                dataset: ds.name.clone(),
                k,
                s,
                trials: spec.trials,
                ratio: None,
                bases: 0,
                compressed_bytes: 0,
                seconds: 0.0,
                histogram: TokenHistogram::default(),
                external_ratio: None,
                error: None,
            };
            let mut ratio_sum = 0.0;
            for (job, res) in jobs.iter().zip(&results) {
                if job.1 != k {
                    continue;
                }
                match res {
                    Ok(cells) => {
                        if let Some((_, c)) = cells.iter().find(|(p, _)| *p == (k, s)) {
                            ratio_sum += c.ratio;
                            row.bases += c.bases;
                            row.compressed_bytes += c.bytes;
                            row.seconds += c.seconds;
                            for kind in TokenKind::ALL {
                                row.histogram.counts[kind as usize] += c.histogram.get(kind);
                            }
                        }
                    }
                    Err(e) => {
                        row.error.get_or_insert_with(|| e.to_string());
                    }
                }
            }
            if row.error.is_none() {
                row.ratio = Some(ratio_sum / spec.trials as f64);
            }
            rows.push(row);
        }
    }
    Ok(BenchReport { rows })
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl BenchReport {
    pub const CSV_HEADER: &'static str = "dataset,k,s,trials,ratio,bases,compressed_bytes,seconds,bases_per_sec,verbatim,forward,reverse,continuation,external_ratio,error";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let h = &r.histogram;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{:.6},{:.1},{},{},{},{},{},{}",
                csv_field(&r.dataset),
                r.k,
                r.s,
                r.trials,
                r.ratio.map(|x| format!("{x:.6}")).unwrap_or_default(),
                r.bases,
                r.compressed_bytes,
                r.seconds,
                r.throughput(),
                h.get(TokenKind::Verbatim),
                h.get(TokenKind::ForwardMatch),
                h.get(TokenKind::ReverseMatch),
                h.get(TokenKind::Continuation),
                r.external_ratio
                    .map(|x| format!("{x:.6}"))
                    .unwrap_or_default(),
                csv_field(r.error.as_deref().unwrap_or("")),
            );
        }
        out
    }

    /// Human-readable aligned table.
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{:<20} {:>5} {:>4} {:>10} {:>12} {:>14}\n",
            "dataset", "k", "s", "ratio", "bases", "bases/sec"
        );
        for r in &self.rows {
            let ratio = match (&r.ratio, &r.error) {
                (Some(x), _) => format!("{x:.3}"),
                (None, Some(_)) => "error".to_string(),
                _ => "-".to_string(),
            };
            let _ = writeln!(
                out,
                "{:<20} {:>5} {:>4} {:>10} {:>12} {:>14.0}",
                r.dataset,
                r.k,
                r.s,
                ratio,
                r.bases,
                r.throughput()
            );
        }
        out
    }

    pub fn ratio(&self, dataset: &str, k: usize, s: usize) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.dataset == dataset && r.k == k && r.s == s)
            .and_then(|r| r.ratio)
    }
}
