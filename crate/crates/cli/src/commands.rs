use std::io::Write;
use std::path::PathBuf;

use rayon::prelude::*;
use strider_core::bench::{run_sweep, Dataset, DatasetSource, SweepSpec, SyntheticKind, SyntheticSpec};
use strider_core::compress::{DEFAULT_CHUNK_GROUPS, DEFAULT_K};
use strider_core::fasta::write_fasta;
use strider_core::shd::filter_stream;
use strider_core::synth::{self, MutationRates, RepeatModel};
use strider_core::{
    compress_to_container, compression_ratio, AmbiguityPolicy, CompressParams, Container,
    Error, IndexParams, PackedSequence, ReferenceIndex, ShdConfig,
};

use crate::config::Config;
use crate::error::{CliError, Result};
use crate::io::{self as cio, read_reference, read_sequences, NamedSeq};
use crate::{
    BuildIndexArgs, CompressArgs, DecompressArgs, ExtractArgs, GenArgs, GenMode, ReportFormat,
    SeqFormat, ShdArgs, SweepArgs, SynthKind,
};

const DEFAULT_LINE_WIDTH: usize = 60;
const DEFAULT_SHD_E: usize = 5;

pub struct Context {
    cfg: Config,
    policy: AmbiguityPolicy,
}

impl Context {
    pub fn new(cfg: &Config, strict: bool) -> Self {
        let policy = if strict || cfg.strict == Some(true) {
            AmbiguityPolicy::Strict
        } else {
            AmbiguityPolicy::ReplaceWithA
        };
        Context {
            cfg: cfg.clone(),
            policy,
        }
    }

    fn line_width(&self, flag: Option<usize>) -> usize {
        flag.or(self.cfg.line_width).unwrap_or(DEFAULT_LINE_WIDTH)
    }
}

pub fn build_index(ctx: &Context, a: BuildIndexArgs) -> Result<()> {
    let k = a.k.or(ctx.cfg.k).unwrap_or(DEFAULT_K);
    let stride = a.stride.or(ctx.cfg.stride).unwrap_or(1);
    let reference = read_reference(&a.reference, ctx.policy)?;
    let (index, stats) = ReferenceIndex::build(&reference, IndexParams::new(k).with_stride(stride))?;
    let mut out = cio::create(&a.out)?;
    index.save(&mut out)?;
    cio::finish(out, Some(&a.out))?;
    if stats.skipped > 0 {
        eprintln!("warning: {} k-mers could not be placed and will not be found", stats.skipped);
    }
    cio::write_stdout(&format!(
        "k\t{k}\nstride\t{stride}\nreference_bases\t{}\noccupied\t{}\ncapacity\t{}\nload_factor\t{:.4}\nskipped\t{}\n",
        reference.len(),
        stats.occupied,
        stats.capacity,
        stats.load_factor(),
        stats.skipped
    ))
}

pub fn compress(ctx: &Context, a: CompressArgs) -> Result<()> {
    let reference = read_reference(&a.reference, ctx.policy)?;
    let index = match &a.index {
        Some(path) => {
            let file = std::fs::File::open(path).map_err(CliError::io(path))?;
            let index = ReferenceIndex::load(std::io::BufReader::new(file))?;
            index.verify(&reference)?;
            if let Some(k) = a.k.filter(|&k| k != index.k()) {
                return Err(CliError::Usage(format!(
                    "--k {k} disagrees with the index, which was built with k={}",
                    index.k()
                )));
            }
            index
        }
        None => {
            let k = a.k.or(ctx.cfg.k).unwrap_or(DEFAULT_K);
            let stride = ctx.cfg.stride.unwrap_or(1);
            let (index, stats) =
                ReferenceIndex::build(&reference, IndexParams::new(k).with_stride(stride))?;
            if stats.skipped > 0 {
                eprintln!("warning: index dropped {} k-mers", stats.skipped);
            }
            index
        }
    };
    let chunk_groups = a
        .chunk_groups
        .or(ctx.cfg.chunk_groups)
        .unwrap_or(DEFAULT_CHUNK_GROUPS);
    let params = CompressParams::new(index.k(), 16)
        .with_chunk_groups((chunk_groups > 0).then_some(chunk_groups))
        .with_prefilter(!a.no_prefilter && ctx.cfg.prefilter.unwrap_or(true));

    let records = read_sequences(&a.input, ctx.policy)?;
    let pairs: Vec<(&str, &PackedSequence)> =
        records.iter().map(|r| (r.id.as_str(), &r.seq)).collect();
    let mut bytes = Vec::new();
    compress_to_container(&pairs, &index, &reference, &params, &mut bytes)?;
    std::fs::write(&a.out, &bytes).map_err(CliError::io(&a.out))?;

    let bases: u64 = records.iter().map(|r| r.seq.len() as u64).sum();
    let ratio = compression_ratio(bases, bytes.len() as u64)
        .map_or_else(|_| "-".to_string(), |r| format!("{r:.4}"));
    cio::write_stdout(&format!(
        "records\t{}\nbases\t{bases}\nbytes\t{}\nratio\t{ratio}\n",
        records.len(),
        bytes.len()
    ))
}

fn open_container(path: &PathBuf) -> Result<Container> {
    let bytes = std::fs::read(path).map_err(CliError::io(path))?;
    Ok(Container::from_bytes(bytes)?)
}

fn select_record(c: &Container, which: &str) -> Result<usize> {
    if let Some(i) = c.records().iter().position(|r| r.id == which) {
        return Ok(i);
    }
    match which.parse::<usize>() {
        Ok(i) if i < c.records().len() => Ok(i),
        _ => Err(CliError::Usage(format!(
            "no record '{which}' ({} records in container)",
            c.records().len()
        ))),
    }
}

fn write_records(
    out: &mut dyn Write,
    records: &[NamedSeq],
    format: SeqFormat,
    line_width: usize,
) -> Result<()> {
    match format {
        SeqFormat::Fasta => write_fasta(
            out,
            records.iter().map(|r| (r.id.as_str(), &r.seq)),
            line_width,
        )?,
        SeqFormat::TwoBit => match records {
            [one] => one.seq.write_2bit_raw(out)?,
            _ => {
                return Err(CliError::Usage(format!(
                    "2bit output holds one sequence; {} selected (use --record)",
                    records.len()
                )))
            }
        },
        SeqFormat::Raw => {
            for r in records {
                out.write_all(&r.seq.to_ascii()).map_err(Error::from)?;
                out.write_all(b"\n").map_err(Error::from)?;
            }
        }
    }
    Ok(())
}

fn decode_all(c: &Container, reference: &strider_core::Reference) -> Result<Vec<NamedSeq>> {
    let seqs = (0..c.records().len())
        .into_par_iter()
        .map(|i| c.decompress_record(i, reference))
        .collect::<strider_core::Result<Vec<_>>>()?;
    Ok(c
        .records()
        .iter()
        .zip(seqs)
        .map(|(r, seq)| NamedSeq {
            id: r.id.clone(),
            seq,
        })
        .collect())
}

pub fn decompress(ctx: &Context, a: DecompressArgs) -> Result<()> {
    let container = open_container(&a.input)?;
    let reference = read_reference(&a.reference, ctx.policy)?;
    let records = match &a.record {
        Some(which) => {
            let i = select_record(&container, which)?;
            vec![NamedSeq {
                id: container.records()[i].id.clone(),
                seq: container.decompress_record(i, &reference)?,
            }]
        }
        None => decode_all(&container, &reference)?,
    };
    let mut out = cio::output(a.out.as_ref())?;
    write_records(&mut out, &records, a.format, ctx.line_width(a.line_width))?;
    cio::finish(out, a.out.as_ref())
}

pub fn extract(ctx: &Context, a: ExtractArgs) -> Result<()> {
    let container = open_container(&a.input)?;
    let reference = read_reference(&a.reference, ctx.policy)?;
    let i = select_record(&container, a.record.as_deref().unwrap_or("0"))?;
    let seq = container.extract_range(i, &reference, a.offset, a.length)?;
    let id = format!(
        "{}:{}-{}",
        container.records()[i].id,
        a.offset,
        a.offset + a.length
    );
    let mut out = cio::output(a.out.as_ref())?;
    write_records(
        &mut out,
        &[NamedSeq { id, seq }],
        a.format,
        ctx.line_width(a.line_width),
    )?;
    cio::finish(out, a.out.as_ref())
}

pub fn shd_filter(ctx: &Context, a: ShdArgs) -> Result<()> {
    let reads = match (&a.reads, &a.container, &a.reference) {
        (Some(path), _, _) => read_sequences(path, ctx.policy)?,
        (None, Some(c), Some(r)) => {
            let container = open_container(c)?;
            decode_all(&container, &read_reference(r, ctx.policy)?)?
        }
        _ => {
            return Err(CliError::Usage(
                "give --reads, or --container with --reference".into(),
            ))
        }
    };
    let segments = read_sequences(&a.segments, ctx.policy)?;
    if reads.len() != segments.len() {
        return Err(Error::LengthMismatch {
            left: reads.len() as u64,
            right: segments.len() as u64,
        }
        .into());
    }

    let e = a.e.or(ctx.cfg.shd_e).unwrap_or(DEFAULT_SHD_E);
    let cfg = ShdConfig {
        e,
        amend_run: a.amend_run.or(ctx.cfg.shd_amend_run).unwrap_or(0),
        accept_threshold: a.threshold.or(ctx.cfg.shd_threshold).unwrap_or(e),
    };
    // pairs are compared over the shorter of the two lengths
    let (clipped_reads, clipped_segs): (Vec<_>, Vec<_>) = reads
        .iter()
        .zip(&segments)
        .map(|(r, s)| {
            let n = r.seq.len().min(s.seq.len());
            (r.seq.slice(0, n), s.seq.slice(0, n))
        })
        .map(|(r, s)| Ok((r?, s?)))
        .collect::<strider_core::Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    let (verdicts, summary) = filter_stream(&clipped_reads, &clipped_segs, &cfg)?;

    let mut out = cio::output(a.out.as_ref())?;
    let io = |e: std::io::Error| CliError::from(Error::from(e));
    writeln!(out, "read\tsegment\tlength\tones\tverdict").map_err(io)?;
    for (((r, s), v), len) in reads
        .iter()
        .zip(&segments)
        .zip(&verdicts)
        .zip(clipped_reads.iter().map(|r| r.len()))
    {
        let verdict = if v.accepted { "accept" } else { "reject" };
        writeln!(out, "{}\t{}\t{len}\t{}\t{verdict}", r.id, s.id, v.ones_count).map_err(io)?;
    }
    cio::finish(out, a.out.as_ref())?;
    eprintln!(
        "shd-filter: {} pairs, {} accepted ({:.2}%), e={} amend_run={} threshold={}, {:.0} bases/s",
        summary.pairs,
        summary.accepted,
        100.0 * summary.accept_rate(),
        cfg.e,
        cfg.amend_run,
        cfg.accept_threshold,
        summary.bases_per_sec()
    );
    Ok(())
}

fn parse_dataset(s: &str) -> Result<Dataset> {
    let bad = || CliError::Usage(format!("dataset '{s}' is not NAME=TARGET:REFERENCE"));
    let (name, paths) = s.split_once('=').ok_or_else(bad)?;
    let (target, reference) = paths.split_once(':').ok_or_else(bad)?;
    if name.is_empty() || target.is_empty() || reference.is_empty() {
        return Err(bad());
    }
    Ok(Dataset {
        name: name.to_string(),
        source: DatasetSource::Files {
            target: target.into(),
            reference: reference.into(),
        },
    })
}

pub fn sweep(ctx: &Context, a: SweepArgs) -> Result<()> {
    let mut datasets = a
        .datasets
        .iter()
        .map(|d| parse_dataset(d))
        .collect::<Result<Vec<_>>>()?;
    let rates = MutationRates::mixed(a.error_rate);
    for kind in &a.synthetic {
        let (name, kind) = match kind {
            SynthKind::SelfCompression => ("synthetic-self", SyntheticKind::SelfCompression),
            SynthKind::Mutated => ("synthetic-mutated", SyntheticKind::Mutated(rates)),
            SynthKind::Reads => (
                "synthetic-reads",
                SyntheticKind::Reads {
                    count: a.read_count,
                    len: a.read_len,
                    rates,
                },
            ),
        };
        datasets.push(Dataset {
            name: name.to_string(),
            source: DatasetSource::Synthetic(SyntheticSpec {
                reference_len: a.synthetic_len,
                repeats: a.repeats.then(RepeatModel::default),
                kind,
                seed: a.seed,
            }),
        });
    }
    let spec = SweepSpec {
        k_values: a.k_values,
        s_values: a.s_values,
        datasets,
        trials: a.trials.or(ctx.cfg.trials).unwrap_or(1),
    };
    let report = run_sweep(&spec)?;
    for row in report.rows.iter().filter(|r| r.error.is_some()) {
        eprintln!(
            "warning: {} k={} s={}: {}",
            row.dataset,
            row.k,
            row.s,
            row.error.as_deref().unwrap_or_default()
        );
    }
    let text = match a.format {
        ReportFormat::Csv => report.to_csv(),
        ReportFormat::Table => report.to_table(),
    };
    let mut out = cio::output(a.out.as_ref())?;
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::from(Error::from(e)))?;
    cio::finish(out, a.out.as_ref())
}

pub fn gen_synthetic(ctx: &Context, a: GenArgs) -> Result<()> {
    if a.length == 0 {
        return Err(CliError::Usage("--length must be positive".into()));
    }
    if !(0.0..=1.0).contains(&a.rate) {
        return Err(CliError::Usage(format!("--rate {} outside [0, 1]", a.rate)));
    }
    let mut rng = synth::rng(a.seed);
    let reference = if a.repeats {
        synth::repetitive_sequence(&mut rng, a.length, &RepeatModel::default())
    } else {
        synth::random_sequence(&mut rng, a.length)
    };
    let rates = if a.indels {
        MutationRates::mixed(a.rate)
    } else {
        MutationRates::snp(a.rate)
    };
    let targets: Vec<(String, PackedSequence)> = match a.mode {
        GenMode::SelfCopy => vec![("target".into(), reference.clone())],
        GenMode::Mutated => vec![("target".into(), synth::mutate(&mut rng, &reference, rates))],
        GenMode::Reads => (0..a.read_count)
            .map(|i| {
                let read = synth::sample_read(&mut rng, &reference, a.read_len, rates, true);
                (format!("read_{i}"), read)
            })
            .collect(),
        GenMode::Splice => vec![(
            "target".into(),
            synth::splice(&mut rng, &reference, a.pieces, a.read_len),
        )],
    };
    let width = ctx.line_width(a.line_width);
    let mut out = cio::create(&a.reference_out)?;
    write_fasta(&mut out, [("reference", &reference)], width)?;
    cio::finish(out, Some(&a.reference_out))?;
    let mut out = cio::create(&a.target_out)?;
    write_fasta(&mut out, targets.iter().map(|(id, s)| (id.as_str(), s)), width)?;
    cio::finish(out, Some(&a.target_out))?;
    eprintln!(
        "wrote {} reference bases and {} target records",
        reference.len(),
        targets.len()
    );
    Ok(())
}
