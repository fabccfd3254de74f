use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use strider_core::bench::concatenate;
use strider_core::{parse_fasta, AmbiguityPolicy, PackedSequence, Reference};

use crate::error::{CliError, Result};

pub struct NamedSeq {
    pub id: String,
    pub seq: PackedSequence,
}

/// Reads FASTA, or `.2bit-raw` when the first non-blank byte is not `>`.
/// A `.2bit-raw` file becomes one record named after the file stem.
pub fn read_sequences(path: &Path, policy: AmbiguityPolicy) -> Result<Vec<NamedSeq>> {
    let bytes = std::fs::read(path).map_err(CliError::io(path))?;
    let first = bytes.iter().find(|b| !b.is_ascii_whitespace());
    if first == Some(&b'>') {
        let records = parse_fasta(&bytes, policy)?;
        let replaced: usize = records.iter().map(|r| r.replaced).sum();
        if replaced > 0 {
            eprintln!(
                "{}: replaced {replaced} ambiguous bases with A",
                path.display()
            );
        }
        return Ok(records
            .into_iter()
            .map(|r| NamedSeq { id: r.id, seq: r.seq })
            .collect());
    }
    let seq = PackedSequence::read_2bit_raw(&bytes[..])?;
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "seq".into());
    Ok(vec![NamedSeq { id, seq }])
}

/// All records of `path` joined into one reference.
pub fn read_reference(path: &Path, policy: AmbiguityPolicy) -> Result<Reference> {
    let seqs: Vec<PackedSequence> = read_sequences(path, policy)?
        .into_iter()
        .map(|r| r.seq)
        .collect();
    Ok(Reference::new(concatenate(&seqs)))
}

/// A buffered sink on `path`, or stdout when no path is given.
pub fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(CliError::io(p))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(CliError::io(path))?))
}

/// Flushes `w`; a reader that closed stdout early is not an error.
pub fn finish(mut w: impl Write, path: Option<&PathBuf>) -> Result<()> {
    match w.flush() {
        Err(e) if path.is_none() && e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        r => r.map_err(|source| CliError::Io {
            path: path.cloned().unwrap_or_else(|| "<stdout>".into()),
            source,
        }),
    }
}

pub fn write_stdout(text: &str) -> Result<()> {
    let mut out = io::stdout().lock();
    match out.write_all(text.as_bytes()) {
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        r => {
            r.map_err(CliError::io("<stdout>"))?;
            finish(out, None)
        }
    }
}
