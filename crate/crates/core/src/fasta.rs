//! FASTA ingestion into packed records.

use std::io::Write;

use crate::error::{Error, Result};
use crate::sequence::{BaseCode, PackedSequence, SequenceBuilder};

/// What to do with IUPAC ambiguity codes (N, R, Y, ...).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AmbiguityPolicy {
    /// Substitute `A` and count the substitution.
    #[default]
    ReplaceWithA,
    /// Fail on the first ambiguous base.
    Strict,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FastaRecord {
    /// Header line without the leading `>`.
    pub id: String,
    pub seq: PackedSequence,
    /// Number of ambiguous bases replaced under [`AmbiguityPolicy::ReplaceWithA`].
    pub replaced: usize,
}

fn is_ambiguity_code(b: u8) -> bool {
    matches!(
        b.to_ascii_uppercase(),
        b'N' | b'R' | b'Y' | b'S' | b'W' | b'K' | b'M' | b'B' | b'D' | b'H' | b'V' | b'U'
    )
}

struct Open {
    id: String,
    line: usize,
    seq: SequenceBuilder,
    replaced: usize,
}

impl Open {
    fn close(self) -> Result<FastaRecord> {
        if self.seq.is_empty() {
            return Err(Error::EmptyRecord {
                id: self.id,
                line: self.line,
            });
        }
        Ok(FastaRecord {
            id: self.id,
            seq: self.seq.finish(),
            replaced: self.replaced,
        })
    }
}

pub fn parse_fasta(input: &[u8], policy: AmbiguityPolicy) -> Result<Vec<FastaRecord>> {
    let mut records = Vec::new();
    let mut current: Option<Open> = None;

    for (idx, raw) in input.split(|&b| b == b'\n').enumerate() {
        let line_no = idx + 1;
        let line = raw.strip_suffix(b"\r").unwrap_or(raw);
        if let Some(header) = line.strip_prefix(b">") {
            if let Some(done) = current.take() {
                records.push(done.close()?);
            }
            let id = std::str::from_utf8(header)
                .map_err(|_| Error::Parse {
                    line: line_no,
                    message: "header is not valid UTF-8".into(),
                })?
                .trim()
                .to_string();
            current = Some(Open {
                id,
                line: line_no,
                seq: SequenceBuilder::new(),
                replaced: 0,
            });
            continue;
        }
        if line.iter().all(u8::is_ascii_whitespace) {
            continue;
        }
        let Some(rec) = current.as_mut() else {
            return Err(Error::Parse {
                line: line_no,
                message: "sequence data before the first '>' header".into(),
            });
        };
        for &b in line {
            if b.is_ascii_whitespace() {
                continue;
            }
            if let Some(code) = BaseCode::from_ascii(b) {
                rec.seq.push(code);
            } else if is_ambiguity_code(b) {
                if policy == AmbiguityPolicy::Strict {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("ambiguous base '{}' in strict mode", b as char),
                    });
                }
                rec.seq.push(BaseCode::A);
                rec.replaced += 1;
            } else {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("unexpected character {:?}", b as char),
                });
            }
        }
    }
    if let Some(done) = current {
        records.push(done.close()?);
    }
    Ok(records)
}

/// Writes records as FASTA; `line_width == 0` puts each sequence on one line.
pub fn write_fasta<'a, W: Write>(
    mut w: W,
    records: impl IntoIterator<Item = (&'a str, &'a PackedSequence)>,
    line_width: usize,
) -> Result<()> {
    for (id, seq) in records {
        writeln!(w, ">{id}")?;
        let ascii = seq.to_ascii();
        if line_width == 0 {
            w.write_all(&ascii)?;
            w.write_all(b"\n")?;
        } else {
            for chunk in ascii.chunks(line_width) {
                w.write_all(chunk)?;
                w.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}
