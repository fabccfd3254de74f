//! Python bindings.
//!
//!     import strider
//!     ref = strider.random_sequence(100_000, seed=1)
//!     target = strider.mutate(ref, 0.01, seed=2)
//!     index = strider.Index(ref, k=32)
//!     blob = index.compress([("t", target)])
//!     c = strider.Container(blob)
//!     assert c.decompress(0, ref) == target

use pyo3::create_exception;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyBytes;

use strider_core::synth::{self, MutationRates};
use strider_core::{self as core, AmbiguityPolicy, CompressParams, IndexParams, Orientation};

create_exception!(strider, ChecksumError, PyValueError);
create_exception!(strider, CorruptDataError, PyValueError);

fn to_py(e: core::Error) -> PyErr {
    match e {
        core::Error::ChecksumMismatch { .. } => ChecksumError::new_err(e.to_string()),
        core::Error::Io(io) => PyIOError::new_err(io.to_string()),
        e if e.is_corruption() => CorruptDataError::new_err(e.to_string()),
        e => PyValueError::new_err(e.to_string()),
    }
}

/// A DNA sequence packed two bits per base.
#[pyclass(name = "PackedSequence", eq, frozen, from_py_object)]
#[derive(Clone, PartialEq)]
struct PySeq {
    inner: core::PackedSequence,
}

impl From<core::PackedSequence> for PySeq {
    fn from(inner: core::PackedSequence) -> Self {
        PySeq { inner }
    }
}

#[pymethods]
impl PySeq {
    /// Build from an `ACGT` string (case-insensitive).
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        core::PackedSequence::from_ascii(text.as_bytes())
            .map(PySeq::from)
            .map_err(to_py)
    }

    /// Parse the `.2bit-raw` form: u64 little-endian base count, then packed bytes.
    #[staticmethod]
    fn from_2bit(data: &[u8]) -> PyResult<Self> {
        core::PackedSequence::read_2bit_raw(data)
            .map(PySeq::from)
            .map_err(to_py)
    }

    fn to_2bit<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyBytes>> {
        let mut out = Vec::with_capacity(8 + self.inner.as_bytes().len());
        self.inner.write_2bit_raw(&mut out).map_err(to_py)?;
        Ok(PyBytes::new(py, &out))
    }

    fn reverse_complement(&self) -> Self {
        self.inner.reverse_complemented().into()
    }

    fn slice(&self, start: usize, length: usize) -> PyResult<Self> {
        self.inner.slice(start, length).map(PySeq::from).map_err(to_py)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __str__(&self) -> String {
        self.inner.to_ascii_string()
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

/// A reference together with its k-mer index.
#[pyclass(name = "Index", frozen)]
struct PyIndex {
    reference: core::Reference,
    index: core::ReferenceIndex,
    skipped: u64,
}

#[pymethods]
impl PyIndex {
    #[new]
    #[pyo3(signature = (reference, k=64, stride=1))]
    fn new(reference: &PySeq, k: usize, stride: usize) -> PyResult<Self> {
        let reference = core::Reference::new(reference.inner.clone());
        let (index, stats) =
            core::ReferenceIndex::build(&reference, IndexParams::new(k).with_stride(stride))
                .map_err(to_py)?;
        Ok(PyIndex {
            reference,
            index,
            skipped: stats.skipped,
        })
    }

    /// Load a `.bidx` file and check it against `reference`.
    #[staticmethod]
    fn load(data: &[u8], reference: &PySeq) -> PyResult<Self> {
        let index = core::ReferenceIndex::load(data).map_err(to_py)?;
        let reference = core::Reference::new(reference.inner.clone());
        index.verify(&reference).map_err(to_py)?;
        Ok(PyIndex {
            reference,
            index,
            skipped: 0,
        })
    }

    fn save<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyBytes>> {
        let mut out = Vec::new();
        self.index.save(&mut out).map_err(to_py)?;
        Ok(PyBytes::new(py, &out))
    }

    #[getter]
    fn k(&self) -> usize {
        self.index.k()
    }

    #[getter]
    fn load_factor(&self) -> f64 {
        self.index.load_factor()
    }

    /// Keys dropped during the build; always 0 for a loaded index.
    #[getter]
    fn skipped(&self) -> u64 {
        self.skipped
    }

    /// `("forward" | "reverse", offset)` for a k-mer present in the reference, else None.
    fn query(&self, kmer: &str) -> PyResult<Option<(&'static str, u32)>> {
        let km = core::Kmer::from_ascii(kmer.as_bytes()).map_err(to_py)?;
        if km.k() != self.index.k() {
            return Err(PyValueError::new_err(format!(
                "k-mer of length {} for an index with k={}",
                km.k(),
                self.index.k()
            )));
        }
        Ok(self.index.query(&self.reference, &km).map(|c| {
            let o = match c.orientation {
                Orientation::Forward => "forward",
                Orientation::ReverseComplement => "reverse",
            };
            (o, c.offset)
        }))
    }

    /// Compress `(id, sequence)` pairs into `.bnc` container bytes.
    #[pyo3(signature = (records, chunk_groups=Some(16), prefilter=true))]
    fn compress<'py>(
        &self,
        py: Python<'py>,
        records: Vec<(String, PySeq)>,
        chunk_groups: Option<u32>,
        prefilter: bool,
    ) -> PyResult<Bound<'py, PyBytes>> {
        let params = CompressParams::new(self.index.k(), 16)
            .with_chunk_groups(chunk_groups)
            .with_prefilter(prefilter);
        let pairs: Vec<(&str, &core::PackedSequence)> =
            records.iter().map(|(id, s)| (id.as_str(), &s.inner)).collect();
        let mut out = Vec::new();
        core::compress_to_container(&pairs, &self.index, &self.reference, &params, &mut out)
            .map_err(to_py)?;
        Ok(PyBytes::new(py, &out))
    }
}

/// A validated `.bnc` container.
#[pyclass(name = "Container", frozen)]
struct PyContainer {
    inner: core::Container,
}

#[pymethods]
impl PyContainer {
    #[new]
    fn new(data: Vec<u8>) -> PyResult<Self> {
        core::Container::from_bytes(data)
            .map(|inner| PyContainer { inner })
            .map_err(to_py)
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    /// `(id, base_count)` per record, in file order.
    #[getter]
    fn records(&self) -> Vec<(String, u64)> {
        self.inner
            .records()
            .iter()
            .map(|r| (r.id.clone(), r.base_count))
            .collect()
    }

    fn __len__(&self) -> usize {
        self.inner.records().len()
    }

    fn decompress(&self, record: usize, reference: &PySeq) -> PyResult<PySeq> {
        let reference = core::Reference::new(reference.inner.clone());
        self.inner
            .decompress_record(record, &reference)
            .map(PySeq::from)
            .map_err(to_py)
    }

    fn extract(&self, record: usize, reference: &PySeq, offset: u64, length: u64) -> PyResult<PySeq> {
        let reference = core::Reference::new(reference.inner.clone());
        self.inner
            .extract_range(record, &reference, offset, length)
            .map(PySeq::from)
            .map_err(to_py)
    }
}

/// Shifted Hamming distance filter. Returns `(ones_count, accepted)`.
#[pyfunction]
#[pyo3(signature = (read, refseg, e=5, amend_run=0, threshold=None))]
fn shd(
    read: &PySeq,
    refseg: &PySeq,
    e: usize,
    amend_run: usize,
    threshold: Option<usize>,
) -> PyResult<(usize, bool)> {
    let cfg = core::ShdConfig {
        e,
        amend_run,
        accept_threshold: threshold.unwrap_or(e),
    };
    let v = core::shd(&read.inner, &refseg.inner, &cfg).map_err(to_py)?;
    Ok((v.ones_count, v.accepted))
}

#[pyfunction]
fn edit_distance(a: &str, b: &str) -> usize {
    core::edit_distance(a.as_bytes(), b.as_bytes())
}

/// Records of a FASTA text as `(id, sequence)` pairs.
#[pyfunction]
#[pyo3(signature = (data, strict=false))]
fn parse_fasta(data: &[u8], strict: bool) -> PyResult<Vec<(String, PySeq)>> {
    let policy = if strict {
        AmbiguityPolicy::Strict
    } else {
        AmbiguityPolicy::ReplaceWithA
    };
    Ok(core::parse_fasta(data, policy)
        .map_err(to_py)?
        .into_iter()
        .map(|r| (r.id, r.seq.into()))
        .collect())
}

#[pyfunction]
#[pyo3(signature = (length, seed=0))]
fn random_sequence(length: usize, seed: u64) -> PySeq {
    synth::random_sequence(&mut synth::rng(seed), length).into()
}

/// Copy of `seq` with per-base errors; `indels` splits `rate` across
/// substitutions, insertions and deletions.
#[pyfunction]
#[pyo3(signature = (seq, rate, seed=0, indels=false))]
fn mutate(seq: &PySeq, rate: f64, seed: u64, indels: bool) -> PyResult<PySeq> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(PyValueError::new_err(format!("rate {rate} outside [0, 1]")));
    }
    let rates = if indels {
        MutationRates::mixed(rate)
    } else {
        MutationRates::snp(rate)
    };
    Ok(synth::mutate(&mut synth::rng(seed), &seq.inner, rates).into())
}

#[pymodule]
fn strider(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySeq>()?;
    m.add_class::<PyIndex>()?;
    m.add_class::<PyContainer>()?;
    m.add_function(wrap_pyfunction!(shd, m)?)?;
    m.add_function(wrap_pyfunction!(edit_distance, m)?)?;
    m.add_function(wrap_pyfunction!(parse_fasta, m)?)?;
    m.add_function(wrap_pyfunction!(random_sequence, m)?)?;
    m.add_function(wrap_pyfunction!(mutate, m)?)?;
    m.add("ChecksumError", m.py().get_type::<ChecksumError>())?;
    m.add("CorruptDataError", m.py().get_type::<CorruptDataError>())?;
    Ok(())
}
