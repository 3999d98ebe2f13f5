//! Python bindings for the hdr2l codec.

use pyo3::create_exception;
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict};

use hdr2l_core::basejpeg::decode_base;
use hdr2l_core::bench::corpus;
use hdr2l_core::container::{self, CodecParams, Mode};
use hdr2l_core::imagio;
use hdr2l_core::tmo::TmoKind;
use hdr2l_core::{tmqi as core_tmqi, Error};

create_exception!(pyhdr2l, Hdr2lError, PyValueError);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io(io) => PyOSError::new_err(io.to_string()),
        other => Hdr2lError::new_err(other.to_string()),
    }
}

/// Half-float RGB image stored as three planes of binary16 codes.
#[pyclass(name = "HdrImage", module = "pyhdr2l", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyHdrImage {
    inner: imagio::HdrImage,
}

#[pymethods]
impl PyHdrImage {
    /// Build from interleaved linear RGB floats (row-major, top row first).
    #[staticmethod]
    fn from_linear(width: usize, height: usize, rgb: Vec<f64>) -> PyResult<Self> {
        imagio::HdrImage::from_linear(width, height, &rgb)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    /// Build from three planes of half codes.
    #[staticmethod]
    fn from_codes(
        width: usize,
        height: usize,
        r: Vec<u16>,
        g: Vec<u16>,
        b: Vec<u16>,
    ) -> PyResult<Self> {
        imagio::HdrImage::new(width, height, [r, g, b])
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    /// Parse Radiance RGBE (`.hdr`) bytes.
    #[staticmethod]
    fn from_rgbe(data: &[u8]) -> PyResult<Self> {
        imagio::parse_rgbe(data)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    /// Parse PFM bytes.
    #[staticmethod]
    fn from_pfm(data: &[u8]) -> PyResult<Self> {
        imagio::parse_pfm(data)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    #[getter]
    fn width(&self) -> usize {
        self.inner.width()
    }

    #[getter]
    fn height(&self) -> usize {
        self.inner.height()
    }

    /// Half codes of one channel (0 = R, 1 = G, 2 = B).
    fn codes(&self, channel: usize) -> PyResult<Vec<u16>> {
        if channel > 2 {
            return Err(PyValueError::new_err("channel must be 0, 1 or 2"));
        }
        Ok(self.inner.plane(channel).to_vec())
    }

    /// Interleaved linear RGB values.
    fn to_linear(&self) -> Vec<f64> {
        self.inner.to_linear()
    }

    fn to_pfm<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &imagio::write_pfm(&self.inner))
    }

    fn __repr__(&self) -> String {
        format!("HdrImage({}x{})", self.inner.width(), self.inner.height())
    }
}

fn parse_mode(mode: &str) -> PyResult<Mode> {
    Mode::from_name(mode).ok_or_else(|| PyValueError::new_err(format!("unknown mode {mode:?}")))
}

fn parse_tmo(tmo: &str) -> PyResult<TmoKind> {
    TmoKind::from_name(tmo)
        .ok_or_else(|| PyValueError::new_err(format!("unknown tone-mapping operator {tmo:?}")))
}

/// Encode an image into an H2L1 stream.
#[pyfunction]
#[pyo3(signature = (image, mode = "hp", tmo = "default", q = 90, refine = 0))]
fn encode<'py>(
    py: Python<'py>,
    image: &PyHdrImage,
    mode: &str,
    tmo: &str,
    q: u8,
    refine: u8,
) -> PyResult<Bound<'py, PyBytes>> {
    let params = CodecParams::new(parse_mode(mode)?, parse_tmo(tmo)?, q, refine).map_err(to_py)?;
    let stream = container::encode(&image.inner, &params).map_err(to_py)?;
    Ok(PyBytes::new(py, &stream))
}

/// Decode an H2L1 stream back to the exact source image.
#[pyfunction]
fn decode(stream: &[u8]) -> PyResult<PyHdrImage> {
    container::decode(stream)
        .map(|inner| PyHdrImage { inner })
        .map_err(to_py)
}

/// The embedded base layer as standalone JPEG bytes.
#[pyfunction]
fn extract_ldr<'py>(py: Python<'py>, stream: &[u8]) -> PyResult<Bound<'py, PyBytes>> {
    let jpeg = container::extract_ldr(stream).map_err(to_py)?;
    Ok(PyBytes::new(py, &jpeg))
}

/// Byte accounting of a stream.
#[pyfunction]
fn measure<'py>(py: Python<'py>, stream: &[u8]) -> PyResult<Bound<'py, PyDict>> {
    let m = container::measure(stream).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("total_bytes", m.total_bytes)?;
    d.set_item("pixels", m.pixels)?;
    d.set_item("bpp", m.bpp)?;
    d.set_item("base", m.base)?;
    d.set_item("refinement", m.refinement)?;
    d.set_item("tables", m.tables)?;
    d.set_item("residual_payload", m.residual_payload)?;
    d.set_item("overhead", m.overhead)?;
    Ok(d)
}

/// TMQI of a baseline JPEG against an HDR image.
#[pyfunction]
fn tmqi<'py>(py: Python<'py>, image: &PyHdrImage, jpeg: &[u8]) -> PyResult<Bound<'py, PyDict>> {
    let ldr = decode_base(jpeg).map_err(to_py)?;
    let s = core_tmqi::tmqi(&image.inner, &ldr).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("q", s.q_overall)?;
    d.set_item("s", s.s_structural)?;
    d.set_item("n", s.n_naturalness)?;
    d.set_item("per_scale_s", s.per_scale_s)?;
    Ok(d)
}

/// Quartiles, whiskers and outliers of a list of numbers.
#[pyfunction]
fn boxstats<'py>(py: Python<'py>, values: Vec<f64>) -> PyResult<Bound<'py, PyDict>> {
    let b = core_tmqi::boxstats(&values).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("q1", b.q1)?;
    d.set_item("median", b.median)?;
    d.set_item("q3", b.q3)?;
    d.set_item("whisker_lo", b.whisker_lo)?;
    d.set_item("whisker_hi", b.whisker_hi)?;
    d.set_item("outliers", b.outliers)?;
    Ok(d)
}

#[pyfunction]
fn half_encode(value: f64) -> PyResult<u16> {
    imagio::half_encode(value).map_err(to_py)
}

#[pyfunction]
fn half_decode(code: u16) -> PyResult<f64> {
    imagio::half_decode(code).map_err(to_py)
}

/// Deterministic synthetic scenes as `(id, image)` pairs.
#[pyfunction]
#[pyo3(signature = (count, size = 64, seed = None, sparse = false))]
fn synthetic_corpus(
    count: usize,
    size: usize,
    seed: Option<u64>,
    sparse: bool,
) -> Vec<(String, PyHdrImage)> {
    let seed = seed.unwrap_or_else(corpus::corpus_seed);
    let images = if sparse {
        corpus::sparse_corpus(count, size, seed)
    } else {
        corpus::synthetic_corpus(count, size, seed)
    };
    images
        .into_iter()
        .map(|(id, inner)| (id, PyHdrImage { inner }))
        .collect()
}

/// Names accepted by the `tmo` argument.
#[pyfunction]
fn tone_mappers() -> Vec<&'static str> {
    TmoKind::ALL.iter().map(|k| k.name()).collect()
}

#[pymodule]
fn pyhdr2l(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("Hdr2lError", m.py().get_type::<Hdr2lError>())?;
    m.add_class::<PyHdrImage>()?;
    m.add_function(wrap_pyfunction!(encode, m)?)?;
    m.add_function(wrap_pyfunction!(decode, m)?)?;
    m.add_function(wrap_pyfunction!(extract_ldr, m)?)?;
    m.add_function(wrap_pyfunction!(measure, m)?)?;
    m.add_function(wrap_pyfunction!(tmqi, m)?)?;
    m.add_function(wrap_pyfunction!(boxstats, m)?)?;
    m.add_function(wrap_pyfunction!(half_encode, m)?)?;
    m.add_function(wrap_pyfunction!(half_decode, m)?)?;
    m.add_function(wrap_pyfunction!(synthetic_corpus, m)?)?;
    m.add_function(wrap_pyfunction!(tone_mappers, m)?)?;
    Ok(())
}
