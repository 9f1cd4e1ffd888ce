//! Python bindings: measurement ingestion, synthetic generation, Pareto
//! fronts, ladder construction, and the BD metric family.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use rqt_ladder::ladder::Ladder;
use rqt_ladder::metrics::{CurveAxis, RqCurve};
use rqt_ladder::synth::SynthProfile;
use rqt_ladder::{
    JqtParams, MParams, ParameterSpace, ParseOptions, QualityMetricKey, TargetBitrateSet,
};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn json_to_py<'py>(py: Python<'py>, value: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    use serde_json::Value;
    Ok(match value {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_pyobject(py)?.into_any()
            } else {
                n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any()
            }
        }
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, v) in map {
                dict.set_item(k, json_to_py(py, v)?)?;
            }
            dict.into_any()
        }
    })
}

fn to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    json_to_py(py, &serde_json::to_value(value).map_err(err)?)
}

fn metric_of(name: &str) -> PyResult<QualityMetricKey> {
    name.parse().map_err(err)
}

fn targets_of(targets: Option<Vec<f64>>) -> PyResult<TargetBitrateSet> {
    match targets {
        Some(t) => TargetBitrateSet::new(t).map_err(err),
        None => Ok(TargetBitrateSet::default_targets()),
    }
}

/// All measurement points for one sequence.
#[pyclass(name = "ParameterSpace", from_py_object)]
#[derive(Clone)]
struct PySpace {
    inner: ParameterSpace,
}

#[pymethods]
impl PySpace {
    #[getter]
    fn sequence_id(&self) -> String {
        self.inner.sequence_id.clone()
    }

    fn __len__(&self) -> usize {
        self.inner.points.len()
    }

    fn points<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.points)
    }

    fn validate<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &rqt_ladder::validate_space(&self.inner))
    }
}

/// A constructed bitrate ladder.
#[pyclass(name = "Ladder", from_py_object)]
#[derive(Clone)]
struct PyLadder {
    inner: Ladder,
}

#[pymethods]
impl PyLadder {
    #[getter]
    fn sequence_id(&self) -> String {
        self.inner.sequence_id.clone()
    }

    #[getter]
    fn monotonic(&self) -> bool {
        self.inner.monotonic
    }

    fn quality_is_monotone(&self) -> bool {
        self.inner.quality_is_monotone()
    }

    fn rungs<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.rungs)
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner)
    }
}

#[pyfunction]
#[pyo3(signature = (csv_text, strict = false))]
fn parse_measurements(csv_text: &str, strict: bool) -> PyResult<Vec<PySpace>> {
    let spaces = rqt_ladder::parse_measurements(
        csv_text,
        &ParseOptions {
            strict,
            ..Default::default()
        },
    )
    .map_err(err)?;
    Ok(spaces.into_iter().map(|inner| PySpace { inner }).collect())
}

#[pyfunction]
#[pyo3(signature = (seed = 0, spatial_complexity = None, temporal_complexity = None, luminance = None, noise_level = None))]
fn generate_space(
    seed: u64,
    spatial_complexity: Option<f64>,
    temporal_complexity: Option<f64>,
    luminance: Option<f64>,
    noise_level: Option<f64>,
) -> PyResult<PySpace> {
    let mut profile = SynthProfile {
        seed,
        ..Default::default()
    };
    if let Some(v) = spatial_complexity {
        profile.spatial_complexity = v;
    }
    if let Some(v) = temporal_complexity {
        profile.temporal_complexity = v;
    }
    if let Some(v) = luminance {
        profile.luminance = v;
    }
    if let Some(v) = noise_level {
        profile.noise_level = v;
    }
    Ok(PySpace {
        inner: rqt_ladder::generate_space(&profile).map_err(err)?,
    })
}

#[pyfunction]
#[pyo3(signature = (space, metric, alpha))]
fn front_jqt<'py>(
    py: Python<'py>,
    space: &PySpace,
    metric: &str,
    alpha: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let front = rqt_ladder::front_jqt(
        &space.inner,
        metric_of(metric)?,
        JqtParams::new(alpha).map_err(err)?,
    )
    .map_err(err)?;
    to_py(py, &front.export_rows())
}

#[pyfunction]
#[pyo3(signature = (space, metric, alpha))]
fn front_jrqt<'py>(
    py: Python<'py>,
    space: &PySpace,
    metric: &str,
    alpha: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let front = rqt_ladder::front_jrqt(
        &space.inner,
        metric_of(metric)?,
        MParams::new(alpha).map_err(err)?,
    )
    .map_err(err)?;
    to_py(py, &front.export_rows())
}

#[pyfunction]
#[pyo3(signature = (space, strategy, metric = "xpsnr", alpha = 0.75, targets = None, tau_limit = None))]
fn build_ladder(
    space: &PySpace,
    strategy: &str,
    metric: &str,
    alpha: f64,
    targets: Option<Vec<f64>>,
    tau_limit: Option<f64>,
) -> PyResult<PyLadder> {
    let metric = metric_of(metric)?;
    let targets = targets_of(targets)?;
    let space = &space.inner;
    let inner = match strategy {
        "jqt" => {
            let front =
                rqt_ladder::front_jqt(space, metric, JqtParams::new(alpha).map_err(err)?)
                    .map_err(err)?;
            rqt_ladder::build_ladder(&front, &targets, true)
        }
        "jrqt" | "jrqt-nonmono" => {
            let front =
                rqt_ladder::front_jrqt(space, metric, MParams::new(alpha).map_err(err)?)
                    .map_err(err)?;
            rqt_ladder::build_ladder(&front, &targets, strategy == "jrqt")
        }
        "fixed" => rqt_ladder::ladder_fixed(
            space,
            &targets,
            &rqt_ladder::default_fixed_pairs(),
            metric,
        ),
        "default" => rqt_ladder::ladder_default(space, &targets, metric),
        "dynres" => rqt_ladder::ladder_dynres(space, &targets, metric),
        "timecap" => {
            let cap = tau_limit
                .ok_or_else(|| PyValueError::new_err("timecap requires tau_limit"))?;
            rqt_ladder::ladder_time_capped(space, &targets, metric, cap)
        }
        other => return Err(PyValueError::new_err(format!("unknown strategy '{other}'"))),
    }
    .map_err(err)?;
    Ok(PyLadder { inner })
}

#[pyfunction]
fn compare<'py>(
    py: Python<'py>,
    method: Vec<PyLadder>,
    reference: Vec<PyLadder>,
) -> PyResult<Bound<'py, PyAny>> {
    let method: Vec<Ladder> = method.into_iter().map(|l| l.inner).collect();
    let reference: Vec<Ladder> = reference.into_iter().map(|l| l.inner).collect();
    to_py(py, &rqt_ladder::compare(&method, &reference).map_err(err)?)
}

fn curve(points: Vec<(f64, f64)>, axis: CurveAxis) -> RqCurve {
    RqCurve::new(points, axis)
}

#[pyfunction]
fn bd_rate(test: Vec<(f64, f64)>, reference: Vec<(f64, f64)>) -> PyResult<f64> {
    rqt_ladder::bd_rate(&curve(test, CurveAxis::Quality), &curve(reference, CurveAxis::Quality))
        .map(|v| v.value)
        .map_err(err)
}

#[pyfunction]
fn bd_quality(test: Vec<(f64, f64)>, reference: Vec<(f64, f64)>) -> PyResult<f64> {
    rqt_ladder::bd_quality(&curve(test, CurveAxis::Quality), &curve(reference, CurveAxis::Quality))
        .map(|v| v.value)
        .map_err(err)
}

#[pyfunction]
fn bdde(test: Vec<(f64, f64)>, reference: Vec<(f64, f64)>) -> PyResult<f64> {
    rqt_ladder::bdde(&curve(test, CurveAxis::Energy), &curve(reference, CurveAxis::Energy))
        .map(|v| v.value)
        .map_err(err)
}

#[pyfunction]
fn delta_decode_time(method: Vec<f64>, reference: Vec<f64>) -> PyResult<f64> {
    rqt_ladder::delta_decode_time(&method, &reference).map_err(err)
}

#[pyfunction]
fn pearson(xs: Vec<f64>, ys: Vec<f64>) -> PyResult<f64> {
    rqt_ladder::pearson(&xs, &ys).map_err(err)
}

#[pymodule]
fn rqt_ladder_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpace>()?;
    m.add_class::<PyLadder>()?;
    m.add_function(wrap_pyfunction!(parse_measurements, m)?)?;
    m.add_function(wrap_pyfunction!(generate_space, m)?)?;
    m.add_function(wrap_pyfunction!(front_jqt, m)?)?;
    m.add_function(wrap_pyfunction!(front_jrqt, m)?)?;
    m.add_function(wrap_pyfunction!(build_ladder, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add_function(wrap_pyfunction!(bd_rate, m)?)?;
    m.add_function(wrap_pyfunction!(bd_quality, m)?)?;
    m.add_function(wrap_pyfunction!(bdde, m)?)?;
    m.add_function(wrap_pyfunction!(delta_decode_time, m)?)?;
    m.add_function(wrap_pyfunction!(pearson, m)?)?;
    Ok(())
}
