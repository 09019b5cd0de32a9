//! Python bindings. Bodies and field specs cross the boundary as the same
//! JSON documents the CLI accepts; results come back as plain Python
//! numbers, lists, and dicts.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyDict, PyFloat, PyList, PyString};

use minkfield::gaussian::{
    cholesky_simulate, plane_wave_simulate, representation_constants, MfBfSpec, SimMethod, Variant,
};
use minkfield::geometry::{
    associated_star_body, polar_projection_body, radial_pth_mean_body, ConvexBody, DirectionGrid,
    StarBody,
};
use minkfield::poisson::{simulate as poisson_simulate, PoissonFieldSpec};
use minkfield::verify::{run_by_name, run_suite, Budgets};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_star_body(text: &str) -> PyResult<StarBody> {
    let body: StarBody = serde_json::from_str(text).map_err(err)?;
    body.validate().map_err(err)?;
    Ok(body)
}

fn parse_variant(name: &str) -> PyResult<Variant> {
    match name {
        "standard" => Ok(Variant::Standard),
        "sub_fractional" => Ok(Variant::SubFractional),
        other => Err(err(format!(
            "unknown variant {other:?}; expected \"standard\" or \"sub_fractional\""
        ))),
    }
}

fn json_to_py(py: Python<'_>, v: &serde_json::Value) -> PyResult<Py<PyAny>> {
    use serde_json::Value;
    let obj: Py<PyAny> = match v {
        Value::Null => py.None(),
        Value::Bool(b) => PyBool::new(py, *b).to_owned().into_any().unbind(),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_pyobject(py)?.into_any().unbind()
            } else if let Some(u) = n.as_u64() {
                u.into_pyobject(py)?.into_any().unbind()
            } else {
                PyFloat::new(py, n.as_f64().unwrap_or(f64::NAN))
                    .into_any()
                    .unbind()
            }
        }
        Value::String(s) => PyString::new(py, s).into_any().unbind(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_any().unbind()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, val) in map {
                dict.set_item(k, json_to_py(py, val)?)?;
            }
            dict.into_any().unbind()
        }
    };
    Ok(obj)
}

fn serialize_to_py<T: serde::Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    json_to_py(py, &serde_json::to_value(value).map_err(err)?)
}

/// Evaluate a star-body gauge (JSON body spec) at a point.
#[pyfunction]
fn gauge(body: &str, at: Vec<f64>) -> PyResult<f64> {
    parse_star_body(body)?.gauge(&at).map_err(err)
}

/// Spectral-representation constants for (H, d) as a dict with keys
/// "H", "d", "a", "b" (None when H >= d/2), "c_H".
#[pyfunction]
fn constants(py: Python<'_>, h: f64, d: usize) -> PyResult<Py<PyAny>> {
    let rc = representation_constants(h, d).map_err(err)?;
    let value = serde_json::json!({
        "H": rc.hurst,
        "d": rc.dim,
        "a": rc.a_hd,
        "b": rc.b_hd,
        "c_H": rc.c_h,
    });
    json_to_py(py, &value)
}

/// Covariance of the Gaussian field between two points.
#[pyfunction(signature = (h, body, z1, z2, variant = "standard"))]
fn cov(h: f64, body: &str, z1: Vec<f64>, z2: Vec<f64>, variant: &str) -> PyResult<f64> {
    let spec = MfBfSpec::new(h, parse_star_body(body)?, parse_variant(variant)?).map_err(err)?;
    spec.cov(&z1, &z2).map_err(err)
}

/// Joint Gaussian replicates at the given points; rows are paths.
#[pyfunction(signature = (h, body, points, n_paths, seed, method = "cholesky", variant = "standard"))]
fn simulate_gauss(
    h: f64,
    body: &str,
    points: Vec<Vec<f64>>,
    n_paths: usize,
    seed: u64,
    method: &str,
    variant: &str,
) -> PyResult<Vec<Vec<f64>>> {
    let spec = MfBfSpec::new(h, parse_star_body(body)?, parse_variant(variant)?).map_err(err)?;
    let method: SimMethod = serde_json::from_value(serde_json::json!(method))
        .map_err(|_| err(format!("unknown method {method:?}")))?;
    let batch = match method {
        SimMethod::Cholesky => cholesky_simulate(&spec, &points, n_paths, seed),
        SimMethod::PlaneWave => plane_wave_simulate(&spec, &points, n_paths, seed),
    }
    .map_err(err)?;
    Ok(batch.paths)
}

/// Integer-valued shot-noise replicates at the given points; rows are paths.
/// `field` is the JSON field spec ("fractional", "truncated", or
/// "directional").
#[pyfunction]
fn simulate_poisson(
    field: &str,
    points: Vec<Vec<f64>>,
    n_paths: usize,
    seed: u64,
) -> PyResult<Vec<Vec<i64>>> {
    let spec: PoissonFieldSpec = serde_json::from_str(field).map_err(err)?;
    let batch = poisson_simulate(&spec, &points, n_paths, seed).map_err(err)?;
    Ok(batch.paths)
}

fn direction_grid(dim: usize, n: Option<usize>) -> PyResult<DirectionGrid> {
    match (dim, n) {
        (_, None) => DirectionGrid::default_for_dim(dim),
        (2, Some(n)) => DirectionGrid::half_circle(n),
        (3, Some(n)) => DirectionGrid::fibonacci_sphere(n),
        (d, Some(_)) => Err(minkfield::Error::UnsupportedDimension {
            dim: d,
            op: "direction grid".into(),
        }),
    }
    .map_err(err)
}

/// Derive a star body from a convex body (JSON spec). `transform` is
/// "polar_projection", "radial_mean" (needs `p`, `seed`), or "associated"
/// (needs `h`, `seed`). Returns the star body as a dict.
#[pyfunction(signature = (body, transform, p = None, h = None, seed = None, n_samples = 150_000, grid = None))]
#[allow(clippy::too_many_arguments)]
fn transform_body(
    py: Python<'_>,
    body: &str,
    transform: &str,
    p: Option<f64>,
    h: Option<f64>,
    seed: Option<u64>,
    n_samples: usize,
    grid: Option<usize>,
) -> PyResult<Py<PyAny>> {
    let body: ConvexBody = serde_json::from_str(body).map_err(err)?;
    let grid = direction_grid(body.dim(), grid)?;
    let need_seed = || seed.ok_or_else(|| err(format!("transform {transform:?} needs a seed")));
    let result = match transform {
        "polar_projection" => polar_projection_body(&body, &grid).map_err(err)?,
        "radial_mean" => {
            let p = p.ok_or_else(|| err("radial_mean needs the exponent p"))?;
            radial_pth_mean_body(&body, p, n_samples, need_seed()?, &grid).map_err(err)?
        }
        "associated" => {
            let h = h.ok_or_else(|| err("associated needs the Hurst index h"))?;
            associated_star_body(&body, h, n_samples, need_seed()?, &grid).map_err(err)?
        }
        other => {
            return Err(err(format!(
                "unknown transform {other:?}; expected \"polar_projection\", \
                 \"radial_mean\", or \"associated\""
            )))
        }
    };
    serialize_to_py(py, &result)
}

/// Run one named self-check or the whole suite ("suite"). Returns a list of
/// report dicts; each has "name", "pass", and per-quantity entries.
#[pyfunction(signature = (name, seed, n_paths = None, n_samples = None, grid = None))]
fn verify(
    py: Python<'_>,
    name: &str,
    seed: u64,
    n_paths: Option<usize>,
    n_samples: Option<usize>,
    grid: Option<usize>,
) -> PyResult<Py<PyAny>> {
    let budgets = Budgets {
        n_paths,
        n_samples,
        grid,
    };
    let reports = if name == "suite" {
        run_suite(seed, &budgets)
    } else {
        run_by_name(name, seed, &budgets)
    }
    .map_err(err)?;
    serialize_to_py(py, &reports)
}

#[pymodule]
fn minkfield_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(gauge, m)?)?;
    m.add_function(wrap_pyfunction!(constants, m)?)?;
    m.add_function(wrap_pyfunction!(cov, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_gauss, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_poisson, m)?)?;
    m.add_function(wrap_pyfunction!(transform_body, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
