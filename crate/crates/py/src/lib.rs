//! Python bindings. Sets and relations are classes; results of the larger
//! operations come back as plain dictionaries.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

use rsumset::constructions as cons;
use rsumset::rational::parse_rational;
use rsumset::search::{self, ScanKind, ScanParams};
use rsumset::stability;
use rsumset::{rectify, verify, AdditiveSet, RelationConstraint};

fn err(e: rsumset::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Converts any serializable result to Python objects through `json.loads`.
fn to_py<T: Serialize>(py: Python<'_>, v: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

#[pyclass(name = "ResidueSet", frozen, from_py_object)]
#[derive(Clone)]
struct PyResidueSet(rsumset::ResidueSet);

#[pymethods]
impl PyResidueSet {
    #[new]
    fn new(p: u64, elements: Vec<i64>) -> PyResult<Self> {
        rsumset::ResidueSet::from_elements(p, elements).map(Self).map_err(err)
    }

    #[getter]
    fn p(&self) -> u64 {
        self.0.p()
    }

    fn elements(&self) -> Vec<i64> {
        self.0.elements()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __contains__(&self, x: i64) -> bool {
        self.0.contains(self.0.canonical(x))
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        format!("ResidueSet({}, {:?})", self.0.p(), self.0.elements())
    }

    fn sumset(&self, other: &Self) -> PyResult<Self> {
        rsumset::sumset(&self.0, &other.0).map(Self).map_err(err)
    }

    fn dilate(&self, t: i64) -> PyResult<Self> {
        rsumset::dilate(&self.0, t).map(Self).map_err(err)
    }
}

#[pyclass(name = "IntegerSet", frozen, from_py_object)]
#[derive(Clone)]
struct PyIntegerSet(rsumset::IntegerSet);

#[pymethods]
impl PyIntegerSet {
    #[new]
    fn new(elements: Vec<i64>) -> Self {
        Self(rsumset::IntegerSet::new(elements))
    }

    fn elements(&self) -> Vec<i64> {
        self.0.elements()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __contains__(&self, x: i64) -> bool {
        self.0.contains(x)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        format!("IntegerSet({:?})", self.0.elements())
    }

    fn sumset(&self, other: &Self) -> PyResult<Self> {
        rsumset::sumset(&self.0, &other.0).map(Self).map_err(err)
    }
}

#[pyclass(name = "Relation", frozen, from_py_object)]
#[derive(Clone)]
struct PyRelation(rsumset::Relation);

#[pymethods]
impl PyRelation {
    #[new]
    fn new(pairs: Vec<(i64, i64)>) -> Self {
        Self(rsumset::Relation::new(pairs))
    }

    /// Parses the `"a:b;a:b"` literal.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        rsumset::Relation::parse(text).map(Self).map_err(err)
    }

    fn pairs(&self) -> Vec<(i64, i64)> {
        self.0.pairs()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    /// `(max degree on A, max degree on B)`.
    fn degree_profile(&self) -> (usize, usize) {
        self.0.degree_profile()
    }

    fn __repr__(&self) -> String {
        format!("Relation({:?})", self.0.to_literal())
    }
}

/// Either universe, as accepted by the generic operations.
#[derive(FromPyObject)]
enum AnySet {
    Residue(PyResidueSet),
    Integer(PyIntegerSet),
}

fn pair(a: AnySet, b: AnySet) -> PyResult<(AnySet, AnySet)> {
    match (&a, &b) {
        (AnySet::Residue(_), AnySet::Residue(_)) | (AnySet::Integer(_), AnySet::Integer(_)) => Ok((a, b)),
        _ => Err(PyValueError::new_err("A and B must live in the same universe")),
    }
}

/// Elements of `A +_R B`.
#[pyfunction]
fn restricted_sumset(a: AnySet, b: AnySet, r: &PyRelation) -> PyResult<Vec<i64>> {
    match pair(a, b)? {
        (AnySet::Residue(x), AnySet::Residue(y)) => rsumset::restricted_sumset(&x.0, &y.0, &r.0).map(|s| s.elements()),
        (AnySet::Integer(x), AnySet::Integer(y)) => rsumset::restricted_sumset(&x.0, &y.0, &r.0).map(|s| s.elements()),
        _ => unreachable!(),
    }
    .map_err(err)
}

/// Exact minimum of `|A +_R B|`; `constraint` is `function-b`, `matching`,
/// `degree-b:D` or `degree-both:D`.
#[pyfunction]
#[pyo3(signature = (a, b, constraint, budget = search::DEFAULT_BUDGET))]
fn min_restricted_sumset(py: Python<'_>, a: AnySet, b: AnySet, constraint: &str, budget: u64) -> PyResult<Py<PyAny>> {
    let c: RelationConstraint = constraint.parse().map_err(err)?;
    let res = match pair(a, b)? {
        (AnySet::Residue(x), AnySet::Residue(y)) => search::min_restricted_sumset(&x.0, &y.0, c, budget),
        (AnySet::Integer(x), AnySet::Integer(y)) => search::min_restricted_sumset(&x.0, &y.0, c, budget),
        _ => unreachable!(),
    }
    .map_err(err)?;
    to_py(py, &res)
}

/// Builds a construction: `corner` and `zgap` take `n, d`; `fpfun` takes
/// `p, k, ell`; `fpmatch` takes `p`; `fpunb` takes `p, eps`.
#[pyfunction]
#[pyo3(signature = (family, p = None, n = None, d = None, k = None, ell = None, eps = None))]
#[allow(clippy::too_many_arguments)]
fn construct(
    py: Python<'_>,
    family: &str,
    p: Option<u64>,
    n: Option<i64>,
    d: Option<i64>,
    k: Option<i64>,
    ell: Option<i64>,
    eps: Option<&str>,
) -> PyResult<Py<PyAny>> {
    let need = |v: Option<i64>, name: &str| v.ok_or_else(|| PyValueError::new_err(format!("{family} needs {name}")));
    let prime = || p.ok_or_else(|| PyValueError::new_err(format!("{family} needs p")));
    let out = match family {
        "corner" => cons::construct_interval_corner(need(n, "n")?, need(d, "d")?),
        "zgap" => cons::construct_z_gap(need(n, "n")?, need(d, "d")?),
        "fpfun" => cons::construct_fp_function(prime()?, need(k, "k")?, need(ell, "ell")?),
        "fpmatch" => cons::construct_fp_matching(prime()?),
        "fpunb" => {
            let e = parse_rational(eps.ok_or_else(|| PyValueError::new_err("fpunb needs eps"))?).map_err(err)?;
            cons::construct_fp_unbalanced(prime()?, e)
        }
        other => return Err(PyValueError::new_err(format!("unknown family {other:?}"))),
    }
    .map_err(err)?;
    to_py(py, &out)
}

/// Translate counts `r_i = |{x : |(F + x) n A| = i}|`.
#[pyfunction]
fn r_profile(a: &PyResidueSet, f: &PyResidueSet) -> PyResult<Vec<usize>> {
    verify::r_profile(&a.0, &f.0).map(|p| p.r).map_err(err)
}

#[pyfunction]
fn is_sidon(f: &PyResidueSet) -> bool {
    verify::is_sidon(&f.0)
}

/// `(t, image)` for the smallest rectifying dilation, or `None`.
#[pyfunction]
fn find_rectifying_dilation(x: &PyResidueSet) -> PyResult<Option<(i64, Vec<i64>)>> {
    Ok(rectify::find_rectifying_dilation(&x.0)
        .map_err(err)?
        .map(|c| (c.t, c.image_a.elements())))
}

/// Exhaustive (or, with `sample` and `seed`, sampled) scan summary.
#[pyfunction]
#[pyo3(signature = (kind, universe, d = 1, k = 2, sample = None, seed = 0, rows = false))]
#[allow(clippy::too_many_arguments)]
fn scan(
    py: Python<'_>,
    kind: &str,
    universe: u64,
    d: usize,
    k: u64,
    sample: Option<usize>,
    seed: u64,
    rows: bool,
) -> PyResult<Py<PyAny>> {
    let kind: ScanKind = kind.parse().map_err(err)?;
    let mut params = ScanParams::new(kind, universe);
    params.d = d;
    params.k = k;
    params.sample = sample.map(|count| search::Sample { count, seed });
    let report = py.detach(|| search::scan_conjectures(&params)).map_err(err)?;
    if rows {
        to_py(py, &report)
    } else {
        to_py(py, &report.summary())
    }
}

#[pyfunction]
#[pyo3(signature = (eps = "1/2", gamma = "1/1024", t = 1024, d = 1))]
fn constant_ledger(py: Python<'_>, eps: &str, gamma: &str, t: u64, d: u32) -> PyResult<Py<PyAny>> {
    let eps = parse_rational(eps).map_err(err)?;
    let gamma = parse_rational(gamma).map_err(err)?;
    to_py(py, &stability::constant_ledger(eps, gamma, t, d).map_err(err)?)
}

/// Synthesizes an instance meeting the claim hypotheses and evaluates it.
#[pyfunction]
#[pyo3(signature = (p = 8209, b_size = 2, r = 0, seed = 0))]
fn stability_synthetic(py: Python<'_>, p: u64, b_size: usize, r: usize, seed: u64) -> PyResult<Py<PyAny>> {
    let inst = stability::synthesize(p, b_size, r, seed).map_err(err)?;
    let (outcome, report) = inst.evaluate().map_err(err)?;
    #[derive(Serialize)]
    struct Out {
        partition: stability::PartitionOutcome,
        claims: stability::ClaimReport,
    }
    to_py(py, &Out { partition: outcome, claims: report })
}

#[pymodule]
fn rsumset_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyResidueSet>()?;
    m.add_class::<PyIntegerSet>()?;
    m.add_class::<PyRelation>()?;
    m.add_function(wrap_pyfunction!(restricted_sumset, m)?)?;
    m.add_function(wrap_pyfunction!(min_restricted_sumset, m)?)?;
    m.add_function(wrap_pyfunction!(construct, m)?)?;
    m.add_function(wrap_pyfunction!(r_profile, m)?)?;
    m.add_function(wrap_pyfunction!(is_sidon, m)?)?;
    m.add_function(wrap_pyfunction!(find_rectifying_dilation, m)?)?;
    m.add_function(wrap_pyfunction!(scan, m)?)?;
    m.add_function(wrap_pyfunction!(constant_ledger, m)?)?;
    m.add_function(wrap_pyfunction!(stability_synthetic, m)?)?;
    Ok(())
}
