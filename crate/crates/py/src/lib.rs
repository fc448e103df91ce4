//! Python bindings. Formulas travel as strings in the standard notation,
//! labels as `"True"`, `"False"`, `"Uncertain"` or `"Error"`, structured
//! results as plain dicts and lists.

use std::str::FromStr;

use neurosym_core::datasets::{ProblemRecord, Source};
use neurosym_core::generation::{self, bundled_bank, GenConfig, Mode};
use neurosym_core::metrics::{self, LabeledProblem, LabeledRun, McNemarVariant};
use neurosym_core::normalize::{ClauseOrigin, ClausifySession};
use neurosym_core::pipeline::evaluate_payload;
use neurosym_core::prover::{self, ProofLimits};
use neurosym_core::syntax::{self, Dialect, ParseOptions};
use neurosym_core::voting::{self, Label};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

fn value_error(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

fn serialized<'py>(py: Python<'py>, v: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &serde_json::to_value(v).map_err(value_error)?)
}

fn dialect(name: &str) -> PyResult<Dialect> {
    match name {
        "standard" => Ok(Dialect::Standard),
        "folio" => Ok(Dialect::Folio),
        other => Err(value_error(format!("unknown dialect `{other}`"))),
    }
}

fn label(s: &str) -> PyResult<Label> {
    Label::from_str(s).map_err(value_error)
}

fn labels(xs: &[String]) -> PyResult<Vec<Label>> {
    xs.iter().map(|s| label(s)).collect()
}

fn parse_all(formulas: &[String]) -> PyResult<Vec<syntax::Formula>> {
    formulas.iter().map(|f| syntax::parse(f).map_err(value_error)).collect()
}

/// A parsed first-order formula.
#[pyclass(frozen, eq, hash, str, skip_from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct Formula(syntax::Formula);

impl std::fmt::Display for Formula {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

#[pymethods]
impl Formula {
    #[new]
    #[pyo3(signature = (text, dialect = "standard"))]
    fn new(text: &str, dialect: &str) -> PyResult<Self> {
        let options = ParseOptions { dialect: self::dialect(dialect)? };
        syntax::parse_with(text, options).map(Formula).map_err(value_error)
    }

    fn free_vars(&self) -> Vec<String> {
        syntax::free_vars(&self.0).into_iter().collect()
    }

    /// Universal closure over the free variables.
    fn close(&self) -> Formula {
        Formula(syntax::close_universally(&self.0))
    }

    fn nnf(&self) -> Formula {
        Formula(neurosym_core::normalize::to_nnf(&self.0))
    }

    fn __repr__(&self) -> String {
        format!("Formula({:?})", self.0.to_string())
    }
}

/// Canonical text of `text`; raises `ValueError` with the diagnostic.
#[pyfunction]
#[pyo3(signature = (text, dialect = "standard", lenient = false))]
fn parse(text: &str, dialect: &str, lenient: bool) -> PyResult<String> {
    let options = ParseOptions { dialect: self::dialect(dialect)? };
    let f = if lenient {
        syntax::parse_closed(text, options, true)
    } else {
        syntax::parse_with(text, options)
    };
    f.map(|f| syntax::print(&f)).map_err(value_error)
}

/// Predicate and function arities; raises `ValueError` on a clash.
#[pyfunction]
fn check_signature<'py>(py: Python<'py>, formulas: Vec<String>) -> PyResult<Bound<'py, PyAny>> {
    let parsed = parse_all(&formulas)?;
    match syntax::check_signature(&parsed) {
        Ok(sig) => serialized(py, &sig),
        Err(diags) => Err(value_error(diags.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))),
    }
}

/// Clauses of the formulas, one string per clause.
#[pyfunction]
fn clausify(formulas: Vec<String>) -> PyResult<Vec<String>> {
    let parsed = parse_all(&formulas)?;
    let mut session = ClausifySession::for_formulas(&parsed);
    let mut out = Vec::new();
    for (i, f) in parsed.iter().enumerate() {
        let clauses = session.clausify(f, ClauseOrigin::Premise(i)).map_err(value_error)?;
        out.extend(clauses.iter().map(|c| c.to_string()));
    }
    Ok(out)
}

/// Entailment verdict as `{"label", "resource_limited", "premises_inconsistent"}`.
#[pyfunction]
#[pyo3(signature = (premises, conclusion, max_seconds = 10.0))]
fn decide<'py>(py: Python<'py>, premises: Vec<String>, conclusion: &str, max_seconds: f64) -> PyResult<Bound<'py, PyDict>> {
    let premises = parse_all(&premises)?;
    let conclusion = syntax::parse(conclusion).map_err(value_error)?;
    let limits = ProofLimits::with_seconds(max_seconds);
    let v = py
        .detach(|| prover::decide(&premises, &conclusion, &limits))
        .map_err(value_error)?;
    let dict = PyDict::new(py);
    dict.set_item("label", v.label.as_str())?;
    dict.set_item("resource_limited", v.flags.resource_limited)?;
    dict.set_item("premises_inconsistent", v.flags.premises_inconsistent)?;
    Ok(dict)
}

/// Label for one translated program, the way the pipeline scores a sample:
/// syntax, arity and prover failures give `"Error"`.
#[pyfunction]
#[pyo3(signature = (premises, conclusion, max_seconds = 10.0, lenient = false))]
fn evaluate_program(py: Python<'_>, premises: Vec<String>, conclusion: String, max_seconds: f64, lenient: bool) -> (String, Option<String>) {
    let payload = generation::ExtractedPayload::FolProgram { premise_fols: premises, conclusion_fol: conclusion };
    let limits = ProofLimits::with_seconds(max_seconds);
    let outcome = py.detach(|| evaluate_payload(&payload, &limits, lenient));
    (outcome.label.to_string(), outcome.note)
}

#[pyfunction]
fn majority_vote(ballot: Vec<String>) -> PyResult<String> {
    let v = voting::majority_vote(&labels(&ballot)?).map_err(value_error)?;
    Ok(v.final_label.to_string())
}

#[pyfunction]
#[pyo3(signature = (mode, premises, conclusion, k_shot = 8))]
fn build_prompt(mode: &str, premises: Vec<String>, conclusion: String, k_shot: usize) -> PyResult<String> {
    let mode = Mode::from_str(mode).map_err(value_error)?;
    let problem = ProblemRecord {
        id: String::new(),
        premises_nl: premises,
        conclusion_nl: conclusion,
        premises_fol: None,
        conclusion_fol: None,
        gold_label: Label::Uncertain,
        depth: None,
        source: Source::FolioVal,
    };
    let cfg = GenConfig { k_shot, ..GenConfig::default() };
    generation::build_prompt(mode, &cfg, &problem, bundled_bank()).map_err(value_error)
}

/// Payload of a completion as a dict tagged by `"kind"`.
#[pyfunction]
fn extract<'py>(py: Python<'py>, mode: &str, completion: &str) -> PyResult<Bound<'py, PyAny>> {
    let mode = Mode::from_str(mode).map_err(value_error)?;
    serialized(py, &generation::extract(mode, completion))
}

#[pyfunction]
fn similarity(a: Vec<String>, b: Vec<String>, gold: Vec<String>) -> PyResult<f64> {
    metrics::similarity(&labels(&a)?, &labels(&b)?, &labels(&gold)?).map_err(value_error)
}

/// p-value for discordant counts `b` and `c`.
#[pyfunction]
#[pyo3(signature = (b, c, exact = false))]
fn mcnemar(b: usize, c: usize, exact: bool) -> f64 {
    let variant = if exact { McNemarVariant::Exact } else { McNemarVariant::Corrected };
    metrics::mcnemar_from_counts(b, c, variant)
}

/// Bootstrap `(mean, std)` of K-sample vote accuracy. `problems` holds
/// `(sample_labels, gold_label)` pairs.
#[pyfunction]
#[pyo3(signature = (problems, k = 10, iterations = 1000, seed = 0))]
fn bootstrap_accuracy(problems: Vec<(Vec<String>, String)>, k: usize, iterations: usize, seed: u64) -> PyResult<(f64, f64)> {
    let problems = problems
        .iter()
        .enumerate()
        .map(|(i, (ls, gold))| {
            Ok(LabeledProblem { id: i.to_string(), labels: labels(ls)?, gold: label(gold)?, depth: None })
        })
        .collect::<PyResult<Vec<_>>>()?;
    let run = LabeledRun { mode: None, problems };
    metrics::bootstrap_vote_accuracy(&run, k, iterations, seed).map_err(value_error)
}

#[pymodule]
fn neurosym(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Formula>()?;
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    m.add_function(wrap_pyfunction!(check_signature, m)?)?;
    m.add_function(wrap_pyfunction!(clausify, m)?)?;
    m.add_function(wrap_pyfunction!(decide, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate_program, m)?)?;
    m.add_function(wrap_pyfunction!(majority_vote, m)?)?;
    m.add_function(wrap_pyfunction!(build_prompt, m)?)?;
    m.add_function(wrap_pyfunction!(extract, m)?)?;
    m.add_function(wrap_pyfunction!(similarity, m)?)?;
    m.add_function(wrap_pyfunction!(mcnemar, m)?)?;
    m.add_function(wrap_pyfunction!(bootstrap_accuracy, m)?)?;
    Ok(())
}
