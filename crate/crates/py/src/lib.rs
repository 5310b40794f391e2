//! Python bindings. Values cross the boundary as strings in the text
//! format of the parser, so `str()` of any object parses back.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use schemamap::chase::{chase_mapping, ChaseConfig, ChaseMode, ChaseStatus};
use schemamap::containment::{
    check_containment, check_equivalence, ContainmentConfig, DummyOutcome, EquivalenceOutcome, LevelBound, Outcome,
    Verdict as CoreVerdict,
};
use schemamap::parser::{parse_instance, parse_mapping, parse_query, render_fact, SourceText};
use schemamap::{ConjunctiveQuery, Instance as CoreInstance, SchemaMapping, Symbol};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "Mapping", frozen, module = "schemamap")]
pub struct Mapping {
    inner: SchemaMapping,
}

#[pymethods]
impl Mapping {
    /// Parses a mapping from its text form.
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        parse_mapping(&SourceText::inline(text))
            .map(|inner| Mapping { inner })
            .map_err(err)
    }

    #[staticmethod]
    fn from_file(path: &str) -> PyResult<Self> {
        let text = SourceText::from_path(path).map_err(err)?;
        parse_mapping(&text).map(|inner| Mapping { inner }).map_err(err)
    }

    #[getter]
    fn source(&self) -> Vec<(String, usize)> {
        self.inner.source.relations().map(|(n, a)| (n.to_string(), a)).collect()
    }

    #[getter]
    fn target(&self) -> Vec<(String, usize)> {
        self.inner.target.relations().map(|(n, a)| (n.to_string(), a)).collect()
    }

    #[getter]
    fn st_tgds(&self) -> Vec<String> {
        self.inner.st_tgds.iter().map(ToString::to_string).collect()
    }

    #[getter]
    fn t_tgds(&self) -> Vec<String> {
        self.inner.t_tgds.iter().map(ToString::to_string).collect()
    }

    /// Parses a source instance for this mapping.
    fn source_instance(&self, text: &str) -> PyResult<Instance> {
        parse_instance(&SourceText::inline(text), &self.inner.source)
            .map(|inner| Instance { inner })
            .map_err(err)
    }

    /// Parses an instance over source and target relations together.
    fn instance(&self, text: &str) -> PyResult<Instance> {
        let schema = self.inner.union_schema().map_err(err)?;
        parse_instance(&SourceText::inline(text), &schema)
            .map(|inner| Instance { inner })
            .map_err(err)
    }

    /// Parses a conjunctive query over the target relations.
    fn query(&self, text: &str) -> PyResult<Query> {
        parse_query(&SourceText::inline(text), &self.inner.target)
            .map(|inner| Query { inner })
            .map_err(err)
    }

    fn dummies(&self) -> Vec<Instance> {
        schemamap::dummy::dummy_instances(&self.inner)
            .dummies
            .into_iter()
            .map(|d| Instance { inner: d.instance })
            .collect()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!(
            "Mapping({} st, {} t)",
            self.inner.st_tgds.len(),
            self.inner.t_tgds.len()
        )
    }
}

#[pyclass(name = "Instance", frozen, module = "schemamap")]
pub struct Instance {
    inner: CoreInstance,
}

#[pymethods]
impl Instance {
    /// `(fact, level)` pairs in canonical order.
    fn facts(&self) -> Vec<(String, u32)> {
        self.inner.iter().map(|(f, l)| (render_fact(f), l)).collect()
    }

    fn nulls(&self) -> usize {
        self.inner.nulls().len()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __contains__(&self, fact: &str) -> bool {
        self.inner.facts().any(|f| render_fact(f) == fact)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Instance({} facts)", self.inner.len())
    }
}

#[pyclass(name = "Query", frozen, module = "schemamap")]
pub struct Query {
    inner: ConjunctiveQuery,
}

#[pymethods]
impl Query {
    fn __str__(&self) -> String {
        self.inner.to_string()
    }
}

#[pyclass(name = "ChaseResult", frozen, get_all, module = "schemamap")]
pub struct ChaseResult {
    instance: Py<Instance>,
    terminated: bool,
    steps: usize,
}

#[pyclass(name = "Verdict", frozen, get_all, module = "schemamap")]
pub struct Verdict {
    /// `"contained"`, `"not_contained"` or `"inconclusive"`.
    outcome: String,
    reason: Option<String>,
    bound_used: u64,
    failing_dummy: Option<String>,
    /// One dict per dummy examined.
    witnesses: Vec<Py<PyDict>>,
}

#[pymethods]
impl Verdict {
    fn __bool__(&self) -> bool {
        self.outcome == "contained"
    }

    fn __repr__(&self) -> String {
        format!("Verdict({})", self.outcome)
    }
}

fn verdict(py: Python<'_>, v: &CoreVerdict) -> PyResult<Verdict> {
    let witnesses = v
        .witnesses
        .iter()
        .map(|w| {
            let d = PyDict::new(py);
            d.set_item("dummy", render_fact(w.dummy.fact()))?;
            d.set_item(
                "outcome",
                match w.outcome {
                    DummyOutcome::Passed => "passed",
                    DummyOutcome::Failed => "failed",
                    DummyOutcome::Inconclusive(_) => "inconclusive",
                },
            )?;
            d.set_item("right_level", w.right_level)?;
            d.set_item("right_saturated", w.right_saturated)?;
            d.set_item("left_chase_size", w.left_chase_size())?;
            d.set_item("elapsed_ms", w.elapsed.as_secs_f64() * 1e3)?;
            Ok(d.unbind())
        })
        .collect::<PyResult<_>>()?;
    let (outcome, reason) = match &v.outcome {
        Outcome::Contained => ("contained", None),
        Outcome::NotContained => ("not_contained", None),
        Outcome::Inconclusive(why) => ("inconclusive", Some(why.clone())),
    };
    Ok(Verdict {
        outcome: outcome.into(),
        reason,
        bound_used: v.bound_used,
        failing_dummy: v.failing_dummy().map(|w| render_fact(w.dummy.fact())),
        witnesses,
    })
}

fn config(bound: Option<u64>, max_facts: usize, threads: usize) -> ContainmentConfig {
    ContainmentConfig {
        level_bound: bound.map_or(LevelBound::Auto, LevelBound::Fixed),
        chase_budget: ChaseConfig {
            max_facts: Some(max_facts),
            ..ChaseConfig::default()
        },
        threads: threads.max(1),
        ..ContainmentConfig::default()
    }
}

/// Chases a source instance with the mapping's dependencies.
#[pyfunction]
#[pyo3(signature = (mapping, instance, max_level=None, max_facts=ChaseConfig::DEFAULT_MAX_FACTS, mode="oblivious"))]
fn chase(
    py: Python<'_>,
    mapping: &Mapping,
    instance: &Instance,
    max_level: Option<u32>,
    max_facts: usize,
    mode: &str,
) -> PyResult<ChaseResult> {
    let mode = match mode {
        "oblivious" => ChaseMode::Oblivious,
        "restricted" => ChaseMode::Restricted,
        other => return Err(err(format!("unknown chase mode `{other}`"))),
    };
    let cfg = ChaseConfig {
        mode,
        max_facts: Some(max_facts),
        max_level,
    };
    let r = py
        .detach(|| chase_mapping(&instance.inner, &mapping.inner, &cfg))
        .map_err(err)?;
    Ok(ChaseResult {
        terminated: r.status == ChaseStatus::Terminated,
        steps: r.steps,
        instance: Py::new(py, Instance { inner: r.instance })?,
    })
}

/// Decides whether `left` is contained in `right`.
#[pyfunction]
#[pyo3(signature = (left, right, bound=None, max_facts=ChaseConfig::DEFAULT_MAX_FACTS, threads=1))]
fn contains(
    py: Python<'_>,
    left: &Mapping,
    right: &Mapping,
    bound: Option<u64>,
    max_facts: usize,
    threads: usize,
) -> PyResult<Verdict> {
    let cfg = config(bound, max_facts, threads);
    let v = py
        .detach(|| check_containment(&left.inner, &right.inner, &cfg))
        .map_err(err)?;
    verdict(py, &v)
}

/// Returns `(outcome, forward, backward)` where outcome is `"equivalent"`,
/// `"not_equivalent"` or `"inconclusive"`.
#[pyfunction]
#[pyo3(signature = (left, right, bound=None, max_facts=ChaseConfig::DEFAULT_MAX_FACTS, threads=1))]
fn equivalent(
    py: Python<'_>,
    left: &Mapping,
    right: &Mapping,
    bound: Option<u64>,
    max_facts: usize,
    threads: usize,
) -> PyResult<(String, Verdict, Verdict)> {
    let cfg = config(bound, max_facts, threads);
    let v = py
        .detach(|| check_equivalence(&left.inner, &right.inner, &cfg))
        .map_err(err)?;
    let outcome = match v.outcome {
        EquivalenceOutcome::Equivalent => "equivalent",
        EquivalenceOutcome::NotEquivalent { .. } => "not_equivalent",
        EquivalenceOutcome::Inconclusive(_) => "inconclusive",
    };
    Ok((outcome.into(), verdict(py, &v.forward)?, verdict(py, &v.backward)?))
}

/// Certain answers as tuples of value strings, in lexicographic order.
#[pyfunction]
fn certain_answers(query: &Query, instance: &Instance, mapping: &Mapping) -> PyResult<Vec<Vec<String>>> {
    let a = schemamap::oracle::certain_answers(&query.inner, &instance.inner, &mapping.inner, &ChaseConfig::default())
        .map_err(err)?;
    Ok(a.tuples
        .iter()
        .map(|t| t.iter().map(ToString::to_string).collect())
        .collect())
}

/// A homomorphism from `a` to `b` as a dict from nulls to values, or None.
#[pyfunction]
fn find_homomorphism(a: &Instance, b: &Instance) -> PyResult<Option<Vec<(String, String)>>> {
    let h = schemamap::hom::find_homomorphism(&a.inner, &b.inner).map_err(err)?;
    Ok(h.map(|h| h.null_part().map(|(k, v)| (k.to_string(), v.to_string())).collect()))
}

#[pyfunction]
fn is_isomorphic(a: &Instance, b: &Instance) -> PyResult<bool> {
    schemamap::hom::is_isomorphic(&a.inner, &b.inner).map_err(err)
}

/// Brute-force containment over all source instances of at most
/// `max_facts` facts over `domain`.
#[pyfunction]
#[pyo3(signature = (left, right, max_facts=2, domain=vec!["a".to_string(), "b".to_string()]))]
fn oracle(py: Python<'_>, left: &Mapping, right: &Mapping, max_facts: usize, domain: Vec<String>) -> PyResult<String> {
    let dom: Vec<Symbol> = domain.iter().map(Symbol::new).collect();
    let v = py
        .detach(|| {
            schemamap::oracle::oracle_containment(&left.inner, &right.inner, max_facts, &dom, &ChaseConfig::default())
        })
        .map_err(err)?;
    Ok(match v.outcome {
        Outcome::Contained => "contained",
        Outcome::NotContained => "not_contained",
        Outcome::Inconclusive(_) => "inconclusive",
    }
    .into())
}

#[pymodule(name = "schemamap")]
fn schemamap_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Mapping>()?;
    m.add_class::<Instance>()?;
    m.add_class::<Query>()?;
    m.add_class::<ChaseResult>()?;
    m.add_class::<Verdict>()?;
    m.add_function(wrap_pyfunction!(chase, m)?)?;
    m.add_function(wrap_pyfunction!(contains, m)?)?;
    m.add_function(wrap_pyfunction!(equivalent, m)?)?;
    m.add_function(wrap_pyfunction!(certain_answers, m)?)?;
    m.add_function(wrap_pyfunction!(find_homomorphism, m)?)?;
    m.add_function(wrap_pyfunction!(is_isomorphic, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    Ok(())
}
