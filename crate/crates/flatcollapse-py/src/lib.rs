//! Python bindings. Thin wrappers over the core crate; payloads are the
//! same JSON shapes the command line tool prints, converted to dicts.

use flatcollapse::crysgroup::CrystGroup;
use flatcollapse::io::{
    emit, group_to_json, load_group, mat_to_json, obj, rat_to_json, sublattice_to_json,
    subspace_to_json, vec_to_json,
};
use flatcollapse::latgeo::{AlgSubspace, RatSubspace};
use flatcollapse::ratcore::numfield::{NFElem, NumberField};
use flatcollapse::ratcore::rat::{parse_rat, Rat};
use flatcollapse::{collapse, foliate, ghmetric, latgeo, repq, Error};
use num_bigint::BigInt;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use pyo3::IntoPyObjectExt;
use serde_json::Value;
use std::str::FromStr;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::BudgetLimited(_) | Error::RadiusTooSmall => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn int_json(v: impl ToString) -> Value {
    let s = v.to_string();
    match serde_json::Number::from_str(&s) {
        Ok(n) => Value::Number(n),
        Err(_) => Value::String(s),
    }
}

fn ints_json(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(int_json).collect())
}

fn f64_json(x: f64) -> Value {
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

fn value_to_py(py: Python<'_>, v: &Value) -> PyResult<Py<PyAny>> {
    match v {
        Value::Null => Ok(py.None()),
        Value::Bool(b) => b.into_py_any(py),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_py_any(py)
            } else if let Some(u) = n.as_u64() {
                u.into_py_any(py)
            } else {
                n.as_f64().unwrap_or(f64::NAN).into_py_any(py)
            }
        }
        Value::String(s) => s.as_str().into_py_any(py),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for it in items {
                list.append(value_to_py(py, it)?)?;
            }
            list.into_py_any(py)
        }
        Value::Object(map) => {
            let d = PyDict::new(py);
            for (k, val) in map {
                d.set_item(k, value_to_py(py, val)?)?;
            }
            d.into_py_any(py)
        }
    }
}

fn rat_from_py(v: &Bound<'_, PyAny>) -> PyResult<Rat> {
    if let Ok(i) = v.extract::<i64>() {
        return Ok(Rat::from_integer(BigInt::from(i)));
    }
    let s: String = v
        .extract()
        .map_err(|_| PyValueError::new_err("expected an int or a rational string like \"1/2\""))?;
    parse_rat(&s).map_err(py_err)
}

fn rows_from_py(obj: &Bound<'_, PyAny>) -> PyResult<Vec<Vec<Rat>>> {
    let mut rows = Vec::new();
    for row in obj.try_iter()? {
        let row = row?;
        let mut out = Vec::new();
        for x in row.try_iter()? {
            out.push(rat_from_py(&x?)?);
        }
        rows.push(out);
    }
    Ok(rows)
}

fn witness_json(g: &CrystGroup, index: usize, shift: &[BigInt]) -> Value {
    obj(vec![
        ("element_index", Value::from(index)),
        (
            "matrix",
            Value::Array(g.mat(index).rows_vec().iter().map(|r| ints_json(r)).collect()),
        ),
        ("translation", vec_to_json(g.tvec(index))),
        ("shift", ints_json(shift)),
    ])
}

/// A crystallographic group acting on its translation lattice coordinates.
#[pyclass]
struct Group {
    inner: CrystGroup,
}

impl Group {
    fn subspace(&self, rows: &Bound<'_, PyAny>) -> PyResult<RatSubspace> {
        let rows = rows_from_py(rows)?;
        let n = self.inner.dim();
        for r in &rows {
            if r.len() != n {
                return Err(PyValueError::new_err(format!(
                    "subspace generator has {} entries, ambient dimension is {n}",
                    r.len()
                )));
            }
        }
        Ok(RatSubspace::from_generators(n, rows))
    }
}

#[pymethods]
impl Group {
    /// Load a group file (same format as the CLI).
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(Group {
            inner: load_group(path).map_err(py_err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    fn validate(&self) -> PyResult<()> {
        self.inner.validate().map_err(py_err)
    }

    fn to_json(&self) -> String {
        emit(&group_to_json(&self.inner))
    }

    /// (torsion_free, witness dict or None).
    fn is_torsion_free(&self, py: Python<'_>) -> PyResult<(bool, Option<Py<PyAny>>)> {
        let (free, witness) = self.inner.is_torsion_free();
        let w = match witness {
            Some(w) => Some(value_to_py(py, &witness_json(&self.inner, w.index, &w.shift))?),
            None => None,
        };
        Ok((free, w))
    }

    /// Dimensions of the irreducible holonomy summands, with the summand
    /// bases and whether every summand was certified irreducible.
    #[pyo3(signature = (budget = repq::DEFAULT_SPLIT_BUDGET))]
    fn i_sequence(&self, py: Python<'_>, budget: usize) -> PyResult<Py<PyAny>> {
        let seq = repq::i_sequence(&self.inner, budget).map_err(py_err)?;
        let payload = obj(vec![
            (
                "entries",
                Value::Array(seq.entries.iter().map(|&e| Value::from(e)).collect()),
            ),
            ("certified", Value::Bool(seq.certified)),
            (
                "summands",
                Value::Array(seq.summands.iter().map(subspace_to_json).collect()),
            ),
        ]);
        value_to_py(py, &payload)
    }

    /// Nested invariant pair for a two step collapse, if the summand
    /// structure allows one.
    #[pyo3(signature = (budget = repq::DEFAULT_SPLIT_BUDGET))]
    fn theorem_c(&self, py: Python<'_>, budget: usize) -> PyResult<Py<PyAny>> {
        let payload = match repq::theorem_c_witnesses(&self.inner, budget).map_err(py_err)? {
            repq::TheoremC::NotApplicable => obj(vec![("applicable", Value::Bool(false))]),
            repq::TheoremC::Applicable { w1, w2 } => obj(vec![
                ("applicable", Value::Bool(true)),
                ("w1", subspace_to_json(&w1)),
                ("w2", subspace_to_json(&w2)),
            ]),
        };
        value_to_py(py, &payload)
    }

    /// Collapse along an invariant rational subspace; returns the quotient
    /// group and a dict with chart, lattice and invariants.
    fn collapse(&self, py: Python<'_>, basis: &Bound<'_, PyAny>) -> PyResult<(Group, Py<PyAny>)> {
        let w = self.subspace(basis)?;
        let res = collapse::collapse(&self.inner, &w).map_err(py_err)?;
        let inv = collapse::collapsed_invariants(&self.inner, &w).map_err(py_err)?;
        let info = obj(vec![
            ("chart", mat_to_json(&res.chart)),
            ("perp", subspace_to_json(&res.perp)),
            ("lattice", sublattice_to_json(&res.lattice)),
            ("holonomy_order", Value::from(inv.holonomy_order)),
            ("lattice_index", int_json(&inv.lattice_index)),
        ]);
        Ok((Group { inner: res.group }, value_to_py(py, &info)?))
    }

    /// (smooth, torsion witness of the collapsed group or None).
    fn is_smooth(
        &self,
        py: Python<'_>,
        basis: &Bound<'_, PyAny>,
    ) -> PyResult<(bool, Option<Py<PyAny>>)> {
        let w = self.subspace(basis)?;
        let (smooth, witness) = collapse::is_smooth(&self.inner, &w).map_err(py_err)?;
        let wit = match witness {
            Some(wit) => {
                let payload = obj(vec![
                    ("element_index", Value::from(wit.index)),
                    ("shift", ints_json(&wit.shift)),
                ]);
                Some(value_to_py(py, &payload)?)
            }
            None => None,
        };
        Ok((smooth, wit))
    }

    /// Classify the leaf through a rational point of the torus.
    fn classify_leaf(
        &self,
        py: Python<'_>,
        basis: &Bound<'_, PyAny>,
        point: &Bound<'_, PyAny>,
    ) -> PyResult<Py<PyAny>> {
        let w = self.subspace(basis)?;
        let mut u = Vec::new();
        for x in point.try_iter()? {
            u.push(rat_from_py(&x?)?);
        }
        if u.len() != self.inner.dim() {
            return Err(PyValueError::new_err(format!(
                "point has {} coordinates, group dimension is {}",
                u.len(),
                self.inner.dim()
            )));
        }
        let (class, data) = foliate::classify_leaf(&self.inner, &w, &u).map_err(py_err)?;
        let class_json = match &class {
            foliate::LeafClass::Principal => obj(vec![("principal", Value::Bool(true))]),
            foliate::LeafClass::Exceptional { index } => obj(vec![
                ("principal", Value::Bool(false)),
                ("index", int_json(index)),
            ]),
        };
        let payload = obj(vec![
            ("point", vec_to_json(&u)),
            ("class", class_json),
            ("holonomy_order", Value::from(data.holonomy_order)),
            ("volume_sq", rat_to_json(&data.volume_sq)),
            ("lattice", sublattice_to_json(&data.lattice)),
            ("member_count", Value::from(data.members.len())),
        ]);
        value_to_py(py, &payload)
    }

    /// Exceptional strata of the leaf foliation along W.
    fn singular_locus(&self, py: Python<'_>, basis: &Bound<'_, PyAny>) -> PyResult<Py<PyAny>> {
        let w = self.subspace(basis)?;
        let locus = foliate::singular_leaf_locus(&self.inner, &w).map_err(py_err)?;
        let strata: Vec<Value> = locus
            .strata
            .iter()
            .map(|s| {
                obj(vec![
                    ("element_index", Value::from(s.element)),
                    ("direction", subspace_to_json(&s.direction)),
                    ("offset", vec_to_json(&s.offset)),
                    ("offset_lattice", sublattice_to_json(&s.offset_lattice)),
                ])
            })
            .collect();
        let payload = obj(vec![
            ("complete", Value::Bool(locus.complete)),
            ("strata", Value::Array(strata)),
        ]);
        value_to_py(py, &payload)
    }

    /// Smallest rational subspace whose real span contains the given
    /// algebraic generators. Entries are power basis coordinate lists over
    /// the field Q[x]/(minpoly), or plain rationals.
    fn closure(
        &self,
        py: Python<'_>,
        minpoly: Vec<i64>,
        lo: &str,
        hi: &str,
        generators: &Bound<'_, PyAny>,
    ) -> PyResult<Py<PyAny>> {
        let field = NumberField::new(
            minpoly.into_iter().map(BigInt::from).collect(),
            parse_rat(lo).map_err(py_err)?,
            parse_rat(hi).map_err(py_err)?,
        )
        .map_err(py_err)?;
        let n = self.inner.dim();
        let mut gens: Vec<Vec<NFElem>> = Vec::new();
        for v in generators.try_iter()? {
            let v = v?;
            let mut entries = Vec::new();
            for entry in v.try_iter()? {
                let entry = entry?;
                let coeffs = if let Ok(r) = rat_from_py(&entry) {
                    vec![r]
                } else {
                    let mut cs = Vec::new();
                    for c in entry.try_iter()? {
                        cs.push(rat_from_py(&c?)?);
                    }
                    cs
                };
                entries.push(NFElem::new(field.clone(), coeffs).map_err(py_err)?);
            }
            if entries.len() != n {
                return Err(PyValueError::new_err(format!(
                    "generator has {} entries, ambient dimension is {n}",
                    entries.len()
                )));
            }
            gens.push(entries);
        }
        let w = AlgSubspace::from_generators(field, n, gens).map_err(py_err)?;
        let res = latgeo::l_closure(&w, self.inner.gram()).map_err(py_err)?;
        let payload = obj(vec![
            ("dim", Value::from(res.what.ambient)),
            ("basis", mat_to_json(res.what.basis())),
            ("k_dim", Value::from(res.k_part.dim())),
            ("lattice", sublattice_to_json(&res.w_lattice)),
        ]);
        value_to_py(py, &payload)
    }

    /// Numeric check of the metric collapse chain along W.
    #[pyo3(signature = (basis, s_values=None, pair_count=64, enum_radius=4.0, tol=1e-6, seed=7))]
    fn gh_verify(
        &self,
        py: Python<'_>,
        basis: &Bound<'_, PyAny>,
        s_values: Option<Vec<f64>>,
        pair_count: usize,
        enum_radius: f64,
        tol: f64,
        seed: u64,
    ) -> PyResult<Py<PyAny>> {
        let w = self.subspace(basis)?;
        let mut cfg = ghmetric::MetricConfig::default();
        if let Some(s) = s_values {
            if s.iter().any(|&v| v <= 0.0) {
                return Err(PyValueError::new_err("scale values must be positive"));
            }
            cfg.s_values = s;
        }
        cfg.pair_count = pair_count;
        cfg.enum_radius = enum_radius;
        cfg.tol = tol;
        cfg.seed = seed;
        let report = ghmetric::verify_collapse_metric(&self.inner, &w, &cfg).map_err(py_err)?;
        let records: Vec<Value> = report
            .records
            .iter()
            .map(|r| {
                obj(vec![
                    ("s", f64_json(r.s)),
                    ("d_s", f64_json(r.d_s)),
                    ("max_chain_violation", f64_json(r.max_chain_violation)),
                    ("max_approx_defect", f64_json(r.max_approx_defect)),
                ])
            })
            .collect();
        let payload = obj(vec![
            ("pass", Value::Bool(report.pass)),
            ("tol", f64_json(report.tol)),
            ("records", Value::Array(records)),
        ]);
        value_to_py(py, &payload)
    }
}

#[pymodule]
fn _flatcollapse(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Group>()?;
    m.add("DEFAULT_SPLIT_BUDGET", repq::DEFAULT_SPLIT_BUDGET)?;
    Ok(())
}
