//! JSON input and output. Groups are given by a Gram matrix and affine
//! generators; subspaces either by a rational basis or, for number field
//! coordinates, by a minimal polynomial with an isolating interval and
//! basis vectors whose entries list coefficients in powers of the root.
//! Rationals travel as "p/q" strings (bare integers allowed).

use crate::crysgroup::{CrystGroup, POINT_GROUP_BOUND};
use crate::latgeo::{AlgSubspace, GramForm, RatSubspace, Sublattice};
use crate::ratcore::matq::{MatQ, VecQ};
use crate::ratcore::matz::MatZ;
use crate::ratcore::numfield::{NFElem, NumberField};
use crate::ratcore::rat::{parse_rat, rat_to_string, Rat};
use crate::{Error, Result};
use num_bigint::BigInt;
use serde_json::{json, Map, Value};
use std::str::FromStr;

pub fn rat_from_json(v: &Value) -> Result<Rat> {
    match v {
        Value::String(s) => parse_rat(s),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Rat::from_integer(BigInt::from(i)))
            } else {
                Err(Error::Parse(format!("expected exact rational, got {n}")))
            }
        }
        other => Err(Error::Parse(format!("expected rational, got {other}"))),
    }
}

pub fn int_from_json(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| Error::Parse(format!("expected integer, got {n}"))),
        Value::String(s) => {
            BigInt::from_str(s.trim()).map_err(|e| Error::Parse(format!("bad integer {s:?}: {e}")))
        }
        other => Err(Error::Parse(format!("expected integer, got {other}"))),
    }
}

pub fn rat_to_json(r: &Rat) -> Value {
    Value::String(rat_to_string(r))
}

fn rat_vec_from_json(v: &Value, what: &str) -> Result<VecQ> {
    v.as_array()
        .ok_or_else(|| Error::Parse(format!("{what} must be an array")))?
        .iter()
        .map(rat_from_json)
        .collect()
}

fn rat_mat_from_json(v: &Value, what: &str) -> Result<Vec<VecQ>> {
    v.as_array()
        .ok_or_else(|| Error::Parse(format!("{what} must be an array of rows")))?
        .iter()
        .map(|row| rat_vec_from_json(row, what))
        .collect()
}

pub fn vec_to_json(v: &[Rat]) -> Value {
    Value::Array(v.iter().map(rat_to_json).collect())
}

pub fn mat_to_json(rows: &[VecQ]) -> Value {
    Value::Array(rows.iter().map(|r| vec_to_json(r)).collect())
}

fn obj_get<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| Error::Parse(format!("missing field {key:?}")))
}

pub fn parse_group(v: &Value) -> Result<(GramForm, Vec<(MatZ, VecQ)>)> {
    let dim = obj_get(v, "dim")?
        .as_u64()
        .ok_or_else(|| Error::Parse("dim must be a nonnegative integer".into()))? as usize;
    let gram_rows = rat_mat_from_json(obj_get(v, "gram")?, "gram")?;
    if gram_rows.len() != dim || gram_rows.iter().any(|r| r.len() != dim) {
        return Err(Error::Parse("gram must be dim x dim".into()));
    }
    let gram = GramForm::new(MatQ::from_rows(gram_rows))?;
    let mut gens = Vec::new();
    if let Some(gv) = v.get("generators") {
        for item in gv
            .as_array()
            .ok_or_else(|| Error::Parse("generators must be an array".into()))?
        {
            let mrows = obj_get(item, "matrix")?
                .as_array()
                .ok_or_else(|| Error::Parse("matrix must be an array of rows".into()))?
                .iter()
                .map(|row| {
                    row.as_array()
                        .ok_or_else(|| Error::Parse("matrix row must be an array".into()))?
                        .iter()
                        .map(int_from_json)
                        .collect::<Result<Vec<BigInt>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            if mrows.len() != dim || mrows.iter().any(|r| r.len() != dim) {
                return Err(Error::Parse("matrix must be dim x dim".into()));
            }
            let t = rat_vec_from_json(obj_get(item, "translation")?, "translation")?;
            if t.len() != dim {
                return Err(Error::Parse("translation must have dim entries".into()));
            }
            gens.push((MatZ::from_rows(mrows), t));
        }
    }
    Ok((gram, gens))
}

pub fn group_from_json(v: &Value) -> Result<CrystGroup> {
    let (gram, gens) = parse_group(v)?;
    CrystGroup::from_generators(gram, gens, POINT_GROUP_BOUND)
}

pub fn load_group(path: &str) -> Result<CrystGroup> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {path}: {e}")))?;
    let v: Value =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("bad JSON in {path}: {e}")))?;
    group_from_json(&v)
}

/// Serialize a full group; every element is listed as a generator so the
/// file reloads to the identical group.
pub fn group_to_json(g: &CrystGroup) -> Value {
    let gens: Vec<Value> = (0..g.order())
        .map(|i| {
            json!({
                "matrix": g.mat(i).rows_vec().iter().map(|row| {
                    Value::Array(row.iter().map(|e| {
                        serde_json::Number::from_str(&e.to_string())
                            .map(Value::Number)
                            .unwrap_or_else(|_| Value::String(e.to_string()))
                    }).collect())
                }).collect::<Vec<Value>>(),
                "translation": vec_to_json(g.tvec(i)),
            })
        })
        .collect();
    json!({
        "dim": g.dim(),
        "gram": mat_to_json(&g.gram().mat().rows_vec()),
        "generators": gens,
    })
}

pub enum SubspaceInput {
    Rational(RatSubspace),
    Algebraic(AlgSubspace),
}

impl SubspaceInput {
    pub fn dim(&self) -> usize {
        match self {
            SubspaceInput::Rational(w) => w.dim(),
            SubspaceInput::Algebraic(w) => w.dim(),
        }
    }

    pub fn to_algebraic(&self) -> AlgSubspace {
        match self {
            SubspaceInput::Rational(w) => AlgSubspace::from_rational(w),
            SubspaceInput::Algebraic(w) => w.clone(),
        }
    }

    /// The underlying rational subspace when one exists.
    pub fn as_rational(&self) -> Option<RatSubspace> {
        match self {
            SubspaceInput::Rational(w) => Some(w.clone()),
            SubspaceInput::Algebraic(w) => w.to_rational(),
        }
    }
}

pub fn subspace_from_json(v: &Value, ambient: usize) -> Result<SubspaceInput> {
    if let Some(basis) = v.get("basis") {
        let rows = rat_mat_from_json(basis, "basis")?;
        if rows.iter().any(|r| r.len() != ambient) {
            return Err(Error::Parse("basis vectors must have ambient length".into()));
        }
        if let Some(d) = v.get("dim") {
            let d = d
                .as_u64()
                .ok_or_else(|| Error::Parse("dim must be an integer".into()))?
                as usize;
            if d != ambient {
                return Err(Error::Parse(format!(
                    "subspace ambient dim {d} does not match group dim {ambient}"
                )));
            }
        }
        return Ok(SubspaceInput::Rational(RatSubspace::from_generators(
            ambient, rows,
        )));
    }
    let mp = obj_get(v, "minpoly")?
        .as_array()
        .ok_or_else(|| Error::Parse("minpoly must be an array".into()))?
        .iter()
        .map(int_from_json)
        .collect::<Result<Vec<BigInt>>>()?;
    let interval = obj_get(v, "root_interval")?
        .as_array()
        .ok_or_else(|| Error::Parse("root_interval must be [lo, hi]".into()))?;
    if interval.len() != 2 {
        return Err(Error::Parse("root_interval must be [lo, hi]".into()));
    }
    let lo = rat_from_json(&interval[0])?;
    let hi = rat_from_json(&interval[1])?;
    let field = NumberField::new(mp, lo, hi)?;
    let deg = field.degree();
    let mut vectors = Vec::new();
    for vec in obj_get(v, "basis_nf")?
        .as_array()
        .ok_or_else(|| Error::Parse("basis_nf must be an array of vectors".into()))?
    {
        let entries = vec
            .as_array()
            .ok_or_else(|| Error::Parse("basis_nf vector must be an array".into()))?;
        if entries.len() != ambient {
            return Err(Error::Parse("basis_nf vectors must have ambient length".into()));
        }
        let mut out = Vec::with_capacity(ambient);
        for entry in entries {
            let coeffs = rat_vec_from_json(entry, "basis_nf entry")?;
            if coeffs.len() > deg {
                return Err(Error::Parse(
                    "basis_nf entry has more coefficients than the field degree".into(),
                ));
            }
            out.push(NFElem::new(field.clone(), coeffs)?);
        }
        vectors.push(out);
    }
    Ok(SubspaceInput::Algebraic(AlgSubspace::from_generators(
        field, ambient, vectors,
    )?))
}

pub fn load_subspace(path: &str, ambient: usize) -> Result<SubspaceInput> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {path}: {e}")))?;
    let v: Value =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("bad JSON in {path}: {e}")))?;
    subspace_from_json(&v, ambient)
}

pub fn subspace_to_json(w: &RatSubspace) -> Value {
    json!({
        "dim": w.ambient,
        "basis": mat_to_json(w.basis()),
    })
}

pub fn sublattice_to_json(l: &Sublattice) -> Value {
    json!({
        "rank": l.rank(),
        "basis": mat_to_json(&l.basis_vectors()),
    })
}

/// Canonical rendering: keys sorted, two-space indent, trailing newline.
pub fn emit(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn obj(entries: Vec<(&str, Value)>) -> Value {
    let mut m = Map::new();
    for (k, v) in entries {
        m.insert(k.to_string(), v);
    }
    Value::Object(m)
}
