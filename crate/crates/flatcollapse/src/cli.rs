//! Command line surface: every exact and numeric operation behind one
//! binary, JSON on stdout, deterministic for a fixed seed.
//!
//! Exit codes: 0 success, 1 validation or input error, 2 inconclusive
//! (search budget exhausted or enumeration radius too small).

use crate::collapse::{collapse, collapsed_invariants, is_smooth};
use crate::crysgroup::CrystGroup;
use crate::foliate::{classify_leaf, singular_leaf_locus, LeafClass};
use crate::ghmetric::{
    report_csv, verify_collapse_metric, verify_collapse_metric_closed, MetricConfig,
};
use crate::io::{
    emit, group_to_json, load_group, load_subspace, mat_to_json, obj, rat_to_json,
    sublattice_to_json, subspace_to_json, vec_to_json, SubspaceInput,
};
use crate::latgeo::{l_closure, ClosureResult, RatSubspace};
use crate::ratcore::rat::Rat;
use crate::repq::{i_sequence, theorem_c_witnesses, TheoremC, DEFAULT_SPLIT_BUDGET};
use crate::{Error, Result};
use clap::{Parser, Subcommand};
use serde_json::{Number, Value};
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Parser)]
#[command(name = "flatcollapse", version, about = "Exact toolkit for crystallographic groups: torsion, foliation leaves, collapsed quotients, and metric collapse checks")]
pub struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check group data: cocycle, Gram orthogonality, closure, reduced representatives
    Validate { group: PathBuf },
    /// Decide torsion-freeness; print a fixed-point witness if torsion exists
    Torsion { group: PathBuf },
    /// Smallest lattice-generated subspace containing W, with adapted basis
    Closure {
        group: PathBuf,
        #[arg(long)]
        subspace: PathBuf,
    },
    /// Collapsed quotient group along an invariant subspace
    Collapse {
        group: PathBuf,
        #[arg(long)]
        subspace: PathBuf,
        /// Write the collapsed group as a loadable group file
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Is the collapsed quotient a manifold point (torsion-free collapse)?
    Smoothness {
        group: PathBuf,
        #[arg(long)]
        subspace: PathBuf,
    },
    /// Classify the foliation leaf through a rational point
    Leaf {
        group: PathBuf,
        #[arg(long)]
        subspace: PathBuf,
        /// Rational coordinates, comma separated, e.g. "1/2,0,3/4"
        #[arg(long)]
        point: String,
    },
    /// Exceptional strata of the leaf foliation
    SingularLocus {
        group: PathBuf,
        #[arg(long)]
        subspace: PathBuf,
    },
    /// Dimension sequence of the rational holonomy decomposition
    Isequence {
        group: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SPLIT_BUDGET)]
        budget: usize,
    },
    /// Nested invariant pair realizing a two step collapse, if any
    TheoremC { group: PathBuf },
    /// Numeric verification of the metric collapse chain
    GhVerify {
        group: PathBuf,
        #[arg(long)]
        subspace: PathBuf,
        /// Comma separated scale values, e.g. "1,0.5,0.25"
        #[arg(long, default_value = "1,0.5,0.25,0.125,0.0625")]
        s: String,
        #[arg(long, default_value_t = 64)]
        pairs: usize,
        #[arg(long, default_value_t = 4.0)]
        radius: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Also write per-scale records as CSV
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn int_json(v: impl ToString) -> Value {
    let s = v.to_string();
    match serde_json::Number::from_str(&s) {
        Ok(n) => Value::Number(n),
        Err(_) => Value::String(s),
    }
}

fn ints_json(v: &[num_bigint::BigInt]) -> Value {
    Value::Array(v.iter().map(int_json).collect())
}

fn f64_json(x: f64) -> Value {
    Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

fn parse_point(s: &str, dim: usize) -> Result<Vec<Rat>> {
    let coords: Vec<Rat> = s
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<Rat>()
                .map_err(|e| Error::Parse(format!("bad coordinate {p:?}: {e}")))
        })
        .collect::<Result<_>>()?;
    if coords.len() != dim {
        return Err(Error::Parse(format!(
            "point has {} coordinates, group dimension is {dim}",
            coords.len()
        )));
    }
    Ok(coords)
}

fn closure_json(res: &ClosureResult) -> Value {
    obj(vec![
        ("dim", Value::from(res.what.ambient)),
        ("basis", mat_to_json(res.what.basis())),
        ("k_dim", Value::from(res.k_part.dim())),
        (
            "adapted",
            obj(vec![
                (
                    "w_rows",
                    Value::Array(res.adapted.w_rows.iter().map(|r| ints_json(r)).collect()),
                ),
                (
                    "v_rows",
                    Value::Array(res.adapted.v_rows.iter().map(|r| ints_json(r)).collect()),
                ),
                (
                    "u_rows",
                    Value::Array(res.adapted.u_rows.iter().map(|r| ints_json(r)).collect()),
                ),
            ]),
        ),
    ])
}

fn rational_subspace(input: &SubspaceInput) -> Result<RatSubspace> {
    input.as_rational().ok_or(Error::IrrationalInput)
}

fn group_and_subspace(group: &PathBuf, subspace: &PathBuf) -> Result<(CrystGroup, SubspaceInput)> {
    let g = load_group(&group.display().to_string())?;
    let w = load_subspace(&subspace.display().to_string(), g.dim())?;
    Ok((g, w))
}

fn run_cmd(cmd: &Cmd) -> Result<(Value, i32)> {
    match cmd {
        Cmd::Validate { group } => {
            let g = load_group(&group.display().to_string());
            match g {
                Ok(g) => {
                    g.validate()?;
                    Ok((
                        obj(vec![
                            ("valid", Value::Bool(true)),
                            ("dim", Value::from(g.dim())),
                            ("order", Value::from(g.order())),
                        ]),
                        0,
                    ))
                }
                Err(e) => Ok((
                    obj(vec![
                        ("valid", Value::Bool(false)),
                        ("reason", Value::String(e.to_string())),
                    ]),
                    1,
                )),
            }
        }
        Cmd::Torsion { group } => {
            let g = load_group(&group.display().to_string())?;
            let (free, witness) = g.is_torsion_free();
            let mut fields = vec![("torsion_free", Value::Bool(free))];
            let w_json;
            if let Some(w) = witness {
                w_json = obj(vec![
                    ("element_index", Value::from(w.index)),
                    (
                        "matrix",
                        Value::Array(g.mat(w.index).rows_vec().iter().map(|r| ints_json(r)).collect()),
                    ),
                    ("translation", vec_to_json(g.tvec(w.index))),
                    ("shift", ints_json(&w.shift)),
                ]);
                fields.push(("witness", w_json));
            }
            Ok((obj(fields), 0))
        }
        Cmd::Closure { group, subspace } => {
            let (g, w) = group_and_subspace(group, subspace)?;
            let res = l_closure(&w.to_algebraic(), g.gram())?;
            Ok((closure_json(&res), 0))
        }
        Cmd::Collapse {
            group,
            subspace,
            out,
        } => {
            let (g, w) = group_and_subspace(group, subspace)?;
            let rw = match w.as_rational() {
                Some(rw) => rw,
                None => l_closure(&w.to_algebraic(), g.gram())?.what,
            };
            let res = collapse(&g, &rw)?;
            let inv = collapsed_invariants(&g, &rw)?;
            let payload = obj(vec![
                ("group", group_to_json(&res.group)),
                ("chart", mat_to_json(&res.chart)),
                ("perp", subspace_to_json(&res.perp)),
                ("lattice", sublattice_to_json(&res.lattice)),
                ("holonomy_order", Value::from(inv.holonomy_order)),
                ("lattice_index", int_json(&inv.lattice_index)),
            ]);
            if let Some(path) = out {
                std::fs::write(path, emit(&group_to_json(&res.group)))
                    .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))?;
            }
            Ok((payload, 0))
        }
        Cmd::Smoothness { group, subspace } => {
            let (g, w) = group_and_subspace(group, subspace)?;
            let rw = rational_subspace(&w)?;
            let (smooth, witness) = is_smooth(&g, &rw)?;
            let mut fields = vec![("smooth", Value::Bool(smooth))];
            if let Some(wit) = witness {
                fields.push((
                    "witness",
                    obj(vec![
                        ("element_index", Value::from(wit.index)),
                        ("shift", ints_json(&wit.shift)),
                    ]),
                ));
            }
            Ok((obj(fields), 0))
        }
        Cmd::Leaf {
            group,
            subspace,
            point,
        } => {
            let (g, w) = group_and_subspace(group, subspace)?;
            let rw = rational_subspace(&w)?;
            let u = parse_point(point, g.dim())?;
            let (class, data) = classify_leaf(&g, &rw, &u)?;
            let class_json = match &class {
                LeafClass::Principal => obj(vec![("principal", Value::Bool(true))]),
                LeafClass::Exceptional { index } => obj(vec![
                    ("principal", Value::Bool(false)),
                    ("index", int_json(index)),
                ]),
            };
            Ok((
                obj(vec![
                    ("point", vec_to_json(&u)),
                    ("class", class_json),
                    ("holonomy_order", Value::from(data.holonomy_order)),
                    ("volume_sq", rat_to_json(&data.volume_sq)),
                    ("lattice", sublattice_to_json(&data.lattice)),
                    ("member_count", Value::from(data.members.len())),
                ]),
                0,
            ))
        }
        Cmd::SingularLocus { group, subspace } => {
            let (g, w) = group_and_subspace(group, subspace)?;
            let rw = rational_subspace(&w)?;
            let locus = singular_leaf_locus(&g, &rw)?;
            let strata: Vec<Value> = locus
                .strata
                .iter()
                .map(|s| {
                    obj(vec![
                        ("element_index", Value::from(s.element)),
                        (
                            "matrix",
                            Value::Array(
                                g.mat(s.element).rows_vec().iter().map(|r| ints_json(r)).collect(),
                            ),
                        ),
                        ("direction", subspace_to_json(&s.direction)),
                        ("offset", vec_to_json(&s.offset)),
                        ("offset_lattice", sublattice_to_json(&s.offset_lattice)),
                    ])
                })
                .collect();
            Ok((
                obj(vec![
                    ("complete", Value::Bool(locus.complete)),
                    ("strata", Value::Array(strata)),
                ]),
                0,
            ))
        }
        Cmd::Isequence { group, budget } => {
            let g = load_group(&group.display().to_string())?;
            let seq = i_sequence(&g, *budget)?;
            let status = if seq.certified {
                "certified"
            } else {
                "budget_limited"
            };
            let code = if seq.certified { 0 } else { 2 };
            Ok((
                obj(vec![
                    (
                        "entries",
                        Value::Array(seq.entries.iter().map(|&e| Value::from(e)).collect()),
                    ),
                    ("status", Value::String(status.into())),
                    (
                        "summands",
                        Value::Array(seq.summands.iter().map(subspace_to_json).collect()),
                    ),
                ]),
                code,
            ))
        }
        Cmd::TheoremC { group } => {
            let g = load_group(&group.display().to_string())?;
            match theorem_c_witnesses(&g, DEFAULT_SPLIT_BUDGET)? {
                TheoremC::NotApplicable => {
                    Ok((obj(vec![("applicable", Value::Bool(false))]), 0))
                }
                TheoremC::Applicable { w1, w2 } => Ok((
                    obj(vec![
                        ("applicable", Value::Bool(true)),
                        ("w1", subspace_to_json(&w1)),
                        ("w2", subspace_to_json(&w2)),
                    ]),
                    0,
                )),
            }
        }
        Cmd::GhVerify {
            group,
            subspace,
            s,
            pairs,
            radius,
            tol,
            seed,
            csv,
        } => {
            let (g, w) = group_and_subspace(group, subspace)?;
            let s_values: Vec<f64> = s
                .split(',')
                .map(|p| {
                    p.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Parse(format!("bad scale {p:?}: {e}")))
                })
                .collect::<Result<_>>()?;
            if s_values.iter().any(|&v| v <= 0.0) {
                return Err(Error::Parse("scale values must be positive".into()));
            }
            let cfg = MetricConfig {
                s_values,
                pair_count: *pairs,
                enum_radius: *radius,
                tol: *tol,
                seed: *seed,
            };
            let report = match w.as_rational() {
                Some(rw) => verify_collapse_metric(&g, &rw, &cfg)?,
                None => {
                    let alg = w.to_algebraic();
                    let closure = l_closure(&alg, g.gram())?;
                    verify_collapse_metric_closed(&g, &alg.embed_basis(), &closure.what, &cfg)?
                }
            };
            if let Some(path) = csv {
                std::fs::write(path, report_csv(&report))
                    .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))?;
            }
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
            Ok((
                obj(vec![
                    ("pass", Value::Bool(report.pass)),
                    ("tol", f64_json(report.tol)),
                    ("records", Value::Array(records)),
                ]),
                0,
            ))
        }
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::BudgetLimited(_) | Error::RadiusTooSmall => 2,
        _ => 1,
    }
}

pub fn run() -> i32 {
    let cli = Cli::parse();
    match run_cmd(&cli.cmd) {
        Ok((payload, code)) => {
            print!("{}", emit(&payload));
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}
