//! JSON persistence of figures and embedded assertions.

use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use serde_json::Value as Json;

use super::{
    midpoint_constructor, Figure, NodeStatus, RelationDecl, Source, Subfigure, Value,
};
use crate::algebra::{real, Metric, Scalar};
use crate::cycle::Cycle;
use crate::error::{Error, Result};
use crate::relations::{CheckKind, MeasureKind, Parameter, ParameterShape, RelationKind, RelationSpec};

/// Expected value(s) of a measurement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Expectation {
    /// Some measured value must match.
    One(f64),
    /// Every listed value must be matched by some measured value.
    All(Vec<f64>),
}

/// A claim about a figure, checked by [`Figure::run_assertions`].
#[derive(Clone, Debug, PartialEq)]
pub enum Assertion {
    Check {
        kind: CheckKind,
        a: String,
        b: String,
        cycle_metric: bool,
        tol: Option<f64>,
    },
    Measure {
        kind: MeasureKind,
        a: String,
        b: String,
        cycle_metric: bool,
        expect: Expectation,
        tol: Option<f64>,
    },
}

impl Assertion {
    pub fn check(kind: CheckKind, a: &str, b: &str) -> Self {
        Assertion::Check {
            kind,
            a: a.into(),
            b: b.into(),
            cycle_metric: true,
            tol: None,
        }
    }

    pub fn measure(kind: MeasureKind, a: &str, b: &str, expect: Expectation) -> Self {
        Assertion::Measure {
            kind,
            a: a.into(),
            b: b.into(),
            cycle_metric: true,
            expect,
            tol: None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Assertion::Check { kind, a, b, .. } => format!("{} {a} {b}", kind.name()),
            Assertion::Measure { kind, a, b, .. } => format!("{} {a} {b}", kind.name()),
        }
    }
}

/// Result of one assertion.
#[derive(Clone, Debug, PartialEq)]
pub struct AssertionOutcome {
    pub label: String,
    pub residual: f64,
    pub tol: f64,
    pub passed: bool,
    /// Residuals or measured values over all pairs.
    pub values: Vec<Scalar>,
}

impl Figure {
    /// Default assertion tolerance.
    pub fn default_tolerance(&self) -> f64 {
        self.epsilon * 1e3
    }

    pub fn run_assertions(&self) -> Vec<AssertionOutcome> {
        self.assertions.iter().map(|a| self.run_assertion(a)).collect()
    }

    pub fn run_assertion(&self, assertion: &Assertion) -> AssertionOutcome {
        let (values, residual, tol) = match assertion {
            Assertion::Check {
                kind,
                a,
                b,
                cycle_metric,
                tol,
            } => {
                let values = self.check_rel(a, b, *kind, *cycle_metric);
                let residual = values.as_ref().ok().and_then(|v| {
                    v.iter().map(|r| r.norm()).fold(None, |m: Option<f64>, r| Some(m.map_or(r, |m| m.max(r))))
                });
                (values, residual, *tol)
            }
            Assertion::Measure {
                kind,
                a,
                b,
                cycle_metric,
                expect,
                tol,
            } => {
                let values = self.measure(a, b, *kind, *cycle_metric);
                let residual = values.as_ref().ok().and_then(|v| {
                    let nearest = |e: f64| v.iter().map(|x| (x - e).norm()).reduce(f64::min);
                    match expect {
                        Expectation::One(e) => nearest(*e),
                        Expectation::All(es) => es
                            .iter()
                            .map(|&e| nearest(e))
                            .try_fold(0.0, |m: f64, r| r.map(|r| m.max(r))),
                    }
                });
                (values, residual, *tol)
            }
        };
        let tol = tol.unwrap_or(self.default_tolerance());
        let residual = residual.unwrap_or(f64::INFINITY);
        AssertionOutcome {
            label: assertion.label(),
            residual,
            tol,
            passed: residual < tol,
            values: values.unwrap_or_default(),
        }
    }

    /// Parses a figure document and evaluates it.
    pub fn from_json(text: &str) -> Result<Figure> {
        let doc: Document = serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
        doc.into_figure()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&Document::from_figure(self)).expect("documents serialise");
        s.push('\n');
        s
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Figure> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Figure::from_json(&text).map_err(|e| match e {
            Error::Document(msg) => Error::Document(format!("{}: {msg}", path.display())),
            e => e,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    dim: usize,
    point_metric: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cycle_metric: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    parameters: IndexMap<String, f64>,
    #[serde(default)]
    nodes: Vec<NodeDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    assertions: Vec<AssertionDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeDoc {
    key: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    point: Option<Vec<ValueDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cycle: Option<CycleDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    relations: Option<Vec<RelationDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    subfigure: Option<SubfigureDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    inputs: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    style: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generation: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    solved: Option<Vec<CycleDoc>>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SubfigureDoc {
    Named(String),
    Inline(Box<Document>),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RelationDoc {
    kind: String,
    to: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cycle_metric: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    parameter: Option<Json>,
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum ScalarDoc {
    Real(f64),
    Complex([f64; 2]),
}

impl From<ScalarDoc> for Scalar {
    fn from(s: ScalarDoc) -> Scalar {
        match s {
            ScalarDoc::Real(x) => real(x),
            ScalarDoc::Complex([re, im]) => Scalar::new(re, im),
        }
    }
}

impl From<Scalar> for ScalarDoc {
    fn from(s: Scalar) -> ScalarDoc {
        if s.im == 0.0 {
            ScalarDoc::Real(s.re)
        } else {
            ScalarDoc::Complex([s.re, s.im])
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ValueDoc {
    Const(f64),
    Affine {
        param: String,
        #[serde(default = "one")]
        scale: f64,
        #[serde(default)]
        offset: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl From<ValueDoc> for Value {
    fn from(v: ValueDoc) -> Value {
        match v {
            ValueDoc::Const(x) => Value::Const(x),
            ValueDoc::Affine { param, scale, offset } => Value::Affine { param, scale, offset },
        }
    }
}

impl From<&Value> for ValueDoc {
    fn from(v: &Value) -> ValueDoc {
        match v {
            Value::Const(x) => ValueDoc::Const(*x),
            Value::Affine { param, scale, offset } => ValueDoc::Affine {
                param: param.clone(),
                scale: *scale,
                offset: *offset,
            },
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CycleDoc {
    k: ScalarDoc,
    l: Vec<ScalarDoc>,
    m: ScalarDoc,
}

impl From<CycleDoc> for Cycle {
    fn from(c: CycleDoc) -> Cycle {
        Cycle::new(c.k.into(), c.l.into_iter().map(Into::into).collect(), c.m.into())
    }
}

impl From<&Cycle> for CycleDoc {
    fn from(c: &Cycle) -> CycleDoc {
        CycleDoc {
            k: c.k().into(),
            l: c.l().iter().map(|&x| x.into()).collect(),
            m: c.m().into(),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AssertionDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    check: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    measure: Option<String>,
    a: String,
    b: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cycle_metric: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    expect: Option<Expectation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tol: Option<f64>,
}

fn node_err(key: &str, msg: impl std::fmt::Display) -> Error {
    Error::Document(format!("node `{key}`: {msg}"))
}

fn scalar_from_json(v: &Json) -> std::result::Result<ScalarDoc, serde_json::Error> {
    serde_json::from_value(v.clone())
}

/// Interprets a relation parameter according to the shape its kind expects.
fn parameter_from_json(kind: RelationKind, v: Option<&Json>) -> std::result::Result<(Parameter, Option<Value>), String> {
    let shape = kind.parameter_shape();
    if shape == ParameterShape::None {
        return Ok((Parameter::None, None));
    }
    let v = v.ok_or_else(|| format!("relation {kind} needs a parameter"))?;
    let bad = |e: serde_json::Error| format!("bad parameter for {kind}: {e}");
    match shape {
        ParameterShape::Scalar => {
            if let Ok(ValueDoc::Affine { param, scale, offset }) = serde_json::from_value::<ValueDoc>(v.clone()) {
                return Ok((Parameter::Scalar(real(0.0)), Some(Value::Affine { param, scale, offset })));
            }
            Ok((Parameter::Scalar(scalar_from_json(v).map_err(bad)?.into()), None))
        }
        ParameterShape::Sl2 => {
            let e: [ScalarDoc; 4] = serde_json::from_value(v.clone()).map_err(bad)?;
            Ok((Parameter::Sl2(e.map(Into::into)), None))
        }
        ParameterShape::Moebius => {
            let e: [Vec<ScalarDoc>; 4] = serde_json::from_value(v.clone()).map_err(bad)?;
            let e = e.map(|b| b.into_iter().map(Into::into).collect());
            Ok((Parameter::Moebius(Box::new(e)), None))
        }
        ParameterShape::None => Ok((Parameter::None, None)),
    }
}

fn parameter_to_json(decl: &RelationDecl) -> Option<Json> {
    if let Some(v) = &decl.bound {
        return serde_json::to_value(ValueDoc::from(v)).ok();
    }
    let list = |v: &[Scalar]| Json::Array(v.iter().map(|&x| serde_json::to_value(ScalarDoc::from(x)).unwrap()).collect());
    match &decl.spec.parameter {
        Parameter::None => None,
        Parameter::Scalar(s) => serde_json::to_value(ScalarDoc::from(*s)).ok(),
        Parameter::Sl2(e) => Some(list(e)),
        Parameter::Moebius(e) => Some(Json::Array(e.iter().map(|b| list(b)).collect())),
    }
}

impl Document {
    fn into_figure(self) -> Result<Figure> {
        if self.point_metric.len() != self.dim {
            return Err(Error::Document(format!(
                "point_metric has {} entries, dim is {}",
                self.point_metric.len(),
                self.dim
            )));
        }
        let pm = Metric::new(self.point_metric)?;
        let cm = self.cycle_metric.map(Metric::new).transpose()?;
        let mut f = Figure::new(pm, cm)?;
        if let Some(eps) = self.epsilon {
            f.epsilon = eps;
        }
        f.parameters = self.parameters;
        f.freeze();
        let mut stored = Vec::new();
        for node in self.nodes {
            let key = node.key.clone();
            let forms = [
                node.point.is_some(),
                node.cycle.is_some(),
                node.relations.is_some(),
                node.subfigure.is_some(),
            ];
            if forms.iter().filter(|&&b| b).count() != 1 {
                return Err(node_err(&key, "needs exactly one of point, cycle, relations, subfigure"));
            }
            if let Some(p) = node.point {
                f.add_point_expr(p.into_iter().map(Into::into).collect(), &key)
                    .map_err(|e| node_err(&key, e))?;
            } else if let Some(c) = node.cycle {
                f.add_cycle(c.into(), &key).map_err(|e| node_err(&key, e))?;
            } else if let Some(rels) = node.relations {
                let decls = rels
                    .into_iter()
                    .map(|r| {
                        let kind: RelationKind = r.kind.parse().map_err(|e| node_err(&key, e))?;
                        let (parameter, bound) =
                            parameter_from_json(kind, r.parameter.as_ref()).map_err(|e| node_err(&key, e))?;
                        Ok(RelationDecl {
                            spec: RelationSpec {
                                kind,
                                parent: r.to,
                                use_cycle_metric: r.cycle_metric.unwrap_or(true),
                                parameter,
                            },
                            bound,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                f.add_cycle_rel(decls, &key).map_err(|e| node_err(&key, e))?;
            } else if let Some(sub) = node.subfigure {
                let sub = match sub {
                    SubfigureDoc::Named(name) if name == "midpoint" => midpoint_constructor(),
                    SubfigureDoc::Named(name) => return Err(node_err(&key, format!("unknown subfigure `{name}`"))),
                    SubfigureDoc::Inline(doc) => Subfigure {
                        template: Box::new(doc.into_figure().map_err(|e| node_err(&key, e))?),
                        name: None,
                    },
                };
                let inputs = node.inputs.unwrap_or_default();
                let inputs: Vec<&str> = inputs.iter().map(String::as_str).collect();
                f.add_subfigure(sub, &inputs, &key).map_err(|e| node_err(&key, e))?;
            }
            if let Some(style) = node.style {
                f.set_style(&key, style)?;
            }
            if let Some(solved) = node.solved {
                stored.push((key, solved));
            }
        }
        for a in self.assertions {
            for key in [&a.a, &a.b] {
                f.node(key).map_err(|e| Error::Document(format!("assertion: {e}")))?;
            }
            f.assertions.push(assertion_from_doc(a)?);
        }
        f.unfreeze();
        for (key, solved) in stored {
            let node = f.node_mut(&key)?;
            node.cycles = solved.into_iter().map(Into::into).collect();
            node.status = NodeStatus::Solved;
        }
        Ok(f)
    }

    fn from_figure(f: &Figure) -> Document {
        let default_cm = f.point_metric.default_cycle_metric();
        let nodes = f
            .nodes
            .values()
            .filter(|n| n.generation >= 0)
            .map(|n| {
                let mut doc = NodeDoc {
                    key: n.key.clone(),
                    point: None,
                    cycle: None,
                    relations: None,
                    subfigure: None,
                    inputs: None,
                    style: n.style.clone(),
                    generation: Some(n.generation),
                    solved: Some(n.cycles.iter().map(Into::into).collect()),
                };
                match &n.source {
                    Source::Fixed => {
                        doc.cycle = n.cycles.first().map(Into::into);
                        doc.solved = None;
                    }
                    Source::Point { coords, .. } => doc.point = Some(coords.iter().map(Into::into).collect()),
                    Source::Relations(rels) => {
                        doc.relations = Some(
                            rels.iter()
                                .map(|r| RelationDoc {
                                    kind: r.spec.kind.name().into(),
                                    to: r.spec.parent.clone(),
                                    cycle_metric: (!r.spec.use_cycle_metric).then_some(false),
                                    parameter: parameter_to_json(r),
                                })
                                .collect(),
                        )
                    }
                    Source::Subfigure { sub, inputs } => {
                        doc.subfigure = Some(match &sub.name {
                            Some(name) => SubfigureDoc::Named(name.clone()),
                            None => SubfigureDoc::Inline(Box::new(Document::from_figure(&sub.template))),
                        });
                        doc.inputs = Some(inputs.clone());
                    }
                }
                doc
            })
            .collect();
        Document {
            dim: f.dim(),
            point_metric: f.point_metric.sigma().to_vec(),
            cycle_metric: (f.cycle_metric != default_cm).then(|| f.cycle_metric.sigma().to_vec()),
            epsilon: Some(f.epsilon),
            parameters: f.parameters.clone(),
            nodes,
            assertions: f.assertions.iter().map(assertion_to_doc).collect(),
        }
    }
}

fn assertion_from_doc(a: AssertionDoc) -> Result<Assertion> {
    let cycle_metric = a.cycle_metric.unwrap_or(true);
    match (a.check, a.measure) {
        (Some(c), None) => Ok(Assertion::Check {
            kind: c.parse()?,
            a: a.a,
            b: a.b,
            cycle_metric,
            tol: a.tol,
        }),
        (None, Some(m)) => Ok(Assertion::Measure {
            kind: m.parse()?,
            a: a.a,
            b: a.b,
            cycle_metric,
            expect: a
                .expect
                .ok_or_else(|| Error::Document(format!("measure `{m}` needs `expect`")))?,
            tol: a.tol,
        }),
        _ => Err(Error::Document("assertion needs exactly one of check, measure".into())),
    }
}

fn assertion_to_doc(a: &Assertion) -> AssertionDoc {
    match a {
        Assertion::Check {
            kind,
            a,
            b,
            cycle_metric,
            tol,
        } => AssertionDoc {
            check: Some(kind.name().into()),
            measure: None,
            a: a.clone(),
            b: b.clone(),
            cycle_metric: (!cycle_metric).then_some(false),
            expect: None,
            tol: *tol,
        },
        Assertion::Measure {
            kind,
            a,
            b,
            cycle_metric,
            expect,
            tol,
        } => AssertionDoc {
            check: None,
            measure: Some(kind.name().into()),
            a: a.clone(),
            b: b.clone(),
            cycle_metric: (!cycle_metric).then_some(false),
            expect: Some(expect.clone()),
            tol: *tol,
        },
    }
}
