//! Relations between an unknown cycle and a parent cycle, expanded into
//! disjunctive branches of polynomial conditions, plus read-only checks and
//! measurements between known cycles.

use std::fmt;
use std::str::FromStr;

use crate::algebra::{is_less_than_epsilon, real, sl2_lift, CliffordElement, FscMatrix, Metric, Scalar, ONE, ZERO};
use crate::cycle::Cycle;
use crate::error::{Error, Result};
use crate::solver::Poly;

/// Kinds of relation a node may declare to a parent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RelationKind {
    Orthogonal,
    FOrthogonal,
    Different,
    ADifferent,
    Tangent,
    TangentI,
    TangentO,
    Angle,
    SteinerPower,
    TangentialDistance,
    CrossTDistance,
    ProductSign,
    OnlyReals,
    Moebius,
    Sl2,
}

const KIND_NAMES: [(RelationKind, &str, &str); 15] = [
    (RelationKind::Orthogonal, "orthogonal", "o"),
    (RelationKind::FOrthogonal, "f_orthogonal", "f"),
    (RelationKind::Different, "different", "d"),
    (RelationKind::ADifferent, "adifferent", "ad"),
    (RelationKind::Tangent, "tangent", "t"),
    (RelationKind::TangentI, "tangent_i", "ti"),
    (RelationKind::TangentO, "tangent_o", "to"),
    (RelationKind::Angle, "angle", "a"),
    (RelationKind::SteinerPower, "steiner_power", "s"),
    (RelationKind::TangentialDistance, "tangential_distance", "s"),
    (RelationKind::CrossTDistance, "cross_t_distance", "c"),
    (RelationKind::ProductSign, "product_sign", "p"),
    (RelationKind::OnlyReals, "only_reals", "r"),
    (RelationKind::Moebius, "moebius", "m"),
    (RelationKind::Sl2, "sl2", "l"),
];

impl RelationKind {
    /// Name used in figure documents.
    pub fn name(self) -> &'static str {
        KIND_NAMES.iter().find(|(k, _, _)| *k == self).map(|e| e.1).unwrap_or("?")
    }

    /// Short code used in printed parent summaries.
    pub fn code(self) -> &'static str {
        KIND_NAMES.iter().find(|(k, _, _)| *k == self).map(|e| e.2).unwrap_or("?")
    }

    /// Relations that only filter candidates.
    pub fn is_predicate(self) -> bool {
        matches!(
            self,
            RelationKind::Different | RelationKind::ADifferent | RelationKind::ProductSign | RelationKind::OnlyReals
        )
    }

    /// Shape of the parameter this kind expects.
    pub fn parameter_shape(self) -> ParameterShape {
        match self {
            RelationKind::Angle
            | RelationKind::SteinerPower
            | RelationKind::TangentialDistance
            | RelationKind::CrossTDistance
            | RelationKind::ProductSign => ParameterShape::Scalar,
            RelationKind::Sl2 => ParameterShape::Sl2,
            RelationKind::Moebius => ParameterShape::Moebius,
            _ => ParameterShape::None,
        }
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RelationKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        KIND_NAMES
            .iter()
            .find(|(_, n, _)| *n == s)
            .map(|e| e.0)
            .ok_or_else(|| Error::Document(format!("unknown relation kind `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParameterShape {
    None,
    Scalar,
    Sl2,
    Moebius,
}

/// Evaluated relation parameter.
#[derive(Clone, Debug, PartialEq)]
pub enum Parameter {
    None,
    Scalar(Scalar),
    /// Real entries `(a, b, c, d)` of an sl2 matrix.
    Sl2([Scalar; 4]),
    /// Entries `a, b, c, d` given as dense blade coefficients.
    Moebius(Box<[Vec<Scalar>; 4]>),
}

/// A declared relation to a parent node.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationSpec {
    pub kind: RelationKind,
    pub parent: String,
    pub use_cycle_metric: bool,
    pub parameter: Parameter,
}

impl RelationSpec {
    pub fn new(kind: RelationKind, parent: impl Into<String>) -> Self {
        RelationSpec {
            kind,
            parent: parent.into(),
            use_cycle_metric: true,
            parameter: Parameter::None,
        }
    }

    pub fn with_parameter(mut self, parameter: Parameter) -> Self {
        self.parameter = parameter;
        self
    }

    pub fn in_point_metric(mut self) -> Self {
        self.use_cycle_metric = false;
        self
    }

    pub fn orthogonal(parent: impl Into<String>) -> Self {
        Self::new(RelationKind::Orthogonal, parent)
    }

    pub fn f_orthogonal(parent: impl Into<String>) -> Self {
        Self::new(RelationKind::FOrthogonal, parent)
    }

    pub fn different(parent: impl Into<String>) -> Self {
        Self::new(RelationKind::Different, parent)
    }

    pub fn adifferent(parent: impl Into<String>) -> Self {
        Self::new(RelationKind::ADifferent, parent)
    }

    pub fn tangent(parent: impl Into<String>) -> Self {
        Self::new(RelationKind::Tangent, parent)
    }

    pub fn tangent_i(parent: impl Into<String>) -> Self {
        Self::new(RelationKind::TangentI, parent)
    }

    pub fn tangent_o(parent: impl Into<String>) -> Self {
        Self::new(RelationKind::TangentO, parent)
    }

    pub fn angle(parent: impl Into<String>, cosine: f64) -> Self {
        Self::new(RelationKind::Angle, parent).with_parameter(Parameter::Scalar(real(cosine)))
    }

    pub fn steiner_power(parent: impl Into<String>, power: f64) -> Self {
        Self::new(RelationKind::SteinerPower, parent).with_parameter(Parameter::Scalar(real(power)))
    }

    pub fn tangential_distance(parent: impl Into<String>, distance: f64) -> Self {
        Self::new(RelationKind::TangentialDistance, parent).with_parameter(Parameter::Scalar(real(distance)))
    }

    pub fn cross_t_distance(parent: impl Into<String>, distance: f64) -> Self {
        Self::new(RelationKind::CrossTDistance, parent).with_parameter(Parameter::Scalar(real(distance)))
    }

    pub fn product_sign(parent: impl Into<String>, sign: f64) -> Self {
        Self::new(RelationKind::ProductSign, parent).with_parameter(Parameter::Scalar(real(sign)))
    }

    /// Filter keeping cycles with negative self-product in the point metric.
    pub fn real_cycle(parent: impl Into<String>) -> Self {
        Self::product_sign(parent, 1.0).in_point_metric()
    }

    pub fn only_reals(parent: impl Into<String>) -> Self {
        Self::new(RelationKind::OnlyReals, parent)
    }

    pub fn sl2(parent: impl Into<String>, a: f64, b: f64, c: f64, d: f64) -> Self {
        Self::new(RelationKind::Sl2, parent).with_parameter(Parameter::Sl2([real(a), real(b), real(c), real(d)]))
    }

    pub fn moebius(parent: impl Into<String>, entries: [Vec<Scalar>; 4]) -> Self {
        Self::new(RelationKind::Moebius, parent).with_parameter(Parameter::Moebius(Box::new(entries)))
    }

    fn scalar_parameter(&self) -> Result<Scalar> {
        match self.parameter {
            Parameter::Scalar(s) => Ok(s),
            _ => Err(Error::ParameterShape {
                kind: self.kind.name().into(),
                expected: "scalar",
            }),
        }
    }

    fn matrix(&self, metric: &Metric, eps: f64) -> Result<FscMatrix> {
        match (&self.parameter, self.kind) {
            (Parameter::Sl2([a, b, c, d]), RelationKind::Sl2) => sl2_lift(*a, *b, *c, *d, metric, eps),
            (Parameter::Moebius(e), RelationKind::Moebius) => FscMatrix::new(
                CliffordElement::from_coeffs(&e[0], metric)?,
                CliffordElement::from_coeffs(&e[1], metric)?,
                CliffordElement::from_coeffs(&e[2], metric)?,
                CliffordElement::from_coeffs(&e[3], metric)?,
            ),
            _ => Err(Error::ParameterShape {
                kind: self.kind.name().into(),
                expected: "matrix",
            }),
        }
    }
}

/// Boolean filter applied to solved candidates.
#[derive(Clone, Debug, PartialEq)]
pub enum Predicate {
    Different(Cycle),
    ADifferent(Cycle),
    ProductSign { sign: f64, metric: Metric },
    OnlyReals,
}

impl Predicate {
    /// Outcome on a candidate; invariant under complex rescaling.
    pub fn holds(&self, candidate: &Cycle, eps: f64) -> bool {
        match self {
            Predicate::Different(p) => !candidate.is_projectively_equal(p),
            Predicate::ADifferent(p) => !candidate.is_almost_equal(p, eps),
            Predicate::ProductSign { sign, metric } => {
                let u = candidate.unit_scaled();
                let s = u.dot(&u, metric);
                is_less_than_epsilon(real(s.im), eps) && sign * (s.re - eps) < 0.0
            }
            Predicate::OnlyReals => candidate
                .unit_scaled()
                .coefficients()
                .all(|x| x.im.abs() < eps),
        }
    }
}

/// One conjunct of a branch.
#[derive(Clone, Debug, PartialEq)]
pub enum Item {
    /// Polynomial residual that must vanish.
    Equation(Poly),
    Predicate(Predicate),
    /// Cycle given directly by a transformation of the parent.
    Produced(Cycle),
}

/// Disjunction of conjunctions of items.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConditionBranches {
    pub branches: Vec<Vec<Item>>,
}

/// What a relation refers to.
#[derive(Clone, Copy, Debug)]
pub enum Target<'a> {
    /// Values of a parent node.
    Parent(&'a [Cycle]),
    /// The unknown cycle itself.
    Itself,
}

/// Linear coefficients of `U ↦ ⟨U, P⟩` in unknown order.
fn product_coefficients(p: &Cycle, metric: &Metric) -> Vec<Scalar> {
    let mut v = Vec::with_capacity(p.dim() + 2);
    v.push(p.k());
    v.extend(p.l().iter().zip(metric.sigma()).map(|(&l, &s)| l * (2.0 * s)));
    v.push(p.m());
    v
}

/// Quadratic form of `U ↦ ⟨U, U⟩`.
fn self_product_form(n: usize, metric: &Metric) -> Vec<Scalar> {
    let size = n + 2;
    let mut q = vec![ZERO; size * size];
    q[size - 1] = ONE;
    q[(size - 1) * size] = ONE;
    for (i, &s) in metric.sigma().iter().enumerate() {
        q[(i + 1) * size + (i + 1)] = real(2.0 * s);
    }
    q
}

fn normalised_self(n: usize, metric: &Metric, sign: f64) -> Item {
    Item::Equation(Poly::quadratic_form(self_product_form(n, metric), real(sign)))
}

/// Pairs a linear residual with both det-normalisations, `+1` first.
fn with_normalisations(n: usize, metric: &Metric, linear: Poly, quadratic_first: bool) -> Vec<Vec<Item>> {
    [1.0, -1.0]
        .iter()
        .map(|&s| {
            let q = normalised_self(n, metric, s);
            let l = Item::Equation(linear.clone());
            if quadratic_first {
                vec![q, l]
            } else {
                vec![l, q]
            }
        })
        .collect()
}

/// Linear residual of focal orthogonality: `⟨P·U·P, real line⟩`.
fn focal_coefficients(p: &Cycle, metric: &Metric) -> Result<Vec<Scalar>> {
    let n = p.dim();
    let pm = FscMatrix::from_cycle(p, metric)?;
    let line = Cycle::real_line(n);
    (0..n + 2)
        .map(|j| {
            let mut e = vec![ZERO; n + 2];
            e[j] = ONE;
            let u = FscMatrix::from_cycle(&Cycle::from_unknowns(&e), metric)?;
            let conj = pm.mul(&u)?.mul(&pm)?.cycle_parts();
            Ok(conj.dot(&line, metric))
        })
        .collect()
}

/// Expands a relation into condition branches.
pub fn expand(
    spec: &RelationSpec,
    target: Target<'_>,
    dim: usize,
    point_metric: &Metric,
    cycle_metric: &Metric,
    eps: f64,
) -> Result<ConditionBranches> {
    let metric = if spec.use_cycle_metric { cycle_metric } else { point_metric };
    let parents = match target {
        Target::Itself => return expand_self(spec, dim, metric),
        Target::Parent(p) => p,
    };
    use RelationKind as K;
    let mut branches = Vec::new();
    if spec.kind.is_predicate() {
        let mut items = Vec::new();
        for p in parents {
            items.push(Item::Predicate(match spec.kind {
                K::Different => Predicate::Different(p.clone()),
                K::ADifferent => Predicate::ADifferent(p.clone()),
                K::ProductSign => Predicate::ProductSign {
                    sign: spec.scalar_parameter()?.re,
                    metric: metric.clone(),
                },
                _ => Predicate::OnlyReals,
            }));
        }
        branches.push(items);
        return Ok(ConditionBranches { branches });
    }
    for p in parents {
        let n = p.dim();
        let sqrt_self = || real(p.dot(p, metric).norm().sqrt());
        match spec.kind {
            K::Orthogonal => branches.push(vec![Item::Equation(Poly::affine(product_coefficients(p, metric), ZERO))]),
            K::FOrthogonal => branches.push(vec![Item::Equation(Poly::affine(focal_coefficients(p, metric)?, ZERO))]),
            K::Tangent | K::TangentO | K::TangentI => {
                let signs: &[f64] = match spec.kind {
                    K::Tangent => &[-1.0, 1.0],
                    K::TangentO => &[-1.0],
                    _ => &[1.0],
                };
                for &s in signs {
                    let lin = Poly::affine(product_coefficients(p, metric), sqrt_self() * s);
                    branches.extend(with_normalisations(n, metric, lin, true));
                }
            }
            K::Angle => {
                let nn = p.normalize_det(metric, eps)?;
                let lin = Poly::affine(product_coefficients(&nn, metric), -spec.scalar_parameter()?);
                branches.extend(with_normalisations(n, metric, lin, false));
            }
            K::SteinerPower | K::TangentialDistance | K::CrossTDistance => {
                let pk = p.normalize_k(eps)?;
                let d = spec.scalar_parameter()?;
                let (power, sign) = match spec.kind {
                    K::SteinerPower => (d, 1.0),
                    K::TangentialDistance => (d * d, 1.0),
                    _ => (d * d, -1.0),
                };
                let mut coeffs = product_coefficients(&pk, metric);
                coeffs[n + 1] -= power;
                let root = real(pk.dot(&pk, metric).norm().sqrt());
                let lin = Poly::affine(coeffs, root * sign);
                branches.extend(with_normalisations(n, metric, lin, false));
            }
            K::Moebius | K::Sl2 => {
                let m = spec.matrix(point_metric, eps)?;
                branches.push(vec![Item::Produced(m.similarity(p, eps)?)]);
            }
            K::Different | K::ADifferent | K::ProductSign | K::OnlyReals => unreachable!(),
        }
    }
    Ok(ConditionBranches { branches })
}

fn expand_self(spec: &RelationSpec, dim: usize, metric: &Metric) -> Result<ConditionBranches> {
    let item = match spec.kind {
        RelationKind::Orthogonal => normalised_self(dim, metric, 0.0),
        RelationKind::ProductSign => Item::Predicate(Predicate::ProductSign {
            sign: spec.scalar_parameter()?.re,
            metric: metric.clone(),
        }),
        RelationKind::OnlyReals => Item::Predicate(Predicate::OnlyReals),
        k => return Err(Error::UnsupportedSelfRelation(k.name().into())),
    };
    Ok(ConditionBranches {
        branches: vec![vec![item]],
    })
}

/// `⟨C1,C2⟩² − ⟨C1,C1⟩⟨C2,C2⟩`; zero iff tangent.
pub fn check_tangent(c1: &Cycle, c2: &Cycle, metric: &Metric) -> Result<Scalar> {
    let p = c1.product(c2, metric)?;
    Ok(p * p - c1.dot(c1, metric) * c2.dot(c2, metric))
}

/// `⟨C1,C2⟩`; zero iff orthogonal.
pub fn check_orthogonal(c1: &Cycle, c2: &Cycle, metric: &Metric) -> Result<Scalar> {
    c1.product(c2, metric)
}

/// `⟨C2·C1·C2, real line⟩`; zero iff `C1` is focally orthogonal to `C2`.
pub fn check_f_orthogonal(c1: &Cycle, c2: &Cycle, metric: &Metric) -> Result<Scalar> {
    let coeffs = focal_coefficients(c2, metric)?;
    Ok(coeffs.iter().zip(c1.to_unknowns()).map(|(&a, x)| a * x).sum())
}

/// Cosine of the intersection angle: product of det-normalised cycles.
pub fn angle_is(c1: &Cycle, c2: &Cycle, metric: &Metric, eps: f64) -> Result<Scalar> {
    let a = c1.normalize_det(metric, eps)?;
    let b = c2.normalize_det(metric, eps)?;
    a.product(&b, metric)
}

/// `⟨C1_k, C2_k⟩ + p·√|⟨C1_k,C1_k⟩⟨C2_k,C2_k⟩|` for k-normalised cycles.
pub fn power_is(c1: &Cycle, c2: &Cycle, metric: &Metric, p: f64, eps: f64) -> Result<Scalar> {
    let a = c1.normalize_k(eps)?;
    let b = c2.normalize_k(eps)?;
    let root = (a.dot(&a, metric) * b.dot(&b, metric)).norm().sqrt();
    Ok(a.product(&b, metric)? + p * root)
}

/// Squared tangential distance.
pub fn sq_t_distance_is(c1: &Cycle, c2: &Cycle, metric: &Metric, eps: f64) -> Result<Scalar> {
    power_is(c1, c2, metric, 1.0, eps)
}

/// Squared cross-tangential distance.
pub fn sq_cross_t_distance_is(c1: &Cycle, c2: &Cycle, metric: &Metric, eps: f64) -> Result<Scalar> {
    power_is(c1, c2, metric, -1.0, eps)
}

/// Residual checks between stored cycles.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckKind {
    Orthogonal,
    FOrthogonal,
    Tangent,
}

impl CheckKind {
    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Orthogonal => "orthogonal",
            CheckKind::FOrthogonal => "f_orthogonal",
            CheckKind::Tangent => "tangent",
        }
    }

    pub fn residual(self, c1: &Cycle, c2: &Cycle, metric: &Metric) -> Result<Scalar> {
        match self {
            CheckKind::Orthogonal => check_orthogonal(c1, c2, metric),
            CheckKind::FOrthogonal => check_f_orthogonal(c1, c2, metric),
            CheckKind::Tangent => check_tangent(c1, c2, metric),
        }
    }
}

impl FromStr for CheckKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "orthogonal" => Ok(CheckKind::Orthogonal),
            "f_orthogonal" => Ok(CheckKind::FOrthogonal),
            "tangent" => Ok(CheckKind::Tangent),
            _ => Err(Error::Document(format!("unknown check kind `{s}`"))),
        }
    }
}

/// Quantities measured between stored cycles.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasureKind {
    CycleProduct,
    Angle,
    SqTDistance,
    SqCrossTDistance,
}

impl MeasureKind {
    pub fn name(self) -> &'static str {
        match self {
            MeasureKind::CycleProduct => "cycle_product",
            MeasureKind::Angle => "angle",
            MeasureKind::SqTDistance => "sq_t_distance",
            MeasureKind::SqCrossTDistance => "sq_cross_t_distance",
        }
    }

    pub fn value(self, c1: &Cycle, c2: &Cycle, metric: &Metric, eps: f64) -> Result<Scalar> {
        match self {
            MeasureKind::CycleProduct => c1.product(c2, metric),
            MeasureKind::Angle => angle_is(c1, c2, metric, eps),
            MeasureKind::SqTDistance => sq_t_distance_is(c1, c2, metric, eps),
            MeasureKind::SqCrossTDistance => sq_cross_t_distance_is(c1, c2, metric, eps),
        }
    }
}

impl FromStr for MeasureKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cycle_product" => Ok(MeasureKind::CycleProduct),
            "angle" => Ok(MeasureKind::Angle),
            "sq_t_distance" => Ok(MeasureKind::SqTDistance),
            "sq_cross_t_distance" => Ok(MeasureKind::SqCrossTDistance),
            _ => Err(Error::Document(format!("unknown measure kind `{s}`"))),
        }
    }
}
