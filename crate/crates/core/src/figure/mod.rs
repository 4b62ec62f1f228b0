//! Ensembles of interrelated cycles.
//!
//! A [`Figure`] is a DAG of keyed nodes. Each node either holds cycle data
//! directly, is a point pinned by hidden ghost parents, is defined by
//! relations to other nodes, or is the result of a subfigure. Changing a
//! node re-solves all of its descendants in ascending generation.

mod document;

use std::collections::BTreeSet;

use indexmap::{IndexMap, IndexSet};

use crate::algebra::{is_less_than_epsilon, real, Metric, Scalar, DEFAULT_EPSILON};
use crate::cycle::Cycle;
use crate::error::{Error, Result};
use crate::relations::{expand, CheckKind, ConditionBranches, Item, MeasureKind, Parameter, RelationSpec, Target};
use crate::solver::{evaluate_cycle, unique_cycle};

pub use document::{Assertion, AssertionOutcome, Expectation};

pub const GHOST_GEN: i32 = -3;
pub const INFINITY_GEN: i32 = -2;
pub const REAL_LINE_GEN: i32 = -1;

/// Key of the predefined real line.
pub const REAL_LINE: &str = "R";
/// Key of the predefined point at infinity.
pub const INFINITY: &str = "infty";

/// Name of the `i`-th placeholder of a subfigure template.
pub fn placeholder_key(i: usize) -> String {
    format!("variable{i:03}")
}

/// Key of the node holding the output of a subfigure template.
pub const RESULT_KEY: &str = "result";

/// A real number, possibly an affine function of a figure parameter.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Const(f64),
    Affine { param: String, scale: f64, offset: f64 },
}

impl Value {
    pub fn param(name: impl Into<String>, scale: f64, offset: f64) -> Self {
        Value::Affine {
            param: name.into(),
            scale,
            offset,
        }
    }

    pub fn eval(&self, parameters: &IndexMap<String, f64>) -> Result<f64> {
        match self {
            Value::Const(v) => Ok(*v),
            Value::Affine { param, scale, offset } => parameters
                .get(param)
                .map(|t| scale * t + offset)
                .ok_or_else(|| Error::UnknownParameter(param.clone())),
        }
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Const(v)
    }
}

/// A relation as declared on a node. A bound value overrides the scalar
/// parameter each time the node is solved.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationDecl {
    pub spec: RelationSpec,
    pub bound: Option<Value>,
}

impl RelationDecl {
    pub fn bound(spec: RelationSpec, value: Value) -> Self {
        RelationDecl {
            spec,
            bound: Some(value),
        }
    }

    fn resolved(&self, parameters: &IndexMap<String, f64>) -> Result<RelationSpec> {
        let mut spec = self.spec.clone();
        if let Some(v) = &self.bound {
            spec.parameter = Parameter::Scalar(real(v.eval(parameters)?));
        }
        Ok(spec)
    }
}

impl From<RelationSpec> for RelationDecl {
    fn from(spec: RelationSpec) -> Self {
        RelationDecl { spec, bound: None }
    }
}

/// A reusable inner figure with placeholder inputs and a result node.
#[derive(Clone, Debug)]
pub struct Subfigure {
    pub template: Box<Figure>,
    /// Set for library templates so documents can refer to them by name.
    pub name: Option<String>,
}

impl Subfigure {
    fn arity(&self) -> usize {
        (0..)
            .take_while(|&i| self.template.nodes.contains_key(&placeholder_key(i)))
            .count()
    }
}

/// How a node obtains its cycles.
#[derive(Clone, Debug)]
pub enum Source {
    /// Data stored verbatim.
    Fixed,
    /// A point; `ghosts[i]` pins coordinate `i`.
    Point { coords: Vec<Value>, ghosts: Vec<String> },
    Relations(Vec<RelationDecl>),
    Subfigure { sub: Subfigure, inputs: Vec<String> },
}

#[derive(Clone, Debug, PartialEq)]
pub enum NodeStatus {
    /// Not evaluated yet, because the figure is frozen.
    Pending,
    Solved,
    /// The conditions leave this many free parameters.
    Underdetermined(usize),
    /// Evaluation raised an error.
    Failed(String),
}

#[derive(Clone, Debug)]
pub struct Node {
    key: String,
    source: Source,
    cycles: Vec<Cycle>,
    generation: i32,
    children: BTreeSet<String>,
    style: Option<String>,
    status: NodeStatus,
}

impl Node {
    fn new(key: &str, source: Source, cycles: Vec<Cycle>, generation: i32) -> Self {
        Node {
            key: key.to_string(),
            source,
            cycles,
            generation,
            children: BTreeSet::new(),
            style: None,
            status: NodeStatus::Solved,
        }
    }

    pub fn key(&self) -> &str {
        &self.key
    }

    pub fn source(&self) -> &Source {
        &self.source
    }

    pub fn cycles(&self) -> &[Cycle] {
        &self.cycles
    }

    pub fn generation(&self) -> i32 {
        self.generation
    }

    pub fn children(&self) -> impl Iterator<Item = &str> {
        self.children.iter().map(String::as_str)
    }

    pub fn style(&self) -> Option<&str> {
        self.style.as_deref()
    }

    pub fn status(&self) -> &NodeStatus {
        &self.status
    }

    /// Keys this node depends on, self-references excluded.
    pub fn parent_keys(&self) -> Vec<String> {
        let keys: Vec<String> = match &self.source {
            Source::Fixed => Vec::new(),
            Source::Point { ghosts, .. } => ghosts.iter().cloned().chain([INFINITY.to_string()]).collect(),
            Source::Relations(rels) => rels.iter().map(|r| r.spec.parent.clone()).collect(),
            Source::Subfigure { inputs, .. } => inputs.clone(),
        };
        let set: IndexSet<String> = keys.into_iter().filter(|k| *k != self.key).collect();
        set.into_iter().collect()
    }
}

/// An ensemble of cycles with its metrics, parameters and assertions.
#[derive(Clone, Debug)]
pub struct Figure {
    nodes: IndexMap<String, Node>,
    point_metric: Metric,
    cycle_metric: Metric,
    epsilon: f64,
    frozen: bool,
    parameters: IndexMap<String, f64>,
    assertions: Vec<Assertion>,
}

impl Figure {
    /// Creates a figure holding only the real line and infinity. The cycle
    /// metric defaults to the one derived from the point metric.
    pub fn new(point_metric: Metric, cycle_metric: Option<Metric>) -> Result<Self> {
        let cycle_metric = cycle_metric.unwrap_or_else(|| point_metric.default_cycle_metric());
        if cycle_metric.dim() != point_metric.dim() {
            return Err(Error::DimensionMismatch {
                expected: point_metric.dim(),
                found: cycle_metric.dim(),
            });
        }
        let n = point_metric.dim();
        let mut nodes = IndexMap::new();
        nodes.insert(
            REAL_LINE.to_string(),
            Node::new(REAL_LINE, Source::Fixed, vec![Cycle::real_line(n)], REAL_LINE_GEN),
        );
        nodes.insert(
            INFINITY.to_string(),
            Node::new(INFINITY, Source::Fixed, vec![Cycle::infinity(n)], INFINITY_GEN),
        );
        Ok(Figure {
            nodes,
            point_metric,
            cycle_metric,
            epsilon: DEFAULT_EPSILON,
            frozen: false,
            parameters: IndexMap::new(),
            assertions: Vec::new(),
        })
    }

    pub fn with_epsilon(mut self, eps: f64) -> Self {
        self.epsilon = eps;
        self
    }

    pub fn dim(&self) -> usize {
        self.point_metric.dim()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn point_metric(&self) -> &Metric {
        &self.point_metric
    }

    pub fn cycle_metric(&self) -> &Metric {
        &self.cycle_metric
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    pub fn parameters(&self) -> &IndexMap<String, f64> {
        &self.parameters
    }

    pub fn assertions(&self) -> &[Assertion] {
        &self.assertions
    }

    pub fn add_assertion(&mut self, a: Assertion) {
        self.assertions.push(a);
    }

    pub fn node(&self, key: &str) -> Result<&Node> {
        self.nodes.get(key).ok_or_else(|| Error::UnknownKey(key.to_string()))
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.values()
    }

    pub fn get_cycle(&self, key: &str) -> Result<&[Cycle]> {
        Ok(&self.node(key)?.cycles)
    }

    /// Keys with generation in `mingen..=maxgen`; a `maxgen` of
    /// [`GHOST_GEN`] means no upper bound.
    pub fn get_all_keys(&self, mingen: i32, maxgen: i32) -> Vec<String> {
        self.nodes
            .values()
            .filter(|n| n.generation >= mingen && (maxgen == GHOST_GEN || n.generation <= maxgen))
            .map(|n| n.key.clone())
            .collect()
    }

    /// All keys except ghosts.
    pub fn keys(&self) -> Vec<String> {
        self.get_all_keys(INFINITY_GEN, GHOST_GEN)
    }

    pub fn get_cycle_label(&self, name: &str) -> Option<&str> {
        self.nodes.get(name).map(|n| n.key.as_str())
    }

    pub fn set_style(&mut self, key: &str, style: impl Into<String>) -> Result<()> {
        self.node_mut(key)?.style = Some(style.into());
        Ok(())
    }

    /// Replaces every stored cycle by `f` of it, without re-solving.
    pub fn apply(&mut self, mut f: impl FnMut(&Cycle) -> Cycle) {
        for node in self.nodes.values_mut() {
            node.cycles = node.cycles.iter().map(&mut f).collect();
        }
    }

    fn node_mut(&mut self, key: &str) -> Result<&mut Node> {
        self.nodes.get_mut(key).ok_or_else(|| Error::UnknownKey(key.to_string()))
    }

    fn fresh(&self, key: &str) -> Result<()> {
        if self.nodes.contains_key(key) {
            return Err(Error::DuplicateKey(key.to_string()));
        }
        Ok(())
    }

    fn guard_reserved(key: &str) -> Result<()> {
        if key == REAL_LINE || key == INFINITY {
            return Err(Error::Reserved(key.to_string()));
        }
        Ok(())
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: n,
            });
        }
        Ok(())
    }

    fn generation_from(&self, key: &str, parents: &[String]) -> i32 {
        let top = parents
            .iter()
            .filter(|p| p.as_str() != key)
            .filter_map(|p| self.nodes.get(p))
            .map(|n| n.generation)
            .fold(0, i32::max);
        top + 1
    }

    fn link(&mut self, key: &str) {
        let parents = self.nodes[key].parent_keys();
        for p in parents {
            if let Some(n) = self.nodes.get_mut(&p) {
                n.children.insert(key.to_string());
            }
        }
    }

    fn unlink(&mut self, key: &str) {
        let parents = self.nodes[key].parent_keys();
        for p in parents {
            if let Some(n) = self.nodes.get_mut(&p) {
                n.children.remove(key);
            }
        }
    }

    fn insert(&mut self, node: Node) {
        let key = node.key.clone();
        self.nodes.insert(key.clone(), node);
        self.link(&key);
        self.refresh(&key);
    }

    /// Adds a generation-zero node holding `cycle` verbatim.
    pub fn add_cycle(&mut self, cycle: Cycle, key: &str) -> Result<String> {
        self.fresh(key)?;
        self.check_dim(cycle.dim())?;
        self.insert(Node::new(key, Source::Fixed, vec![cycle], 0));
        Ok(key.to_string())
    }

    /// Adds a point, pinned by one ghost parent per coordinate.
    pub fn add_point(&mut self, coords: &[f64], key: &str) -> Result<String> {
        let coords: Vec<Value> = coords.iter().map(|&x| Value::Const(x)).collect();
        self.add_point_expr(coords, key)
    }

    /// Adds a point whose coordinates may depend on parameters.
    pub fn add_point_expr(&mut self, coords: Vec<Value>, key: &str) -> Result<String> {
        self.fresh(key)?;
        self.check_dim(coords.len())?;
        for c in &coords {
            c.eval(&self.parameters)?;
        }
        let ghosts = self.make_ghosts(key, coords.len())?;
        self.insert(Node::new(key, Source::Point { coords, ghosts }, Vec::new(), 0));
        Ok(key.to_string())
    }

    fn make_ghosts(&mut self, key: &str, n: usize) -> Result<Vec<String>> {
        let names: Vec<String> = (0..n).map(|i| format!("{key}-({i})")).collect();
        for g in &names {
            self.fresh(g)?;
        }
        for g in &names {
            self.nodes
                .insert(g.clone(), Node::new(g, Source::Fixed, Vec::new(), GHOST_GEN));
        }
        Ok(names)
    }

    /// Adds a node defined by relations to existing nodes or to itself.
    pub fn add_cycle_rel<R: Into<RelationDecl>>(
        &mut self,
        relations: impl IntoIterator<Item = R>,
        key: &str,
    ) -> Result<String> {
        self.fresh(key)?;
        let rels: Vec<RelationDecl> = relations.into_iter().map(Into::into).collect();
        for r in &rels {
            if r.spec.parent != key {
                self.node(&r.spec.parent)?;
            }
            if let Some(v) = &r.bound {
                v.eval(&self.parameters)?;
            }
        }
        let parents: Vec<String> = rels.iter().map(|r| r.spec.parent.clone()).collect();
        let generation = self.generation_from(key, &parents);
        self.insert(Node::new(key, Source::Relations(rels), Vec::new(), generation));
        Ok(key.to_string())
    }

    /// Adds a node computed by a subfigure from the given inputs.
    pub fn add_subfigure(&mut self, sub: Subfigure, inputs: &[&str], key: &str) -> Result<String> {
        self.fresh(key)?;
        if sub.arity() != inputs.len() || !sub.template.nodes.contains_key(RESULT_KEY) {
            return Err(Error::Subfigure(format!(
                "template takes {} inputs, {} given",
                sub.arity(),
                inputs.len()
            )));
        }
        if sub.template.dim() != self.dim() {
            return Err(Error::Subfigure("template dimension differs from the host".into()));
        }
        for k in inputs {
            self.node(k)?;
        }
        let inputs: Vec<String> = inputs.iter().map(|s| s.to_string()).collect();
        let generation = self.generation_from(key, &inputs);
        self.insert(Node::new(key, Source::Subfigure { sub, inputs }, Vec::new(), generation));
        Ok(key.to_string())
    }

    fn movable(&self, key: &str) -> Result<()> {
        Self::guard_reserved(key)?;
        let node = self.node(key)?;
        if node.generation != 0 {
            return Err(Error::NonZeroGeneration(key.to_string(), node.generation));
        }
        Ok(())
    }

    /// Replaces the data of a generation-zero node.
    pub fn move_cycle(&mut self, key: &str, cycle: Cycle) -> Result<()> {
        self.movable(key)?;
        self.check_dim(cycle.dim())?;
        self.unlink(key);
        let old = std::mem::replace(&mut self.node_mut(key)?.source, Source::Fixed);
        if let Source::Point { ghosts, .. } = old {
            for g in ghosts {
                self.nodes.shift_remove(&g);
            }
        }
        let node = self.node_mut(key)?;
        node.cycles = vec![cycle];
        node.status = NodeStatus::Solved;
        self.refresh(key);
        Ok(())
    }

    /// Turns a generation-zero node into the point `x`.
    pub fn move_point(&mut self, key: &str, coords: &[f64]) -> Result<()> {
        self.move_point_expr(key, coords.iter().map(|&x| Value::Const(x)).collect())
    }

    pub fn move_point_expr(&mut self, key: &str, coords: Vec<Value>) -> Result<()> {
        self.movable(key)?;
        self.check_dim(coords.len())?;
        for c in &coords {
            c.eval(&self.parameters)?;
        }
        let ghosts = match &self.nodes[key].source {
            Source::Point { ghosts, .. } => ghosts.clone(),
            _ => self.make_ghosts(key, coords.len())?,
        };
        self.node_mut(key)?.source = Source::Point { coords, ghosts };
        self.link(key);
        self.refresh(key);
        Ok(())
    }

    /// Removes a node with all its descendants and ghost parents.
    pub fn remove_cycle_node(&mut self, key: &str) -> Result<()> {
        Self::guard_reserved(key)?;
        self.node(key)?;
        let mut doomed = self.descendants(&[key.to_string()]);
        doomed.insert(0, key.to_string());
        for k in doomed.iter().rev() {
            if !self.nodes.contains_key(k) {
                continue;
            }
            self.unlink(k);
            if let Some(node) = self.nodes.shift_remove(k) {
                if let Source::Point { ghosts, .. } = node.source {
                    for g in ghosts {
                        self.nodes.shift_remove(&g);
                    }
                }
            }
        }
        Ok(())
    }

    /// Replaces both metrics and re-solves everything.
    pub fn set_metric(&mut self, point_metric: Metric, cycle_metric: Option<Metric>) -> Result<()> {
        let cycle_metric = cycle_metric.unwrap_or_else(|| point_metric.default_cycle_metric());
        if point_metric.dim() != self.dim() || cycle_metric.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: if point_metric.dim() != self.dim() {
                    point_metric.dim()
                } else {
                    cycle_metric.dim()
                },
            });
        }
        self.point_metric = point_metric;
        self.cycle_metric = cycle_metric;
        self.update_all();
        Ok(())
    }

    /// Binds a parameter and re-solves everything.
    pub fn set_parameter(&mut self, name: &str, value: f64) {
        self.parameters.insert(name.to_string(), value);
        self.update_all();
    }

    /// Stops evaluation until [`Figure::unfreeze`].
    pub fn freeze(&mut self) {
        self.frozen = true;
    }

    pub fn unfreeze(&mut self) {
        self.frozen = false;
        self.update_all();
    }

    /// Re-solves every derived node in ascending generation.
    pub fn update_all(&mut self) {
        self.recompute_with(|_| {});
    }

    /// As [`Figure::update_all`], letting `reorder` permute each batch of
    /// same-generation keys before it is processed.
    pub fn recompute_with(&mut self, mut reorder: impl FnMut(&mut [String])) {
        if self.frozen {
            return;
        }
        let keys: Vec<String> = self
            .nodes
            .values()
            .filter(|n| !matches!(n.source, Source::Fixed))
            .map(|n| n.key.clone())
            .collect();
        for mut batch in self.batches(keys) {
            reorder(&mut batch);
            for k in batch {
                self.evaluate(&k);
            }
        }
    }

    /// Groups keys by generation, keeping insertion order within a group.
    fn batches(&self, mut keys: Vec<String>) -> Vec<Vec<String>> {
        keys.sort_by_key(|k| (self.nodes[k].generation, self.nodes.get_index_of(k)));
        let mut out: Vec<Vec<String>> = Vec::new();
        let mut last = None;
        for k in keys {
            let g = self.nodes[&k].generation;
            if last != Some(g) {
                out.push(Vec::new());
                last = Some(g);
            }
            out.last_mut().unwrap().push(k);
        }
        out
    }

    fn descendants(&self, roots: &[String]) -> Vec<String> {
        let mut seen: IndexSet<String> = IndexSet::new();
        let mut stack: Vec<String> = roots.to_vec();
        while let Some(k) = stack.pop() {
            if let Some(n) = self.nodes.get(&k) {
                for c in &n.children {
                    if seen.insert(c.clone()) {
                        stack.push(c.clone());
                    }
                }
            }
        }
        seen.into_iter().filter(|k| !roots.contains(k)).collect()
    }

    /// Re-solves `key` and everything downstream of it.
    fn refresh(&mut self, key: &str) {
        if self.frozen {
            self.node_mut(key).expect("node exists").status = match self.nodes[key].source {
                Source::Fixed => NodeStatus::Solved,
                _ => NodeStatus::Pending,
            };
            return;
        }
        self.evaluate(key);
        let below = self.descendants(&[key.to_string()]);
        for batch in self.batches(below) {
            for k in batch {
                self.evaluate(&k);
            }
        }
    }

    fn evaluate(&mut self, key: &str) {
        if let Source::Point { coords, ghosts } = &self.nodes[key].source {
            let values: Result<Vec<f64>> = coords.iter().map(|c| c.eval(&self.parameters)).collect();
            if let Ok(values) = values {
                let n = self.dim();
                for (i, (g, x)) in ghosts.clone().iter().zip(values).enumerate() {
                    let mut l = vec![0.0; n];
                    l[i] = 1.0;
                    if let Some(node) = self.nodes.get_mut(g) {
                        node.cycles = vec![Cycle::from_real(0.0, &l, 2.0 * x)];
                    }
                }
            }
        }
        let (cycles, status) = match self.solve(key) {
            Ok((c, s)) => (c, s),
            Err(e) => (Vec::new(), NodeStatus::Failed(e.to_string())),
        };
        let node = self.nodes.get_mut(key).expect("node exists");
        node.cycles = cycles;
        node.status = status;
    }

    fn point_relations(key: &str, ghosts: &[String]) -> Vec<RelationSpec> {
        let mut rels = vec![
            RelationSpec::orthogonal(key).in_point_metric(),
            RelationSpec::adifferent(INFINITY),
        ];
        rels.extend(ghosts.iter().map(RelationSpec::orthogonal));
        rels
    }

    fn solve(&self, key: &str) -> Result<(Vec<Cycle>, NodeStatus)> {
        let node = &self.nodes[key];
        let specs: Vec<RelationSpec> = match &node.source {
            Source::Fixed => return Ok((node.cycles.clone(), NodeStatus::Solved)),
            Source::Point { coords, ghosts } => {
                for c in coords {
                    c.eval(&self.parameters)?;
                }
                Self::point_relations(key, ghosts)
            }
            Source::Relations(rels) => rels
                .iter()
                .map(|r| r.resolved(&self.parameters))
                .collect::<Result<_>>()?,
            Source::Subfigure { sub, inputs } => return self.solve_subfigure(sub, inputs),
        };
        self.solve_relations(key, &specs)
    }

    fn solve_relations(&self, key: &str, specs: &[RelationSpec]) -> Result<(Vec<Cycle>, NodeStatus)> {
        let n = self.dim();
        let expanded: Vec<ConditionBranches> = specs
            .iter()
            .map(|spec| {
                let target = if spec.parent == key {
                    Target::Itself
                } else {
                    Target::Parent(&self.node(&spec.parent)?.cycles)
                };
                expand(spec, target, n, &self.point_metric, &self.cycle_metric, self.epsilon)
            })
            .collect::<Result<_>>()?;
        if expanded.iter().any(|e| e.branches.is_empty()) {
            return Ok((Vec::new(), NodeStatus::Solved));
        }
        let mut found = Vec::new();
        let mut free = 0;
        for combo in Odometer::new(expanded.iter().map(|e| e.branches.len()).collect()) {
            let items: Vec<Item> = combo
                .iter()
                .enumerate()
                .flat_map(|(i, &j)| expanded[i].branches[j].iter().cloned())
                .collect();
            let set = evaluate_cycle(&items, n, self.epsilon);
            free = free.max(set.free);
            found.extend(set.cycles);
        }
        if free > 0 {
            return Ok((Vec::new(), NodeStatus::Underdetermined(free)));
        }
        Ok((unique_cycle(found, self.epsilon), NodeStatus::Solved))
    }

    fn solve_subfigure(&self, sub: &Subfigure, inputs: &[String]) -> Result<(Vec<Cycle>, NodeStatus)> {
        let mut inner = (*sub.template).clone();
        inner.frozen = true;
        inner.point_metric = self.point_metric.clone();
        inner.cycle_metric = self.cycle_metric.clone();
        inner.epsilon = self.epsilon;
        for (i, k) in inputs.iter().enumerate() {
            let cycles = self.node(k)?.cycles.clone();
            inner.node_mut(&placeholder_key(i))?.cycles = cycles;
        }
        inner.unfreeze();
        let result = inner.node(RESULT_KEY)?;
        Ok((result.cycles.clone(), result.status.clone()))
    }

    /// Residuals of a check between all pairs of values of two nodes.
    pub fn check_rel(&self, key1: &str, key2: &str, kind: CheckKind, use_cycle_metric: bool) -> Result<Vec<Scalar>> {
        let metric = self.pick_metric(use_cycle_metric);
        self.pairs(key1, key2)?
            .map(|(a, b)| kind.residual(a, b, metric))
            .collect()
    }

    /// A quantity between all pairs of values of two nodes.
    pub fn measure(&self, key1: &str, key2: &str, kind: MeasureKind, use_cycle_metric: bool) -> Result<Vec<Scalar>> {
        let metric = self.pick_metric(use_cycle_metric);
        self.pairs(key1, key2)?
            .map(|(a, b)| kind.value(a, b, metric, self.epsilon))
            .collect()
    }

    fn pick_metric(&self, use_cycle_metric: bool) -> &Metric {
        if use_cycle_metric {
            &self.cycle_metric
        } else {
            &self.point_metric
        }
    }

    fn pairs<'a>(&'a self, key1: &str, key2: &str) -> Result<impl Iterator<Item = (&'a Cycle, &'a Cycle)>> {
        let c1 = &self.node(key1)?.cycles;
        let c2 = &self.node(key2)?.cycles;
        Ok(c1.iter().flat_map(move |a| c2.iter().map(move |b| (a, b))))
    }

    /// True when every stored value of every node is almost equal to the
    /// corresponding value in `other`, compared as sets.
    pub fn almost_equal(&self, other: &Figure) -> bool {
        self.nodes.len() == other.nodes.len()
            && self.nodes.values().all(|n| {
                other.nodes.get(&n.key).is_some_and(|m| {
                    n.cycles.len() == m.cycles.len()
                        && n.cycles
                            .iter()
                            .all(|c| m.cycles.iter().any(|d| c.is_almost_equal(d, self.epsilon)))
                })
            })
    }

    /// Keys of nodes that ended up without values for a reason other than
    /// being underdetermined or pending.
    pub fn empty_nodes(&self) -> Vec<String> {
        self.nodes
            .values()
            .filter(|n| n.generation != GHOST_GEN && n.cycles.is_empty())
            .filter(|n| matches!(n.status, NodeStatus::Solved | NodeStatus::Failed(_)))
            .map(|n| n.key.clone())
            .collect()
    }
}

/// The midpoint template: `result` is the midpoint of `variable000` and
/// `variable001` with `variable002` playing the role of infinity.
pub fn midpoint_constructor() -> Subfigure {
    let mut f = Figure::new(Metric::elliptic(2), None).expect("matching metrics");
    f.freeze();
    let [v1, v2, v3] = [0, 1, 2].map(placeholder_key);
    for v in [&v1, &v2, &v3] {
        f.add_cycle(Cycle::infinity(2), v).expect("fresh key");
    }
    let o = |k: &str| RelationSpec::orthogonal(k);
    f.add_cycle_rel([o(&v1), o(&v2), o(&v3)], "v4").expect("known parents");
    f.add_cycle_rel([o(&v1), o(&v2), o("v4")], "v5").expect("known parents");
    f.add_cycle_rel([o(&v3), o("v4"), o("v5")], "v6").expect("known parents");
    f.add_cycle_rel(
        [
            o("v4"),
            o("v6"),
            o(RESULT_KEY).in_point_metric(),
            RelationSpec::adifferent(&v3),
        ],
        RESULT_KEY,
    )
    .expect("known parents");
    Subfigure {
        template: Box::new(f),
        name: Some("midpoint".into()),
    }
}

/// Iterates over all index tuples below the given bounds, last index fastest.
struct Odometer {
    bounds: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl Odometer {
    fn new(bounds: Vec<usize>) -> Self {
        let next = if bounds.contains(&0) {
            None
        } else {
            Some(vec![0; bounds.len()])
        };
        Odometer { bounds, next }
    }
}

impl Iterator for Odometer {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.next.take()?;
        let mut succ = cur.clone();
        for i in (0..succ.len()).rev() {
            succ[i] += 1;
            if succ[i] < self.bounds[i] {
                self.next = Some(succ);
                return Some(cur);
            }
            succ[i] = 0;
        }
        Some(cur)
    }
}

/// True when `c` is almost zero-radius and real, i.e. drawn as a dot.
pub fn is_point_like(c: &Cycle, metric: &Metric, eps: f64) -> bool {
    c.is_zero_radius(metric, eps) && !is_less_than_epsilon(c.unit_scaled().k(), eps)
}
