//! Linear-plus-one-quadratic solving for an unknown cycle.
//!
//! Unknowns are ordered `[m, l_0, …, l_{n−1}, k]`.

use crate::algebra::{is_less_than_epsilon, Scalar, ONE, ZERO};
use crate::cycle::Cycle;
use crate::linalg;
use crate::relations::Item;

/// Polynomial of degree at most two: `c + Σ a_i x_i + Σ_ij q_ij x_i x_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    pub constant: Scalar,
    pub linear: Vec<Scalar>,
    /// Row-major `n × n` matrix.
    pub quadratic: Vec<Scalar>,
}

impl Poly {
    pub fn zero(n: usize) -> Self {
        Poly {
            constant: ZERO,
            linear: vec![ZERO; n],
            quadratic: vec![ZERO; n * n],
        }
    }

    pub fn affine(linear: Vec<Scalar>, constant: Scalar) -> Self {
        let n = linear.len();
        Poly {
            constant,
            linear,
            quadratic: vec![ZERO; n * n],
        }
    }

    /// Pure quadratic form `xᵀ Q x + c`.
    pub fn quadratic_form(quadratic: Vec<Scalar>, constant: Scalar) -> Self {
        let n = (quadratic.len() as f64).sqrt() as usize;
        Poly {
            constant,
            linear: vec![ZERO; n],
            quadratic,
        }
    }

    pub fn dim(&self) -> usize {
        self.linear.len()
    }

    pub fn q(&self, i: usize, j: usize) -> Scalar {
        self.quadratic[i * self.dim() + j]
    }

    /// True when no quadratic term is present.
    pub fn is_affine(&self) -> bool {
        self.quadratic.iter().all(|&x| x == ZERO)
    }

    pub fn eval(&self, x: &[Scalar]) -> Scalar {
        let n = self.dim();
        let mut v = self.constant;
        for i in 0..n {
            v += self.linear[i] * x[i];
            for j in 0..n {
                let q = self.quadratic[i * n + j];
                if q != ZERO {
                    v += q * x[i] * x[j];
                }
            }
        }
        v
    }

    fn max_coeff(&self) -> f64 {
        std::iter::once(&self.constant)
            .chain(&self.linear)
            .chain(&self.quadratic)
            .map(|x| x.norm())
            .fold(0.0, f64::max)
    }

    /// Substitutes `x = x0 + T·f` and returns the polynomial in `f`.
    fn substitute(&self, x0: &[Scalar], t: &[Vec<Scalar>], free: usize) -> Poly {
        let n = self.dim();
        let mut out = Poly::zero(free);
        out.constant = self.eval(x0);
        // gradient at x0
        let grad: Vec<Scalar> = (0..n)
            .map(|i| {
                let mut g = self.linear[i];
                for j in 0..n {
                    g += (self.q(i, j) + self.q(j, i)) * x0[j];
                }
                g
            })
            .collect();
        for a in 0..free {
            out.linear[a] = (0..n).map(|i| grad[i] * t[i][a]).sum();
            for b in 0..free {
                let mut s = ZERO;
                for i in 0..n {
                    if t[i][a] == ZERO {
                        continue;
                    }
                    for j in 0..n {
                        s += self.q(i, j) * t[i][a] * t[j][b];
                    }
                }
                out.quadratic[a * free + b] = s;
            }
        }
        out
    }

    fn depends_on(&self, v: usize, eps: f64) -> bool {
        let n = self.dim();
        !is_less_than_epsilon(self.linear[v], eps)
            || (0..n).any(|j| {
                !is_less_than_epsilon(self.q(v, j), eps) || !is_less_than_epsilon(self.q(j, v), eps)
            })
    }
}

/// Result of solving for one unknown cycle.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolutionSet {
    /// Distinct solutions, each num-normalised.
    pub cycles: Vec<Cycle>,
    /// Number of free parameters left; nonzero means underdetermined and
    /// `cycles` is empty.
    pub free: usize,
}

impl SolutionSet {
    pub fn underdetermined(free: usize) -> Self {
        SolutionSet {
            cycles: Vec::new(),
            free,
        }
    }

    pub fn is_underdetermined(&self) -> bool {
        self.free > 0
    }
}

/// Raw solver output in unknown coordinates.
struct Raw {
    candidates: Vec<Vec<Scalar>>,
    free: usize,
}

impl Raw {
    fn empty() -> Self {
        Raw {
            candidates: Vec::new(),
            free: 0,
        }
    }
}

/// Solves a conjunction of condition items for a cycle of dimension `dim`.
pub fn evaluate_cycle(items: &[Item], dim: usize, eps: f64) -> SolutionSet {
    let mut equations = Vec::new();
    let mut predicates = Vec::new();
    let mut produced = Vec::new();
    for item in items {
        match item {
            Item::Equation(p) => equations.push(p.clone()),
            Item::Predicate(p) => predicates.push(p),
            Item::Produced(c) => produced.push(c.clone()),
        }
    }
    if equations.is_empty() && produced.is_empty() {
        return SolutionSet::underdetermined(dim + 2);
    }

    let mut raw = Vec::new();
    if !equations.is_empty() {
        let solved = solve_equations(&equations, dim + 2, eps);
        if solved.free > 0 {
            return SolutionSet::underdetermined(solved.free);
        }
        raw.extend(solved.candidates.iter().map(|x| Cycle::from_unknowns(x)));
    }
    raw.extend(produced);

    let accepted = raw
        .into_iter()
        .filter(|c| c.coefficients().any(|x| x.norm() >= eps))
        .map(|c| c.num_normalize(eps))
        .filter(|c| predicates.iter().all(|p| p.holds(c, eps)))
        .collect();
    SolutionSet {
        cycles: unique_cycle(accepted, eps),
        free: 0,
    }
}

/// Keeps the first representative of every class of almost equal cycles.
pub fn unique_cycle(cycles: Vec<Cycle>, eps: f64) -> Vec<Cycle> {
    let mut out: Vec<Cycle> = Vec::with_capacity(cycles.len());
    for c in cycles {
        if !out.iter().any(|o| o.is_almost_equal(&c, eps)) {
            out.push(c);
        }
    }
    out
}

fn solve_equations(equations: &[Poly], n: usize, eps: f64) -> Raw {
    let (linear, nonlinear): (Vec<&Poly>, Vec<&Poly>) = equations.iter().partition(|p| p.is_affine());

    let (x0, t, free) = if linear.is_empty() {
        let t = (0..n)
            .map(|i| (0..n).map(|j| if i == j { ONE } else { ZERO }).collect())
            .collect();
        (vec![ZERO; n], t, n)
    } else {
        let rows = linear.iter().map(|p| p.linear.clone()).collect();
        let rhs = linear.iter().map(|p| -p.constant).collect();
        let red = linalg::reduce(rows, rhs, eps);
        if !red.consistent {
            return Raw::empty();
        }
        let mut x0 = vec![ZERO; n];
        let mut t = vec![vec![ZERO; red.free.len()]; n];
        for &(row, col) in &red.pivots {
            x0[col] = red.rhs[row];
        }
        for (a, &fc) in red.free.iter().enumerate() {
            t[fc][a] = ONE;
            for &(row, col) in &red.pivots {
                t[col][a] = -red.a[row][fc];
            }
        }
        let free = red.free.len();
        (x0, t, free)
    };

    let at = |f: &[Scalar]| -> Vec<Scalar> {
        (0..n)
            .map(|i| x0[i] + (0..free).map(|a| t[i][a] * f[a]).sum::<Scalar>())
            .collect()
    };

    let reduced: Vec<Poly> = nonlinear.iter().map(|p| p.substitute(&x0, &t, free)).collect();
    let Some(first) = reduced.iter().position(|q| q.max_coeff() >= eps) else {
        // Only linear information is left.
        let homogeneous = x0.iter().all(|&x| is_less_than_epsilon(x, eps));
        let left = free - usize::from(homogeneous && free > 0);
        if left > 0 {
            return Raw {
                candidates: Vec::new(),
                free: left,
            };
        }
        let candidate = if homogeneous {
            if free == 1 {
                at(&[ONE])
            } else {
                return Raw::empty();
            }
        } else {
            x0.clone()
        };
        return Raw {
            candidates: vec![candidate],
            free: 0,
        };
    };

    let q = &reduced[first];
    let mut params: Vec<Vec<Scalar>> = Vec::new();
    let mut left = 0;
    if free == 0 {
        params.push(Vec::new());
    } else {
        let mut quadratic = false;
        for i in 0..free {
            let a = q.q(i, i);
            if is_less_than_epsilon(a, eps) {
                continue;
            }
            quadratic = true;
            let pin = (free > 1).then(|| if i == 0 { 1 } else { 0 });
            let b = q.linear[i] + pin.map_or(ZERO, |p| q.q(i, p) + q.q(p, i));
            let c = q.constant + pin.map_or(ZERO, |p| q.linear[p] + q.q(p, p));
            for root in quadratic_roots(a, b, c, eps) {
                let mut f = vec![ZERO; free];
                f[i] = root;
                if let Some(p) = pin {
                    f[p] = ONE;
                }
                params.push(f);
            }
            left = free.saturating_sub(2);
            break;
        }
        if !quadratic {
            if free > 1 {
                let mut solve_with = |unknown: usize, pinned: usize| {
                    if !q.depends_on(unknown, eps) {
                        return;
                    }
                    let b = q.linear[unknown] + q.q(unknown, pinned) + q.q(pinned, unknown);
                    let c = q.constant + q.linear[pinned] + q.q(pinned, pinned);
                    if is_less_than_epsilon(b, eps) {
                        return;
                    }
                    let mut f = vec![ZERO; free];
                    f[pinned] = ONE;
                    f[unknown] = -c / b;
                    params.push(f);
                };
                solve_with(1, 0);
                solve_with(0, 1);
                left = free - 2;
            } else {
                let (b, c) = (q.linear[0], q.constant);
                if !is_less_than_epsilon(q.q(0, 0), eps) || is_less_than_epsilon(b, eps) {
                    return Raw::empty();
                }
                params.push(vec![-c / b]);
            }
        }
    }
    if left > 0 {
        return Raw {
            candidates: Vec::new(),
            free: left,
        };
    }

    let candidates = params
        .iter()
        .map(|f| at(f))
        .filter(|x| {
            let snapped: Vec<Scalar> = x
                .iter()
                .map(|z| {
                    let s = |v: f64| if v.abs() < eps { 0.0 } else { v };
                    Scalar::new(s(z.re), s(z.im))
                })
                .collect();
            nonlinear.iter().enumerate().all(|(j, p)| {
                (j == first && free > 0)
                    || is_less_than_epsilon(p.eval(x), eps)
                    || is_less_than_epsilon(p.eval(&snapped), eps)
            })
        })
        .collect();
    Raw {
        candidates,
        free: 0,
    }
}

/// Roots of `a f² + b f + c` in the order `(−b+√D)/2a`, `(−b−√D)/2a`, with
/// the double-root and almost-linear special cases.
fn quadratic_roots(a: Scalar, b: Scalar, c: Scalar, eps: f64) -> Vec<Scalar> {
    let d = b * b - a * c * 4.0;
    // measured against the size of its terms, so rounding in large
    // coefficients does not split a double root
    let scale = (b * b).norm().max((a * c * 4.0).norm()).max(1.0);
    if is_less_than_epsilon(d / scale, eps) {
        return vec![-b / (a * 2.0)];
    }
    if !is_less_than_epsilon(b, eps) && is_less_than_epsilon(a / b, eps) {
        return vec![-c / b];
    }
    let sd = d.sqrt();
    let plus = -b + sd;
    let minus = -b - sd;
    // Use the larger of the two numerators to avoid cancellation; the other
    // root follows from the product of roots c/a.
    if plus.norm() >= minus.norm() {
        let r1 = plus / (a * 2.0);
        let r2 = (c * 2.0) / plus;
        vec![r1, r2]
    } else {
        let r2 = minus / (a * 2.0);
        let r1 = (c * 2.0) / minus;
        vec![r1, r2]
    }
}
