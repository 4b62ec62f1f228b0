//! Exact reference solutions for "three linear equations plus one quadratic"
//! in the four unknowns `[m, l_0, l_1, k]` of a plane cycle.

use cycles::relations::Item;
use cycles::solver::Poly;
use cycles::{Cycle, Scalar};
use num::{BigInt, BigRational, Signed, ToPrimitive, Zero};
use rand::Rng;

type Q = BigRational;

const N: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    Generic,
    DoubleRoot,
    AlmostLinear,
}

/// `rows·x = rhs` together with `xᵀ quad x + lin·x + constant = 0`.
#[derive(Clone, Debug)]
pub struct Instance {
    pub regime: Regime,
    pub rows: [[i64; N]; 3],
    pub rhs: [i64; 3],
    pub quad: [[Q; N]; N],
    pub lin: [Q; N],
    pub constant: Q,
}

fn q(x: i64) -> Q {
    Q::from_integer(BigInt::from(x))
}

fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap()
}

fn small(rng: &mut impl Rng) -> i64 {
    rng.gen_range(-4..=4)
}

fn vector(rng: &mut impl Rng) -> [i64; N] {
    std::array::from_fn(|_| small(rng))
}

/// Line `x0 + t·f` solving the linear part, or `None` when its rank is below three.
fn solve_linear(rows: &[[i64; N]; 3], rhs: &[i64; 3]) -> Option<([Q; N], [Q; N])> {
    let mut a: Vec<Vec<Q>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, &b)| r.iter().map(|&x| q(x)).chain([q(b)]).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..N {
        let Some(p) = (row..3).find(|&i| !a[i][col].is_zero()) else { continue };
        a.swap(row, p);
        let lead = a[row][col].clone();
        for x in a[row].iter_mut() {
            *x = &*x / &lead;
        }
        for i in 0..3 {
            if i != row && !a[i][col].is_zero() {
                let factor = a[i][col].clone();
                for j in 0..=N {
                    let d = &factor * &a[row][j];
                    a[i][j] -= d;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == 3 {
            break;
        }
    }
    if pivots.len() < 3 {
        return None;
    }
    let free = (0..N).find(|c| !pivots.contains(c)).unwrap();
    let mut x0: [Q; N] = std::array::from_fn(|_| Q::zero());
    let mut f: [Q; N] = std::array::from_fn(|_| Q::zero());
    f[free] = q(1);
    for (r, &c) in pivots.iter().enumerate() {
        x0[c] = a[r][N].clone();
        f[c] = -a[r][free].clone();
    }
    Some((x0, f))
}

impl Instance {
    /// Random instance of the given regime, drawn until its linear part has rank three.
    pub fn random(rng: &mut impl Rng, regime: Regime) -> Self {
        loop {
            let rows = [vector(rng), vector(rng), vector(rng)];
            // roughly half the equations are homogeneous
            let rhs = std::array::from_fn(|_| if rng.gen_bool(0.5) { 0 } else { small(rng) });
            if solve_linear(&rows, &rhs).is_none() {
                continue;
            }
            let (quad, lin, constant) = match regime {
                Regime::Generic | Regime::AlmostLinear => {
                    let scale = if regime == Regime::AlmostLinear { Q::new(BigInt::from(1), BigInt::from(10).pow(10)) } else { q(1) };
                    let quad = std::array::from_fn(|i| std::array::from_fn(|j| if i <= j { q(small(rng)) * &scale } else { Q::zero() }));
                    (quad, vector(rng).map(q), q(small(rng)))
                }
                Regime::DoubleRoot => {
                    // (w·x − s)² + (row·x − rhs)(g·x + h) is a perfect square on the line
                    let (w, s, g, h) = (vector(rng), small(rng), vector(rng), small(rng));
                    let i = rng.gen_range(0..3);
                    let (row, b) = (rows[i], rhs[i]);
                    let quad = std::array::from_fn(|a| std::array::from_fn(|c| q(w[a] * w[c] + row[a] * g[c])));
                    let lin = std::array::from_fn(|a| q(-2 * s * w[a] + h * row[a] - b * g[a]));
                    (quad, lin, q(s * s - b * h))
                }
            };
            let inst = Instance { regime, rows, rhs, quad, lin, constant };
            let (a, b, _) = inst.restricted();
            let usable = match regime {
                Regime::Generic | Regime::DoubleRoot => !a.is_zero(),
                // keep the quadratic part clearly below the tolerance
                Regime::AlmostLinear => {
                    !b.is_zero() && to_f64(&a).abs() < 1e-9 && (to_f64(&a) / to_f64(&b)).abs() < 1e-9
                }
            };
            if usable {
                return inst;
            }
        }
    }

    /// Coefficients `A f² + B f + C` of the quadratic along the solution line.
    fn restricted(&self) -> (Q, Q, Q) {
        let (x0, f) = solve_linear(&self.rows, &self.rhs).unwrap();
        let form = |u: &[Q; N], v: &[Q; N]| {
            let mut s = Q::zero();
            for i in 0..N {
                for j in 0..N {
                    s += &self.quad[i][j] * &u[i] * &v[j];
                }
            }
            s
        };
        let dot = |u: &[Q; N]| u.iter().zip(&self.lin).fold(Q::zero(), |s, (a, b)| s + a * b);
        let a = form(&f, &f);
        let b = form(&x0, &f) + form(&f, &x0) + dot(&f);
        let c = form(&x0, &x0) + dot(&x0) + &self.constant;
        (a, b, c)
    }

    /// Condition items as handed to the solver.
    pub fn items(&self) -> Vec<Item> {
        let r = |x: f64| Scalar::new(x, 0.0);
        let mut items: Vec<Item> = self
            .rows
            .iter()
            .zip(self.rhs)
            .map(|(row, b)| Item::Equation(Poly::affine(row.iter().map(|&x| r(x as f64)).collect(), r(-b as f64))))
            .collect();
        items.push(Item::Equation(Poly {
            constant: r(to_f64(&self.constant)),
            linear: self.lin.iter().map(|x| r(to_f64(x))).collect(),
            quadratic: self.quad.iter().flatten().map(|x| r(to_f64(x))).collect(),
        }));
        items
    }

    /// Expected solutions, classified by the same double-root and
    /// almost-linear rules as the solver, evaluated on exact coefficients.
    pub fn expected(&self, eps: f64) -> Vec<Cycle> {
        let (x0, f) = solve_linear(&self.rows, &self.rhs).unwrap();
        let (a, b, c) = self.restricted();
        let disc = &b * &b - q(4) * &a * &c;
        let (af, bf, cf) = (to_f64(&a), to_f64(&b), to_f64(&c));
        let scale = (bf * bf).max((4.0 * af * cf).abs()).max(1.0);
        let roots: Vec<Scalar> = if to_f64(&disc).abs() / scale < eps {
            vec![Scalar::new(-bf / (2.0 * af), 0.0)]
        } else if !b.is_zero() && (af.abs() < eps || (af / bf).abs() < eps) {
            vec![Scalar::new(-cf / bf, 0.0)]
        } else {
            let sd = if disc.is_negative() {
                Scalar::new(0.0, (-to_f64(&disc)).sqrt())
            } else {
                Scalar::new(to_f64(&disc).sqrt(), 0.0)
            };
            [sd, -sd].map(|s| (s - bf) / (2.0 * af)).to_vec()
        };
        roots
            .into_iter()
            .map(|t| {
                let x: Vec<Scalar> = (0..N).map(|i| Scalar::new(to_f64(&x0[i]), 0.0) + t * to_f64(&f[i])).collect();
                Cycle::from_unknowns(&x)
            })
            .filter(|c| c.coefficients().any(|x| x.norm() >= eps))
            .fold(Vec::new(), |mut out: Vec<Cycle>, c| {
                // roots on a line through the origin can share a class
                if !out.iter().any(|o| o.is_almost_equal(&c, eps)) {
                    out.push(c);
                }
                out
            })
    }
}

/// Draws the regime with weights 60/20/20.
pub fn random_regime(rng: &mut impl Rng) -> Regime {
    match rng.gen_range(0..10) {
        0..=5 => Regime::Generic,
        6 | 7 => Regime::DoubleRoot,
        _ => Regime::AlmostLinear,
    }
}

/// Same multiset of projective classes within `tol`.
pub fn same_classes(got: &[Cycle], want: &[Cycle], tol: f64) -> bool {
    got.len() == want.len()
        && want.iter().all(|w| got.iter().any(|g| g.is_almost_equal(w, tol)))
        && got.iter().all(|g| want.iter().any(|w| g.is_almost_equal(w, tol)))
}
