//! Scalars, diagonal metrics, a dense Clifford algebra over at most four
//! generators, and 2×2 matrices with Clifford entries acting on cycles.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::cycle::Cycle;
use crate::error::{Error, Result};
use crate::linalg;

/// Coefficient field: complex numbers, so that imaginary solutions exist.
pub type Scalar = Complex64;

/// Default comparison tolerance.
pub const DEFAULT_EPSILON: f64 = 1e-8;

/// Largest supported dimension.
pub const MAX_DIM: usize = 4;

pub(crate) const ZERO: Scalar = Scalar::new(0.0, 0.0);
pub(crate) const ONE: Scalar = Scalar::new(1.0, 0.0);

/// True iff `x` is exactly zero or smaller than `eps` in modulus.
pub fn is_less_than_epsilon(x: Scalar, eps: f64) -> bool {
    x == ZERO || x.norm() < eps
}

pub(crate) fn real(x: f64) -> Scalar {
    Scalar::new(x, 0.0)
}

/// Diagonal signature `σ_i = e_i²`.
#[derive(Clone, Debug, PartialEq)]
pub struct Metric(Vec<f64>);

impl Metric {
    pub fn new(sigma: Vec<f64>) -> Result<Self> {
        if sigma.is_empty() || sigma.len() > MAX_DIM {
            return Err(Error::InvalidMetric(format!(
                "dimension {} outside 1..={MAX_DIM}",
                sigma.len()
            )));
        }
        if sigma.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidMetric("non-finite entry".into()));
        }
        Ok(Metric(sigma))
    }

    /// Euclidean point space: all entries −1.
    pub fn elliptic(n: usize) -> Self {
        Metric(vec![-1.0; n.clamp(1, MAX_DIM)])
    }

    pub fn hyperbolic() -> Self {
        Metric(vec![-1.0, 1.0])
    }

    pub fn parabolic() -> Self {
        Metric(vec![-1.0, 0.0])
    }

    pub fn sigma(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Cycle-space metric paired with this point-space metric:
    /// `σ̆_i = −χ(−σ_i)` with `χ(t) = 1` for `t ≥ 0` and `−1` otherwise.
    pub fn default_cycle_metric(&self) -> Metric {
        let chi = |t: f64| if t >= 0.0 { 1.0 } else { -1.0 };
        Metric(self.0.iter().map(|&s| -chi(-s)).collect())
    }

    /// Factor relating stored vector coefficients of a cycle to the vector
    /// entry of its matrix; an involution for `σ_i = ±1`.
    pub(crate) fn orientation(&self, i: usize) -> f64 {
        let s = self.0[i];
        if s == 0.0 {
            1.0
        } else {
            -s.signum()
        }
    }

    fn blades(&self) -> usize {
        1 << self.dim()
    }
}

/// Sign and metric factor of the product of two basis blades (bit masks).
fn blade_product(a: usize, b: usize, metric: &Metric) -> f64 {
    let mut swaps = 0;
    let mut s = a >> 1;
    while s != 0 {
        swaps += (s & b).count_ones();
        s >>= 1;
    }
    let mut factor = if swaps % 2 == 0 { 1.0 } else { -1.0 };
    let common = a & b;
    for (i, sigma) in metric.sigma().iter().enumerate() {
        if common & (1 << i) != 0 {
            factor *= sigma;
        }
    }
    factor
}

fn grade(blade: usize) -> usize {
    blade.count_ones() as usize
}

/// Element of the Clifford algebra, dense over all `2^n` blades. Blade index
/// `b` is the bit mask of the generators in increasing order.
#[derive(Clone, Debug, PartialEq)]
pub struct CliffordElement {
    coeffs: Vec<Scalar>,
    metric: Metric,
}

impl CliffordElement {
    pub fn zero(metric: &Metric) -> Self {
        CliffordElement {
            coeffs: vec![ZERO; metric.blades()],
            metric: metric.clone(),
        }
    }

    pub fn scalar(s: Scalar, metric: &Metric) -> Self {
        let mut x = Self::zero(metric);
        x.coeffs[0] = s;
        x
    }

    /// The generator `e_i`.
    pub fn basis(i: usize, metric: &Metric) -> Self {
        let mut x = Self::zero(metric);
        x.coeffs[1 << i] = ONE;
        x
    }

    pub fn vector(v: &[Scalar], metric: &Metric) -> Result<Self> {
        if v.len() != metric.dim() {
            return Err(Error::DimensionMismatch {
                expected: metric.dim(),
                found: v.len(),
            });
        }
        let mut x = Self::zero(metric);
        for (i, &vi) in v.iter().enumerate() {
            x.coeffs[1 << i] = vi;
        }
        Ok(x)
    }

    /// Builds an element from dense blade coefficients; missing trailing
    /// coefficients are zero.
    pub fn from_coeffs(c: &[Scalar], metric: &Metric) -> Result<Self> {
        if c.len() > metric.blades() {
            return Err(Error::DimensionMismatch {
                expected: metric.blades(),
                found: c.len(),
            });
        }
        let mut x = Self::zero(metric);
        x.coeffs[..c.len()].copy_from_slice(c);
        Ok(x)
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, blade: usize) -> Scalar {
        self.coeffs[blade]
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.metric != other.metric {
            return Err(Error::MetricMismatch);
        }
        let mut out = Self::zero(&self.metric);
        for (a, &x) in self.coeffs.iter().enumerate() {
            if x == ZERO {
                continue;
            }
            for (b, &y) in other.coeffs.iter().enumerate() {
                if y == ZERO {
                    continue;
                }
                let f = blade_product(a, b, &self.metric);
                if f != 0.0 {
                    out.coeffs[a ^ b] += x * y * f;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.metric != other.metric {
            return Err(Error::MetricMismatch);
        }
        Ok(self.zip(other, |x, y| x + y))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.metric != other.metric {
            return Err(Error::MetricMismatch);
        }
        Ok(self.zip(other, |x, y| x - y))
    }

    fn zip(&self, other: &Self, f: impl Fn(Scalar, Scalar) -> Scalar) -> Self {
        CliffordElement {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&x, &y)| f(x, y))
                .collect(),
            metric: self.metric.clone(),
        }
    }

    fn map_blades(&self, f: impl Fn(usize, Scalar) -> Scalar) -> Self {
        CliffordElement {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(b, &x)| f(b, x))
                .collect(),
            metric: self.metric.clone(),
        }
    }

    pub fn scale(&self, s: Scalar) -> Self {
        self.map_blades(|_, x| x * s)
    }

    /// `x*`: fixes vectors and reverses products.
    pub fn reversion(&self) -> Self {
        self.map_blades(|b, x| {
            let r = grade(b);
            if (r * r.saturating_sub(1) / 2) % 2 == 0 {
                x
            } else {
                -x
            }
        })
    }

    /// `x̄`: negates vectors and reverses products.
    pub fn conjugation(&self) -> Self {
        self.map_blades(|b, x| {
            let r = grade(b);
            if (r + r * r.saturating_sub(1) / 2) % 2 == 0 {
                x
            } else {
                -x
            }
        })
    }

    pub fn grade_part(&self, g: usize) -> Self {
        self.map_blades(|b, x| if grade(b) == g { x } else { ZERO })
    }

    pub fn scalar_part(&self) -> Scalar {
        self.coeffs[0]
    }

    pub fn vector_part(&self) -> Vec<Scalar> {
        (0..self.metric.dim()).map(|i| self.coeffs[1 << i]).collect()
    }

    /// Largest modulus among coefficients outside grade `g`.
    pub fn residual_outside(&self, g: usize) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(b, _)| grade(*b) != g)
            .map(|(_, x)| x.norm())
            .fold(0.0, f64::max)
    }

    pub fn max_norm(&self) -> f64 {
        self.coeffs.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// Two-sided inverse, found by solving the left-multiplication system.
    pub fn inverse(&self, eps: f64) -> Result<Self> {
        let n = self.metric.blades();
        let mut rows = vec![vec![ZERO; n]; n];
        for (a, &x) in self.coeffs.iter().enumerate() {
            for b in 0..n {
                let f = blade_product(a, b, &self.metric);
                rows[a ^ b][b] += x * f;
            }
        }
        let mut rhs = vec![ZERO; n];
        rhs[0] = ONE;
        let sol = linalg::solve_square(rows, rhs, eps).ok_or(Error::SingularDenominator)?;
        let inv = CliffordElement {
            coeffs: sol,
            metric: self.metric.clone(),
        };
        let check = inv.mul(self)?;
        let err = check
            .coeffs
            .iter()
            .enumerate()
            .map(|(b, &x)| if b == 0 { (x - ONE).norm() } else { x.norm() })
            .fold(0.0, f64::max);
        if err > eps.sqrt() {
            return Err(Error::SingularDenominator);
        }
        Ok(inv)
    }
}

impl Add for &CliffordElement {
    type Output = CliffordElement;
    fn add(self, rhs: Self) -> CliffordElement {
        CliffordElement::add(self, rhs).expect("metric mismatch")
    }
}

impl Sub for &CliffordElement {
    type Output = CliffordElement;
    fn sub(self, rhs: Self) -> CliffordElement {
        CliffordElement::sub(self, rhs).expect("metric mismatch")
    }
}

impl Mul for &CliffordElement {
    type Output = CliffordElement;
    fn mul(self, rhs: Self) -> CliffordElement {
        CliffordElement::mul(self, rhs).expect("metric mismatch")
    }
}

impl Neg for &CliffordElement {
    type Output = CliffordElement;
    fn neg(self) -> CliffordElement {
        self.scale(-ONE)
    }
}

/// 2×2 matrix `[[a, b], [c, d]]` with Clifford entries.
#[derive(Clone, Debug, PartialEq)]
pub struct FscMatrix {
    pub a: CliffordElement,
    pub b: CliffordElement,
    pub c: CliffordElement,
    pub d: CliffordElement,
}

impl FscMatrix {
    pub fn new(
        a: CliffordElement,
        b: CliffordElement,
        c: CliffordElement,
        d: CliffordElement,
    ) -> Result<Self> {
        let m = a.metric();
        if b.metric() != m || c.metric() != m || d.metric() != m {
            return Err(Error::MetricMismatch);
        }
        Ok(FscMatrix { a, b, c, d })
    }

    pub fn identity(metric: &Metric) -> Self {
        FscMatrix {
            a: CliffordElement::scalar(ONE, metric),
            b: CliffordElement::zero(metric),
            c: CliffordElement::zero(metric),
            d: CliffordElement::scalar(ONE, metric),
        }
    }

    pub fn metric(&self) -> &Metric {
        self.a.metric()
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        Ok(FscMatrix {
            a: self.a.mul(&o.a)?.add(&self.b.mul(&o.c)?)?,
            b: self.a.mul(&o.b)?.add(&self.b.mul(&o.d)?)?,
            c: self.c.mul(&o.a)?.add(&self.d.mul(&o.c)?)?,
            d: self.c.mul(&o.b)?.add(&self.d.mul(&o.d)?)?,
        })
    }

    /// `M* = [[d̄, b̄], [c̄, ā]]`.
    pub fn star(&self) -> Self {
        FscMatrix {
            a: self.d.conjugation(),
            b: self.b.conjugation(),
            c: self.c.conjugation(),
            d: self.a.conjugation(),
        }
    }

    /// `M̄ = [[d*, −b*], [−c*, a*]]`, so that `M·M̄ = δ·1`.
    pub fn bar(&self) -> Self {
        FscMatrix {
            a: self.d.reversion(),
            b: -&self.b.reversion(),
            c: -&self.c.reversion(),
            d: self.a.reversion(),
        }
    }

    /// `δ = a d* − b c*`.
    pub fn pseudodeterminant(&self) -> CliffordElement {
        &(&self.a * &self.d.reversion()) - &(&self.b * &self.c.reversion())
    }

    /// Matrix of a cycle: `[[l, m], [k, l̄]]`. The vector entry carries the
    /// coefficients in the orientation the point-space action expects.
    pub fn from_cycle(cycle: &Cycle, metric: &Metric) -> Result<Self> {
        check_dim(cycle.dim(), metric)?;
        let l: Vec<Scalar> = cycle
            .l()
            .iter()
            .enumerate()
            .map(|(i, &x)| x * metric.orientation(i))
            .collect();
        let lv = CliffordElement::vector(&l, metric)?;
        Ok(FscMatrix {
            b: CliffordElement::scalar(cycle.m(), metric),
            c: CliffordElement::scalar(cycle.k(), metric),
            d: lv.conjugation(),
            a: lv,
        })
    }

    /// Reads `(k, l, m)` back from a cycle matrix, checking that the entries
    /// have the right grades.
    pub fn to_cycle(&self, eps: f64) -> Result<Cycle> {
        let scale = [&self.a, &self.b, &self.c, &self.d]
            .iter()
            .map(|x| x.max_norm())
            .fold(0.0, f64::max)
            .max(1.0);
        let residual = [
            self.a.residual_outside(1),
            self.b.residual_outside(0),
            self.c.residual_outside(0),
            (&self.d + &self.a).max_norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        if residual >= eps * scale {
            return Err(Error::GradeResidual(residual / scale));
        }
        Ok(self.cycle_parts())
    }

    /// Cycle coefficients read from the entries without any grade check.
    pub(crate) fn cycle_parts(&self) -> Cycle {
        let metric = self.metric();
        let l = self
            .a
            .vector_part()
            .into_iter()
            .enumerate()
            .map(|(i, x)| x * metric.orientation(i))
            .collect();
        Cycle::new(self.c.scalar_part(), l, self.b.scalar_part())
    }

    /// `M·C·M*` as a cycle.
    pub fn similarity(&self, cycle: &Cycle, eps: f64) -> Result<Cycle> {
        let c = FscMatrix::from_cycle(cycle, self.metric())?;
        self.mul(&c)?.mul(&self.star())?.to_cycle(eps)
    }

    /// Image of a point under `x ↦ (a x + b)(c x + d)⁻¹`.
    pub fn moebius_point(&self, x: &[f64], eps: f64) -> Result<Vec<f64>> {
        let metric = self.metric();
        let xs: Vec<Scalar> = x.iter().map(|&v| real(v)).collect();
        let xv = CliffordElement::vector(&xs, metric)?;
        let num = &(&self.a * &xv) + &self.b;
        let den = &(&self.c * &xv) + &self.d;
        let y = num.mul(&den.inverse(eps)?)?;
        let scale = y.max_norm().max(1.0);
        if y.residual_outside(1) >= eps.sqrt() * scale {
            return Err(Error::GradeResidual(y.residual_outside(1)));
        }
        let v = y.vector_part();
        if v.iter().any(|z| z.im.abs() >= eps.sqrt() * scale) {
            return Err(Error::NotReal);
        }
        Ok(v.iter().map(|z| z.re).collect())
    }
}

/// `[[a, b e_0], [−c e_0, d]]`, a two-dimensional lift of a real 2×2 matrix.
pub fn sl2_lift(a: Scalar, b: Scalar, c: Scalar, d: Scalar, metric: &Metric, eps: f64) -> Result<FscMatrix> {
    if metric.dim() != 2 {
        return Err(Error::Sl2Dimension(metric.dim()));
    }
    if [a, b, c, d].iter().any(|x| x.im.abs() >= eps) {
        return Err(Error::NotReal);
    }
    let e0 = CliffordElement::basis(0, metric);
    Ok(FscMatrix {
        a: CliffordElement::scalar(real(a.re), metric),
        b: e0.scale(real(b.re)),
        c: e0.scale(real(-c.re)),
        d: CliffordElement::scalar(real(d.re), metric),
    })
}

pub(crate) fn check_dim(n: usize, metric: &Metric) -> Result<()> {
    if n != metric.dim() {
        return Err(Error::DimensionMismatch {
            expected: metric.dim(),
            found: n,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Scalar, b: f64) -> bool {
        (a - real(b)).norm() < 1e-12
    }

    #[test]
    fn generator_squares() {
        let m = Metric::elliptic(2);
        let e0 = CliffordElement::basis(0, &m);
        assert!(close((&e0 * &e0).scalar_part(), -1.0));
        let p = Metric::new(vec![1.0]).unwrap();
        let x = CliffordElement::basis(0, &p).scale(real(2.0));
        let y = CliffordElement::basis(0, &p).scale(real(3.0));
        assert!(close((&x * &y).scalar_part(), 6.0));
    }

    #[test]
    fn anticommutation() {
        let m = Metric::elliptic(2);
        let e0 = CliffordElement::basis(0, &m);
        let e1 = CliffordElement::basis(1, &m);
        assert_eq!(&e0 * &e1, -&(&e1 * &e0));
    }

    #[test]
    fn conjugation_of_bivector() {
        let m = Metric::elliptic(2);
        let e01 = &CliffordElement::basis(0, &m) * &CliffordElement::basis(1, &m);
        assert_eq!(e01.conjugation(), -&e01);
        assert_eq!(e01.reversion(), -&e01);
        let e0 = CliffordElement::basis(0, &m);
        assert_eq!(e0.reversion(), e0);
        assert_eq!(e0.conjugation(), -&e0);
    }

    #[test]
    fn default_cycle_metrics() {
        assert_eq!(Metric::elliptic(2).default_cycle_metric().sigma(), &[-1.0, -1.0]);
        assert_eq!(Metric::parabolic().default_cycle_metric().sigma(), &[-1.0, -1.0]);
        assert_eq!(Metric::hyperbolic().default_cycle_metric().sigma(), &[-1.0, 1.0]);
    }

    #[test]
    fn inverse_of_even_element() {
        let m = Metric::hyperbolic();
        let x = CliffordElement::from_coeffs(&[real(2.0), ZERO, ZERO, real(0.5)], &m).unwrap();
        let inv = x.inverse(1e-12).unwrap();
        let p = &x * &inv;
        assert!(close(p.scalar_part(), 1.0));
        assert!(p.residual_outside(0) < 1e-12);
    }
}
