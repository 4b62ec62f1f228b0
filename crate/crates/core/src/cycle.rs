//! The cycle value type.

use crate::algebra::{check_dim, is_less_than_epsilon, real, Metric, Scalar, ONE, ZERO};
use crate::error::{Error, Result};

/// A quadric `k·(x,x) − 2·(l,x) + m = 0` stored projectively as `(k, l, m)`.
///
/// `C` and `λC` denote the same cycle for any nonzero `λ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cycle {
    k: Scalar,
    l: Vec<Scalar>,
    m: Scalar,
}

impl Cycle {
    pub fn new(k: Scalar, l: Vec<Scalar>, m: Scalar) -> Self {
        Cycle { k, l, m }
    }

    pub fn from_real(k: f64, l: &[f64], m: f64) -> Self {
        Cycle {
            k: real(k),
            l: l.iter().map(|&x| real(x)).collect(),
            m: real(m),
        }
    }

    /// The line `x_{n−1} = 0`.
    pub fn real_line(n: usize) -> Self {
        let mut l = vec![ZERO; n];
        l[n - 1] = ONE;
        Cycle { k: ZERO, l, m: ZERO }
    }

    /// The zero-radius cycle at infinity.
    pub fn infinity(n: usize) -> Self {
        Cycle {
            k: ZERO,
            l: vec![ZERO; n],
            m: ONE,
        }
    }

    /// Cycle with the given center and squared radius, `k = 1`.
    pub fn from_center_radius_sq(center: &[f64], r2: f64, metric: &Metric) -> Result<Self> {
        check_dim(center.len(), metric)?;
        let l: Vec<f64> = center
            .iter()
            .enumerate()
            .map(|(i, &c)| c * metric.orientation(i))
            .collect();
        let self_l: f64 = l.iter().zip(metric.sigma()).map(|(x, s)| s * x * x).sum();
        Ok(Cycle::from_real(1.0, &l, -r2 - self_l))
    }

    pub fn k(&self) -> Scalar {
        self.k
    }

    pub fn l(&self) -> &[Scalar] {
        &self.l
    }

    pub fn m(&self) -> Scalar {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.l.len()
    }

    /// Coefficients in solver order `[m, l_0, …, l_{n−1}, k]`.
    pub fn to_unknowns(&self) -> Vec<Scalar> {
        let mut v = Vec::with_capacity(self.dim() + 2);
        v.push(self.m);
        v.extend_from_slice(&self.l);
        v.push(self.k);
        v
    }

    /// Inverse of [`Cycle::to_unknowns`].
    pub fn from_unknowns(v: &[Scalar]) -> Self {
        let n = v.len() - 2;
        Cycle {
            m: v[0],
            l: v[1..=n].to_vec(),
            k: v[n + 1],
        }
    }

    pub fn coefficients(&self) -> impl Iterator<Item = Scalar> + '_ {
        std::iter::once(self.k)
            .chain(self.l.iter().copied())
            .chain(std::iter::once(self.m))
    }

    fn map(&self, f: impl Fn(Scalar) -> Scalar) -> Self {
        Cycle {
            k: f(self.k),
            l: self.l.iter().map(|&x| f(x)).collect(),
            m: f(self.m),
        }
    }

    pub fn scale(&self, s: Scalar) -> Self {
        self.map(|x| x * s)
    }

    pub fn is_zero(&self, eps: f64) -> bool {
        self.coefficients().all(|x| is_less_than_epsilon(x, eps))
    }

    fn max_abs(&self) -> f64 {
        self.coefficients().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// `2·Σσ_i l1_i l2_i + k1·m2 + k2·m1`.
    pub fn product(&self, other: &Cycle, metric: &Metric) -> Result<Scalar> {
        check_dim(self.dim(), metric)?;
        check_dim(other.dim(), metric)?;
        Ok(self.dot(other, metric))
    }

    pub(crate) fn dot(&self, other: &Cycle, metric: &Metric) -> Scalar {
        let ll: Scalar = self
            .l
            .iter()
            .zip(&other.l)
            .zip(metric.sigma())
            .map(|((&a, &b), &s)| a * b * s)
            .sum();
        ll * 2.0 + self.k * other.m + other.k * self.m
    }

    /// Value of the defining quadratic at a point:
    /// `−k·Σσ_i x_i² − 2·Σ l_i x_i + m`.
    pub fn value_at(&self, x: &[f64], metric: &Metric) -> Result<Scalar> {
        check_dim(x.len(), metric)?;
        check_dim(self.dim(), metric)?;
        let sq: f64 = x.iter().zip(metric.sigma()).map(|(v, s)| s * v * v).sum();
        let lin: Scalar = self.l.iter().zip(x).map(|(&l, &v)| l * v).sum();
        Ok(-self.k * sq - lin * 2.0 + self.m)
    }

    /// Gradient of [`Cycle::value_at`].
    pub fn gradient_at(&self, x: &[f64], metric: &Metric) -> Vec<Scalar> {
        x.iter()
            .zip(metric.sigma())
            .zip(&self.l)
            .map(|((&v, &s), &l)| -self.k * (2.0 * s * v) - l * 2.0)
            .collect()
    }

    /// Divides by the coefficient of largest modulus, so the result no longer
    /// depends on a complex rescaling of the input.
    pub fn unit_scaled(&self) -> Self {
        let mut best = ZERO;
        for x in self.coefficients() {
            if x.norm() > best.norm() {
                best = x;
            }
        }
        if best == ZERO {
            return self.clone();
        }
        self.map(|x| x / best)
    }

    /// Critical point of the defining quadratic, as a real vector.
    pub fn center(&self, metric: &Metric, eps: f64) -> Result<Vec<f64>> {
        check_dim(self.dim(), metric)?;
        let c = self.unit_scaled();
        if is_less_than_epsilon(c.k, eps) {
            return Err(Error::FlatCycle("center"));
        }
        let mut out = Vec::with_capacity(self.dim());
        for (i, &l) in c.l.iter().enumerate() {
            let v = l * metric.orientation(i) / c.k;
            if v.im.abs() >= eps {
                return Err(Error::NotReal);
            }
            out.push(v.re);
        }
        Ok(out)
    }

    /// `−⟨C,C⟩ / (2k²)`.
    pub fn radius_sq(&self, metric: &Metric, eps: f64) -> Result<Scalar> {
        check_dim(self.dim(), metric)?;
        let c = self.unit_scaled();
        if is_less_than_epsilon(c.k, eps) {
            return Err(Error::FlatCycle("radius"));
        }
        Ok(-c.dot(&c, metric) / (c.k * c.k * 2.0))
    }

    pub fn is_zero_radius(&self, metric: &Metric, eps: f64) -> bool {
        let c = self.unit_scaled();
        is_less_than_epsilon(c.dot(&c, metric), eps)
    }

    /// Divides by the first non-negligible coefficient among `k, m, l_0, …`.
    pub fn normalize_projective(&self, eps: f64) -> Self {
        let lead = std::iter::once(self.k)
            .chain(std::iter::once(self.m))
            .chain(self.l.iter().copied())
            .find(|&x| !is_less_than_epsilon(x, eps));
        match lead {
            Some(p) => self.map(|x| x / p),
            None => self.clone(),
        }
    }

    /// Scales so that `⟨C,C⟩ = ±1`.
    pub fn normalize_det(&self, metric: &Metric, eps: f64) -> Result<Self> {
        check_dim(self.dim(), metric)?;
        let u = self.unit_scaled();
        if is_less_than_epsilon(u.dot(&u, metric), eps) {
            return Err(Error::IsotropicCycle);
        }
        let p = self.dot(self, metric);
        Ok(self.map(|x| x / p.norm().sqrt()))
    }

    /// Scales so that `k = 1`.
    pub fn normalize_k(&self, eps: f64) -> Result<Self> {
        if is_less_than_epsilon(self.unit_scaled().k, eps) {
            return Err(Error::FlatCycle("k-normalisation"));
        }
        Ok(self.map(|x| x / self.k))
    }

    /// Divides by the largest coefficient modulus and snaps negligible real
    /// and imaginary parts to zero.
    pub fn num_normalize(&self, eps: f64) -> Self {
        let r = self.max_abs();
        if r < eps {
            return self.clone();
        }
        self.map(|x| x / r).snapped(eps)
    }

    /// Snaps negligible real and imaginary parts to exact zeros.
    pub fn snapped(&self, eps: f64) -> Self {
        let snap = |v: f64| if v.abs() < eps { 0.0 } else { v };
        self.map(|x| Scalar::new(snap(x.re), snap(x.im)))
    }

    fn cross_ratios_vanish(&self, other: &Cycle, zero: impl Fn(Scalar) -> bool) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        let a: Vec<Scalar> = self.coefficients().collect();
        let b: Vec<Scalar> = other.coefficients().collect();
        let pivot = (0..a.len())
            .max_by(|&i, &j| a[i].norm().total_cmp(&a[j].norm()).then(j.cmp(&i)))
            .unwrap_or(0);
        if zero(a[pivot]) || zero(b[pivot]) {
            return zero(a[pivot]) && zero(b[pivot]) && a.iter().chain(&b).all(|&x| zero(x));
        }
        (0..a.len()).all(|i| zero(a[i] * b[pivot] - b[i] * a[pivot]))
    }

    /// Exact projective equality: all cross products `a_i b_j − b_i a_j` vanish.
    pub fn is_projectively_equal(&self, other: &Cycle) -> bool {
        self.cross_ratios_vanish(other, |x| x == ZERO)
    }

    /// Projective equality up to `eps` after scale-and-phase normalisation.
    pub fn is_almost_equal(&self, other: &Cycle, eps: f64) -> bool {
        self.unit_scaled()
            .cross_ratios_vanish(&other.unit_scaled(), |x| is_less_than_epsilon(x, eps))
    }
}

impl std::fmt::Display for Cycle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = |x: Scalar| {
            if x.im == 0.0 {
                format!("{}", x.re)
            } else {
                format!("{}", x)
            }
        };
        let l: Vec<String> = self.l.iter().map(|&x| s(x)).collect();
        write!(f, "({}, [{}], {})", s(self.k), l.join(", "), s(self.m))
    }
}
