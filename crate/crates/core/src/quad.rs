//! Gauss–Legendre quadrature with adaptive bisection.

use crate::{Error, Result, C64};
use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

/// Values that can be integrated: a vector space over the reals with a norm.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn norm(&self) -> f64;
    fn is_finite(&self) -> bool;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn norm(&self) -> f64 {
        self.abs()
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl QuadValue for C64 {
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn norm(&self) -> f64 {
        C64::norm(*self)
    }
    fn is_finite(&self) -> bool {
        C64::is_finite(*self)
    }
}

/// Fixed-size bundle of complex integrands sharing one adaptive mesh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bundle<const K: usize>(pub [C64; K]);

impl<const K: usize> Add for Bundle<K> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Bundle(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl<const K: usize> Sub for Bundle<K> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Bundle(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }
}

impl<const K: usize> Mul<f64> for Bundle<K> {
    type Output = Self;
    fn mul(self, a: f64) -> Self {
        Bundle(self.0.map(|v| v * a))
    }
}

impl<const K: usize> QuadValue for Bundle<K> {
    fn zero() -> Self {
        Bundle([C64::new(0.0, 0.0); K])
    }
    fn norm(&self) -> f64 {
        self.0.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
    fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

/// Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes and weights of the `n`-point rule by Newton iteration on P_n.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for j in 2..=n {
                    let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Shared 20-point rule used by the adaptive driver.
    pub fn standard() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(20))
    }

    /// Integral over [a, b] and the matching integral of the norm.
    pub fn integrate<T: QuadValue, F: FnMut(f64) -> T>(&self, f: &mut F, a: f64, b: f64) -> (T, f64) {
        let h = 0.5 * (b - a);
        let c = 0.5 * (a + b);
        let mut acc = T::zero();
        let mut l1 = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let v = f(c + h * x);
            acc = acc + v * (w * h);
            l1 += v.norm() * w * h.abs();
        }
        (acc, l1)
    }
}

/// Tolerances for [`adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct Tol {
    pub rel: f64,
    pub abs: f64,
    /// Panel-relative floor matching the evaluation noise of the integrand.
    pub local: f64,
    pub max_depth: u32,
}

impl Default for Tol {
    fn default() -> Self {
        Self { rel: 1e-13, abs: 1e-300, local: 1e-14, max_depth: 48 }
    }
}

/// Adaptive Gauss–Legendre integration of `f` over [a, b].
///
/// A panel is accepted when the 20-point rule on it agrees with the sum over its
/// halves to within its share of `rel` times the L1 scale of the integrand, or
/// to within `local` times the panel's own L1 norm.
pub fn adaptive<T: QuadValue, F: FnMut(f64) -> T>(mut f: F, a: f64, b: f64, tol: Tol) -> Result<T> {
    if a == b {
        return Ok(T::zero());
    }
    let gl = GaussLegendre::standard();
    let len = (b - a).abs();
    const INIT: usize = 4;
    let mut panels = Vec::with_capacity(64);
    let mut scale = 0.0;
    for p in 0..INIT {
        let lo = a + (b - a) * p as f64 / INIT as f64;
        let hi = a + (b - a) * (p + 1) as f64 / INIT as f64;
        let (v, l1) = gl.integrate(&mut f, lo, hi);
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("integrand on [{lo}, {hi}]")));
        }
        scale += l1;
        panels.push((lo, hi, v, 0u32));
    }
    panels.reverse();
    let mut total = T::zero();
    while let Some((lo, hi, est, depth)) = panels.pop() {
        let mid = 0.5 * (lo + hi);
        let (l, l1l) = gl.integrate(&mut f, lo, mid);
        let (r, l1r) = gl.integrate(&mut f, mid, hi);
        let lr = l + r;
        if !lr.is_finite() {
            return Err(Error::NonFinite(format!("integrand on [{lo}, {hi}]")));
        }
        scale = f64::max(scale, l1l + l1r);
        let share = ((hi - lo).abs() / len).max(1e-6);
        let allowed = f64::max(tol.abs, tol.rel * scale * share).max(tol.local * (l1l + l1r));
        if (lr - est).norm() <= allowed {
            total = total + lr;
        } else if depth >= tol.max_depth {
            return Err(Error::Quadrature(format!("panel [{lo:e}, {hi:e}] unresolved at depth {depth}")));
        } else {
            panels.push((mid, hi, r, depth + 1));
            panels.push((lo, mid, l, depth + 1));
        }
    }
    Ok(total)
}
