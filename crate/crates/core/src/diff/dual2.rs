use std::ops::{Add, Div, Mul, Neg, Sub};

use super::scalar::Scalar;

/// Position of `(i, j)` in the packed upper triangle `[00, 01, 02, 11, 12, 22]`.
#[inline]
pub const fn hess_index(i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    match (a, b) {
        (0, 0) => 0,
        (0, 1) => 1,
        (0, 2) => 2,
        (1, 1) => 3,
        (1, 2) => 4,
        _ => 5,
    }
}

const PAIRS: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

/// Second-order forward-mode number in three fixed directions `(I1, I2, J)`.
///
/// Carries the value, the gradient and the packed symmetric Hessian. The
/// component type is itself a [`Scalar`], so `Dual2<Var>` records parameter
/// gradients of invariant derivatives and `Dual2<Dual1>` propagates one
/// parameter sensitivity through them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual2<T> {
    pub v: T,
    pub g: [T; 3],
    pub h: [T; 6],
}

impl<T: Scalar> Dual2<T> {
    pub fn constant(v: T) -> Self {
        let z = T::zero();
        Self { v, g: [z; 3], h: [z; 6] }
    }

    /// Independent variable along direction `dir`.
    pub fn variable(v: T, dir: usize) -> Self {
        let mut out = Self::constant(v);
        out.g[dir] = T::one();
        out
    }

    /// The three seeded inputs `(x0, x1, x2)`.
    pub fn seed(x: [T; 3]) -> [Self; 3] {
        [Self::variable(x[0], 0), Self::variable(x[1], 1), Self::variable(x[2], 2)]
    }

    pub fn hess(&self, i: usize, j: usize) -> T {
        self.h[hess_index(i, j)]
    }

    /// Apply a unary function given its value and first two derivatives at `self.v`.
    #[inline]
    pub fn chain(self, f0: T, f1: T, f2: T) -> Self {
        let g = [f1 * self.g[0], f1 * self.g[1], f1 * self.g[2]];
        let mut h = [T::zero(); 6];
        for (k, &(i, j)) in PAIRS.iter().enumerate() {
            h[k] = f1 * self.h[k] + f2 * self.g[i] * self.g[j];
        }
        Self { v: f0, g, h }
    }
}

impl Dual2<f64> {
    pub fn is_finite(&self) -> bool {
        self.v.is_finite() && self.g.iter().all(|x| x.is_finite()) && self.h.iter().all(|x| x.is_finite())
    }
}

impl<T: Scalar> Add for Dual2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut out = self;
        out.v = self.v + o.v;
        for i in 0..3 {
            out.g[i] = self.g[i] + o.g[i];
        }
        for k in 0..6 {
            out.h[k] = self.h[k] + o.h[k];
        }
        out
    }
}

impl<T: Scalar> Sub for Dual2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let mut out = self;
        out.v = self.v - o.v;
        for i in 0..3 {
            out.g[i] = self.g[i] - o.g[i];
        }
        for k in 0..6 {
            out.h[k] = self.h[k] - o.h[k];
        }
        out
    }
}

impl<T: Scalar> Mul for Dual2<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (a, b) = (self, o);
        let g = [
            a.v * b.g[0] + b.v * a.g[0],
            a.v * b.g[1] + b.v * a.g[1],
            a.v * b.g[2] + b.v * a.g[2],
        ];
        let mut h = [T::zero(); 6];
        for (k, &(i, j)) in PAIRS.iter().enumerate() {
            h[k] = a.v * b.h[k] + b.v * a.h[k] + a.g[i] * b.g[j] + a.g[j] * b.g[i];
        }
        Self { v: a.v * b.v, g, h }
    }
}

impl<T: Scalar> Div for Dual2<T> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

impl<T: Scalar> Neg for Dual2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self * -1.0
    }
}

impl<T: Scalar> Add<f64> for Dual2<T> {
    type Output = Self;
    fn add(self, o: f64) -> Self {
        let mut out = self;
        out.v = self.v + o;
        out
    }
}

impl<T: Scalar> Sub<f64> for Dual2<T> {
    type Output = Self;
    fn sub(self, o: f64) -> Self {
        let mut out = self;
        out.v = self.v - o;
        out
    }
}

impl<T: Scalar> Mul<f64> for Dual2<T> {
    type Output = Self;
    fn mul(self, o: f64) -> Self {
        let mut out = self;
        out.v = self.v * o;
        for i in 0..3 {
            out.g[i] = self.g[i] * o;
        }
        for k in 0..6 {
            out.h[k] = self.h[k] * o;
        }
        out
    }
}

impl<T: Scalar> Div<f64> for Dual2<T> {
    type Output = Self;
    fn div(self, o: f64) -> Self {
        self * (1.0 / o)
    }
}

impl<T: Scalar> Scalar for Dual2<T> {
    fn from_f64(v: f64) -> Self {
        Self::constant(T::from_f64(v))
    }

    fn value(&self) -> f64 {
        self.v.value()
    }

    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    fn ln(self) -> Self {
        let r = self.v.recip();
        self.chain(self.v.ln(), r, -(r * r))
    }

    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        let f1 = s.recip() * 0.5;
        let f2 = -(f1 / self.v) * 0.5;
        self.chain(s, f1, f2)
    }

    fn powf(self, p: f64) -> Self {
        let f0 = self.v.powf(p);
        let f1 = self.v.powf(p - 1.0) * p;
        let f2 = self.v.powf(p - 2.0) * (p * (p - 1.0));
        self.chain(f0, f1, f2)
    }

    fn softplus(self) -> Self {
        let s = self.v.sigmoid();
        self.chain(self.v.softplus(), s, s - s * s)
    }

    fn sigmoid(self) -> Self {
        let s = self.v.sigmoid();
        let d1 = s - s * s;
        let d2 = d1 - d1 * s * 2.0;
        self.chain(s, d1, d2)
    }

    fn recip(self) -> Self {
        let r = self.v.recip();
        let r2 = r * r;
        self.chain(r, -r2, r2 * r * 2.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hess_index_is_symmetric() {
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(hess_index(i, j), hess_index(j, i));
            }
        }
    }

    #[test]
    fn bilinear_product() {
        let [x, y, _z] = Dual2::seed([2.0, 3.0, 1.0]);
        let f = x * y;
        assert_eq!(f.v, 6.0);
        assert_eq!(f.g, [3.0, 2.0, 0.0]);
        assert_eq!(f.hess(0, 1), 1.0);
        for &(i, j) in &[(0, 0), (1, 1), (2, 2), (0, 2), (1, 2)] {
            assert_eq!(f.hess(i, j), 0.0);
        }
    }

    #[test]
    fn softplus_at_origin() {
        let [x, _, _] = Dual2::seed([0.0, 0.0, 0.0]);
        let f = x.softplus();
        assert!((f.v - 2f64.ln()).abs() < 1e-15);
        assert!((f.g[0] - 0.5).abs() < 1e-15);
        assert!((f.hess(0, 0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn quotient_and_log() {
        let [x, y, _] = Dual2::seed([2.0, 4.0, 1.0]);
        let f = (x / y).ln();
        // ln x - ln y
        assert!((f.g[0] - 0.5).abs() < 1e-15);
        assert!((f.g[1] + 0.25).abs() < 1e-15);
        assert!((f.hess(0, 0) + 0.25).abs() < 1e-15);
        assert!((f.hess(1, 1) - 1.0 / 16.0).abs() < 1e-15);
        assert!(f.hess(0, 1).abs() < 1e-15);
    }
}
