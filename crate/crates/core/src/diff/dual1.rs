use std::ops::{Add, Div, Mul, Neg, Sub};

use super::scalar::{sigmoid_f64, softplus_f64, Scalar};

/// First-order forward-mode number carrying one directional derivative.
///
/// Used for parameter sensitivities: seeding one parameter at a time and
/// nesting inside [`Dual2`](super::Dual2) gives `d(∂φ/∂I_k)/dθ` exactly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual1 {
    pub v: f64,
    pub d: f64,
}

impl Dual1 {
    pub fn new(v: f64, d: f64) -> Self {
        Self { v, d }
    }

    pub fn variable(v: f64) -> Self {
        Self { v, d: 1.0 }
    }

    pub fn constant(v: f64) -> Self {
        Self { v, d: 0.0 }
    }

    #[inline]
    fn chain(self, f: f64, df: f64) -> Self {
        Self { v: f, d: df * self.d }
    }
}

impl Add for Dual1 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.v + o.v, self.d + o.d)
    }
}

impl Sub for Dual1 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.v - o.v, self.d - o.d)
    }
}

impl Mul for Dual1 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(self.v * o.v, self.d * o.v + self.v * o.d)
    }
}

impl Div for Dual1 {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let inv = 1.0 / o.v;
        Self::new(self.v * inv, (self.d - self.v * inv * o.d) * inv)
    }
}

impl Neg for Dual1 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.v, -self.d)
    }
}

impl Add<f64> for Dual1 {
    type Output = Self;
    fn add(self, o: f64) -> Self {
        Self::new(self.v + o, self.d)
    }
}

impl Sub<f64> for Dual1 {
    type Output = Self;
    fn sub(self, o: f64) -> Self {
        Self::new(self.v - o, self.d)
    }
}

impl Mul<f64> for Dual1 {
    type Output = Self;
    fn mul(self, o: f64) -> Self {
        Self::new(self.v * o, self.d * o)
    }
}

impl Div<f64> for Dual1 {
    type Output = Self;
    fn div(self, o: f64) -> Self {
        Self::new(self.v / o, self.d / o)
    }
}

impl Scalar for Dual1 {
    fn from_f64(v: f64) -> Self {
        Self::constant(v)
    }
    fn value(&self) -> f64 {
        self.v
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e)
    }
    fn ln(self) -> Self {
        self.chain(self.v.ln(), 1.0 / self.v)
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.chain(s, 0.5 / s)
    }
    fn powf(self, p: f64) -> Self {
        self.chain(self.v.powf(p), p * self.v.powf(p - 1.0))
    }
    fn softplus(self) -> Self {
        self.chain(softplus_f64(self.v), sigmoid_f64(self.v))
    }
    fn sigmoid(self) -> Self {
        let s = sigmoid_f64(self.v);
        self.chain(s, s * (1.0 - s))
    }
}
