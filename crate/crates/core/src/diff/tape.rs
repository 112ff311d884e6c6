use std::cell::{Cell, RefCell};
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::scalar::{sigmoid_f64, softplus_f64, Scalar};
use crate::error::{Error, Result};

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug)]
struct Node {
    parents: [u32; 2],
    partials: [f64; 2],
}

/// Append-only Wengert list for a single reverse sweep.
///
/// Local partials are frozen when a node is recorded. After
/// [`Tape::gradient`] has run, the tape refuses a second sweep.
#[derive(Debug, Default)]
pub struct Tape {
    nodes: RefCell<Vec<Node>>,
    consumed: Cell<bool>,
}

/// Scalar recorded on a [`Tape`]. Values built only from constants carry no
/// tape and never allocate nodes.
#[derive(Clone, Copy, Debug)]
pub struct Var<'t> {
    tape: Option<&'t Tape>,
    idx: u32,
    val: f64,
}

impl Tape {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        Self { nodes: RefCell::new(Vec::with_capacity(n)), consumed: Cell::new(false) }
    }

    /// Record an independent leaf.
    pub fn var(&self, val: f64) -> Var<'_> {
        let idx = self.push(Node { parents: [NONE, NONE], partials: [0.0, 0.0] });
        Var { tape: Some(self), idx, val }
    }

    pub fn vars(&self, vals: &[f64]) -> Vec<Var<'_>> {
        vals.iter().map(|&v| self.var(v)).collect()
    }

    pub fn len(&self) -> usize {
        self.nodes.borrow().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_consumed(&self) -> bool {
        self.consumed.get()
    }

    fn push(&self, node: Node) -> u32 {
        let mut nodes = self.nodes.borrow_mut();
        let idx = nodes.len();
        assert!(idx < NONE as usize, "tape overflow");
        nodes.push(node);
        idx as u32
    }

    /// Backward sweep seeded with `d loss / d loss = 1`; returns the adjoint of
    /// every leaf in `wrt`. Consumes the tape.
    pub fn gradient(&self, loss: Var<'_>, wrt: &[Var<'_>]) -> Result<Vec<f64>> {
        if self.consumed.replace(true) {
            return Err(Error::TapeConsumed);
        }
        let nodes = self.nodes.borrow();
        let mut adj = vec![0.0; nodes.len()];
        if loss.tape.is_some() {
            adj[loss.idx as usize] = 1.0;
            for i in (0..=loss.idx as usize).rev() {
                let a = adj[i];
                if a == 0.0 {
                    continue;
                }
                let node = nodes[i];
                for k in 0..2 {
                    let p = node.parents[k];
                    if p != NONE {
                        adj[p as usize] += a * node.partials[k];
                    }
                }
            }
        }
        Ok(wrt
            .iter()
            .map(|v| if v.tape.is_some() { adj[v.idx as usize] } else { 0.0 })
            .collect())
    }
}

impl<'t> Var<'t> {
    pub fn constant(val: f64) -> Self {
        Self { tape: None, idx: NONE, val }
    }

    pub fn is_constant(&self) -> bool {
        self.tape.is_none()
    }

    #[inline]
    fn unary(self, val: f64, partial: f64) -> Self {
        match self.tape {
            None => Self::constant(val),
            Some(t) => {
                let idx = t.push(Node { parents: [self.idx, NONE], partials: [partial, 0.0] });
                Self { tape: Some(t), idx, val }
            }
        }
    }

    #[inline]
    fn binary(a: Self, b: Self, val: f64, pa: f64, pb: f64) -> Self {
        match (a.tape, b.tape) {
            (None, None) => Self::constant(val),
            (Some(_), None) => a.unary(val, pa),
            (None, Some(_)) => b.unary(val, pb),
            (Some(t), Some(tb)) => {
                debug_assert!(std::ptr::eq(t, tb), "mixing vars from different tapes");
                let idx = t.push(Node { parents: [a.idx, b.idx], partials: [pa, pb] });
                Self { tape: Some(t), idx, val }
            }
        }
    }

    fn is_const_value(&self, v: f64) -> bool {
        self.tape.is_none() && self.val == v
    }
}

impl<'t> Add for Var<'t> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        if o.is_const_value(0.0) {
            return self;
        }
        if self.is_const_value(0.0) {
            return o;
        }
        Var::binary(self, o, self.val + o.val, 1.0, 1.0)
    }
}

impl<'t> Sub for Var<'t> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        if o.is_const_value(0.0) {
            return self;
        }
        Var::binary(self, o, self.val - o.val, 1.0, -1.0)
    }
}

impl<'t> Mul for Var<'t> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        if self.is_const_value(0.0) || o.is_const_value(0.0) {
            return Var::constant(0.0);
        }
        if self.is_const_value(1.0) {
            return o;
        }
        if o.is_const_value(1.0) {
            return self;
        }
        Var::binary(self, o, self.val * o.val, o.val, self.val)
    }
}

impl<'t> Div for Var<'t> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        if self.is_const_value(0.0) {
            return Var::constant(0.0);
        }
        let inv = 1.0 / o.val;
        let q = self.val * inv;
        Var::binary(self, o, q, inv, -q * inv)
    }
}

impl<'t> Neg for Var<'t> {
    type Output = Self;
    fn neg(self) -> Self {
        self.unary(-self.val, -1.0)
    }
}

impl<'t> Add<f64> for Var<'t> {
    type Output = Self;
    fn add(self, o: f64) -> Self {
        if o == 0.0 {
            return self;
        }
        self.unary(self.val + o, 1.0)
    }
}

impl<'t> Sub<f64> for Var<'t> {
    type Output = Self;
    fn sub(self, o: f64) -> Self {
        if o == 0.0 {
            return self;
        }
        self.unary(self.val - o, 1.0)
    }
}

impl<'t> Mul<f64> for Var<'t> {
    type Output = Self;
    fn mul(self, o: f64) -> Self {
        if o == 1.0 {
            return self;
        }
        if o == 0.0 {
            return Var::constant(0.0);
        }
        self.unary(self.val * o, o)
    }
}

impl<'t> Div<f64> for Var<'t> {
    type Output = Self;
    fn div(self, o: f64) -> Self {
        self * (1.0 / o)
    }
}

impl<'t> Scalar for Var<'t> {
    fn from_f64(v: f64) -> Self {
        Var::constant(v)
    }
    fn value(&self) -> f64 {
        self.val
    }
    fn exp(self) -> Self {
        let e = self.val.exp();
        self.unary(e, e)
    }
    fn ln(self) -> Self {
        self.unary(self.val.ln(), 1.0 / self.val)
    }
    fn sqrt(self) -> Self {
        let s = self.val.sqrt();
        self.unary(s, 0.5 / s)
    }
    fn powf(self, p: f64) -> Self {
        self.unary(self.val.powf(p), p * self.val.powf(p - 1.0))
    }
    fn softplus(self) -> Self {
        self.unary(softplus_f64(self.val), sigmoid_f64(self.val))
    }
    fn sigmoid(self) -> Self {
        let s = sigmoid_f64(self.val);
        self.unary(s, s * (1.0 - s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_gradient() {
        let tape = Tape::new();
        let th = tape.vars(&[1.0, -2.0]);
        let loss = th[0] * th[0] + th[1] * th[1];
        assert_eq!(tape.gradient(loss, &th).unwrap(), vec![2.0, -4.0]);
    }

    #[test]
    fn second_sweep_is_rejected() {
        let tape = Tape::new();
        let x = tape.var(3.0);
        let loss = x * x;
        tape.gradient(loss, &[x]).unwrap();
        assert!(matches!(tape.gradient(loss, &[x]), Err(Error::TapeConsumed)));
    }

    #[test]
    fn constants_do_not_record() {
        let tape = Tape::new();
        let x = tape.var(2.0);
        let c = Var::constant(0.0);
        let before = tape.len();
        let y = x * c + c * 5.0 + x * 1.0;
        assert_eq!(tape.len(), before);
        assert_eq!(y.value(), 2.0);
    }

    #[test]
    fn constant_loss_has_zero_gradient() {
        let tape = Tape::new();
        let x = tape.var(2.0);
        let g = tape.gradient(Var::constant(4.0), &[x]).unwrap();
        assert_eq!(g, vec![0.0]);
    }
}
