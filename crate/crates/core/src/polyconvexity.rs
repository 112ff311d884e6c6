//! Reduced polyconvexity indicator in invariant space.
//!
//! For `φ(I1, I2, J)` the three scalar conditions
//!
//! ```text
//! g1 = φ,11 + 3/(2 I1) φ,1 ≥ 0
//! g2 = φ,22 + 3/(2 I2) φ,2 ≥ 0
//! gJ = φ,JJ             ≥ 0
//! ```
//! are necessary for polyconvexity but not sufficient.

use serde::{Deserialize, Serialize};

use crate::diff::{Dual2, Scalar};
use crate::error::{Error, Result};
use crate::kinematics::InvariantTriplet;
use crate::materials::{invariant_partials, Potential};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndicatorValues {
    pub g1: f64,
    pub g2: f64,
    pub g_j: f64,
}

impl IndicatorValues {
    pub fn satisfied(&self, tol: f64) -> bool {
        self.g1 >= -tol && self.g2 >= -tol && self.g_j >= -tol
    }
}

/// Indicator values from invariant derivatives, generic in the scalar.
pub fn indicator_from<S: Scalar>(d: &Dual2<S>, x: [f64; 3]) -> [S; 3] {
    let g1 = d.hess(0, 0) + d.g[0] * (1.5 / x[0]);
    let g2 = d.hess(1, 1) + d.g[1] * (1.5 / x[1]);
    [g1, g2, d.hess(2, 2)]
}

pub fn indicator<M: Potential + ?Sized>(m: &M, t: &InvariantTriplet) -> Result<IndicatorValues> {
    if !(t.i1 > 0.0) || !(t.i2 > 0.0) {
        return Err(Error::Domain(format!("indicator needs I1, I2 > 0, got {t}")));
    }
    let d = m.eval(t)?;
    let [g1, g2, g_j] = indicator_from(&d, t.as_array());
    Ok(IndicatorValues { g1, g2, g_j })
}

/// `weight · Σ [relu(−g1)² + relu(−g2)²]` for parameters of any scalar type.
pub fn indicator_penalty_with<M: Potential + ?Sized, S: Scalar>(
    m: &M,
    theta: &[S],
    points: &[InvariantTriplet],
    weight: f64,
) -> S {
    let mut acc = S::zero();
    for t in points {
        let x = t.as_array();
        let d = invariant_partials(m, theta, x);
        let [g1, g2, _] = indicator_from(&d, x);
        let (a, b) = ((-g1).relu(), (-g2).relu());
        acc = acc + a * a + b * b;
    }
    acc * weight
}

pub fn indicator_penalty<M: Potential + ?Sized>(
    m: &M,
    points: &[InvariantTriplet],
    weight: f64,
) -> Result<f64> {
    if !(weight >= 0.0) {
        return Err(Error::InvalidArgument(format!("penalty weight must be non-negative, got {weight}")));
    }
    for t in points {
        m.check_domain(&m.params(), t)?;
    }
    Ok(indicator_penalty_with(m, &m.params(), points, weight))
}

/// Fractions of points violating the `I1`, `I2` and `J` inequalities.
pub fn violation_fractions<M: Potential + ?Sized>(
    m: &M,
    points: &[InvariantTriplet],
    tol: f64,
) -> Result<[f64; 3]> {
    let mut count = [0usize; 3];
    for t in points {
        let g = indicator(m, t)?;
        for (c, v) in count.iter_mut().zip([g.g1, g.g2, g.g_j]) {
            if v < -tol {
                *c += 1;
            }
        }
    }
    let n = points.len().max(1) as f64;
    Ok(count.map(|c| c as f64 / n))
}
