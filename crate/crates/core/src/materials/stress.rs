use nalgebra::Matrix3;

use super::Potential;
use crate::diff::{lift, Dual2, Scalar};
use crate::error::{Error, Result};
use crate::kinematics::{invariants_of, triplet_of_diagonal, DefGrad, InvariantTriplet};

/// Value and invariant derivatives of `m` at `x` for parameters of any scalar
/// type (constants for plain evaluation, tape variables for training).
pub fn invariant_partials<M: Potential + ?Sized, S: Scalar>(m: &M, theta: &[S], x: [f64; 3]) -> Dual2<S> {
    let th = lift(theta);
    m.energy(&th, Dual2::seed(x.map(S::from_f64)))
}

/// Diagonal second Piola–Kirchhoff stress for a diagonal `C`, generic in the
/// parameter scalar: `S_kk = 2φ₁ + 2φ₂(I1 − C_kk) + J φ_J / C_kk`.
pub fn diag_stress_generic<M: Potential + ?Sized, S: Scalar>(m: &M, theta: &[S], c_diag: [f64; 3]) -> [S; 3] {
    let x = triplet_of_diagonal(c_diag);
    let d = invariant_partials(m, theta, x);
    let [p1, p2, pj] = d.g;
    c_diag.map(|ck| p1 * 2.0 + p2 * (2.0 * (x[0] - ck)) + pj * (x[2] / ck))
}

/// Diagonal second Piola–Kirchhoff stress of `m` (own parameters) at `C = diag(c_diag)`.
pub fn second_pk_stress<M: Potential + ?Sized>(m: &M, c_diag: [f64; 3]) -> Result<[f64; 3]> {
    if c_diag.iter().any(|&c| !(c > 0.0)) {
        return Err(Error::InvalidArgument(format!("diagonal C must be positive, got {c_diag:?}")));
    }
    let t = InvariantTriplet::from_array(triplet_of_diagonal(c_diag));
    let theta = m.params();
    let d = m.eval_with(&theta, &t)?;
    let [p1, p2, pj] = d.g;
    Ok(c_diag.map(|ck| 2.0 * p1 + 2.0 * p2 * (t.i1 - ck) + t.j * pj / ck))
}

/// Full second Piola–Kirchhoff stress `S = 2φ₁ I + 2φ₂ (I1 I − C) + J φ_J C⁻¹`.
pub fn second_pk_full<M: Potential + ?Sized>(m: &M, f: &DefGrad) -> Result<Matrix3<f64>> {
    let t = invariants_of(f)?;
    let d = m.eval(&t)?;
    let c = f.right_cauchy_green();
    let cinv = c
        .try_inverse()
        .ok_or(Error::NonPositiveDeterminant(f.det()))?;
    let id = Matrix3::identity();
    let [p1, p2, pj] = d.g;
    Ok(id * (2.0 * p1) + (id * t.i1 - c) * (2.0 * p2) + cinv * (t.j * pj))
}

/// First Piola–Kirchhoff stress `P = F S`.
pub fn first_pk_stress<M: Potential + ?Sized>(m: &M, f: &DefGrad) -> Result<Matrix3<f64>> {
    Ok(f.0 * second_pk_full(m, f)?)
}
