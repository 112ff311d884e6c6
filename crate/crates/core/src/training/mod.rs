//! Pre-training of gated network potentials on invariant/stress data.

mod adam;
mod gates;
mod pretrain;
mod schedule;

pub use adam::Adam;
pub use gates::{
    deterministic_gate, l0_complexity, round_gate, stochastic_gate, GateParams, BETA, GAMMA, ROUND_THRESHOLD,
    ZETA,
};
pub use pretrain::{pretrain, write_telemetry, EpochRecord, PretrainConfig, PretrainOutcome, TELEMETRY_HEADER};
pub use schedule::TrainSchedule;

use serde::{Deserialize, Serialize};

use crate::diff::{Dual2, Scalar};
use crate::error::{Error, Result};
use crate::kinematics::{reconstruct_diagonal_c, InvariantTriplet};
use crate::materials::{invariant_partials, Potential};
use crate::polyconvexity::indicator_from;

/// Threshold on the mean absolute invariant derivative below which an input
/// channel counts as unused.
pub const INPUT_TAU: f64 = 1e-3;

/// One training point: invariants, the diagonal `C` they reconstruct to and
/// the matching diagonal second Piola–Kirchhoff stress.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledSample {
    pub t: InvariantTriplet,
    pub c_diag: [f64; 3],
    pub s_diag: [f64; 3],
    /// Source deformation gradient (row-major), kept for bookkeeping.
    pub f: Option<[f64; 9]>,
}

impl LabeledSample {
    pub fn new(t: InvariantTriplet, s_diag: [f64; 3]) -> Result<Self> {
        let c_diag = reconstruct_diagonal_c(&t)?;
        Ok(Self { t, c_diag, s_diag, f: None })
    }
}

/// Coefficient of determination per stress component, averaged.
pub fn r2_score(pred: &[[f64; 3]], truth: &[[f64; 3]]) -> f64 {
    assert_eq!(pred.len(), truth.len());
    let n = truth.len() as f64;
    let mut total = 0.0;
    for k in 0..3 {
        let mean = truth.iter().map(|s| s[k]).sum::<f64>() / n;
        let ss_tot: f64 = truth.iter().map(|s| (s[k] - mean).powi(2)).sum();
        let ss_res: f64 = pred.iter().zip(truth).map(|(p, s)| (p[k] - s[k]).powi(2)).sum();
        total += if ss_tot > 0.0 {
            1.0 - ss_res / ss_tot
        } else if ss_res == 0.0 {
            1.0
        } else {
            0.0
        };
    }
    total / 3.0
}

/// Stress constant `n = 2φ₁ + 4φ₂ + φ_J` at the reference state.
pub(crate) fn reference_constant<M: Potential + ?Sized, S: Scalar>(m: &M, theta: &[S]) -> S {
    let d = invariant_partials(m, theta, [3.0, 3.0, 1.0]);
    d.g[0] * 2.0 + d.g[1] * 4.0 + d.g[2]
}

/// Invariant partials of the normalized potential `φ̂` at `x`.
pub(crate) fn normalized_partials<M: Potential + ?Sized, S: Scalar>(
    m: &M,
    theta: &[S],
    x: [f64; 3],
    n: S,
) -> Dual2<S> {
    let mut d = invariant_partials(m, theta, x);
    d.g[2] = d.g[2] - n;
    d
}

/// Diagonal stress from normalized partials at `C = diag(c)`.
pub(crate) fn stress_from_partials<S: Scalar>(d: &Dual2<S>, x: [f64; 3], c: [f64; 3]) -> [S; 3] {
    c.map(|ck| d.g[0] * 2.0 + d.g[1] * (2.0 * (x[0] - ck)) + d.g[2] * (x[2] / ck))
}

/// Per-batch loss terms, generic in the parameter scalar.
#[derive(Clone, Copy, Debug)]
pub struct BatchTerms<S> {
    /// Mean squared diagonal stress error.
    pub stress: S,
    /// `Σ_k relu(τ − mean|∂φ̂/∂x_k|)²`.
    pub input: S,
    /// `Σ_points relu(−g1)² + relu(−g2)²`.
    pub indicator: S,
}

/// Evaluate the data terms of the normalized potential over `batch`.
pub fn batch_terms<M: Potential + ?Sized, S: Scalar>(
    m: &M,
    theta: &[S],
    batch: &[&LabeledSample],
    with_indicator: bool,
) -> BatchTerms<S> {
    let n = reference_constant(m, theta);
    let mut se = S::zero();
    let mut mean_abs = [S::zero(); 3];
    let mut ind = S::zero();
    for s in batch {
        let x = s.t.as_array();
        let d = normalized_partials(m, theta, x, n);
        let pred = stress_from_partials(&d, x, s.c_diag);
        for k in 0..3 {
            let r = pred[k] - s.s_diag[k];
            se = se + r * r;
            mean_abs[k] = mean_abs[k] + d.g[k].abs();
        }
        if with_indicator {
            let [g1, g2, _] = indicator_from(&d, x);
            let (a, b) = ((-g1).relu(), (-g2).relu());
            ind = ind + a * a + b * b;
        }
    }
    let nb = batch.len().max(1) as f64;
    let mut input = S::zero();
    for k in 0..3 {
        let h = (-(mean_abs[k] / nb) + INPUT_TAU).relu();
        input = input + h * h;
    }
    BatchTerms { stress: se / (3.0 * nb), input, indicator: ind }
}

/// Input-dependency penalty `Σ_k relu(τ − mean|∂φ̂/∂x_k|)²` of `m` (taken as
/// the potential to be penalized, so pass a normalized model for `φ̂`).
pub fn input_dependency_penalty<M: Potential + ?Sized>(m: &M, data: &[InvariantTriplet]) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::InvalidArgument("input-dependency penalty needs data".into()));
    }
    let mut mean_abs = [0.0; 3];
    for t in data {
        let d = m.eval(t)?;
        for k in 0..3 {
            mean_abs[k] += d.g[k].abs();
        }
    }
    Ok(mean_abs
        .iter()
        .map(|s| (INPUT_TAU - s / data.len() as f64).max(0.0).powi(2))
        .sum())
}

/// Diagonal stress predictions of the normalized potential for every sample.
pub fn predict_stress<M: Potential + ?Sized>(m: &M, theta: &[f64], data: &[LabeledSample]) -> Vec<[f64; 3]> {
    let n = reference_constant(m, theta);
    data.iter()
        .map(|s| {
            let x = s.t.as_array();
            stress_from_partials(&normalized_partials(m, theta, x, n), x, s.c_diag)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::{second_pk_stress, GentGent};

    struct Linear;
    impl Potential for Linear {
        fn name(&self) -> String {
            "I1+I2+J".into()
        }
        fn params(&self) -> Vec<f64> {
            vec![]
        }
        fn energy<S: Scalar>(&self, _: &[S], x: [S; 3]) -> S {
            x[0] + x[1] + x[2]
        }
    }

    #[test]
    fn linear_potential_has_no_input_penalty() {
        let pts = [InvariantTriplet::REFERENCE, InvariantTriplet::new(4.0, 5.0, 1.2)];
        assert_eq!(input_dependency_penalty(&Linear, &pts).unwrap(), 0.0);
        let neo = crate::materials::NeoHookean::default();
        assert!(input_dependency_penalty(&neo, &pts).unwrap() > 0.0);
    }

    #[test]
    fn r2_of_exact_predictions_is_one() {
        let y = vec![[1.0, 2.0, 3.0], [0.0, -1.0, 2.0], [0.5, 0.1, 0.2]];
        assert_eq!(r2_score(&y, &y), 1.0);
        let zero = vec![[0.0; 3]; 3];
        assert!(r2_score(&zero, &y) <= 0.0);
    }

    #[test]
    fn predictions_match_direct_stress() {
        let m = GentGent::default();
        let c = [0.8, 1.1, 1.3];
        let s = second_pk_stress(&m, c).unwrap();
        let t = InvariantTriplet::from_array(crate::kinematics::triplet_of_diagonal(c));
        let sample = LabeledSample::new(t, s).unwrap();
        let p = predict_stress(&m, &m.params(), std::slice::from_ref(&sample))[0];
        let terms = batch_terms(&m, &m.params(), &[&sample], true);
        assert!(terms.stress < 1e-20);
        for k in 0..3 {
            assert!((p[k] - sample.s_diag[k]).abs() < 1e-10);
        }
    }
}
